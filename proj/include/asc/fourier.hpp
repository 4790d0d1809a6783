#pragma once

#include <complex>
#include <vector>

#include "asc/volume.hpp"

namespace asc {

// Full complex 3D spectrum, DC at index 0 on every axis, layout matches Volume.
struct Spectrum {
    Dims dims{0, 0, 0};
    std::vector<std::complex<double>> data;

    Spectrum() = default;
    explicit Spectrum(Dims d) : dims(d), data(static_cast<std::size_t>(voxel_count(d))) {}
    std::int64_t size() const { return voxel_count(dims); }
};

// Boolean low-frequency box mask in wrapped coordinates: bin u is selected
// iff |center(u_k)| <= half_widths[k] on all axes, center(u) = u for
// u <= size/2 else u - size. Symmetric under frequency negation.
struct FreqMask {
    Dims dims{0, 0, 0};
    std::array<int, 3> half_widths{0, 0, 0};
    std::vector<std::uint8_t> data;

    std::int64_t cardinality() const {
        std::int64_t n = 0;
        for (auto b : data) n += b;
        return n;
    }
};

struct IfftResult {
    Volume real;
    double max_abs_imag = 0.0;
};

Spectrum fft3(const Volume& v);
IfftResult ifft3(const Spectrum& s);

// Amplitude/phase split. Phase of exactly-zero bins is 0.
void decompose(const Spectrum& s, std::vector<double>& amplitude, std::vector<double>& phase);
Spectrum compose(const std::vector<double>& amplitude, const std::vector<double>& phase, Dims dims);

// Half widths floor(beta * size_k); beta must lie in [0, 1).
FreqMask low_freq_mask(Dims dims, double beta);

// Eq-style appearance transfer: keep src phase everywhere, take tgt amplitude
// inside the low-frequency mask. Output is real up to 1e-5 residual imaginary
// part, which is checked.
Volume amplitude_swap(const Volume& src, const Volume& tgt, double beta);

// Brute-force O(n^2)-per-axis DFT used as a test oracle; exported so the
// acceptance suite and unit tests share one definition.
Spectrum dft3_reference(const Volume& v);

}  // namespace asc
