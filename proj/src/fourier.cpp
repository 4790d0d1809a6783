#include "asc/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace asc {

namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int smallest_prime_factor(int n) {
    if (n % 2 == 0) return 2;
    for (int p = 3; p * p <= n; p += 2)
        if (n % p == 0) return p;
    return n;
}

// Direct DFT of one line, used for prime lengths.
void dft_line(cd* x, cd* scratch, int n, double sign) {
    for (int k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            const double ang = sign * kTwoPi * (static_cast<std::int64_t>(k) * j % n) / n;
            acc += x[j] * cd(std::cos(ang), std::sin(ang));
        }
        scratch[k] = acc;
    }
    for (int k = 0; k < n; ++k) x[k] = scratch[k];
}

// Recursive mixed-radix Cooley-Tukey, decimation in time by the smallest
// prime factor. `scratch` must hold n entries. sign = -1 forward, +1 inverse
// (unscaled).
void fft_line(cd* x, cd* scratch, int n, double sign) {
    if (n == 1) return;
    const int p = smallest_prime_factor(n);
    if (p == n) {
        dft_line(x, scratch, n, sign);
        return;
    }
    const int m = n / p;
    for (int r = 0; r < p; ++r)
        for (int q = 0; q < m; ++q) scratch[r * m + q] = x[q * p + r];
    for (int r = 0; r < p; ++r) fft_line(scratch + r * m, x + r * m, m, sign);
    // X[k] = sum_r W_n^{r k} F_r[k mod m]
    for (int k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        for (int r = 0; r < p; ++r) {
            const double ang = sign * kTwoPi * (static_cast<std::int64_t>(r) * k % n) / n;
            acc += cd(std::cos(ang), std::sin(ang)) * scratch[r * m + k % m];
        }
        x[k] = acc;
    }
}

// Transform every line along one axis of a (D,H,W) grid stored W-fastest.
void transform_axis(std::vector<cd>& data, const Dims& dims, int axis, double sign) {
    const int D = dims[0], H = dims[1], W = dims[2];
    const int n = dims[axis];
    std::vector<cd> line(n), scratch(n);

    const auto idx = [&](int d, int h, int w) {
        return (static_cast<std::size_t>(d) * H + h) * W + w;
    };

    if (axis == 2) {
        for (int d = 0; d < D; ++d)
            for (int h = 0; h < H; ++h) {
                cd* base = data.data() + idx(d, h, 0);
                fft_line(base, scratch.data(), n, sign);
            }
    } else if (axis == 1) {
        for (int d = 0; d < D; ++d)
            for (int w = 0; w < W; ++w) {
                for (int h = 0; h < H; ++h) line[h] = data[idx(d, h, w)];
                fft_line(line.data(), scratch.data(), n, sign);
                for (int h = 0; h < H; ++h) data[idx(d, h, w)] = line[h];
            }
    } else {
        for (int h = 0; h < H; ++h)
            for (int w = 0; w < W; ++w) {
                for (int d = 0; d < D; ++d) line[d] = data[idx(d, h, w)];
                fft_line(line.data(), scratch.data(), n, sign);
                for (int d = 0; d < D; ++d) data[idx(d, h, w)] = line[d];
            }
    }
}

}  // namespace

Spectrum fft3(const Volume& v) {
    Spectrum s(v.dims);
    const std::int64_t n = v.size();
    for (std::int64_t i = 0; i < n; ++i) s.data[i] = cd(v.data[i], 0.0);
    for (int axis = 0; axis < 3; ++axis) transform_axis(s.data, s.dims, axis, -1.0);
    return s;
}

IfftResult ifft3(const Spectrum& s) {
    std::vector<cd> data = s.data;
    for (int axis = 0; axis < 3; ++axis) transform_axis(data, s.dims, axis, +1.0);
    const double scale = 1.0 / static_cast<double>(voxel_count(s.dims));

    IfftResult out;
    out.real = Volume(s.dims);
    const std::int64_t n = voxel_count(s.dims);
    for (std::int64_t i = 0; i < n; ++i) {
        out.real.data[i] = static_cast<float>(data[i].real() * scale);
        out.max_abs_imag = std::max(out.max_abs_imag, std::abs(data[i].imag() * scale));
    }
    return out;
}

void decompose(const Spectrum& s, std::vector<double>& amplitude, std::vector<double>& phase) {
    const std::size_t n = s.data.size();
    amplitude.resize(n);
    phase.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cd z = s.data[i];
        amplitude[i] = std::abs(z);
        phase[i] = (z == cd(0.0, 0.0)) ? 0.0 : std::arg(z);
    }
}

Spectrum compose(const std::vector<double>& amplitude, const std::vector<double>& phase, Dims dims) {
    const std::size_t n = static_cast<std::size_t>(voxel_count(dims));
    if (amplitude.size() != n || phase.size() != n)
        throw ShapeError("compose: amplitude/phase size does not match dims");
    Spectrum s(dims);
    for (std::size_t i = 0; i < n; ++i)
        s.data[i] = std::polar(amplitude[i], phase[i]);
    return s;
}

FreqMask low_freq_mask(Dims dims, double beta) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("low_freq_mask: beta must lie in [0, 1)");
    FreqMask m;
    m.dims = dims;
    for (int k = 0; k < 3; ++k)
        m.half_widths[k] = static_cast<int>(std::floor(beta * dims[k]));
    m.data.assign(static_cast<std::size_t>(voxel_count(dims)), 0);

    const auto centered = [](int u, int size) { return u <= size / 2 ? u : u - size; };
    std::size_t i = 0;
    for (int d = 0; d < dims[0]; ++d) {
        const bool in_d = std::abs(centered(d, dims[0])) <= m.half_widths[0];
        for (int h = 0; h < dims[1]; ++h) {
            const bool in_h = std::abs(centered(h, dims[1])) <= m.half_widths[1];
            for (int w = 0; w < dims[2]; ++w, ++i) {
                const bool in_w = std::abs(centered(w, dims[2])) <= m.half_widths[2];
                m.data[i] = (in_d && in_h && in_w) ? 1 : 0;
            }
        }
    }
    return m;
}

Volume amplitude_swap(const Volume& src, const Volume& tgt, double beta) {
    if (src.dims != tgt.dims) throw ShapeError("amplitude_swap: dims mismatch");
    const Spectrum fs = fft3(src);
    const Spectrum ft = fft3(tgt);
    const FreqMask mask = low_freq_mask(src.dims, beta);

    std::vector<double> amp_s, phase_s, amp_t, phase_t;
    decompose(fs, amp_s, phase_s);
    decompose(ft, amp_t, phase_t);

    const std::size_t n = amp_s.size();
    for (std::size_t i = 0; i < n; ++i)
        if (mask.data[i]) amp_s[i] = amp_t[i];

    const IfftResult r = ifft3(compose(amp_s, phase_s, src.dims));
    if (r.max_abs_imag >= 1e-5)
        throw std::runtime_error("amplitude_swap: residual imaginary part " +
                                 std::to_string(r.max_abs_imag) + " exceeds 1e-5");
    return r.real;
}

Spectrum dft3_reference(const Volume& v) {
    const int D = v.dims[0], H = v.dims[1], W = v.dims[2];
    Spectrum s(v.dims);
    std::size_t o = 0;
    for (int ud = 0; ud < D; ++ud)
        for (int uh = 0; uh < H; ++uh)
            for (int uw = 0; uw < W; ++uw, ++o) {
                cd acc(0.0, 0.0);
                std::size_t i = 0;
                for (int d = 0; d < D; ++d)
                    for (int h = 0; h < H; ++h)
                        for (int w = 0; w < W; ++w, ++i) {
                            const double ang =
                                -kTwoPi * (static_cast<double>(ud) * d / D +
                                           static_cast<double>(uh) * h / H +
                                           static_cast<double>(uw) * w / W);
                            acc += static_cast<double>(v.data[i]) *
                                   cd(std::cos(ang), std::sin(ang));
                        }
                s.data[o] = acc;
            }
    return s;
}

}  // namespace asc
