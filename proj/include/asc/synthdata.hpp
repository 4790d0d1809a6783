#pragma once

#include <cstdint>
#include <vector>

#include "asc/metrics.hpp"
#include "asc/volume.hpp"

namespace asc {

// Nested-ellipsoid phantom family. Source volumes carry per-class constant
// intensities; target volumes get a monotone nonlinear intensity remap plus a
// smooth multiplicative bias field, and the abnormal subset additionally gets
// per-axis shape deformation.
struct PhantomSpec {
    Dims dims{24, 24, 24};
    int classes = 4;  // background + 3 nested shells
    // Outermost..innermost foreground semi-axes, as fractions of each dim.
    std::array<double, 3> semi_axis_frac{0.44, 0.33, 0.22};
    std::array<double, 4> source_intensity{0.08, 0.40, 0.70, 1.00};
    double noise_sigma = 0.01;
    double blur_sigma = 0.3;
    double jitter = 0.05;                // per-sample center/axes jitter
    double abnormal_axis_range = 0.25;   // per-axis/class eccentricity scaling
    double target_gamma = 1.5;           // intensity remap exponent
    double target_lo = 0.25;
    double target_hi = 0.95;
    // Per-class offsets applied after the gamma curve. The defaults land the
    // target classes on {0.30, 0.40, 0.82, 0.92}: spacings are compressed in
    // pairs so the multiplicative bias field (not the global histogram, which
    // per-volume normalization removes) carries most of the domain gap, while
    // every gap stays far above the noise floor.
    std::array<double, 4> target_shift{0.034, -0.027, 0.160, -0.030};
    std::uint64_t seed = 0;
};

struct SourceSample {
    Volume image;
    LabelMap labels;
};

struct TargetSample {
    Volume image;
    LabelMap labels;  // evaluation only; the trainer never sees these
    Subset subset = Subset::normal;
};

std::vector<SourceSample> gen_source(int n, const PhantomSpec& spec);
std::vector<TargetSample> gen_target(int n, const PhantomSpec& spec, double abnormal_fraction);

// Smooth multiplicative field in [0.7, 1.3], mean 1, built from cosine
// products with at most 2 cycles per axis.
Volume bias_field(Dims dims, std::uint64_t seed);

}  // namespace asc
