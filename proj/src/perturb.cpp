#include "asc/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asc {

namespace {

bool try_sample(Dims dims, Rng& rng, CuboidMask& out) {
    const double f = rng.uniform(0.25, 0.5);
    const double s = std::cbrt(f);
    double side[3];
    double prod = 1.0;
    for (int k = 0; k < 3; ++k) {
        side[k] = s * rng.uniform(0.8, 1.25);
        prod *= side[k];
    }
    const double renorm = std::cbrt(f / prod);
    for (int k = 0; k < 3; ++k) side[k] *= renorm;

    for (int k = 0; k < 3; ++k) {
        const int l = static_cast<int>(std::lround(side[k] * dims[k]));
        out.size[k] = std::clamp(l, 1, dims[k]);
    }
    out.dims = dims;
    for (int k = 0; k < 3; ++k)
        out.origin[k] = static_cast<int>(rng.uniform_int(0, dims[k] - out.size[k]));
    const double realized = out.fraction();
    return realized >= 0.20 && realized <= 0.55;
}

}  // namespace

CuboidMask sample_cuboid(Dims dims, Rng& rng) {
    for (int k = 0; k < 3; ++k)
        if (dims[k] < 4)
            throw std::invalid_argument("sample_cuboid: every dim must be >= 4");
    CuboidMask m;
    // Integer rounding can push the realized fraction outside the bound on
    // small grids; redraw until it lands inside.
    for (int attempt = 0; attempt < 1000; ++attempt)
        if (try_sample(dims, rng, m)) return m;
    throw std::runtime_error("sample_cuboid: dims too small to achieve fraction in [0.20, 0.55]");
}

Volume blend(const Volume& a, const Volume& b, const CuboidMask& m) {
    if (a.dims != b.dims || a.dims != m.dims) throw ShapeError("blend: dims mismatch");
    Volume out = a;
    for (int d = m.origin[0]; d < m.origin[0] + m.size[0]; ++d)
        for (int h = m.origin[1]; h < m.origin[1] + m.size[1]; ++h)
            for (int w = m.origin[2]; w < m.origin[2] + m.size[2]; ++w)
                out.at(d, h, w) = b.at(d, h, w);
    return out;
}

ProbMap blend(const ProbMap& a, const ProbMap& b, const CuboidMask& m) {
    if (a.dims != b.dims || a.dims != m.dims || a.channels != b.channels)
        throw ShapeError("blend: dims mismatch");
    ProbMap out = a;
    const int H = m.dims[1], W = m.dims[2];
    for (int c = 0; c < a.channels; ++c)
        for (int d = m.origin[0]; d < m.origin[0] + m.size[0]; ++d)
            for (int h = m.origin[1]; h < m.origin[1] + m.size[1]; ++h) {
                const std::int64_t row =
                    (static_cast<std::int64_t>(d) * H + h) * W + m.origin[2];
                for (int w = 0; w < m.size[2]; ++w)
                    out.at(c, row + w) = b.at(c, row + w);
            }
    return out;
}

ProbMap pseudo_label(const ProbMap& pa, const ProbMap& pb, const CuboidMask& m) {
    return blend(pa, pb, m);
}

}  // namespace asc
