#include "asc/synthdata.hpp"

#include <algorithm>
#include <cmath>

#include "asc/rng.hpp"

namespace asc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Geometry {
    std::array<double, 3> center;
    // semi_axes[class-1][axis] for the three foreground shells.
    std::array<std::array<double, 3>, 3> semi_axes;
};

Geometry sample_geometry(const PhantomSpec& spec, Rng& rng, bool abnormal) {
    Geometry g;
    for (int k = 0; k < 3; ++k)
        g.center[k] = 0.5 * spec.dims[k] *
                      (1.0 + rng.uniform(-spec.jitter, spec.jitter));
    std::array<double, 3> shape;  // shared per-axis jitter keeps shells nested
    for (int k = 0; k < 3; ++k)
        shape[k] = 1.0 + rng.uniform(-spec.jitter, spec.jitter);
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 3; ++k)
            g.semi_axes[c][k] = spec.semi_axis_frac[c] * spec.dims[k] * shape[k];
    if (abnormal) {
        const double r = spec.abnormal_axis_range;
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 3; ++k)
                g.semi_axes[c][k] *= 1.0 + rng.uniform(-r, r);
        // Re-impose strict nesting per axis after independent deformation.
        for (int c = 1; c < 3; ++c)
            for (int k = 0; k < 3; ++k)
                g.semi_axes[c][k] = std::min(g.semi_axes[c][k], 0.85 * g.semi_axes[c - 1][k]);
    }
    return g;
}

LabelMap rasterize_labels(const PhantomSpec& spec, const Geometry& g) {
    LabelMap y(spec.dims);
    std::size_t i = 0;
    for (int d = 0; d < spec.dims[0]; ++d)
        for (int h = 0; h < spec.dims[1]; ++h)
            for (int w = 0; w < spec.dims[2]; ++w, ++i) {
                const double x[3] = {static_cast<double>(d), static_cast<double>(h),
                                     static_cast<double>(w)};
                int label = 0;
                for (int c = 2; c >= 0; --c) {  // innermost shell wins
                    double r = 0.0;
                    for (int k = 0; k < 3; ++k) {
                        const double t = (x[k] - g.center[k]) / g.semi_axes[c][k];
                        r += t * t;
                    }
                    if (r <= 1.0) {
                        label = c + 1;
                        break;
                    }
                }
                y.data[i] = static_cast<std::uint8_t>(label);
            }
    return y;
}

void gaussian_blur(Volume& v, double sigma) {
    if (sigma <= 0.0) return;
    const double w1 = std::exp(-0.5 / (sigma * sigma));
    const double norm = 1.0 / (1.0 + 2.0 * w1);
    const int D = v.dims[0], H = v.dims[1], W = v.dims[2];
    Volume tmp(v.dims);
    const auto pass = [&](const Volume& in, Volume& out, int axis) {
        const int extent[3] = {D, H, W};
        for (int d = 0; d < D; ++d)
            for (int h = 0; h < H; ++h)
                for (int w = 0; w < W; ++w) {
                    int lo[3] = {d, h, w}, hi[3] = {d, h, w};
                    lo[axis] = std::max(0, lo[axis] - 1);
                    hi[axis] = std::min(extent[axis] - 1, hi[axis] + 1);
                    const double c = in.at(d, h, w);
                    const double a = in.at(lo[0], lo[1], lo[2]);
                    const double b = in.at(hi[0], hi[1], hi[2]);
                    out.at(d, h, w) = static_cast<float>((c + w1 * (a + b)) * norm);
                }
    };
    pass(v, tmp, 0);
    pass(tmp, v, 1);
    pass(v, tmp, 2);
    v = tmp;
}

Volume render(const PhantomSpec& spec, const LabelMap& y, const std::array<double, 4>& intensity,
              Rng& rng) {
    Volume v(spec.dims);
    const std::int64_t n = v.size();
    for (std::int64_t i = 0; i < n; ++i)
        v.data[i] = static_cast<float>(intensity[y.data[i]]);
    if (spec.noise_sigma > 0.0)
        for (std::int64_t i = 0; i < n; ++i)
            v.data[i] += static_cast<float>(spec.noise_sigma * rng.normal());
    gaussian_blur(v, spec.blur_sigma);
    return v;
}

std::array<double, 4> target_intensities(const PhantomSpec& spec) {
    std::array<double, 4> out{};
    for (int c = 0; c < 4; ++c) {
        const double v = std::clamp(spec.source_intensity[c], 0.0, 1.0);
        out[c] = spec.target_lo + (spec.target_hi - spec.target_lo) * std::pow(v, spec.target_gamma) +
                 spec.target_shift[c];
    }
    return out;
}

}  // namespace

std::vector<SourceSample> gen_source(int n, const PhantomSpec& spec) {
    std::vector<SourceSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Rng rng(Rng::mix(spec.seed, 0x5000 + i));
        const Geometry g = sample_geometry(spec, rng, false);
        SourceSample s;
        s.labels = rasterize_labels(spec, g);
        s.image = render(spec, s.labels, spec.source_intensity, rng);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<TargetSample> gen_target(int n, const PhantomSpec& spec, double abnormal_fraction) {
    const int n_abnormal = static_cast<int>(std::lround(n * abnormal_fraction));
    const std::array<double, 4> intensity = target_intensities(spec);
    std::vector<TargetSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Rng rng(Rng::mix(spec.seed, 0x7000 + i));
        TargetSample t;
        t.subset = i < n_abnormal ? Subset::abnormal : Subset::normal;
        const Geometry g = sample_geometry(spec, rng, t.subset == Subset::abnormal);
        t.labels = rasterize_labels(spec, g);
        t.image = render(spec, t.labels, intensity, rng);
        const Volume field = bias_field(spec.dims, Rng::mix(spec.seed, 0xB000 + i));
        for (std::size_t p = 0; p < t.image.data.size(); ++p)
            t.image.data[p] *= field.data[p];
        out.push_back(std::move(t));
    }
    return out;
}

Volume bias_field(Dims dims, std::uint64_t seed) {
    Rng rng(seed);
    // Random low-frequency cosine products, then scale so the field stays in
    // [0.7, 1.3] with bounded voxel-to-voxel steps. Integer frequencies over
    // full periods keep the grid mean at exactly 1.
    struct Term {
        int f[3];
        double phase[3];
        double amp;
    };
    std::vector<Term> terms;
    for (int fd = 0; fd <= 2; ++fd)
        for (int fh = 0; fh <= 2; ++fh)
            for (int fw = 0; fw <= 2; ++fw) {
                if (fd + fh + fw == 0) continue;
                Term t;
                t.f[0] = fd;
                t.f[1] = fh;
                t.f[2] = fw;
                for (int k = 0; k < 3; ++k) t.phase[k] = rng.uniform(0.0, kTwoPi);
                t.amp = rng.normal() / (1.0 + fd + fh + fw);
                terms.push_back(t);
            }

    Volume raw(dims);
    std::size_t i = 0;
    for (int d = 0; d < dims[0]; ++d)
        for (int h = 0; h < dims[1]; ++h)
            for (int w = 0; w < dims[2]; ++w, ++i) {
                const int x[3] = {d, h, w};
                double acc = 0.0;
                for (const Term& t : terms) {
                    double prod = t.amp;
                    for (int k = 0; k < 3; ++k)
                        prod *= std::cos(kTwoPi * t.f[k] * x[k] / dims[k] + t.phase[k]);
                    acc += prod;
                }
                raw.data[i] = static_cast<float>(acc);
            }

    double max_abs = 1e-300, max_step = 1e-300;
    for (float x : raw.data) max_abs = std::max(max_abs, static_cast<double>(std::fabs(x)));
    for (int d = 0; d < dims[0]; ++d)
        for (int h = 0; h < dims[1]; ++h)
            for (int w = 0; w < dims[2]; ++w) {
                const double c = raw.at(d, h, w);
                if (d + 1 < dims[0]) max_step = std::max(max_step, std::fabs(raw.at(d + 1, h, w) - c));
                if (h + 1 < dims[1]) max_step = std::max(max_step, std::fabs(raw.at(d, h + 1, w) - c));
                if (w + 1 < dims[2]) max_step = std::max(max_step, std::fabs(raw.at(d, h, w + 1) - c));
            }
    const double scale = std::min(0.28 / max_abs, 0.045 / max_step);

    Volume out(dims);
    for (std::size_t p = 0; p < out.data.size(); ++p)
        out.data[p] = static_cast<float>(1.0 + scale * raw.data[p]);
    return out;
}

}  // namespace asc
