#include "asc/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

#include "asc/rng.hpp"

namespace asc {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// out[oc] += sum_ic conv3x3x3(in[ic], w[oc][ic]) with zero padding 1,
// accumulated as 27 shifted-slab passes so the inner W loop stays contiguous.
void conv3_forward(const double* in, int in_ch, const float* w, const float* b, double* out,
                   int out_ch, const Dims& dims) {
    const int D = dims[0], H = dims[1], W = dims[2];
    const std::int64_t n = voxel_count(dims);
    for (int oc = 0; oc < out_ch; ++oc) {
        double* o = out + oc * n;
        std::fill(o, o + n, static_cast<double>(b[oc]));
        for (int ic = 0; ic < in_ch; ++ic) {
            const double* x = in + ic * n;
            const float* wk = w + (static_cast<std::size_t>(oc) * in_ch + ic) * 27;
            for (int kd = -1; kd <= 1; ++kd)
                for (int kh = -1; kh <= 1; ++kh)
                    for (int kw = -1; kw <= 1; ++kw) {
                        const double wv = wk[(kd + 1) * 9 + (kh + 1) * 3 + (kw + 1)];
                        if (wv == 0.0) continue;
                        const int d0 = std::max(0, -kd), d1 = std::min(D, D - kd);
                        const int h0 = std::max(0, -kh), h1 = std::min(H, H - kh);
                        const int w0 = std::max(0, -kw), w1 = std::min(W, W - kw);
                        for (int d = d0; d < d1; ++d)
                            for (int h = h0; h < h1; ++h) {
                                double* orow = o + (static_cast<std::int64_t>(d) * H + h) * W;
                                const double* xrow =
                                    x + (static_cast<std::int64_t>(d + kd) * H + (h + kh)) * W + kw;
                                for (int ww = w0; ww < w1; ++ww) orow[ww] += wv * xrow[ww];
                            }
                    }
        }
    }
}

// Gradients of conv3_forward: accumulates into dIn (may be null), dW, dB.
void conv3_backward(const double* in, int in_ch, const float* w, const double* dout, int out_ch,
                    const Dims& dims, double* din, double* dw, double* db) {
    const int D = dims[0], H = dims[1], W = dims[2];
    const std::int64_t n = voxel_count(dims);
    for (int oc = 0; oc < out_ch; ++oc) {
        const double* go = dout + oc * n;
        double acc = 0.0;
        for (std::int64_t i = 0; i < n; ++i) acc += go[i];
        db[oc] += acc;
        for (int ic = 0; ic < in_ch; ++ic) {
            const double* x = in + ic * n;
            const float* wk = w + (static_cast<std::size_t>(oc) * in_ch + ic) * 27;
            double* dwk = dw + (static_cast<std::size_t>(oc) * in_ch + ic) * 27;
            double* gx = din ? din + ic * n : nullptr;
            for (int kd = -1; kd <= 1; ++kd)
                for (int kh = -1; kh <= 1; ++kh)
                    for (int kw = -1; kw <= 1; ++kw) {
                        const int ki = (kd + 1) * 9 + (kh + 1) * 3 + (kw + 1);
                        const double wv = wk[ki];
                        const int d0 = std::max(0, -kd), d1 = std::min(D, D - kd);
                        const int h0 = std::max(0, -kh), h1 = std::min(H, H - kh);
                        const int w0 = std::max(0, -kw), w1 = std::min(W, W - kw);
                        double wsum = 0.0;
                        for (int d = d0; d < d1; ++d)
                            for (int h = h0; h < h1; ++h) {
                                const double* gorow =
                                    go + (static_cast<std::int64_t>(d) * H + h) * W;
                                const std::int64_t xoff =
                                    (static_cast<std::int64_t>(d + kd) * H + (h + kh)) * W + kw;
                                const double* xrow = x + xoff;
                                for (int ww = w0; ww < w1; ++ww) wsum += gorow[ww] * xrow[ww];
                                if (gx) {
                                    double* gxrow = gx + xoff;
                                    for (int ww = w0; ww < w1; ++ww)
                                        gxrow[ww] += wv * gorow[ww];
                                }
                            }
                        dwk[ki] += wsum;
                    }
        }
    }
}

constexpr double kNormEps = 1e-5;

// Instance norm forward for one block: per channel, h = (z - mean)/sig,
// y = g*h + b, with sig = sqrt(var + eps).
void inorm_forward(const std::vector<double>& z, int F, std::int64_t n, const float* g,
                   const float* b, std::vector<double>& h, std::vector<double>& y,
                   std::vector<double>& sig) {
    h.resize(z.size());
    y.resize(z.size());
    sig.assign(F, 0.0);
    for (int f = 0; f < F; ++f) {
        const double* zc = z.data() + static_cast<std::size_t>(f) * n;
        double* hc = h.data() + static_cast<std::size_t>(f) * n;
        double* yc = y.data() + static_cast<std::size_t>(f) * n;
        double mean = 0.0;
        for (std::int64_t i = 0; i < n; ++i) mean += zc[i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            const double d = zc[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double s = std::sqrt(var + kNormEps);
        sig[f] = s;
        const double inv = 1.0 / s;
        const double gv = g[f], bv = b[f];
        for (std::int64_t i = 0; i < n; ++i) {
            hc[i] = (zc[i] - mean) * inv;
            yc[i] = gv * hc[i] + bv;
        }
    }
}

// Instance norm backward: given dL/dy, accumulates dg, db and writes dL/dz.
void inorm_backward(const std::vector<double>& h, const std::vector<double>& sig, int F,
                    std::int64_t n, const float* g, const std::vector<double>& dy,
                    std::vector<double>& dz, double* dg, double* db) {
    dz.resize(dy.size());
    const double invn = 1.0 / static_cast<double>(n);
    for (int f = 0; f < F; ++f) {
        const double* hc = h.data() + static_cast<std::size_t>(f) * n;
        const double* dyc = dy.data() + static_cast<std::size_t>(f) * n;
        double* dzc = dz.data() + static_cast<std::size_t>(f) * n;
        double sum_dy = 0.0, sum_dyh = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            sum_dy += dyc[i];
            sum_dyh += dyc[i] * hc[i];
        }
        dg[f] += sum_dyh;
        db[f] += sum_dy;
        const double gv = g[f];
        const double scale = gv / sig[f];
        const double m_dy = sum_dy * invn;
        const double m_dyh = sum_dyh * invn;
        for (std::int64_t i = 0; i < n; ++i)
            dzc[i] = scale * (dyc[i] - m_dy - hc[i] * m_dyh);
    }
}

}  // namespace

NetLayout net_layout(const NetConfig& cfg) {
    if (cfg.hidden < 1 || cfg.classes < 2)
        throw std::invalid_argument("net_layout: require hidden >= 1 and classes >= 2");
    const std::size_t F = cfg.hidden, C = cfg.classes, in = cfg.in_channels;
    NetLayout l{};
    l.w1 = 0;
    l.b1 = l.w1 + 27 * in * F;
    l.g1 = l.b1 + F;
    l.w2 = l.g1 + F;
    l.b2 = l.w2 + 27 * F * F;
    l.g2 = l.b2 + F;
    l.w3 = l.g2 + F;
    l.b3 = l.w3 + F * C;
    l.total = l.b3 + C;
    return l;
}

ParamVector init_params(const NetConfig& cfg) {
    const NetLayout l = net_layout(cfg);
    ParamVector p;
    p.values.assign(l.total, 0.0f);
    Rng rng(cfg.seed);
    const auto he_fill = [&](std::size_t lo, std::size_t hi, int fan_in) {
        const double sd = std::sqrt(2.0 / fan_in);
        for (std::size_t i = lo; i < hi; ++i)
            p.values[i] = static_cast<float>(sd * rng.normal());
    };
    he_fill(l.w1, l.b1, 27 * cfg.in_channels);
    he_fill(l.w2, l.b2, 27 * cfg.hidden);
    he_fill(l.w3, l.b3, cfg.hidden);
    for (std::size_t i = l.g1; i < l.g1 + static_cast<std::size_t>(cfg.hidden); ++i)
        p.values[i] = 1.0f;
    for (std::size_t i = l.g2; i < l.g2 + static_cast<std::size_t>(cfg.hidden); ++i)
        p.values[i] = 1.0f;
    return p;
}

ProbMap forward(const NetConfig& cfg, const ParamVector& p, const Volume& v, ForwardCache* cache) {
    const NetLayout l = net_layout(cfg);
    if (p.values.size() != l.total)
        throw ShapeError("forward: param vector length does not match config");
    const int F = cfg.hidden, C = cfg.classes;
    const Dims dims = v.dims;
    const std::int64_t n = v.size();

    ForwardCache local;
    ForwardCache& cc = cache ? *cache : local;
    cc.dims = dims;
    cc.input.assign(v.data.begin(), v.data.end());
    cc.z1.assign(static_cast<std::size_t>(F) * n, 0.0);
    cc.z2.assign(static_cast<std::size_t>(F) * n, 0.0);
    cc.logits.assign(static_cast<std::size_t>(C) * n, 0.0);

    const float* pv = p.values.data();
    const std::vector<float> no_bias(F, 0.0f);
    conv3_forward(cc.input.data(), 1, pv + l.w1, no_bias.data(), cc.z1.data(), F, dims);
    inorm_forward(cc.z1, F, n, pv + l.g1, pv + l.b1, cc.h1, cc.y1, cc.sig1);
    cc.a1 = cc.y1;
    for (double& x : cc.a1) x = std::max(x, 0.0);
    conv3_forward(cc.a1.data(), F, pv + l.w2, no_bias.data(), cc.z2.data(), F, dims);
    inorm_forward(cc.z2, F, n, pv + l.g2, pv + l.b2, cc.h2, cc.y2, cc.sig2);
    cc.a2 = cc.y2;
    for (double& x : cc.a2) x = std::max(x, 0.0);

    // 1x1x1 conv: per-voxel linear map F -> C.
    for (int c = 0; c < C; ++c) {
        double* o = cc.logits.data() + static_cast<std::size_t>(c) * n;
        const double bias = pv[l.b3 + c];
        std::fill(o, o + n, bias);
        for (int f = 0; f < F; ++f) {
            const double wv = pv[l.w3 + static_cast<std::size_t>(c) * F + f];
            const double* a = cc.a2.data() + static_cast<std::size_t>(f) * n;
            for (std::int64_t i = 0; i < n; ++i) o[i] += wv * a[i];
        }
    }

    // Per-voxel softmax with max subtraction.
    cc.probs.assign(static_cast<std::size_t>(C) * n, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double mx = cc.logits[i];
        for (int c = 1; c < C; ++c) mx = std::max(mx, cc.logits[c * n + i]);
        double sum = 0.0;
        for (int c = 0; c < C; ++c) {
            const double e = std::exp(cc.logits[c * n + i] - mx);
            cc.probs[c * n + i] = e;
            sum += e;
        }
        const double inv = 1.0 / sum;
        for (int c = 0; c < C; ++c) cc.probs[c * n + i] *= inv;
    }

    ProbMap out(C, dims);
    for (std::size_t i = 0; i < cc.probs.size(); ++i) out.data[i] = cc.probs[i];
    return out;
}

std::vector<double> backward(const NetConfig& cfg, const ParamVector& p, const ForwardCache& cache,
                             const ProbGrad& dprob) {
    const NetLayout l = net_layout(cfg);
    if (p.values.size() != l.total)
        throw ShapeError("backward: param vector length does not match config");
    const int F = cfg.hidden, C = cfg.classes;
    const Dims dims = cache.dims;
    const std::int64_t n = voxel_count(dims);
    if (dprob.channels != C || dprob.dims != dims)
        throw ShapeError("backward: upstream gradient shape does not match cache");
    if (cache.probs.size() != static_cast<std::size_t>(C) * n)
        throw ShapeError("backward: cache does not match config/input");

    std::vector<double> grad(l.total, 0.0);
    const float* pv = p.values.data();

    // Softmax Jacobian: dZ_c = P_c (g_c - sum_k g_k P_k).
    std::vector<double> dlogits(static_cast<std::size_t>(C) * n);
    for (std::int64_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (int c = 0; c < C; ++c) dot += dprob.data[c * n + i] * cache.probs[c * n + i];
        for (int c = 0; c < C; ++c)
            dlogits[c * n + i] = cache.probs[c * n + i] * (dprob.data[c * n + i] - dot);
    }

    // conv3 (1x1x1) backward.
    std::vector<double> da2(static_cast<std::size_t>(F) * n, 0.0);
    for (int c = 0; c < C; ++c) {
        const double* g = dlogits.data() + static_cast<std::size_t>(c) * n;
        double bsum = 0.0;
        for (std::int64_t i = 0; i < n; ++i) bsum += g[i];
        grad[l.b3 + c] += bsum;
        for (int f = 0; f < F; ++f) {
            const double* a = cache.a2.data() + static_cast<std::size_t>(f) * n;
            double* dA = da2.data() + static_cast<std::size_t>(f) * n;
            const double wv = pv[l.w3 + static_cast<std::size_t>(c) * F + f];
            double wsum = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                wsum += g[i] * a[i];
                dA[i] += wv * g[i];
            }
            grad[l.w3 + static_cast<std::size_t>(c) * F + f] += wsum;
        }
    }

    // ReLU 2 (mask from the pre-activation y2), then instance norm 2.
    std::vector<double> dy2(std::move(da2));
    for (std::size_t i = 0; i < dy2.size(); ++i)
        if (cache.y2[i] <= 0.0) dy2[i] = 0.0;
    std::vector<double> dz2;
    inorm_backward(cache.h2, cache.sig2, F, n, pv + l.g2, dy2, dz2, grad.data() + l.g2,
                   grad.data() + l.b2);

    // The convolutions are bias-free; conv3_backward still accumulates a bias
    // gradient, so give it a scratch buffer to discard.
    std::vector<double> scratch_db(F, 0.0);
    std::vector<double> da1(static_cast<std::size_t>(F) * n, 0.0);
    conv3_backward(cache.a1.data(), F, pv + l.w2, dz2.data(), F, dims, da1.data(), grad.data() + l.w2,
                   scratch_db.data());

    std::vector<double> dy1(std::move(da1));
    for (std::size_t i = 0; i < dy1.size(); ++i)
        if (cache.y1[i] <= 0.0) dy1[i] = 0.0;
    std::vector<double> dz1;
    inorm_backward(cache.h1, cache.sig1, F, n, pv + l.g1, dy1, dz1, grad.data() + l.g1,
                   grad.data() + l.b1);

    std::fill(scratch_db.begin(), scratch_db.end(), 0.0);
    conv3_backward(cache.input.data(), 1, pv + l.w1, dz1.data(), F, dims, nullptr,
                   grad.data() + l.w1, scratch_db.data());
    return grad;
}

std::vector<double> finite_diff_grad(const ParamVector& p,
                                     const std::function<double(const ParamVector&)>& loss_fn,
                                     double eps) {
    std::vector<double> grad(p.values.size());
    ParamVector probe = p;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const double orig = p.values[i];
        const float plus = static_cast<float>(orig + eps);
        const float minus = static_cast<float>(orig - eps);
        probe.values[i] = plus;
        const double up = loss_fn(probe);
        probe.values[i] = minus;
        const double down = loss_fn(probe);
        probe.values[i] = static_cast<float>(orig);
        // divide by the realized f32 step, not the nominal one, so parameter
        // quantization does not leak into the estimate
        grad[i] = (up - down) / (static_cast<double>(plus) - minus);
    }
    return grad;
}

void write_checkpoint(const std::string& path, const ParamVector& p) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    const char magic[5] = {'A', 'S', 'C', 'P', '1'};
    const std::uint32_t count = static_cast<std::uint32_t>(p.values.size());
    std::uint8_t cnt[4] = {static_cast<std::uint8_t>(count), static_cast<std::uint8_t>(count >> 8),
                           static_cast<std::uint8_t>(count >> 16),
                           static_cast<std::uint8_t>(count >> 24)};
    if (std::fwrite(magic, 1, 5, f.get()) != 5 || std::fwrite(cnt, 1, 4, f.get()) != 4)
        throw std::runtime_error("checkpoint: short header write");
    if (std::fwrite(p.values.data(), sizeof(float), p.values.size(), f.get()) != p.values.size())
        throw std::runtime_error("checkpoint: short payload write");
}

ParamVector read_checkpoint(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw ParseError("cannot open: " + path);
    char magic[5];
    std::uint8_t cnt[4];
    if (std::fread(magic, 1, 5, f.get()) != 5 || std::memcmp(magic, "ASCP1", 5) != 0)
        throw ParseError("bad magic in " + path);
    if (std::fread(cnt, 1, 4, f.get()) != 4)
        throw ParseError("truncated payload: header too short in " + path);
    const std::uint32_t count = static_cast<std::uint32_t>(cnt[0]) |
                                (static_cast<std::uint32_t>(cnt[1]) << 8) |
                                (static_cast<std::uint32_t>(cnt[2]) << 16) |
                                (static_cast<std::uint32_t>(cnt[3]) << 24);
    ParamVector p;
    p.values.resize(count);
    if (std::fread(p.values.data(), sizeof(float), count, f.get()) != count)
        throw ParseError("truncated payload: expected " + std::to_string(count) + " floats in " +
                         path);
    return p;
}

}  // namespace asc
