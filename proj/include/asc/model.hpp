#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "asc/volume.hpp"

namespace asc {

// Compact segmenter: two blocks of conv3(pad 1) -> instance norm -> ReLU,
// then conv1(F->C) -> per-voxel softmax. Spatial dims preserved. Instance
// norm (per-channel, per-volume) keeps activations well conditioned and
// rules out the constant-output collapse that plain stacks drift into under
// strong consistency weights.
struct NetConfig {
    int in_channels = 1;
    int hidden = 8;
    int classes = 4;
    std::uint64_t seed = 0;
};

// Parameter offsets in the canonical flat layout:
// w1[F][1][3][3][3], b1[F], g1[F], w2[F][F][3][3][3], b2[F], g2[F],
// w3[C][F], b3[C]. g*/b* are the instance-norm scale/shift of each block
// (the convolutions themselves are bias-free; normalization would cancel a
// conv bias anyway).
struct NetLayout {
    std::size_t w1, b1, g1, w2, b2, g2, w3, b3;
    std::size_t total;
};

NetLayout net_layout(const NetConfig& cfg);

struct ParamVector {
    std::vector<float> values;
};

// Activations kept from one forward pass, f64 throughout. Per block:
// z = conv output, h = normalized z, y = g*h + b (pre-ReLU), a = ReLU(y);
// sig holds the per-channel sqrt(var + eps) of z.
struct ForwardCache {
    Dims dims{0, 0, 0};
    std::vector<double> input;           // (1, D, H, W)
    std::vector<double> z1, h1, y1, a1;  // (F, ...)
    std::vector<double> z2, h2, y2, a2;  // (F, ...)
    std::vector<double> sig1, sig2;      // (F)
    std::vector<double> logits;          // (C, ...)
    std::vector<double> probs;           // (C, ...)
};

// He-initialized weights, unit norm scales, zero shifts; deterministic per
// cfg.seed.
ParamVector init_params(const NetConfig& cfg);

// Forward pass; fills `cache` when non-null (required for backward).
ProbMap forward(const NetConfig& cfg, const ParamVector& p, const Volume& v,
                ForwardCache* cache = nullptr);

// Exact reverse-mode gradient w.r.t. every parameter given dL/dProb.
std::vector<double> backward(const NetConfig& cfg, const ParamVector& p,
                             const ForwardCache& cache, const ProbGrad& dprob);

// Central finite differences per coordinate, test oracle for backward. The
// step is small so probe intervals rarely straddle a ReLU kink; the loss
// path is f64 throughout, so truncation dominates and stays ~eps^2.
std::vector<double> finite_diff_grad(const ParamVector& p,
                                     const std::function<double(const ParamVector&)>& loss_fn,
                                     double eps = 1e-5);

// ASCP1 checkpoint: magic, u32 count, f32 LE values.
void write_checkpoint(const std::string& path, const ParamVector& p);
ParamVector read_checkpoint(const std::string& path);

}  // namespace asc
