#include "asc/losses.hpp"

#include <cmath>

namespace asc {

namespace {

constexpr double kDiceEps = 1e-5;

void check_same_shape(const ProbMap& a, const ProbMap& b, const char* who) {
    if (a.channels != b.channels || a.dims != b.dims)
        throw ShapeError(std::string(who) + ": shape mismatch");
}

}  // namespace

LossValue soft_dice_loss(const ProbMap& p, const ProbMap& y_onehot) {
    check_same_shape(p, y_onehot, "soft_dice_loss");
    const int C = p.channels;
    const std::int64_t n = p.voxels();

    LossValue out;
    out.grads.emplace_back(C, p.dims);
    ProbGrad& g = out.grads[0];

    double dice_sum = 0.0;
    for (int c = 0; c < C; ++c) {
        double inter = 0.0, sum_p = 0.0, sum_y = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            const double pv = p.at(c, i), yv = y_onehot.at(c, i);
            inter += pv * yv;
            sum_p += pv;
            sum_y += yv;
        }
        const double num = 2.0 * inter + kDiceEps;
        const double den = sum_p + sum_y + kDiceEps;
        dice_sum += num / den;
        // d dice_c / d p_c(i) = (2 y_c(i) den - num) / den^2
        const double inv_den2 = 1.0 / (den * den);
        for (std::int64_t i = 0; i < n; ++i) {
            const double yv = y_onehot.at(c, i);
            g.at(c, i) = -(2.0 * yv * den - num) * inv_den2 / C;
        }
    }
    out.value = 1.0 - dice_sum / C;
    return out;
}

LossValue mse_consistency(const ProbMap& ps, const ProbMap& pt) {
    check_same_shape(ps, pt, "mse_consistency");
    const std::size_t n = ps.data.size();
    LossValue out;
    out.grads.emplace_back(ps.channels, ps.dims);
    double acc = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(ps.data[i]) - pt.data[i];
        acc += d * d;
        out.grads[0].data[i] = 2.0 * d * inv_n;
    }
    out.value = acc * inv_n;
    return out;
}

LossValue seg_loss(const ProbMap& p_s, const ProbMap& p_sft, const ProbMap& y_onehot) {
    LossValue a = soft_dice_loss(p_s, y_onehot);
    LossValue b = soft_dice_loss(p_sft, y_onehot);
    LossValue out;
    out.value = a.value + b.value;
    out.grads.push_back(std::move(a.grads[0]));
    out.grads.push_back(std::move(b.grads[0]));
    return out;
}

LossValue appearance_consistency(const ProbMap& f_xt, const ProbMap& f_xtfs,
                                 const ProbMap& ft_xt, const ProbMap& ft_xtfs) {
    LossValue a = mse_consistency(f_xt, ft_xtfs);
    LossValue b = mse_consistency(f_xtfs, ft_xt);
    LossValue out;
    out.value = a.value + b.value;
    out.grads.push_back(std::move(a.grads[0]));
    out.grads.push_back(std::move(b.grads[0]));
    return out;
}

LossValue structure_consistency(const ProbMap& f_xt_sp, const ProbMap& f_xtfs_sp,
                                const ProbMap& pseudo_t, const ProbMap& pseudo_tfs) {
    LossValue a = mse_consistency(f_xt_sp, pseudo_tfs);
    LossValue b = mse_consistency(f_xtfs_sp, pseudo_t);
    LossValue out;
    out.value = a.value + b.value;
    out.grads.push_back(std::move(a.grads[0]));
    out.grads.push_back(std::move(b.grads[0]));
    return out;
}

LossValue total_loss(const LossValue& seg, const LossValue& app, const LossValue& str,
                     double lambda) {
    LossValue out;
    out.value = seg.value + lambda * (app.value + str.value);
    for (const auto& g : seg.grads) out.grads.push_back(g);
    for (const auto* term : {&app, &str})
        for (const auto& g : term->grads) {
            ProbGrad scaled = g;
            for (double& x : scaled.data) x *= lambda;
            out.grads.push_back(std::move(scaled));
        }
    return out;
}

}  // namespace asc
