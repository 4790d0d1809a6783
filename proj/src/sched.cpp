#include "asc/sched.hpp"

#include <cmath>
#include <stdexcept>

namespace asc {

double poly_lr(int epoch, const ScheduleConfig& cfg) {
    const double frac = 1.0 - static_cast<double>(epoch) / cfg.epochs_total;
    return cfg.lr_init * std::pow(frac, cfg.poly_power);
}

double ramp_lambda(std::int64_t t, const ScheduleConfig& cfg) {
    if (t >= cfg.t_max) return cfg.gamma;
    const double u = 1.0 - static_cast<double>(t) / static_cast<double>(cfg.t_max);
    return cfg.gamma * std::exp(-5.0 * u * u);
}

void adam_step(ParamVector& params, const std::vector<double>& grads, AdamState& state, double lr) {
    const std::size_t n = params.values.size();
    if (grads.size() != n || state.m.size() != n || state.v.size() != n)
        throw ShapeError("adam_step: length mismatch");
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params.values[i] =
            static_cast<float>(params.values[i] - lr * mhat / (std::sqrt(vhat) + eps));
    }
}

void ema_update(ParamVector& teacher, const ParamVector& student, double alpha) {
    if (teacher.values.size() != student.values.size())
        throw ShapeError("ema_update: length mismatch");
    for (std::size_t i = 0; i < teacher.values.size(); ++i)
        teacher.values[i] = static_cast<float>(alpha * teacher.values[i] +
                                               (1.0 - alpha) * student.values[i]);
}

}  // namespace asc
