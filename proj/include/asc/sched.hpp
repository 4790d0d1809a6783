#pragma once

#include <cstdint>
#include <vector>

#include "asc/model.hpp"

namespace asc {

struct ScheduleConfig {
    double lr_init = 1e-4;
    double poly_power = 0.9;
    int epochs_total = 100;
    double gamma = 200.0;       // final consistency weight
    std::int64_t t_max = 0;     // total training steps
    double ema_alpha = 0.99;
};

struct AdamState {
    std::vector<double> m, v;
    std::int64_t t = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// lr_init * (1 - epoch/epochs_total)^power
double poly_lr(int epoch, const ScheduleConfig& cfg);

// gamma * exp(-5 (1 - t/t_max)^2)
double ramp_lambda(std::int64_t t, const ScheduleConfig& cfg);

// Standard Adam with bias correction; beta1=0.9, beta2=0.999, eps=1e-8.
void adam_step(ParamVector& params, const std::vector<double>& grads, AdamState& state, double lr);

// teacher <- alpha * teacher + (1 - alpha) * student, element-wise.
void ema_update(ParamVector& teacher, const ParamVector& student, double alpha);

}  // namespace asc
