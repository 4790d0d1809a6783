#include "asc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "asc/fourier.hpp"
#include "asc/losses.hpp"
#include "asc/perturb.hpp"
#include "asc/rng.hpp"

namespace asc {

Ablation parse_ablation(const std::string& name) {
    if (name == "M1") return Ablation::M1;
    if (name == "M2") return Ablation::M2;
    if (name == "M3") return Ablation::M3;
    if (name == "M4") return Ablation::M4;
    if (name == "M5") return Ablation::M5;
    throw std::invalid_argument("unknown ablation mode: " + name);
}

std::string ablation_name(Ablation a) {
    return "M" + std::to_string(static_cast<int>(a));
}

std::string TrainLog::csv() const {
    std::string out = "step,epoch,lr,lambda,l_seg,l_app,l_str,l_total\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%lld,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      static_cast<long long>(r.step), r.epoch, r.lr, r.lambda, r.l_seg, r.l_app,
                      r.l_str, r.l_total);
        out += buf;
    }
    return out;
}

namespace {

// One student forward whose gradient contributions get accumulated lazily.
struct StudentPass {
    ForwardCache cache;
    ProbMap probs;
    ProbGrad grad;  // dL/dP accumulated across loss terms

    void init_grad() { grad = ProbGrad(probs.channels, probs.dims); }
    void add_grad(const ProbGrad& g, double scale) {
        for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] += scale * g.data[i];
    }
};

}  // namespace

TrainResult train(const TrainConfig& cfg, const std::vector<SourceSample>& source,
                  const std::vector<Volume>& target) {
    if (source.empty() || target.empty())
        throw std::invalid_argument("train: empty source or target set");
    const Dims dims = source[0].image.dims;
    for (const auto& s : source)
        if (s.image.dims != dims || s.labels.dims != dims)
            throw ShapeError("train: source dims mismatch");
    for (const auto& t : target)
        if (t.dims != dims) throw ShapeError("train: target dims mismatch");

    const int level = static_cast<int>(cfg.ablation);
    const int n_src = static_cast<int>(source.size());
    const int n_tgt = static_cast<int>(target.size());
    const bool pass_over_source = n_src >= n_tgt;
    const int pass_len = std::max(n_src, n_tgt);
    // With 2 pass anchors per iteration, an epoch of pass_len iterations
    // anchors every sample of the larger set exactly twice; the 2+2 batch
    // composition itself stays fixed.
    const int iters_per_epoch = pass_len;

    ScheduleConfig sched = cfg.sched;
    sched.t_max = static_cast<std::int64_t>(cfg.epochs) * iters_per_epoch;

    // Inputs are normalized once; swapped views are used as produced.
    std::vector<Volume> xs(n_src), xt(n_tgt);
    std::vector<ProbMap> ys(n_src);
    for (int i = 0; i < n_src; ++i) {
        xs[i] = znormalize(source[i].image);
        ys[i] = one_hot(source[i].labels, cfg.net.classes);
    }
    for (int i = 0; i < n_tgt; ++i) xt[i] = znormalize(target[i]);

    ParamVector student = init_params(cfg.net);
    ParamVector teacher = student;  // teacher starts as a copy
    AdamState adam(student.values.size());
    Rng rng(Rng::mix(cfg.seed, 0xA5C));

    TrainResult result;
    std::int64_t step = 0;
    std::vector<int> pass_order(pass_len);
    std::iota(pass_order.begin(), pass_order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = poly_lr(epoch, sched);
        // Fisher-Yates over the pass set.
        for (int i = pass_len - 1; i > 0; --i)
            std::swap(pass_order[i], pass_order[rng.uniform_int(0, i)]);

        for (int it = 0; it < iters_per_epoch; ++it, ++step) {
            const double lambda = ramp_lambda(step, sched);

            int si[2], ti[2];
            for (int k = 0; k < 2; ++k) {
                const int from_pass = pass_order[(2 * it + k) % pass_len];
                if (pass_over_source) {
                    si[k] = from_pass;
                    ti[k] = static_cast<int>(rng.uniform_int(0, n_tgt - 1));
                } else {
                    ti[k] = from_pass;
                    si[k] = static_cast<int>(rng.uniform_int(0, n_src - 1));
                }
            }

            // Random cross-domain pairing for the amplitude swaps.
            const bool flip_s = rng.uniform() < 0.5;
            const bool flip_t = rng.uniform() < 0.5;

            std::vector<double> grad(student.values.size(), 0.0);
            double l_seg = 0.0, l_app = 0.0, l_str = 0.0;

            // Supervised views.
            StudentPass ps[2], psft[2];
            Volume xsft[2], xtfs[2];
            for (int k = 0; k < 2; ++k) {
                ps[k].probs = forward(cfg.net, student, xs[si[k]], &ps[k].cache);
                ps[k].init_grad();
                if (level >= 2) {
                    xsft[k] = amplitude_swap(xs[si[k]], xt[ti[flip_s ? 1 - k : k]], cfg.beta);
                    psft[k].probs = forward(cfg.net, student, xsft[k], &psft[k].cache);
                    psft[k].init_grad();
                }
            }
            for (int k = 0; k < 2; ++k) {
                LossValue d1 = soft_dice_loss(ps[k].probs, ys[si[k]]);
                l_seg += 0.5 * d1.value;
                ps[k].add_grad(d1.grads[0], 0.5);
                if (level >= 2) {
                    LossValue d2 = soft_dice_loss(psft[k].probs, ys[si[k]]);
                    l_seg += 0.5 * d2.value;
                    psft[k].add_grad(d2.grads[0], 0.5);
                }
            }

            // Consistency views.
            StudentPass pt[2], ptfs[2], pt_sp[2], ptfs_sp[2];
            ProbMap teach_t[2], teach_tfs[2];
            if (level >= 3) {
                for (int k = 0; k < 2; ++k)
                    xtfs[k] = amplitude_swap(xt[ti[k]], xs[si[flip_t ? 1 - k : k]], cfg.beta);
                for (int k = 0; k < 2; ++k) {
                    teach_tfs[k] = forward(cfg.net, teacher, xtfs[k]);
                    if (level >= 4) teach_t[k] = forward(cfg.net, teacher, xt[ti[k]]);
                }
                for (int k = 0; k < 2; ++k) {
                    pt[k].probs = forward(cfg.net, student, xt[ti[k]], &pt[k].cache);
                    pt[k].init_grad();
                    LossValue a = mse_consistency(pt[k].probs, teach_tfs[k]);
                    l_app += 0.5 * a.value;
                    pt[k].add_grad(a.grads[0], 0.5 * lambda);
                    if (level >= 4) {
                        ptfs[k].probs = forward(cfg.net, student, xtfs[k], &ptfs[k].cache);
                        ptfs[k].init_grad();
                        LossValue b = mse_consistency(ptfs[k].probs, teach_t[k]);
                        l_app += 0.5 * b.value;
                        ptfs[k].add_grad(b.grads[0], 0.5 * lambda);
                    }
                }
            }

            if (level >= 5) {
                // One cuboid per target pair, shared by the X_t and X_tfs views.
                const CuboidMask box = sample_cuboid(dims, rng);
                for (int k = 0; k < 2; ++k) {
                    const int j = 1 - k;
                    const Volume xt_sp = blend(xt[ti[k]], xt[ti[j]], box);
                    const Volume xtfs_sp = blend(xtfs[k], xtfs[j], box);
                    const ProbMap pseudo_tfs = pseudo_label(teach_tfs[k], teach_tfs[j], box);
                    const ProbMap pseudo_t = pseudo_label(teach_t[k], teach_t[j], box);

                    pt_sp[k].probs = forward(cfg.net, student, xt_sp, &pt_sp[k].cache);
                    pt_sp[k].init_grad();
                    LossValue a = mse_consistency(pt_sp[k].probs, pseudo_tfs);
                    l_str += 0.5 * a.value;
                    pt_sp[k].add_grad(a.grads[0], 0.5 * lambda);

                    ptfs_sp[k].probs = forward(cfg.net, student, xtfs_sp, &ptfs_sp[k].cache);
                    ptfs_sp[k].init_grad();
                    LossValue b = mse_consistency(ptfs_sp[k].probs, pseudo_t);
                    l_str += 0.5 * b.value;
                    ptfs_sp[k].add_grad(b.grads[0], 0.5 * lambda);
                }
            }

            const double l_total = l_seg + lambda * (l_app + l_str);
            if (!std::isfinite(l_total))
                throw NumericalError("train: non-finite loss at step " + std::to_string(step) +
                                     " (seg=" + std::to_string(l_seg) +
                                     " app=" + std::to_string(l_app) +
                                     " str=" + std::to_string(l_str) + ")");

            // Backprop through the student passes only, in a fixed order.
            const auto accumulate = [&](StudentPass& pass) {
                if (pass.grad.data.empty()) return;
                const std::vector<double> g = backward(cfg.net, student, pass.cache, pass.grad);
                for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
            };
            for (int k = 0; k < 2; ++k) accumulate(ps[k]);
            for (int k = 0; k < 2; ++k) accumulate(psft[k]);
            for (int k = 0; k < 2; ++k) accumulate(pt[k]);
            for (int k = 0; k < 2; ++k) accumulate(ptfs[k]);
            for (int k = 0; k < 2; ++k) accumulate(pt_sp[k]);
            for (int k = 0; k < 2; ++k) accumulate(ptfs_sp[k]);

            adam_step(student, grad, adam, lr);
            ema_update(teacher, student, sched.ema_alpha);

            TrainRecord rec;
            rec.step = step;
            rec.epoch = epoch;
            rec.lr = lr;
            rec.lambda = lambda;
            rec.l_seg = l_seg;
            rec.l_app = l_app;
            rec.l_str = l_str;
            rec.l_total = l_total;
            result.log.records.push_back(rec);
        }

        if (cfg.ckpt_every > 0 && (epoch + 1) % cfg.ckpt_every == 0 && !cfg.out_dir.empty()) {
            char name[64];
            std::snprintf(name, sizeof(name), "/ckpt_epoch%04d.ascp", epoch + 1);
            write_checkpoint(cfg.out_dir + name, student);
        }
    }

    result.student = std::move(student);
    result.teacher = std::move(teacher);
    return result;
}

DscReport evaluate(const NetConfig& net, const ParamVector& params,
                   const std::vector<EvalSample>& eval_set) {
    std::vector<VolumeDsc> rows;
    rows.reserve(eval_set.size());
    for (const auto& s : eval_set) {
        const ProbMap probs = forward(net, params, znormalize(s.image));
        const LabelMap pred = argmax_labels(probs);
        rows.push_back(make_volume_dsc(s.id, s.subset, pred, s.labels, net.classes));
    }
    return aggregate(rows);
}

}  // namespace asc
