#include "asc/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "asc/fourier.hpp"
#include "asc/losses.hpp"
#include "asc/perturb.hpp"
#include "asc/rng.hpp"
#include "asc/synthdata.hpp"

namespace fs = std::filesystem;

namespace asc {

namespace {

PhantomSpec spec_from_config(const Config& cfg) {
    PhantomSpec spec;
    spec.dims = cfg.dims;
    spec.classes = cfg.classes;
    spec.seed = cfg.seed;
    return spec;
}

TrainConfig train_config_from(const Config& cfg) {
    TrainConfig tc;
    tc.beta = cfg.beta;
    tc.batch = cfg.batch;
    tc.epochs = cfg.epochs;
    tc.seed = cfg.seed;
    tc.ablation = parse_ablation(cfg.ablation);
    tc.deterministic = cfg.deterministic;
    tc.ckpt_every = cfg.ckpt_every;
    tc.out_dir = cfg.out_dir;
    tc.sched.lr_init = cfg.lr;
    tc.sched.gamma = cfg.gamma;
    tc.sched.ema_alpha = cfg.alpha;
    tc.sched.epochs_total = cfg.epochs;
    tc.net.classes = cfg.classes;
    tc.net.seed = cfg.seed;
    return tc;
}

std::string basename_of(const std::string& path) { return fs::path(path).filename().string(); }

Subset parse_subset(const std::string& s) {
    if (s == "normal") return Subset::normal;
    if (s == "abnormal") return Subset::abnormal;
    return Subset::none;
}

}  // namespace

void cmd_gen_data(const Config& cfg, const std::string& out_dir, const GenDataCounts& counts) {
    fs::create_directories(out_dir);
    const PhantomSpec spec = spec_from_config(cfg);
    std::vector<ManifestRow> rows;
    char name[64];

    const auto src = gen_source(counts.n_source, spec);
    for (int i = 0; i < counts.n_source; ++i) {
        std::snprintf(name, sizeof(name), "source_%03d.rvol", i);
        const std::string path = out_dir + "/" + name;
        write_rvol(path, src[i].image);
        write_rvol(labels_path_for(path), src[i].labels);
        rows.push_back({path, "source", "-"});
    }

    // One target pool; the training split keeps its labels withheld.
    const auto tgt =
        gen_target(counts.n_target_train + counts.n_target_test, spec, counts.abnormal_fraction);
    for (int i = 0; i < counts.n_target_train; ++i) {
        std::snprintf(name, sizeof(name), "target_train_%03d.rvol", i);
        const std::string path = out_dir + "/" + name;
        write_rvol(path, tgt[i].image);
        rows.push_back({path, "target-train", subset_name(tgt[i].subset)});
    }
    for (int i = 0; i < counts.n_target_test; ++i) {
        const auto& t = tgt[counts.n_target_train + i];
        std::snprintf(name, sizeof(name), "target_test_%03d.rvol", i);
        const std::string path = out_dir + "/" + name;
        write_rvol(path, t.image);
        write_rvol(labels_path_for(path), t.labels);
        rows.push_back({path, "target-test", subset_name(t.subset)});
    }

    write_manifest(out_dir + "/manifest.csv", rows);
    write_text_file(out_dir + "/run.json", config_json(cfg));
}

void cmd_fda_transform(const std::string& src_path, const std::string& tgt_path, double beta,
                       const std::string& out_path) {
    const Volume src = read_rvol_volume(src_path);
    const Volume tgt = read_rvol_volume(tgt_path);
    write_rvol(out_path, amplitude_swap(src, tgt, beta));
}

void load_train_set(const std::string& manifest_path, std::vector<SourceSample>& source,
                    std::vector<Volume>& target) {
    source.clear();
    target.clear();
    for (const auto& row : read_manifest(manifest_path)) {
        if (row.role == "source") {
            SourceSample s;
            s.image = read_rvol_volume(row.path);
            s.labels = read_rvol_labels(labels_path_for(row.path));
            source.push_back(std::move(s));
        } else if (row.role == "target-train") {
            target.push_back(read_rvol_volume(row.path));
        }
    }
}

std::vector<EvalSample> load_eval_set(const std::string& manifest_path, const std::string& role) {
    std::vector<EvalSample> out;
    for (const auto& row : read_manifest(manifest_path)) {
        if (row.role != role) continue;
        EvalSample s;
        s.id = basename_of(row.path);
        s.image = read_rvol_volume(row.path);
        s.labels = read_rvol_labels(labels_path_for(row.path));
        s.subset = parse_subset(row.subset);
        out.push_back(std::move(s));
    }
    return out;
}

DscReport cmd_train(const Config& cfg) {
    if (cfg.data_dir.empty() || cfg.out_dir.empty())
        throw std::invalid_argument("train: config must set data_dir and out_dir");
    fs::create_directories(cfg.out_dir);

    std::vector<SourceSample> source;
    std::vector<Volume> target;
    load_train_set(cfg.data_dir + "/manifest.csv", source, target);

    const TrainConfig tc = train_config_from(cfg);
    const TrainResult result = train(tc, source, target);

    write_text_file(cfg.out_dir + "/trainlog.csv", result.log.csv());
    write_checkpoint(cfg.out_dir + "/student.ascp", result.student);
    write_checkpoint(cfg.out_dir + "/teacher.ascp", result.teacher);
    write_text_file(cfg.out_dir + "/run.json", config_json(cfg));

    const auto eval_set = load_eval_set(cfg.data_dir + "/manifest.csv", "target-test");
    DscReport report;
    if (!eval_set.empty()) {
        report = evaluate(tc.net, result.student, eval_set);
        write_text_file(cfg.out_dir + "/report.csv", report_csv(report));
    }
    return report;
}

void cmd_eval(const std::string& ckpt_path, const std::string& manifest_path, int classes,
              int hidden, const std::string& out_path) {
    NetConfig net;
    net.classes = classes;
    net.hidden = hidden;
    const ParamVector params = read_checkpoint(ckpt_path);
    if (params.values.size() != net_layout(net).total)
        throw ParseError("eval: checkpoint size does not match classes/hidden");
    const auto eval_set = load_eval_set(manifest_path, "target-test");
    if (eval_set.empty()) throw ParseError("eval: no target-test rows in " + manifest_path);
    const std::string csv = report_csv(evaluate(net, params, eval_set));
    if (out_path.empty())
        std::fputs(csv.c_str(), stdout);
    else
        write_text_file(out_path, csv);
}

void cmd_ablate(const Config& cfg, int seeds, const std::string& out_path) {
    std::string csv = "mode,dsc_a,dsc_n,avg\n";
    char buf[128];
    for (int mode = 1; mode <= 5; ++mode) {
        double sum_a = 0.0, sum_n = 0.0, sum_avg = 0.0;
        for (int r = 0; r < seeds; ++r) {
            Config run = cfg;
            run.ablation = "M" + std::to_string(mode);
            run.seed = cfg.seed + static_cast<std::uint64_t>(r);
            run.out_dir = cfg.out_dir + "/ablate_M" + std::to_string(mode) + "_seed" +
                          std::to_string(run.seed);
            const DscReport rep = cmd_train(run);
            sum_a += rep.dsc_abnormal;
            sum_n += rep.dsc_normal;
            sum_avg += rep.overall;
        }
        std::snprintf(buf, sizeof(buf), "M%d,%.6f,%.6f,%.6f\n", mode, sum_a / seeds, sum_n / seeds,
                      sum_avg / seeds);
        csv += buf;
    }
    write_text_file(out_path, csv);
}

void cmd_sweep_gamma(const Config& cfg, const std::vector<double>& values, int seeds,
                     const std::string& out_path) {
    std::string csv = "gamma,dsc_a,dsc_n,avg\n";
    char buf[128];
    for (double g : values) {
        double sum_a = 0.0, sum_n = 0.0, sum_avg = 0.0;
        for (int r = 0; r < seeds; ++r) {
            Config run = cfg;
            run.gamma = g;
            run.seed = cfg.seed + static_cast<std::uint64_t>(r);
            std::snprintf(buf, sizeof(buf), "/sweep_gamma%g_seed%llu", g,
                          static_cast<unsigned long long>(run.seed));
            run.out_dir = cfg.out_dir + buf;
            const DscReport rep = cmd_train(run);
            sum_a += rep.dsc_abnormal;
            sum_n += rep.dsc_normal;
            sum_avg += rep.overall;
        }
        std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f,%.6f\n", g, sum_a / seeds, sum_n / seeds,
                      sum_avg / seeds);
        csv += buf;
    }
    write_text_file(out_path, csv);
}

int cmd_selftest() {
    int failures = 0;
    const auto report = [&](const char* suite, bool ok, const std::string& detail) {
        std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", suite, detail.empty() ? "" : ": ",
                    detail.c_str());
        if (!ok) ++failures;
    };

    {  // FFT round-trip on random odd/even sizes
        Rng rng(11);
        double worst = 0.0;
        for (const Dims dims : {Dims{16, 16, 16}, Dims{12, 10, 15}, Dims{24, 24, 24}}) {
            Volume v(dims);
            for (auto& x : v.data) x = static_cast<float>(rng.uniform(-1.0, 1.0));
            const IfftResult r = ifft3(fft3(v));
            for (std::int64_t i = 0; i < v.size(); ++i)
                worst = std::max(worst, std::fabs(static_cast<double>(r.real.data[i]) - v.data[i]));
            worst = std::max(worst, r.max_abs_imag);
        }
        report("fft-round-trip", worst < 1e-5, "max error " + std::to_string(worst));
    }

    {  // agreement with the direct DFT on small grids
        Rng rng(12);
        double worst = 0.0;
        for (const Dims dims : {Dims{4, 4, 4}, Dims{3, 4, 2}, Dims{2, 3, 5}}) {
            Volume v(dims);
            for (auto& x : v.data) x = static_cast<float>(rng.uniform(-1.0, 1.0));
            const Spectrum fast = fft3(v);
            const Spectrum slow = dft3_reference(v);
            for (std::size_t i = 0; i < fast.data.size(); ++i)
                worst = std::max(worst, std::abs(fast.data[i] - slow.data[i]));
        }
        report("dft-oracle", worst < 1e-8, "max deviation " + std::to_string(worst));
    }

    {  // analytic vs finite-difference gradients on a tiny net
        NetConfig net;
        net.hidden = 2;
        net.classes = 2;
        net.seed = 3;
        Rng rng(13);
        Volume v({4, 4, 4});
        for (auto& x : v.data) x = static_cast<float>(rng.uniform(-1.0, 1.0));
        LabelMap y({4, 4, 4});
        for (auto& l : y.data) l = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
        const ProbMap yh = one_hot(y, 2);
        const ParamVector p = init_params(net);

        ForwardCache cache;
        const ProbMap probs = forward(net, p, v, &cache);
        const LossValue loss = soft_dice_loss(probs, yh);
        const std::vector<double> analytic = backward(net, p, cache, loss.grads[0]);
        const std::vector<double> fd = finite_diff_grad(
            p, [&](const ParamVector& q) { return soft_dice_loss(forward(net, q, v), yh).value; });
        double worst = 0.0;
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double denom = std::max({std::fabs(analytic[i]), std::fabs(fd[i]), 1e-8});
            if (std::fabs(analytic[i] - fd[i]) < 1e-9) continue;
            worst = std::max(worst, std::fabs(analytic[i] - fd[i]) / denom);
        }
        report("gradient-check", worst < 1e-3, "max rel error " + std::to_string(worst));
    }

    {  // cuboid fraction bounds
        Rng rng(14);
        bool ok = true;
        for (int i = 0; i < 1000 && ok; ++i) {
            const CuboidMask m = sample_cuboid({16, 16, 16}, rng);
            const double f = m.fraction();
            ok = f >= 0.20 && f <= 0.55;
            for (int k = 0; k < 3; ++k)
                ok = ok && m.origin[k] >= 0 && m.origin[k] + m.size[k] <= 16;
        }
        report("mask-fraction", ok, "");
    }

    {  // EMA geometric contraction toward a constant student
        NetConfig net;
        net.hidden = 2;
        net.classes = 2;
        net.seed = 5;
        ParamVector teacher = init_params(net);
        ParamVector student = teacher;
        for (auto& x : student.values) x = 0.0f;
        double d0 = 0.0;
        for (float x : teacher.values) d0 += static_cast<double>(x) * x;
        d0 = std::sqrt(d0);
        for (int k = 0; k < 10; ++k) ema_update(teacher, student, 0.99);
        double dk = 0.0;
        for (float x : teacher.values) dk += static_cast<double>(x) * x;
        dk = std::sqrt(dk);
        const double expected = std::pow(0.99, 10) * d0;
        const double rel = std::fabs(dk - expected) / expected;
        report("ema-contraction", rel < 1e-6, "rel error " + std::to_string(rel));
    }

    return failures;
}

}  // namespace asc
