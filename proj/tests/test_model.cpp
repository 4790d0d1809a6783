#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "asc/model.hpp"
#include "asc/rng.hpp"

using namespace asc;

namespace {

Volume random_volume(Dims dims, Rng& rng) {
    Volume v(dims);
    for (auto& x : v.data) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    return v;
}

double grad_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = std::fabs(a[i] - b[i]);
        if (diff < 1e-9) continue;  // both effectively zero
        worst = std::max(worst, diff / std::max({std::fabs(a[i]), std::fabs(b[i]), 1e-8}));
    }
    return worst;
}

}  // namespace

TEST_CASE("init_params is deterministic per seed") {
    NetConfig cfg;
    cfg.seed = 99;
    CHECK(init_params(cfg).values == init_params(cfg).values);
    cfg.seed = 100;
    CHECK(init_params(cfg).values != init_params(NetConfig{.seed = 99}).values);
}

TEST_CASE("parameter count for F=8 C=4") {
    NetConfig cfg;
    cfg.hidden = 8;
    cfg.classes = 4;
    const NetLayout l = net_layout(cfg);
    CHECK(l.total == 2012);  // (27*1*8+8+8) + (27*8*8+8+8) + (8*4+4)
}

TEST_CASE("He init empirical std of first-layer weights") {
    NetConfig cfg;
    double sq = 0.0;
    int n = 0;
    for (int seed = 0; seed < 10; ++seed) {
        cfg.seed = seed;
        const ParamVector p = init_params(cfg);
        const NetLayout l = net_layout(cfg);
        for (std::size_t i = l.w1; i < l.b1; ++i) {
            sq += static_cast<double>(p.values[i]) * p.values[i];
            ++n;
        }
    }
    const double std_dev = std::sqrt(sq / n);
    const double expect = std::sqrt(2.0 / 27.0);
    CHECK(std_dev > 0.8 * expect);
    CHECK(std_dev < 1.2 * expect);
}

TEST_CASE("zero params give a uniform prob map") {
    NetConfig cfg;
    cfg.classes = 4;
    ParamVector p;
    p.values.assign(net_layout(cfg).total, 0.0f);
    Rng rng(1);
    const ProbMap out = forward(cfg, p, random_volume({5, 5, 5}, rng));
    for (float x : out.data) CHECK(x == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("softmax simplex invariant and determinism") {
    NetConfig cfg;
    cfg.seed = 5;
    const ParamVector p = init_params(cfg);
    Rng rng(2);
    const Volume v = random_volume({8, 8, 8}, rng);
    const ProbMap a = forward(cfg, p, v);
    const ProbMap b = forward(cfg, p, v);
    CHECK(a.data == b.data);
    for (std::int64_t i = 0; i < a.voxels(); ++i) {
        double sum = 0.0;
        for (int c = 0; c < a.channels; ++c) {
            sum += a.at(c, i);
            CHECK(a.at(c, i) >= 0.0f);
            CHECK(a.at(c, i) <= 1.0f);
        }
        CHECK(std::fabs(sum - 1.0) < 1e-6);
    }
}

TEST_CASE("interior conv responses shift with a shifted input") {
    // The instance-norm statistics depend on the whole volume, so the full
    // network is only approximately shift-equivariant; the convolution
    // itself must be exactly equivariant away from the padded border.
    NetConfig cfg;
    cfg.seed = 11;
    const ParamVector p = init_params(cfg);
    Rng rng(3);
    const Dims dims{10, 10, 10};
    const Volume v = random_volume(dims, rng);
    Volume shifted(dims);
    for (int d = 0; d + 1 < dims[0]; ++d)
        for (int h = 0; h < dims[1]; ++h)
            for (int w = 0; w < dims[2]; ++w) shifted.at(d + 1, h, w) = v.at(d, h, w);

    ForwardCache ca, cb;
    forward(cfg, p, v, &ca);
    forward(cfg, p, shifted, &cb);
    const std::int64_t n = voxel_count(dims);
    for (int f = 0; f < cfg.hidden; ++f)
        for (int d = 3; d < 6; ++d)
            for (int h = 3; h < 7; ++h)
                for (int w = 3; w < 7; ++w) {
                    const std::int64_t ia =
                        f * n + (static_cast<std::int64_t>(d) * 10 + h) * 10 + w;
                    const std::int64_t ib =
                        f * n + (static_cast<std::int64_t>(d + 1) * 10 + h) * 10 + w;
                    CHECK(std::fabs(ca.z1[ia] - cb.z1[ib]) < 1e-9);
                }
}

TEST_CASE("backward: zero upstream gradient gives zero parameter gradient") {
    NetConfig cfg;
    cfg.hidden = 2;
    cfg.classes = 2;
    cfg.seed = 7;
    const ParamVector p = init_params(cfg);
    Rng rng(4);
    const Volume v = random_volume({4, 4, 4}, rng);
    ForwardCache cache;
    forward(cfg, p, v, &cache);
    const std::vector<double> g = backward(cfg, p, cache, ProbGrad(2, v.dims));
    for (double x : g) CHECK(x == 0.0);
}

TEST_CASE("backward is linear in the upstream gradient") {
    NetConfig cfg;
    cfg.hidden = 2;
    cfg.classes = 2;
    cfg.seed = 8;
    const ParamVector p = init_params(cfg);
    Rng rng(5);
    const Volume v = random_volume({4, 4, 4}, rng);
    ForwardCache cache;
    forward(cfg, p, v, &cache);
    ProbGrad g(2, v.dims), g2(2, v.dims);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        g.data[i] = rng.uniform(-1.0, 1.0);
        g2.data[i] = 2.0 * g.data[i];
    }
    const auto ga = backward(cfg, p, cache, g);
    const auto gb = backward(cfg, p, cache, g2);
    for (std::size_t i = 0; i < ga.size(); ++i)
        CHECK(gb[i] == doctest::Approx(2.0 * ga[i]).epsilon(1e-12));
}

TEST_CASE("finite_diff_grad smoke: quadratic and constant losses") {
    NetConfig cfg;
    cfg.hidden = 2;
    cfg.classes = 2;
    cfg.seed = 9;
    const ParamVector p = init_params(cfg);
    const auto quad = [](const ParamVector& q) {
        double s = 0.0;
        for (float x : q.values) s += static_cast<double>(x) * x;
        return s;
    };
    const auto fd = finite_diff_grad(p, quad);
    for (std::size_t i = 0; i < fd.size(); ++i)
        CHECK(std::fabs(fd[i] - 2.0 * p.values[i]) < 1e-6);

    const auto fd0 = finite_diff_grad(p, [](const ParamVector&) { return 1.0; });
    for (double x : fd0) CHECK(x == 0.0);
}

TEST_CASE("analytic gradient matches finite differences through a scalar loss") {
    for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
        NetConfig cfg;
        cfg.hidden = 2;
        cfg.classes = 2;
        cfg.seed = seed;
        const ParamVector p = init_params(cfg);
        Rng rng(seed);
        const Volume v = random_volume({4, 4, 4}, rng);

        // L = sum of squared probabilities; dL/dP = 2P
        const auto loss = [&](const ParamVector& q) {
            const ProbMap out = forward(cfg, q, v);
            double s = 0.0;
            for (double x : out.data) s += x * x;
            return s;
        };
        ForwardCache cache;
        const ProbMap probs = forward(cfg, p, v, &cache);
        ProbGrad up(2, v.dims);
        for (std::size_t i = 0; i < up.data.size(); ++i) up.data[i] = 2.0 * probs.data[i];

        const auto analytic = backward(cfg, p, cache, up);
        const auto fd = finite_diff_grad(p, loss);
        CHECK(grad_rel_error(analytic, fd) < 1e-3);
    }
}

TEST_CASE("backward rejects mismatched upstream shape") {
    NetConfig cfg;
    cfg.hidden = 2;
    cfg.classes = 2;
    cfg.seed = 1;
    const ParamVector p = init_params(cfg);
    Rng rng(6);
    ForwardCache cache;
    forward(cfg, p, random_volume({4, 4, 4}, rng), &cache);
    CHECK_THROWS_AS(backward(cfg, p, cache, ProbGrad(3, {4, 4, 4})), ShapeError);
}

TEST_CASE("checkpoint round-trip") {
    NetConfig cfg;
    cfg.seed = 31;
    const ParamVector p = init_params(cfg);
    const std::string path =
        (std::filesystem::temp_directory_path() / "asc_ckpt_test.ascp").string();
    write_checkpoint(path, p);
    const ParamVector back = read_checkpoint(path);
    CHECK(back.values == p.values);
    std::filesystem::remove(path);
}
