#include <doctest.h>

#include "asc/metrics.hpp"
#include "asc/rng.hpp"

using namespace asc;

TEST_CASE("dsc of identical maps is 1 everywhere") {
    Rng rng(1);
    LabelMap y({4, 4, 4});
    for (auto& l : y.data) l = static_cast<std::uint8_t>(rng.uniform_int(0, 3));
    for (double d : dsc(y, y, 4)) CHECK(d == 1.0);
}

TEST_CASE("dsc class absent from both is 1") {
    LabelMap a({2, 2, 2}, 0), b({2, 2, 2}, 0);
    const auto d = dsc(a, b, 3);
    CHECK(d[0] == 1.0);
    CHECK(d[1] == 1.0);  // absent everywhere
    CHECK(d[2] == 1.0);
}

TEST_CASE("dsc class present in exactly one is 0") {
    LabelMap a({2, 2, 2}, 0), b({2, 2, 2}, 1);
    const auto d = dsc(a, b, 2);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);
}

TEST_CASE("dsc hand-counted overlap") {
    // 2x2x2 grid, class 1: pred marks 4 voxels, gt marks 4, overlap 2
    LabelMap pred({2, 2, 2}, 0), gt({2, 2, 2}, 0);
    pred.data = {1, 1, 1, 1, 0, 0, 0, 0};
    gt.data = {1, 1, 0, 0, 1, 1, 0, 0};
    const auto d = dsc(pred, gt, 2);
    CHECK(d[1] == doctest::Approx(0.5));
}

TEST_CASE("dsc is symmetric") {
    Rng rng(2);
    LabelMap a({4, 4, 4}), b({4, 4, 4});
    for (auto& l : a.data) l = static_cast<std::uint8_t>(rng.uniform_int(0, 2));
    for (auto& l : b.data) l = static_cast<std::uint8_t>(rng.uniform_int(0, 2));
    CHECK(dsc(a, b, 3) == dsc(b, a, 3));
}

TEST_CASE("dsc rejects dims mismatch") {
    CHECK_THROWS_AS(dsc(LabelMap({2, 2, 2}), LabelMap({2, 2, 3}), 2), ShapeError);
}

TEST_CASE("aggregate: single normal volume") {
    VolumeDsc v;
    v.volume_id = "v0";
    v.subset = Subset::normal;
    v.per_class = {0.99, 0.8, 0.6, 1.0};
    v.foreground_mean = 0.8;
    const DscReport r = aggregate({v});
    CHECK(r.dsc_normal == doctest::Approx(0.8));
    CHECK(r.dsc_abnormal == -1.0);  // undefined, omitted in CSV
    CHECK(r.overall == doctest::Approx(0.8));
}

TEST_CASE("aggregate: identical volumes") {
    VolumeDsc v;
    v.subset = Subset::abnormal;
    v.per_class = {1.0, 0.7};
    v.foreground_mean = 0.7;
    const DscReport r = aggregate({v, v, v});
    CHECK(r.dsc_abnormal == doctest::Approx(0.7));
    CHECK(r.overall == doctest::Approx(0.7));
}

TEST_CASE("aggregate: mixed subsets") {
    VolumeDsc a, n;
    a.subset = Subset::abnormal;
    a.foreground_mean = 0.7;
    n.subset = Subset::normal;
    n.foreground_mean = 0.9;
    const DscReport r = aggregate({a, n});
    CHECK(r.dsc_abnormal == doctest::Approx(0.7));
    CHECK(r.dsc_normal == doctest::Approx(0.9));
    CHECK(r.overall == doctest::Approx(0.8));
}

TEST_CASE("make_volume_dsc excludes background from the foreground mean") {
    LabelMap pred({2, 2, 2}, 0), gt({2, 2, 2}, 0);
    pred.data = {1, 1, 2, 2, 0, 0, 0, 0};
    gt.data = {1, 1, 2, 0, 0, 0, 0, 2};
    const VolumeDsc row = make_volume_dsc("x", Subset::normal, pred, gt, 3);
    const auto d = dsc(pred, gt, 3);
    CHECK(row.foreground_mean == doctest::Approx((d[1] + d[2]) / 2.0));
}

TEST_CASE("report CSV aggregates are recomputable from the rows") {
    Rng rng(3);
    std::vector<VolumeDsc> rows;
    for (int i = 0; i < 6; ++i) {
        LabelMap pred({4, 4, 4}), gt({4, 4, 4});
        for (auto& l : pred.data) l = static_cast<std::uint8_t>(rng.uniform_int(0, 3));
        for (auto& l : gt.data) l = static_cast<std::uint8_t>(rng.uniform_int(0, 3));
        rows.push_back(make_volume_dsc("v" + std::to_string(i),
                                       i % 2 ? Subset::normal : Subset::abnormal, pred, gt, 4));
    }
    const DscReport r = aggregate(rows);
    // recompute from the per-volume table
    double sa = 0.0, sn = 0.0, sum = 0.0;
    int ca = 0, cn = 0;
    for (const auto& v : r.volumes) {
        double fg = 0.0;
        for (std::size_t c = 1; c < v.per_class.size(); ++c) fg += v.per_class[c];
        fg /= 3.0;
        sum += fg;
        if (v.subset == Subset::abnormal) {
            sa += fg;
            ++ca;
        } else {
            sn += fg;
            ++cn;
        }
    }
    CHECK(r.dsc_abnormal == doctest::Approx(sa / ca).epsilon(1e-12));
    CHECK(r.dsc_normal == doctest::Approx(sn / cn).epsilon(1e-12));
    CHECK(r.overall == doctest::Approx(sum / 6.0).epsilon(1e-12));

    const std::string csv = report_csv(r);
    CHECK(csv.find("volume,subset,class,dsc") == 0);
    CHECK(csv.find("aggregate,") != std::string::npos);
}
