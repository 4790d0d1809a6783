#include "asc/metrics.hpp"

#include <cstdio>

namespace asc {

std::string subset_name(Subset s) {
    switch (s) {
        case Subset::normal: return "normal";
        case Subset::abnormal: return "abnormal";
        default: return "-";
    }
}

std::vector<double> dsc(const LabelMap& pred, const LabelMap& gt, int classes) {
    if (pred.dims != gt.dims) throw ShapeError("dsc: dims mismatch");
    std::vector<std::int64_t> inter(classes, 0), np(classes, 0), ng(classes, 0);
    const std::int64_t n = pred.size();
    for (std::int64_t i = 0; i < n; ++i) {
        const int p = pred.data[i], g = gt.data[i];
        if (p < classes) ++np[p];
        if (g < classes) ++ng[g];
        if (p == g && p < classes) ++inter[p];
    }
    std::vector<double> out(classes);
    for (int c = 0; c < classes; ++c) {
        if (np[c] + ng[c] == 0)
            out[c] = 1.0;  // absent from both
        else
            out[c] = 2.0 * inter[c] / static_cast<double>(np[c] + ng[c]);
    }
    return out;
}

VolumeDsc make_volume_dsc(const std::string& id, Subset subset, const LabelMap& pred,
                          const LabelMap& gt, int classes) {
    VolumeDsc row;
    row.volume_id = id;
    row.subset = subset;
    row.per_class = dsc(pred, gt, classes);
    double sum = 0.0;
    for (int c = 1; c < classes; ++c) sum += row.per_class[c];
    row.foreground_mean = classes > 1 ? sum / (classes - 1) : 0.0;
    return row;
}

DscReport aggregate(const std::vector<VolumeDsc>& volumes) {
    DscReport r;
    r.volumes = volumes;
    double sum_a = 0.0, sum_n = 0.0, sum_all = 0.0;
    int cnt_a = 0, cnt_n = 0;
    for (const auto& v : volumes) {
        sum_all += v.foreground_mean;
        if (v.subset == Subset::abnormal) {
            sum_a += v.foreground_mean;
            ++cnt_a;
        } else if (v.subset == Subset::normal) {
            sum_n += v.foreground_mean;
            ++cnt_n;
        }
    }
    if (cnt_a > 0) r.dsc_abnormal = sum_a / cnt_a;
    if (cnt_n > 0) r.dsc_normal = sum_n / cnt_n;
    r.overall = volumes.empty() ? 0.0 : sum_all / static_cast<double>(volumes.size());
    return r;
}

std::string report_csv(const DscReport& report) {
    std::string out = "volume,subset,class,dsc\n";
    char buf[160];
    for (const auto& v : report.volumes)
        for (std::size_t c = 0; c < v.per_class.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.6f\n", v.volume_id.c_str(),
                          subset_name(v.subset).c_str(), c, v.per_class[c]);
            out += buf;
        }
    const auto fmt = [&](double x) -> std::string {
        if (x < 0.0) return "-";
        std::snprintf(buf, sizeof(buf), "%.6f", x);
        return buf;
    };
    out += "aggregate," + fmt(report.dsc_abnormal) + "," + fmt(report.dsc_normal) + "," +
           fmt(report.overall) + "\n";
    return out;
}

}  // namespace asc
