#pragma once

#include <string>
#include <vector>

#include "asc/volume.hpp"

namespace asc {

enum class Subset { normal, abnormal, none };

std::string subset_name(Subset s);

// Per-volume evaluation row: per-class DSC plus the foreground mean.
struct VolumeDsc {
    std::string volume_id;
    Subset subset = Subset::none;
    std::vector<double> per_class;  // length C
    double foreground_mean = 0.0;   // classes 1..C-1
};

struct DscReport {
    std::vector<VolumeDsc> volumes;
    double dsc_abnormal = -1.0;  // -1 when the subset is empty
    double dsc_normal = -1.0;
    double overall = 0.0;
};

// Per-class 2|A∩B| / (|A|+|B|); both empty -> 1, exactly one empty -> 0.
std::vector<double> dsc(const LabelMap& pred, const LabelMap& gt, int classes);

// Volume-mean-of-class-means aggregation, background excluded from the
// reported averages.
DscReport aggregate(const std::vector<VolumeDsc>& volumes);

VolumeDsc make_volume_dsc(const std::string& id, Subset subset, const LabelMap& pred,
                          const LabelMap& gt, int classes);

// CSV: rows `volume,subset,class,dsc` then a summary block
// `aggregate,dsc_a,dsc_n,avg`.
std::string report_csv(const DscReport& report);

}  // namespace asc
