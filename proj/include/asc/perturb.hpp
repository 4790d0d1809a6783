#pragma once

#include "asc/rng.hpp"
#include "asc/volume.hpp"

namespace asc {

// Axis-aligned box inside a parent grid; covers 20-55% of its volume.
struct CuboidMask {
    Dims origin{0, 0, 0};
    Dims size{0, 0, 0};
    Dims dims{0, 0, 0};

    double fraction() const {
        return static_cast<double>(voxel_count(size)) / static_cast<double>(voxel_count(dims));
    }
    bool contains(int d, int h, int w) const {
        return d >= origin[0] && d < origin[0] + size[0] &&
               h >= origin[1] && h < origin[1] + size[1] &&
               w >= origin[2] && w < origin[2] + size[2];
    }
};

// Draw a box targeting a volume fraction ~ U[0.25, 0.5] with per-axis shape
// jitter; realized fraction after rounding lies in [0.20, 0.55]. Every dim
// must be >= 4.
CuboidMask sample_cuboid(Dims dims, Rng& rng);

// out = b inside the box, a outside.
Volume blend(const Volume& a, const Volume& b, const CuboidMask& m);
ProbMap blend(const ProbMap& a, const ProbMap& b, const CuboidMask& m);

// Blend of two teacher predictions under the same mask used on the inputs;
// used as a constant consistency target.
ProbMap pseudo_label(const ProbMap& pa, const ProbMap& pb, const CuboidMask& m);

}  // namespace asc
