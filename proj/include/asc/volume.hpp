#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace asc {

using Dims = std::array<int, 3>;  // (D, H, W)

inline std::int64_t voxel_count(const Dims& d) {
    return static_cast<std::int64_t>(d[0]) * d[1] * d[2];
}

// Raised when a binary file fails to parse; `what()` starts with one of
// "bad magic", "truncated payload", "dims mismatch", "bad dtype".
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Dense real-valued 3D scalar grid, row-major with W fastest.
struct Volume {
    Dims dims{0, 0, 0};
    std::vector<float> data;

    Volume() = default;
    Volume(Dims d, float fill = 0.0f)
        : dims(d), data(static_cast<std::size_t>(voxel_count(d)), fill) {}

    std::int64_t size() const { return voxel_count(dims); }
    float& at(int d, int h, int w) {
        return data[(static_cast<std::size_t>(d) * dims[1] + h) * dims[2] + w];
    }
    float at(int d, int h, int w) const {
        return data[(static_cast<std::size_t>(d) * dims[1] + h) * dims[2] + w];
    }
};

// Per-voxel class indices, same layout as Volume.
struct LabelMap {
    Dims dims{0, 0, 0};
    std::vector<std::uint8_t> data;

    LabelMap() = default;
    LabelMap(Dims d, std::uint8_t fill = 0)
        : dims(d), data(static_cast<std::size_t>(voxel_count(d)), fill) {}

    std::int64_t size() const { return voxel_count(dims); }
    std::uint8_t& at(int d, int h, int w) {
        return data[(static_cast<std::size_t>(d) * dims[1] + h) * dims[2] + w];
    }
    std::uint8_t at(int d, int h, int w) const {
        return data[(static_cast<std::size_t>(d) * dims[1] + h) * dims[2] + w];
    }
};

// Per-voxel class probabilities, channel-major: data[c * voxels + p].
// Kept in f64 so loss values and their gradients are exact to working
// precision (activations and gradients are f64 throughout).
struct ProbMap {
    int channels = 0;
    Dims dims{0, 0, 0};
    std::vector<double> data;

    ProbMap() = default;
    ProbMap(int c, Dims d, double fill = 0.0)
        : channels(c), dims(d),
          data(static_cast<std::size_t>(c) * voxel_count(d), fill) {}

    std::int64_t voxels() const { return voxel_count(dims); }
    double& at(int c, std::int64_t p) { return data[c * voxels() + p]; }
    double at(int c, std::int64_t p) const { return data[c * voxels() + p]; }
};

// Gradient w.r.t. a ProbMap, same channel-major layout, kept in f64.
struct ProbGrad {
    int channels = 0;
    Dims dims{0, 0, 0};
    std::vector<double> data;

    ProbGrad() = default;
    ProbGrad(int c, Dims d)
        : channels(c), dims(d), data(static_cast<std::size_t>(c) * voxel_count(d), 0.0) {}

    std::int64_t voxels() const { return voxel_count(dims); }
    double& at(int c, std::int64_t p) { return data[c * voxels() + p]; }
    double at(int c, std::int64_t p) const { return data[c * voxels() + p]; }
};

// Zero-mean unit-variance rescale; all zeros when the input is (near) constant.
Volume znormalize(const Volume& v);

// One-hot encoding; throws ShapeError if any label >= classes.
ProbMap one_hot(const LabelMap& y, int classes);

// Argmax over channels, lowest index wins ties.
LabelMap argmax_labels(const ProbMap& p);

// RVOL binary container: magic "RVOL1", dtype byte (0 = f32, 1 = u8 labels),
// three LE u32 dims, raw LE payload.
void write_rvol(const std::string& path, const Volume& v);
void write_rvol(const std::string& path, const LabelMap& y);
std::variant<Volume, LabelMap> read_rvol(const std::string& path);

Volume read_rvol_volume(const std::string& path);
LabelMap read_rvol_labels(const std::string& path);

}  // namespace asc
