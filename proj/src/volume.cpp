#include "asc/volume.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

namespace asc {

namespace {

constexpr char kMagic[5] = {'R', 'V', 'O', 'L', '1'};

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u32(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v);
    out[1] = static_cast<std::uint8_t>(v >> 8);
    out[2] = static_cast<std::uint8_t>(v >> 16);
    out[3] = static_cast<std::uint8_t>(v >> 24);
}

std::uint32_t get_u32(const std::uint8_t* in) {
    return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
           (static_cast<std::uint32_t>(in[2]) << 16) | (static_cast<std::uint32_t>(in[3]) << 24);
}

void write_header(std::FILE* f, std::uint8_t dtype, const Dims& dims) {
    std::uint8_t header[18];
    std::memcpy(header, kMagic, 5);
    header[5] = dtype;
    put_u32(header + 6, static_cast<std::uint32_t>(dims[0]));
    put_u32(header + 10, static_cast<std::uint32_t>(dims[1]));
    put_u32(header + 14, static_cast<std::uint32_t>(dims[2]));
    if (std::fwrite(header, 1, sizeof(header), f) != sizeof(header))
        throw std::runtime_error("rvol: short header write");
}

}  // namespace

Volume znormalize(const Volume& v) {
    const std::int64_t n = v.size();
    double sum = 0.0;
    for (float x : v.data) sum += x;
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (float x : v.data) {
        const double d = x - mean;
        sq += d * d;
    }
    const double std_dev = std::sqrt(sq / static_cast<double>(n));

    Volume out(v.dims);
    if (std_dev < 1e-8) return out;  // degenerate patch, all zeros
    const double inv = 1.0 / std_dev;
    for (std::int64_t i = 0; i < n; ++i)
        out.data[i] = static_cast<float>((v.data[i] - mean) * inv);
    return out;
}

ProbMap one_hot(const LabelMap& y, int classes) {
    const std::int64_t n = y.size();
    for (std::int64_t i = 0; i < n; ++i)
        if (y.data[i] >= classes)
            throw ShapeError("one_hot: label " + std::to_string(y.data[i]) +
                             " out of range for C=" + std::to_string(classes));
    ProbMap p(classes, y.dims);
    for (std::int64_t i = 0; i < n; ++i) p.at(y.data[i], i) = 1.0f;
    return p;
}

LabelMap argmax_labels(const ProbMap& p) {
    LabelMap out(p.dims);
    const std::int64_t n = p.voxels();
    for (std::int64_t i = 0; i < n; ++i) {
        int best = 0;
        double best_v = p.at(0, i);
        for (int c = 1; c < p.channels; ++c) {
            if (p.at(c, i) > best_v) {
                best_v = p.at(c, i);
                best = c;
            }
        }
        out.data[i] = static_cast<std::uint8_t>(best);
    }
    return out;
}

void write_rvol(const std::string& path, const Volume& v) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("rvol: cannot open for write: " + path);
    write_header(f.get(), 0, v.dims);
    // f32 little-endian payload; assumes LE host (asserted at startup in CLI).
    const std::size_t n = v.data.size();
    if (std::fwrite(v.data.data(), sizeof(float), n, f.get()) != n)
        throw std::runtime_error("rvol: short payload write");
}

void write_rvol(const std::string& path, const LabelMap& y) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("rvol: cannot open for write: " + path);
    write_header(f.get(), 1, y.dims);
    const std::size_t n = y.data.size();
    if (std::fwrite(y.data.data(), 1, n, f.get()) != n)
        throw std::runtime_error("rvol: short payload write");
}

std::variant<Volume, LabelMap> read_rvol(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw ParseError("cannot open: " + path);
    std::uint8_t header[18];
    if (std::fread(header, 1, sizeof(header), f.get()) != sizeof(header))
        throw ParseError("truncated payload: header too short in " + path);
    if (std::memcmp(header, kMagic, 5) != 0) throw ParseError("bad magic in " + path);
    const std::uint8_t dtype = header[5];
    if (dtype > 1) throw ParseError("bad dtype tag " + std::to_string(dtype) + " in " + path);
    Dims dims{static_cast<int>(get_u32(header + 6)), static_cast<int>(get_u32(header + 10)),
              static_cast<int>(get_u32(header + 14))};
    if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
        throw ParseError("dims mismatch: nonpositive dimension in " + path);
    const std::int64_t n = voxel_count(dims);

    if (dtype == 0) {
        Volume v(dims);
        const std::size_t got = std::fread(v.data.data(), sizeof(float), v.data.size(), f.get());
        if (got != v.data.size())
            throw ParseError("truncated payload: expected " + std::to_string(n) + " floats, got " +
                             std::to_string(got) + " in " + path);
        if (std::fgetc(f.get()) != EOF) throw ParseError("dims mismatch: trailing bytes in " + path);
        return v;
    }
    LabelMap y(dims);
    const std::size_t got = std::fread(y.data.data(), 1, y.data.size(), f.get());
    if (got != y.data.size())
        throw ParseError("truncated payload: expected " + std::to_string(n) + " labels, got " +
                         std::to_string(got) + " in " + path);
    if (std::fgetc(f.get()) != EOF) throw ParseError("dims mismatch: trailing bytes in " + path);
    return y;
}

Volume read_rvol_volume(const std::string& path) {
    auto v = read_rvol(path);
    if (!std::holds_alternative<Volume>(v))
        throw ParseError("bad dtype: expected f32 volume in " + path);
    return std::get<Volume>(std::move(v));
}

LabelMap read_rvol_labels(const std::string& path) {
    auto v = read_rvol(path);
    if (!std::holds_alternative<LabelMap>(v))
        throw ParseError("bad dtype: expected u8 labels in " + path);
    return std::get<LabelMap>(std::move(v));
}

}  // namespace asc
