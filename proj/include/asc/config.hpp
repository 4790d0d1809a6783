#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asc/volume.hpp"

namespace asc {

// Flat key=value run configuration. Unknown keys are rejected; missing keys
// take the defaults below.
struct Config {
    Dims dims{24, 24, 24};
    int classes = 4;
    double beta = 0.1;
    double alpha = 0.99;
    double gamma = 200.0;
    double lr = 1e-4;
    int epochs = 100;
    int batch = 4;
    std::uint64_t seed = 0;
    std::string ablation = "M5";
    bool deterministic = true;
    int ckpt_every = 0;
    std::string data_dir;
    std::string out_dir;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Resolved-config snapshot (flat JSON) written next to every run's outputs.
std::string config_json(const Config& cfg);

// Manifest rows written by gen-data and consumed by train/eval.
struct ManifestRow {
    std::string path;
    std::string role;    // source | target-train | target-test
    std::string subset;  // normal | abnormal | -
};

std::vector<ManifestRow> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows);

// Label files live next to image files: foo.rvol -> foo_labels.rvol.
std::string labels_path_for(const std::string& image_path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace asc
