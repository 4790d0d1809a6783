#pragma once

#include <string>
#include <vector>

#include "asc/config.hpp"
#include "asc/metrics.hpp"
#include "asc/trainer.hpp"

namespace asc {

// Exit codes shared by every subcommand.
enum ExitCode { kOk = 0, kUsageError = 1, kDataError = 2, kNumericalError = 3 };

struct GenDataCounts {
    int n_source = 20;
    int n_target_train = 20;
    int n_target_test = 20;
    double abnormal_fraction = 0.5;
};

void cmd_gen_data(const Config& cfg, const std::string& out_dir, const GenDataCounts& counts);

void cmd_fda_transform(const std::string& src_path, const std::string& tgt_path, double beta,
                       const std::string& out_path);

// Trains on cfg.data_dir's manifest, writes trainlog.csv, student.ascp,
// teacher.ascp and run.json under cfg.out_dir. Returns the final report on
// the target-test rows (also written as report.csv).
DscReport cmd_train(const Config& cfg);

void cmd_eval(const std::string& ckpt_path, const std::string& manifest_path, int classes,
              int hidden, const std::string& out_path);

// Runs the M1..M5 ladder; one row per mode averaged over `seeds` runs.
void cmd_ablate(const Config& cfg, int seeds, const std::string& out_path);

void cmd_sweep_gamma(const Config& cfg, const std::vector<double>& values, int seeds,
                     const std::string& out_path);

// Built-in verification suites; returns the number of failed suites and
// prints one PASS/FAIL line per suite.
int cmd_selftest();

// Helpers shared with tests.
std::vector<EvalSample> load_eval_set(const std::string& manifest_path, const std::string& role);
void load_train_set(const std::string& manifest_path, std::vector<SourceSample>& source,
                    std::vector<Volume>& target);

}  // namespace asc
