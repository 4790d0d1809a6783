#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asc/commands.hpp"
#include "asc/trainer.hpp"

namespace {

asc::Config load_config(const std::string& path) {
    return path.empty() ? asc::Config{} : asc::parse_config_file(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ASC: appearance/structure-consistent domain adaptation for 3D segmentation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, src_path, tgt_path, out_path, ckpt_path, manifest_path;
    double beta = 0.1;
    int seeds = 1, classes = 4, hidden = 8;
    asc::GenDataCounts counts;
    std::vector<double> gamma_values{10, 100, 200, 500, 1000};

    auto* gen = app.add_subcommand("gen-data", "Generate the synthetic two-domain benchmark");
    gen->add_option("--config", config_path, "Config file (key=value)");
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--n-source", counts.n_source, "Labeled source volumes");
    gen->add_option("--n-target-train", counts.n_target_train, "Unlabeled target volumes");
    gen->add_option("--n-target-test", counts.n_target_test, "Held-out labeled target volumes");
    gen->add_option("--abnormal-fraction", counts.abnormal_fraction,
                    "Fraction of targets with deformed anatomy");

    auto* fda = app.add_subcommand("fda-transform", "Swap low-frequency amplitude between volumes");
    fda->add_option("--src", src_path, "Source volume (phase keeper)")->required();
    fda->add_option("--tgt", tgt_path, "Target volume (style donor)")->required();
    fda->add_option("--beta", beta, "Low-frequency mask fraction");
    fda->add_option("--out", out_path, "Output RVOL path")->required();

    auto* tr = app.add_subcommand("train", "Train the teacher-student model");
    tr->add_option("--config", config_path, "Config file (key=value)")->required();

    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on target-test volumes");
    ev->add_option("--ckpt", ckpt_path, "ASCP1 checkpoint")->required();
    ev->add_option("--manifest", manifest_path, "Dataset manifest CSV")->required();
    ev->add_option("--classes", classes, "Class count the checkpoint was trained with");
    ev->add_option("--hidden", hidden, "Hidden channel count");
    ev->add_option("--out", out_path, "Report CSV path (stdout when omitted)");

    auto* ab = app.add_subcommand("ablate", "Run the M1..M5 ablation ladder");
    ab->add_option("--config", config_path, "Config file (key=value)")->required();
    ab->add_option("--seeds", seeds, "Runs per mode, seeds seed..seed+n-1");
    ab->add_option("--out", out_path, "Table CSV path")->required();

    auto* sw = app.add_subcommand("sweep-gamma", "Sweep the consistency weight gamma");
    sw->add_option("--config", config_path, "Config file (key=value)")->required();
    sw->add_option("--values", gamma_values, "Gamma values")->delimiter(',');
    sw->add_option("--seeds", seeds, "Runs per value");
    sw->add_option("--out", out_path, "Table CSV path")->required();

    auto* st = app.add_subcommand("selftest", "Run built-in verification suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : asc::kUsageError;
    }

    try {
        if (gen->parsed()) {
            asc::cmd_gen_data(load_config(config_path), out_dir, counts);
        } else if (fda->parsed()) {
            asc::cmd_fda_transform(src_path, tgt_path, beta, out_path);
        } else if (tr->parsed()) {
            asc::cmd_train(asc::parse_config_file(config_path));
        } else if (ev->parsed()) {
            asc::cmd_eval(ckpt_path, manifest_path, classes, hidden, out_path);
        } else if (ab->parsed()) {
            asc::cmd_ablate(asc::parse_config_file(config_path), seeds, out_path);
        } else if (sw->parsed()) {
            asc::cmd_sweep_gamma(asc::parse_config_file(config_path), gamma_values, seeds, out_path);
        } else if (st->parsed()) {
            return asc::cmd_selftest() == 0 ? asc::kOk : asc::kNumericalError;
        }
    } catch (const asc::NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return asc::kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return asc::kUsageError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return asc::kDataError;
    }
    return asc::kOk;
}
