#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asc/metrics.hpp"
#include "asc/model.hpp"
#include "asc/sched.hpp"
#include "asc/synthdata.hpp"
#include "asc/volume.hpp"

namespace asc {

// Ablation ladder: each mode adds one loss term on top of the previous.
//   M1: L_seg(X_s) only
//   M2: + L_seg(X_sft)
//   M3: + L_app_con(X_t)        (student X_t vs teacher X_tfs)
//   M4: + L_app_con(X_tfs)      (student X_tfs vs teacher X_t)
//   M5: + L_str_con             (cuboid-blended views vs blended pseudo labels)
enum class Ablation { M1 = 1, M2, M3, M4, M5 };

Ablation parse_ablation(const std::string& name);
std::string ablation_name(Ablation a);

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainConfig {
    double beta = 0.1;
    int batch = 4;  // 2 source + 2 target
    int epochs = 100;
    std::uint64_t seed = 0;
    Ablation ablation = Ablation::M5;
    bool deterministic = true;
    int ckpt_every = 0;  // 0 disables periodic checkpoints
    std::string out_dir;  // used only when ckpt_every > 0
    ScheduleConfig sched;
    NetConfig net;
};

struct TrainRecord {
    std::int64_t step = 0;
    int epoch = 0;
    double lr = 0.0;
    double lambda = 0.0;
    double l_seg = 0.0;
    double l_app = 0.0;
    double l_str = 0.0;
    double l_total = 0.0;
};

struct TrainLog {
    std::vector<TrainRecord> records;
    std::string csv() const;  // header step,epoch,lr,lambda,l_seg,l_app,l_str,l_total
};

struct TrainResult {
    ParamVector student;
    ParamVector teacher;
    TrainLog log;
};

TrainResult train(const TrainConfig& cfg, const std::vector<SourceSample>& source,
                  const std::vector<Volume>& target);

struct EvalSample {
    std::string id;
    Volume image;
    LabelMap labels;
    Subset subset = Subset::none;
};

DscReport evaluate(const NetConfig& net, const ParamVector& params,
                   const std::vector<EvalSample>& eval_set);

}  // namespace asc
