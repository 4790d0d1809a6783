#pragma once

#include <vector>

#include "asc/volume.hpp"

namespace asc {

// Scalar loss plus gradients w.r.t. each student prediction argument, in the
// order the arguments were passed. Teacher arguments never receive gradients.
struct LossValue {
    double value = 0.0;
    std::vector<ProbGrad> grads;
};

// Class-mean soft dice with smoothing eps = 1e-5, background included.
LossValue soft_dice_loss(const ProbMap& p, const ProbMap& y_onehot);

// Mean squared error over all voxels and channels; `pt` is a constant target.
LossValue mse_consistency(const ProbMap& ps, const ProbMap& pt);

// L_seg = dice(P_s, Y) + dice(P_sft, Y); grads for (P_s, P_sft).
LossValue seg_loss(const ProbMap& p_s, const ProbMap& p_sft, const ProbMap& y_onehot);

// Dual appearance term: mse(f_xt, ft_xtfs) + mse(f_xtfs, ft_xt);
// grads for (f_xt, f_xtfs).
LossValue appearance_consistency(const ProbMap& f_xt, const ProbMap& f_xtfs,
                                 const ProbMap& ft_xt, const ProbMap& ft_xtfs);

// Structure term on blended inputs vs blended-teacher pseudo labels:
// mse(f_xt_sp, pseudo_tfs) + mse(f_xtfs_sp, pseudo_t); grads for
// (f_xt_sp, f_xtfs_sp). Pseudo labels must be built with the same cuboid
// masks as the student inputs.
LossValue structure_consistency(const ProbMap& f_xt_sp, const ProbMap& f_xtfs_sp,
                                const ProbMap& pseudo_t, const ProbMap& pseudo_tfs);

// L_total = L_seg + lambda * (L_app + L_str); grads are the seg grads
// followed by the consistency grads scaled by lambda.
LossValue total_loss(const LossValue& seg, const LossValue& app, const LossValue& str,
                     double lambda);

}  // namespace asc
