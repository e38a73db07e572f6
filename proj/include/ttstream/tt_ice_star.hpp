#pragma once

#include "ttstream/tt_ice.hpp"

namespace ttstream {

/// Statistic deciding whether a batch is already represented well enough
/// to skip the core update entirely.
enum class SkipStatistic {
    kMean,      ///< mean of per-observation relative errors
    kFullBatch, ///< pooled relative error of the whole batch (hard guarantee)
};

struct HeuristicConfig {
    double occupancy_threshold = 0.8; ///< skip a core's expansion at or above this
    bool skip_enabled = true;
    bool subselect_enabled = true;
    SkipStatistic skip_statistic = SkipStatistic::kMean;
    bool use_approx_tolerance = false; ///< count-based relaxation instead of exact
};

/// Relative approximation error of each observation in the batch under
/// the train's current basis. Zero-norm observations report error 0.
std::vector<double> per_obs_errors(const TensorTrain& tt, const DenseTensor& y);

/// Partition of batch observation indices by error threshold, order
/// preserved: `selected` holds errors strictly above eps_des.
struct SubselectSplit {
    std::vector<Index> selected;
    std::vector<Index> rejected;
};

SubselectSplit subselect(std::span<const double> errs, double eps_des);

/// Copies the listed observations (nonempty, in order) of a batch into a
/// contiguous tensor.
DenseTensor gather_obs(const DenseTensor& y, std::span<const Index> idx);

/// Relaxed tolerance for updating with only the selected observations:
/// spends the error budget the rejected ones left unused. Requires a
/// nonempty selection; returns eps_des exactly when nothing was rejected.
/// A negative radicand (fp cancellation) clamps to zero; `clamped`
/// reports that when non-null.
double relaxed_tolerance(const DenseTensor& y, const SubselectSplit& split,
                         std::span<const double> errs, double eps_des,
                         bool* clamped = nullptr);

/// Count-based approximation of the relaxed tolerance, valid when
/// observations have similar norms.
double relaxed_tolerance_approx(Index n_batch, Index n_rejected,
                                double mean_rejected_error, double eps_des);

/// Incremental update with the occupancy, subselection, and skip
/// heuristics layered over the plain expansion. The last core always
/// receives the full batch's coefficients; obs_used reports how many
/// observations drove the core expansion (0 when skipped).
std::pair<TensorTrain, UpdateReport>
tt_ice_star_update(const TensorTrain& tt, const DenseTensor& y, double eps_des,
                   const HeuristicConfig& cfg = {});

} // namespace ttstream
