#pragma once

#include <span>

#include "ttstream/tensor_train.hpp"

namespace ttstream {

/// Per-increment record of what an update did.
struct UpdateReport {
    Index increment_index = 0;
    Index obs_in_batch = 0;
    Index obs_used = 0;
    std::vector<Index> ranks_before;
    std::vector<Index> ranks_after;
    double eps_target = 0.0;             ///< absolute SVD truncation threshold used
    double batch_rel_error_estimate = 0.0;
    double seconds = 0.0;                ///< CPU time spent in the update
    bool tolerance_clamped = false;      ///< relaxed tolerance hit the fp floor
};

/// Residual of `y` against the span of an orthonormal column block,
/// computed as Y - U (U^T Y). An empty block passes `y` through.
Matrix compute_residual(const Eigen::Ref<const Matrix>& u_pad,
                        const Eigen::Ref<const Matrix>& y);

/// Grows the row space of the next core's unfolding to a new left rank:
/// reshape to r_left_old x (n * r_right), append `added_rank` zero rows,
/// reshape back. Orthonormal columns stay orthonormal.
Matrix pad_core(const Eigen::Ref<const Matrix>& u_next, Index r_left_old,
                Index added_rank);

/// One incremental update appending the batch `y` (spatial shape plus an
/// observation mode) to the accumulation. SVD tolerances are uniform,
/// eps_des * |y|_F / sqrt(d), which caps the batch's relative
/// reconstruction error at eps_des. Earlier observations' reconstructions
/// are untouched: the update only appends directions and pads with zeros.
std::pair<TensorTrain, UpdateReport>
tt_ice_update(const TensorTrain& tt, const DenseTensor& y, double eps_des);

/// Expert variant taking one absolute SVD truncation threshold per
/// spatial dimension (length d).
std::pair<TensorTrain, UpdateReport>
tt_ice_update_with_tolerances(const TensorTrain& tt, const DenseTensor& y,
                              std::span<const double> deltas);

/// Compresses the first increment of a stream into a fresh accumulation.
std::pair<TensorTrain, UpdateReport>
tt_ice_bootstrap(const DenseTensor& y, double eps_des);

} // namespace ttstream
