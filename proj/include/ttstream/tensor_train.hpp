#pragma once

#include <utility>
#include <vector>

#include "ttstream/dense_tensor.hpp"

namespace ttstream {

/// One 3-way train core of shape r_left x n x r_right, linearized
/// first-index-fastest. Both standard unfoldings are zero-copy views.
class TTCore {
public:
    TTCore(Index r_left, Index n, Index r_right, std::vector<double> data);

    /// From the (r_left * n) x r_right unfolding, taken column-major.
    static TTCore from_left_unfolding(const Eigen::Ref<const Matrix>& u,
                                      Index r_left, Index n);
    /// From the r_left x (n * r_right) unfolding, taken column-major.
    static TTCore from_right_unfolding(const Eigen::Ref<const Matrix>& m,
                                       Index n, Index r_right);

    Index r_left() const { return r_left_; }
    Index n() const { return n_; }
    Index r_right() const { return r_right_; }
    Index size() const { return r_left_ * n_ * r_right_; }

    /// (r_left * n) x r_right view.
    MatrixMap left_unfolding() const;
    /// r_left x (n * r_right) view.
    MatrixMap right_unfolding() const;

    const double* data() const { return data_->data(); }

private:
    TTCore(Index r_left, Index n, Index r_right,
           std::shared_ptr<const std::vector<double>> data);

    Index r_left_, n_, r_right_;
    std::shared_ptr<const std::vector<double>> data_;
};

/// Tensor train: an ordered chain of cores with matching bond ranks,
/// r_0 = r_D = 1. For a streamed accumulation the last core's middle
/// extent counts observations and its columns are per-observation
/// coefficients; all leading cores are then orthonormal.
///
/// Immutable. Update algorithms build a new train, sharing the buffers
/// of any core they did not touch.
class TensorTrain {
public:
    /// `ortho_count` is the number of leading cores whose left unfoldings
    /// are orthonormal; the caller vouches for it. Empty `batch_boundaries`
    /// defaults to one increment covering all observations.
    TensorTrain(std::vector<TTCore> cores, Index ortho_count,
                std::vector<Index> batch_boundaries = {});

    Index num_cores() const { return static_cast<Index>(cores_.size()); }
    /// Number of spatial modes d for an accumulation with d+1 cores.
    Index spatial_dims() const { return num_cores() - 1; }
    const TTCore& core(Index i) const { return cores_[static_cast<std::size_t>(i)]; }

    /// r_0 .. r_D (length D+1).
    std::vector<Index> ranks() const;
    /// n_1 .. n_D.
    std::vector<Index> mode_sizes() const;
    /// n_1 .. n_{D-1}, the shape shared by every observation.
    std::vector<Index> spatial_shape() const;

    Index ortho_count() const { return ortho_count_; }
    bool fully_orthonormal() const { return ortho_count_ == num_cores() - 1; }

    Index obs_count() const { return cores_.back().n(); }
    const std::vector<Index>& batch_boundaries() const { return batch_boundaries_; }
    Index num_increments() const { return static_cast<Index>(batch_boundaries_.size()); }
    /// Observation range [begin, end) of increment k.
    std::pair<Index, Index> increment_range(Index k) const;

    /// Total stored parameter count, sum of r_{i-1} * n_i * r_i.
    Index param_count() const;

    /// Same cores with replacement increment bookkeeping.
    TensorTrain with_batch_boundaries(std::vector<Index> boundaries) const;

    /// Counts leading cores passing a numerical orthonormality check
    /// (max |U^T U - I| entry <= tol).
    Index measure_ortho_count(double tol = 1e-10) const;

private:
    std::vector<TTCore> cores_;
    Index ortho_count_ = 0;
    std::vector<Index> batch_boundaries_;
};

/// Dense reconstruction of all observations.
DenseTensor tt_reconstruct(const TensorTrain& tt);
/// Dense reconstruction of observations [obs_begin, obs_end).
DenseTensor tt_reconstruct(const TensorTrain& tt, Index obs_begin, Index obs_end);

/// Latent coefficients of `y` under the train's orthonormal spatial basis:
/// an r_d x n_obs matrix. `y` must carry the spatial shape plus one
/// trailing observation mode; the train must be fully orthonormal.
Matrix tt_project(const TensorTrain& tt, const DenseTensor& y);

/// Contracts the spatial cores with arbitrary coefficient columns,
/// producing a dense (n_1, ..., n_d, m) tensor.
DenseTensor tt_expand(const TensorTrain& tt, const Eigen::Ref<const Matrix>& coeffs);

/// Slice-wise block-diagonal sum: reconstruct(a + b) = reconstruct(a) +
/// reconstruct(b), bond ranks add. The result carries no orthogonality.
TensorTrain tt_add(const TensorTrain& a, const TensorTrain& b);

/// Reorthogonalize and recompress to a relative tolerance:
/// |reconstruct(in) - reconstruct(out)|_F <= eps_rel * |in|_F.
TensorTrain tt_round(const TensorTrain& tt, double eps_rel);

/// Fraction of the maximal possible bond rank the core uses,
/// r_right / (r_left * n).
double occupancy(const TTCore& core);

/// Frobenius norm of the represented tensor, computed without
/// densifying. Falls back to an orthogonalization sweep when the train
/// is not fully orthonormal.
double tt_norm(const TensorTrain& tt);

} // namespace ttstream
