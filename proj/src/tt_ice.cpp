#include "ttstream/tt_ice.hpp"

#include <cmath>

#include "ttstream/truncated_svd.hpp"
#include "ttstream/tt_svd.hpp"
#include "update_common.hpp"

namespace ttstream {

using detail::append_directions;
using detail::cpu_seconds_now;

namespace {

void check_update_preconditions(const TensorTrain& tt, const DenseTensor& y) {
    if (!tt.fully_orthonormal()) {
        throw StateError("incremental update requires a fully orthonormal train");
    }
    const Index d = tt.spatial_dims();
    if (y.ndim() != d + 1) {
        throw DimensionError("increment must carry the spatial shape plus an observation mode");
    }
    const auto spatial = tt.spatial_shape();
    for (Index i = 0; i < d; ++i) {
        if (y.extent(i) != spatial[static_cast<std::size_t>(i)]) {
            throw DimensionError("increment spatial shape does not match the train");
        }
    }
}

} // namespace

Matrix compute_residual(const Eigen::Ref<const Matrix>& u_pad,
                        const Eigen::Ref<const Matrix>& y) {
    if (u_pad.cols() == 0) return y;
    if (u_pad.rows() != y.rows()) {
        throw DimensionError("residual operands have mismatched row counts");
    }
    return y - u_pad * (u_pad.transpose() * y);
}

Matrix pad_core(const Eigen::Ref<const Matrix>& u_next, Index r_left_old,
                Index added_rank) {
    if (added_rank < 0) throw DimensionError("added rank must be nonnegative");
    if (r_left_old < 1 || u_next.rows() % r_left_old != 0) {
        throw DimensionError("unfolding rows do not factor as r_left * n");
    }
    if (added_rank == 0) return u_next;
    const Index n = u_next.rows() / r_left_old;
    const Index r_right = u_next.cols();
    const Index r_new = r_left_old + added_rank;

    const Eigen::Map<const Matrix> as_rows(u_next.data(), r_left_old, n * r_right);
    Matrix grown = Matrix::Zero(r_new, n * r_right);
    grown.topRows(r_left_old) = as_rows;
    return Eigen::Map<const Matrix>(grown.data(), r_new * n, r_right);
}

std::pair<TensorTrain, UpdateReport>
tt_ice_update_with_tolerances(const TensorTrain& tt, const DenseTensor& y,
                              std::span<const double> deltas) {
    const double t0 = cpu_seconds_now();
    check_update_preconditions(tt, y);
    const Index d = tt.spatial_dims();
    if (static_cast<Index>(deltas.size()) != d) {
        throw DimensionError("need one SVD tolerance per spatial dimension");
    }
    const Index n_obs = y.extent(d);
    const double y_norm = y.frobenius_norm();

    UpdateReport report;
    report.increment_index = tt.num_increments();
    report.obs_in_batch = n_obs;
    report.obs_used = n_obs;
    report.ranks_before = tt.ranks();
    report.eps_target = deltas.empty() ? 0.0 : deltas[0];

    std::vector<TTCore> new_cores;
    new_cores.reserve(static_cast<std::size_t>(d + 1));

    Matrix cur = y.as_matrix(y.extent(0), y.size() / y.extent(0));
    Matrix u_pad = tt.core(0).left_unfolding();
    Index r_left_new = 1;
    double discarded_sq = 0.0;

    for (Index i = 0; i < d; ++i) {
        const Index r_old = u_pad.cols();
        Matrix u_new = u_pad;

        Matrix resid = compute_residual(u_pad, cur);
        auto svd = svd_trunc(resid, deltas[static_cast<std::size_t>(i)]);
        discarded_sq += svd.tail_norm * svd.tail_norm;
        if (svd.rank > 0) {
            u_new = append_directions(u_pad, svd.u);
        }
        const Index r_new = u_new.cols();
        new_cores.push_back(TTCore::from_left_unfolding(u_new, r_left_new, tt.core(i).n()));

        Matrix proj = u_new.transpose() * cur; // r_new x rest
        if (i + 1 < d) {
            u_pad = pad_core(tt.core(i + 1).left_unfolding(), r_old, r_new - r_old);
            const Index rows = r_new * tt.core(i + 1).n();
            cur = Eigen::Map<const Matrix>(proj.data(), rows, proj.size() / rows);
        } else {
            cur = std::move(proj); // final coefficients, r_d_new x n_obs
        }
        r_left_new = r_new;
    }

    // Last core: old coefficient block padded with zero rows, new
    // coefficient columns appended after it.
    const auto& last = tt.core(d);
    const Index n_old = last.n();
    Matrix new_last = Matrix::Zero(r_left_new, n_old + n_obs);
    new_last.topLeftCorner(last.r_left(), n_old) = last.right_unfolding();
    new_last.rightCols(n_obs) = cur;
    new_cores.push_back(TTCore::from_right_unfolding(new_last, n_old + n_obs, 1));

    std::vector<Index> boundaries = tt.batch_boundaries();
    boundaries.push_back(n_old + n_obs);

    TensorTrain updated(std::move(new_cores), d, std::move(boundaries));
    report.ranks_after = updated.ranks();
    report.batch_rel_error_estimate =
        (y_norm == 0.0) ? 0.0 : std::sqrt(discarded_sq) / y_norm;
    report.seconds = cpu_seconds_now() - t0;
    return {std::move(updated), std::move(report)};
}

std::pair<TensorTrain, UpdateReport>
tt_ice_update(const TensorTrain& tt, const DenseTensor& y, double eps_des) {
    if (eps_des <= 0.0) {
        throw NumericError("eps_des must be positive");
    }
    const Index d = tt.spatial_dims();
    const double eps =
        eps_des * y.frobenius_norm() / std::sqrt(static_cast<double>(d));
    std::vector<double> deltas(static_cast<std::size_t>(d), eps);
    return tt_ice_update_with_tolerances(tt, y, deltas);
}

std::pair<TensorTrain, UpdateReport>
tt_ice_bootstrap(const DenseTensor& y, double eps_des) {
    const double t0 = cpu_seconds_now();
    TensorTrain tt = tt_svd(y, eps_des);
    UpdateReport report;
    report.increment_index = 0;
    report.obs_in_batch = y.shape().back();
    report.obs_used = report.obs_in_batch;
    report.ranks_after = tt.ranks();
    report.ranks_before = std::vector<Index>(report.ranks_after.size(), 1);
    const double y_norm = y.frobenius_norm();
    report.eps_target = (y.ndim() > 1)
        ? eps_des * y_norm / std::sqrt(static_cast<double>(y.ndim() - 1))
        : eps_des * y_norm;
    // Orthogonal truncations split the energy, so the kept-coefficient
    // norm determines the error without densifying.
    const double kept = tt_norm(tt);
    const double lost_sq = std::max(y_norm * y_norm - kept * kept, 0.0);
    report.batch_rel_error_estimate =
        (y_norm == 0.0) ? 0.0 : std::sqrt(lost_sq) / y_norm;
    report.seconds = cpu_seconds_now() - t0;
    return {std::move(tt), std::move(report)};
}

} // namespace ttstream
