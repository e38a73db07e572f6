#include "ttstream/tt_ice_star.hpp"

#include <cmath>
#include <numeric>

#include "ttstream/truncated_svd.hpp"
#include "update_common.hpp"

namespace ttstream {

using detail::append_directions;
using detail::cpu_seconds_now;

namespace {

struct PerObsStats {
    std::vector<double> errs;        // relative, zero-norm obs -> 0
    std::vector<double> resid_norms; // absolute residual per observation
    std::vector<double> obs_norms;
};

PerObsStats per_obs_stats(const TensorTrain& tt, const DenseTensor& y) {
    const Matrix coeffs = tt_project(tt, y);
    const DenseTensor approx = tt_expand(tt, coeffs);
    const Index n_obs = coeffs.cols();
    const Index n_spatial = y.size() / n_obs;
    const auto ym = y.as_matrix(n_spatial, n_obs);
    const auto am = approx.as_matrix(n_spatial, n_obs);

    PerObsStats s;
    s.errs.resize(static_cast<std::size_t>(n_obs));
    s.resid_norms.resize(static_cast<std::size_t>(n_obs));
    s.obs_norms.resize(static_cast<std::size_t>(n_obs));
    for (Index i = 0; i < n_obs; ++i) {
        const double rn = (ym.col(i) - am.col(i)).norm();
        const double on = ym.col(i).norm();
        s.resid_norms[static_cast<std::size_t>(i)] = rn;
        s.obs_norms[static_cast<std::size_t>(i)] = on;
        s.errs[static_cast<std::size_t>(i)] = (on == 0.0) ? 0.0 : rn / on;
    }
    return s;
}

// Mean over observations that actually carry energy; an all-zero batch is
// perfectly represented already.
double mean_statistic(const PerObsStats& s) {
    double sum = 0.0;
    Index count = 0;
    for (std::size_t i = 0; i < s.errs.size(); ++i) {
        if (s.obs_norms[i] > 0.0) {
            sum += s.errs[i];
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double full_batch_statistic(const PerObsStats& s) {
    double num_sq = 0.0, den_sq = 0.0;
    for (std::size_t i = 0; i < s.errs.size(); ++i) {
        num_sq += s.resid_norms[i] * s.resid_norms[i];
        den_sq += s.obs_norms[i] * s.obs_norms[i];
    }
    return den_sq == 0.0 ? 0.0 : std::sqrt(num_sq / den_sq);
}

// Sequential projection of a batch through explicit core unfoldings.
Matrix project_through(const std::vector<Matrix>& u_list,
                       std::span<const Index> mode_sizes, const DenseTensor& y) {
    const Index d = static_cast<Index>(u_list.size());
    Matrix cur = y.as_matrix(y.extent(0), y.size() / y.extent(0));
    for (Index i = 0; i < d; ++i) {
        Matrix next = u_list[static_cast<std::size_t>(i)].transpose() * cur;
        if (i + 1 < d) {
            const Index rows = next.rows() * mode_sizes[static_cast<std::size_t>(i + 1)];
            cur = Eigen::Map<const Matrix>(next.data(), rows, next.size() / rows);
        } else {
            cur = std::move(next);
        }
    }
    return cur;
}

} // namespace

std::vector<double> per_obs_errors(const TensorTrain& tt, const DenseTensor& y) {
    return per_obs_stats(tt, y).errs;
}

SubselectSplit subselect(std::span<const double> errs, double eps_des) {
    SubselectSplit split;
    for (std::size_t i = 0; i < errs.size(); ++i) {
        if (errs[i] > eps_des) {
            split.selected.push_back(static_cast<Index>(i));
        } else {
            split.rejected.push_back(static_cast<Index>(i));
        }
    }
    return split;
}

DenseTensor gather_obs(const DenseTensor& y, std::span<const Index> idx) {
    if (idx.empty()) {
        throw DimensionError("cannot gather an empty observation set");
    }
    const Index n_obs = y.shape().back();
    const Index n_spatial = y.size() / n_obs;
    const auto ym = y.as_matrix(n_spatial, n_obs);
    Matrix out(n_spatial, static_cast<Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] < 0 || idx[j] >= n_obs) {
            throw IndexError("observation index out of range");
        }
        out.col(static_cast<Index>(j)) = ym.col(idx[j]);
    }
    std::vector<Index> shape(y.shape().begin(), y.shape().end() - 1);
    shape.push_back(static_cast<Index>(idx.size()));
    return tensor_from_matrix(out, std::move(shape));
}

double relaxed_tolerance(const DenseTensor& y, const SubselectSplit& split,
                         std::span<const double> errs, double eps_des,
                         bool* clamped) {
    if (clamped) *clamped = false;
    if (split.selected.empty()) {
        throw ConfigError("relaxed tolerance needs a nonempty selection");
    }
    if (split.rejected.empty()) {
        return eps_des;
    }
    const Index n_obs = y.shape().back();
    const Index n_spatial = y.size() / n_obs;
    const auto ym = y.as_matrix(n_spatial, n_obs);

    double rejected_resid_sq = 0.0;
    for (Index i : split.rejected) {
        const double on = ym.col(i).norm();
        const double rn = errs[static_cast<std::size_t>(i)] * on;
        rejected_resid_sq += rn * rn;
    }
    double selected_sq = 0.0;
    for (Index i : split.selected) {
        selected_sq += ym.col(i).squaredNorm();
    }
    if (selected_sq == 0.0) {
        throw NumericError("selected observations carry no energy");
    }

    const double budget = eps_des * y.frobenius_norm();
    double radicand = (budget * budget - rejected_resid_sq) / selected_sq;
    if (radicand < 0.0) {
        // Only reachable through cancellation; exact arithmetic keeps the
        // rejected residuals within the budget.
        radicand = 0.0;
        if (clamped) *clamped = true;
    }
    return std::sqrt(radicand);
}

double relaxed_tolerance_approx(Index n_batch, Index n_rejected,
                                double mean_rejected_error, double eps_des) {
    const Index n_selected = n_batch - n_rejected;
    if (n_selected < 1) {
        throw ConfigError("relaxed tolerance needs a nonempty selection");
    }
    return (eps_des * static_cast<double>(n_batch) -
            mean_rejected_error * static_cast<double>(n_rejected)) /
           static_cast<double>(n_selected);
}

std::pair<TensorTrain, UpdateReport>
tt_ice_star_update(const TensorTrain& tt, const DenseTensor& y, double eps_des,
                   const HeuristicConfig& cfg) {
    const double t0 = cpu_seconds_now();
    if (eps_des <= 0.0) {
        throw NumericError("eps_des must be positive");
    }
    if (cfg.occupancy_threshold <= 0.0 || cfg.occupancy_threshold > 1.0) {
        throw ConfigError("occupancy threshold must lie in (0, 1]");
    }
    const Index d = tt.spatial_dims();
    const Index n_obs = y.extent(y.ndim() - 1);
    const double y_norm = y.frobenius_norm();

    UpdateReport report;
    report.increment_index = tt.num_increments();
    report.obs_in_batch = n_obs;
    report.ranks_before = tt.ranks();

    const PerObsStats stats = per_obs_stats(tt, y); // also validates shapes
    const double skip_stat = (cfg.skip_statistic == SkipStatistic::kMean)
                                 ? mean_statistic(stats)
                                 : full_batch_statistic(stats);

    std::vector<Matrix> new_u;
    new_u.reserve(static_cast<std::size_t>(d));
    const auto modes = tt.mode_sizes();
    bool cores_changed = false;

    SubselectSplit split;
    if (cfg.skip_enabled && skip_stat <= eps_des) {
        // Basis already covers the batch; only the last core grows.
        report.obs_used = 0;
    } else {
        if (cfg.subselect_enabled) {
            split = subselect(stats.errs, eps_des);
        } else {
            split.selected.resize(static_cast<std::size_t>(n_obs));
            std::iota(split.selected.begin(), split.selected.end(), Index{0});
        }
        report.obs_used = static_cast<Index>(split.selected.size());
    }

    if (report.obs_used == 0) {
        for (Index i = 0; i < d; ++i) new_u.push_back(tt.core(i).left_unfolding());
    } else {
        double eps_upd = eps_des;
        if (!split.rejected.empty()) {
            if (cfg.use_approx_tolerance) {
                double mean_rej = 0.0;
                for (Index i : split.rejected) {
                    mean_rej += stats.errs[static_cast<std::size_t>(i)];
                }
                mean_rej /= static_cast<double>(split.rejected.size());
                eps_upd = relaxed_tolerance_approx(
                    n_obs, static_cast<Index>(split.rejected.size()), mean_rej,
                    eps_des);
            } else {
                eps_upd = relaxed_tolerance(y, split, stats.errs, eps_des,
                                            &report.tolerance_clamped);
            }
        }

        const DenseTensor selected = gather_obs(y, split.selected);
        const double delta =
            eps_upd / std::sqrt(static_cast<double>(d)) * selected.frobenius_norm();
        report.eps_target = delta;

        Matrix cur = selected.as_matrix(selected.extent(0),
                                        selected.size() / selected.extent(0));
        Matrix u_pad = tt.core(0).left_unfolding();
        for (Index i = 0; i < d; ++i) {
            const Index r_old = u_pad.cols();
            Matrix u_new = u_pad;

            const double occ = static_cast<double>(u_pad.cols()) /
                               static_cast<double>(u_pad.rows());
            if (occ < cfg.occupancy_threshold) {
                Matrix resid = compute_residual(u_pad, cur);
                auto svd = svd_trunc(resid, delta);
                if (svd.rank > 0) {
                    u_new = append_directions(u_pad, svd.u);
                    cores_changed = true;
                }
            }
            const Index r_new = u_new.cols();
            new_u.push_back(std::move(u_new));

            if (i + 1 < d) {
                Matrix next = new_u.back().transpose() * cur;
                const Index rows = r_new * tt.core(i + 1).n();
                cur = Eigen::Map<const Matrix>(next.data(), rows, next.size() / rows);
                u_pad = pad_core(tt.core(i + 1).left_unfolding(), r_old, r_new - r_old);
            }
        }
    }

    // The full batch's coefficients always enter the last core, whether or
    // not any basis grew.
    Matrix coeffs = project_through(new_u, modes, y);

    std::vector<TTCore> new_cores;
    new_cores.reserve(static_cast<std::size_t>(d + 1));
    Index r_left = 1;
    for (Index i = 0; i < d; ++i) {
        if (!cores_changed) {
            new_cores.push_back(tt.core(i)); // share the untouched buffer
        } else {
            new_cores.push_back(TTCore::from_left_unfolding(
                new_u[static_cast<std::size_t>(i)], r_left, tt.core(i).n()));
        }
        r_left = new_cores.back().r_right();
    }

    const auto& last = tt.core(d);
    const Index n_old = last.n();
    Matrix new_last = Matrix::Zero(r_left, n_old + n_obs);
    new_last.topLeftCorner(last.r_left(), n_old) = last.right_unfolding();
    new_last.rightCols(n_obs) = coeffs;
    new_cores.push_back(TTCore::from_right_unfolding(new_last, n_old + n_obs, 1));

    std::vector<Index> boundaries = tt.batch_boundaries();
    boundaries.push_back(n_old + n_obs);

    TensorTrain updated(std::move(new_cores), d, std::move(boundaries));
    report.ranks_after = updated.ranks();
    const double kept_sq = coeffs.squaredNorm();
    const double lost_sq = std::max(y_norm * y_norm - kept_sq, 0.0);
    report.batch_rel_error_estimate =
        (y_norm == 0.0) ? 0.0 : std::sqrt(lost_sq) / y_norm;
    report.seconds = cpu_seconds_now() - t0;
    return {std::move(updated), std::move(report)};
}

} // namespace ttstream
