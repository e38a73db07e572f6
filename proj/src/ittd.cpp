#include "ttstream/ittd.hpp"

#include <cmath>
#include <new>
#include <sstream>

#include "ttstream/tt_svd.hpp"
#include "update_common.hpp"

namespace ttstream {

using detail::cpu_seconds_now;

namespace {

// Extends the observation mode of a final core with zero columns before
// and/or after the existing block, so two trains can occupy disjoint
// column ranges of the grown mode.
TTCore pad_last_mode(const TTCore& last, Index lead_zeros, Index trail_zeros) {
    const Index r = last.r_left();
    const Index n_new = lead_zeros + last.n() + trail_zeros;
    Matrix grown = Matrix::Zero(r, n_new);
    grown.middleCols(lead_zeros, last.n()) = last.right_unfolding();
    return TTCore::from_right_unfolding(grown, n_new, 1);
}

TensorTrain replace_last_core(const TensorTrain& tt, TTCore last,
                              std::vector<Index> boundaries) {
    std::vector<TTCore> cores;
    cores.reserve(static_cast<std::size_t>(tt.num_cores()));
    for (Index i = 0; i + 1 < tt.num_cores(); ++i) cores.push_back(tt.core(i));
    cores.push_back(std::move(last));
    return TensorTrain(std::move(cores), tt.ortho_count(), std::move(boundaries));
}

std::string ranks_to_string(const std::vector<Index>& ranks) {
    std::ostringstream os;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (i) os << ";";
        os << ranks[i];
    }
    return os.str();
}

} // namespace

IttdState ittd_init(Index round_every_k, double eps) {
    if (round_every_k < 0) {
        throw ConfigError("rounding period must be >= 0 (0 disables rounding)");
    }
    if (eps < 0.0 || eps > 1.0) {
        throw ConfigError("ittd tolerance must lie in [0, 1]");
    }
    IttdState s;
    s.round_every_k = round_every_k;
    s.eps = eps;
    return s;
}

std::pair<IttdState, UpdateReport> ittd_update(const IttdState& state,
                                               const DenseTensor& y) {
    const double t0 = cpu_seconds_now();
    const Index n_obs = y.shape().back();
    const double y_norm = y.frobenius_norm();

    UpdateReport report;
    report.obs_in_batch = n_obs;
    report.obs_used = n_obs;

    TensorTrain fresh = tt_svd(y, state.eps);
    {
        const double kept = tt_norm(fresh);
        const double lost_sq = std::max(y_norm * y_norm - kept * kept, 0.0);
        report.batch_rel_error_estimate =
            (y_norm == 0.0) ? 0.0 : std::sqrt(lost_sq) / y_norm;
    }

    IttdState next = state;
    if (!state.accumulation) {
        report.increment_index = 0;
        report.ranks_before = std::vector<Index>(fresh.ranks().size(), 1);
        next.accumulation = std::move(fresh);
    } else {
        const TensorTrain& acc = *state.accumulation;
        if (acc.spatial_shape() != fresh.spatial_shape()) {
            throw DimensionError("increment spatial shape does not match the accumulation");
        }
        report.increment_index = acc.num_increments();
        report.ranks_before = acc.ranks();

        const Index n_old = acc.obs_count();
        const Index n_total = n_old + n_obs;

        // Accumulation keeps the leading columns, new data the trailing
        // ones; the two blocks never interfere in the sum.
        TensorTrain acc_grown = replace_last_core(
            acc, pad_last_mode(acc.core(acc.num_cores() - 1), 0, n_obs),
            {n_total});
        TensorTrain fresh_grown = replace_last_core(
            fresh, pad_last_mode(fresh.core(fresh.num_cores() - 1), n_old, 0),
            {n_total});

        TensorTrain combined = tt_add(acc_grown, fresh_grown);
        std::vector<Index> bounds = acc.batch_boundaries();
        bounds.push_back(n_total);
        next.accumulation = combined.with_batch_boundaries(std::move(bounds));
    }

    next.increments_since_round = state.increments_since_round + 1;
    if (next.round_every_k > 0 &&
        next.increments_since_round >= next.round_every_k) {
        try {
            next.accumulation = tt_round(*next.accumulation, next.eps);
        } catch (const std::bad_alloc&) {
            throw ResourceError("out of memory while rounding at ranks " +
                                ranks_to_string(next.accumulation->ranks()));
        }
        next.increments_since_round = 0;
    }

    report.ranks_after = next.accumulation->ranks();
    report.eps_target = state.eps;
    report.seconds = cpu_seconds_now() - t0;
    return {std::move(next), std::move(report)};
}

} // namespace ttstream
