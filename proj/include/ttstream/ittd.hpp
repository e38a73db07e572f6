#pragma once

#include <optional>

#include "ttstream/tt_ice.hpp"

namespace ttstream {

/// Accumulation state of the add-and-round baseline: every increment is
/// compressed from scratch, zero-padded along the growing mode, added in
/// train format, and the result is recompressed every `round_every_k`
/// increments (0 disables rounding).
struct IttdState {
    std::optional<TensorTrain> accumulation;
    Index increments_since_round = 0;
    Index round_every_k = 5;
    double eps = 0.1;
};

IttdState ittd_init(Index round_every_k, double eps);

/// Folds one batch into the accumulation. Between roundings the spatial
/// bond ranks grow by the fresh compression's ranks at every step.
std::pair<IttdState, UpdateReport> ittd_update(const IttdState& state,
                                               const DenseTensor& y);

} // namespace ttstream
