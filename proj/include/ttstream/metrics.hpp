#pragma once

#include "ttstream/tensor_train.hpp"

namespace ttstream {

/// Elements of the represented tensor divided by stored parameters.
/// Values below 1 are legal (the train can be bigger than the data).
double compression_ratio(const TensorTrain& tt);

/// Relative reconstruction error against a dense reference. A zero-norm
/// reference yields 0 and sets *zero_reference when provided.
double rre(const TensorTrain& tt, const DenseTensor& x_ref,
           bool* zero_reference = nullptr);
double rre(const TensorTrain& tt, const DenseTensor& x_ref, Index obs_begin,
           Index obs_end, bool* zero_reference = nullptr);

/// Relative prediction error: how well the train's basis represents data
/// it never stored.
double rpe(const TensorTrain& tt, const DenseTensor& unseen,
           bool* zero_reference = nullptr);

struct IncrementErrors {
    std::vector<double> per_increment;
    double mean = 0.0;
};

/// RRE of each stored increment against its dense reference, plus the
/// arithmetic mean over increments.
IncrementErrors mean_rre_per_increment(const TensorTrain& tt,
                                       std::span<const DenseTensor> refs);

} // namespace ttstream
