#pragma once

#include "ttstream/tensor_train.hpp"

namespace ttstream {

/// Batch train construction by sequential truncated SVDs of unfoldings,
/// guaranteeing |y - reconstruct|_F <= eps_rel * |y|_F.
///
/// Each of the D-1 sweeps truncates at delta = eps_rel / sqrt(D-1) * |y|_F
/// for a D-way input; a 1-way input degenerates to one SVD at
/// eps_rel * |y|_F. All but the last core come out orthonormal.
TensorTrain tt_svd(const DenseTensor& y, double eps_rel);

} // namespace ttstream
