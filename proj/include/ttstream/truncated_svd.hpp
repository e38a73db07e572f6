#pragma once

#include "ttstream/dense_tensor.hpp"

namespace ttstream {

/// Result of an error-truncated SVD A ~= U * diag(S) * Vt.
///
/// The rank is the smallest r such that the Frobenius norm of the
/// discarded part, sqrt(sum of squared trailing singular values), does
/// not exceed the requested threshold. rank 0 (empty factors) is legal
/// and means the whole matrix fits under the threshold.
struct TruncatedSvd {
    Matrix u;         ///< m x r, orthonormal columns
    Eigen::VectorXd s; ///< r singular values, strictly descending, > 0
    Matrix vt;        ///< r x l, orthonormal rows
    Index rank = 0;
    double tail_norm = 0.0; ///< Frobenius norm of the discarded residual

    /// diag(S) * Vt, the carry matrix passed down sequential sweeps.
    Matrix scaled_vt() const { return s.asDiagonal() * vt; }
};

/// Truncated SVD with an absolute Frobenius-tail threshold.
///
/// Relative thresholds are the caller's business; this kernel only ever
/// sees an absolute delta. Columns of U are sign-normalized so the
/// largest-magnitude entry of each is positive, making results
/// reproducible across runs.
///
/// Tall inputs (rows >> cols) are reduced by a thin QR before the SVD.
TruncatedSvd svd_trunc(const Eigen::Ref<const Matrix>& a, double delta);

} // namespace ttstream
