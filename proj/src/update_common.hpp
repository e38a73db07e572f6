#pragma once

#include <ctime>

#include <Eigen/QR>

#include "ttstream/dense_tensor.hpp"

namespace ttstream::detail {

inline double cpu_seconds_now() {
    return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
}

// Roundoff across many increments can erode orthogonality of the grown
// block; one correction pass against the existing columns restores it.
inline constexpr double kGramGuard = 1e-10;

inline Matrix append_directions(const Matrix& u_pad, const Matrix& u_new) {
    if (u_new.cols() == 0) return u_pad;
    Matrix combined(u_pad.rows(), u_pad.cols() + u_new.cols());
    combined.leftCols(u_pad.cols()) = u_pad;
    combined.rightCols(u_new.cols()) = u_new;

    const Matrix gram = combined.transpose() * combined;
    const double dev =
        (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (dev > kGramGuard) {
        Matrix corrected = u_new - u_pad * (u_pad.transpose() * u_new);
        Eigen::HouseholderQR<Matrix> qr(corrected);
        Matrix q = Matrix::Identity(corrected.rows(), u_new.cols());
        q.applyOnTheLeft(qr.householderQ());
        combined.rightCols(u_new.cols()) = q;
    }
    return combined;
}

} // namespace ttstream::detail
