#include "ttstream/truncated_svd.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace ttstream {

namespace {

// One QR pass halves the SVD cost once the aspect ratio is past ~2.
constexpr double kTallAspect = 2.0;

void normalize_column_signs(Matrix& u, Matrix& vt) {
    for (Index j = 0; j < u.cols(); ++j) {
        Index imax = 0;
        u.col(j).cwiseAbs().maxCoeff(&imax);
        if (u(imax, j) < 0.0) {
            u.col(j) = -u.col(j);
            vt.row(j) = -vt.row(j);
        }
    }
}

} // namespace

TruncatedSvd svd_trunc(const Eigen::Ref<const Matrix>& a, double delta) {
    if (!a.allFinite()) {
        throw NumericError("svd_trunc: non-finite input matrix");
    }
    if (delta < 0.0) {
        throw NumericError("svd_trunc: negative truncation threshold");
    }

    const Index m = a.rows();
    const Index l = a.cols();

    TruncatedSvd out;

    if (m == 0 || l == 0) {
        out.u = Matrix(m, 0);
        out.s = Eigen::VectorXd(0);
        out.vt = Matrix(0, l);
        return out;
    }

    Matrix q;      // thin QR factor for the tall case, empty otherwise
    Matrix reduced;
    const bool tall = static_cast<double>(m) > kTallAspect * static_cast<double>(l);
    if (tall) {
        Eigen::HouseholderQR<Matrix> qr(a);
        q = Matrix::Identity(m, l);
        q.applyOnTheLeft(qr.householderQ());
        reduced = qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();
    } else {
        reduced = a;
    }

    Eigen::BDCSVD<Matrix> svd(reduced, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        std::ostringstream os;
        os << "svd_trunc: backend failed on " << m << "x" << l
           << " matrix (|A|_F = " << a.norm() << ")";
        throw NumericError(os.str());
    }

    const Eigen::VectorXd& sigma = svd.singularValues();
    const Index k = sigma.size();

    // Smallest rank whose discarded tail fits under delta. Ties keep the
    // smaller rank; exact zeros never survive because dropping them is free.
    double tail_sq = 0.0;
    Index rank = k;
    for (Index j = k - 1; j >= 0; --j) {
        const double next = tail_sq + sigma(j) * sigma(j);
        if (std::sqrt(next) > delta) break;
        tail_sq = next;
        rank = j;
    }

    out.rank = rank;
    out.tail_norm = std::sqrt(tail_sq);
    out.s = sigma.head(rank);
    out.vt = svd.matrixV().leftCols(rank).transpose();
    if (tall) {
        out.u = q * svd.matrixU().leftCols(rank);
    } else {
        out.u = svd.matrixU().leftCols(rank);
    }
    normalize_column_signs(out.u, out.vt);
    return out;
}

} // namespace ttstream
