#include "ttstream/tt_svd.hpp"

#include <cmath>

#include "ttstream/truncated_svd.hpp"

namespace ttstream {

TensorTrain tt_svd(const DenseTensor& y, double eps_rel) {
    if (eps_rel < 0.0 || eps_rel > 1.0) {
        throw NumericError("tt_svd tolerance must lie in [0, 1]");
    }
    const Index nd = y.ndim();
    const double norm = y.frobenius_norm();

    if (nd <= 1) {
        // A vector is its own single-core train; one SVD decides whether
        // anything survives the threshold at all.
        const Index n = (nd == 0) ? 1 : y.extent(0);
        auto svd = svd_trunc(y.as_matrix(n, 1), eps_rel * norm);
        std::vector<double> buf(static_cast<std::size_t>(n), 0.0);
        if (svd.rank == 1) {
            Eigen::Map<Matrix>(buf.data(), n, 1) = svd.u * svd.scaled_vt();
        }
        std::vector<TTCore> cores;
        cores.emplace_back(1, n, 1, std::move(buf));
        return TensorTrain(std::move(cores), 0);
    }

    const double delta = eps_rel / std::sqrt(static_cast<double>(nd - 1)) * norm;

    std::vector<TTCore> cores;
    cores.reserve(static_cast<std::size_t>(nd));

    Index r_prev = 1;
    Matrix carry = y.as_matrix(y.extent(0), y.size() / y.extent(0));
    for (Index i = 0; i + 1 < nd; ++i) {
        const Index n_i = y.extent(i);
        auto svd = svd_trunc(carry, delta);
        Matrix u;
        Matrix next;
        if (svd.rank == 0) {
            // Remaining content fits under delta; park a unit column and
            // zero everything downstream.
            u = Matrix::Zero(carry.rows(), 1);
            u(0, 0) = 1.0;
            next = Matrix::Zero(1, carry.cols());
        } else {
            u = std::move(svd.u);
            next = svd.scaled_vt();
        }
        cores.push_back(TTCore::from_left_unfolding(u, r_prev, n_i));
        r_prev = u.cols();
        if (i + 2 < nd) {
            const Index rows = r_prev * y.extent(i + 1);
            carry = Eigen::Map<const Matrix>(next.data(), rows, next.size() / rows);
        } else {
            carry = std::move(next); // r_{D-1} x n_D
        }
    }
    cores.push_back(TTCore::from_left_unfolding(
        Eigen::Map<const Matrix>(carry.data(), carry.size(), 1), r_prev,
        y.extent(nd - 1)));

    return TensorTrain(std::move(cores), nd - 1);
}

} // namespace ttstream
