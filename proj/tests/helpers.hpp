#pragma once

#include <random>
#include <vector>

#include "ttstream/dense_tensor.hpp"
#include "ttstream/tensor_train.hpp"

namespace tth {

using ttstream::DenseTensor;
using ttstream::Index;
using ttstream::Matrix;
using ttstream::TensorTrain;
using ttstream::TTCore;

inline std::vector<double> random_values(std::mt19937_64& g, Index count) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(count));
    for (auto& x : v) x = dist(g);
    return v;
}

inline DenseTensor random_tensor(std::mt19937_64& g, std::vector<Index> shape) {
    const Index count = ttstream::shape_product(shape);
    return DenseTensor(std::move(shape), random_values(g, count));
}

inline Matrix random_matrix(std::mt19937_64& g, Index rows, Index cols) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m(i) = dist(g);
    return m;
}

inline Matrix random_orthonormal(std::mt19937_64& g, Index rows, Index cols) {
    Matrix a = random_matrix(g, rows, cols);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = Matrix::Identity(rows, cols);
    q.applyOnTheLeft(qr.householderQ());
    return q;
}

/// Random train with the given bond ranks (r_0 .. r_D). When
/// `orthonormal_spatial` is set, every core except the last gets an
/// orthonormal left unfolding (ranks must satisfy r_i <= r_{i-1} * n_i).
inline TensorTrain random_tt(std::mt19937_64& g, const std::vector<Index>& modes,
                             const std::vector<Index>& ranks,
                             bool orthonormal_spatial) {
    std::vector<TTCore> cores;
    const auto nd = static_cast<Index>(modes.size());
    for (Index i = 0; i < nd; ++i) {
        const Index rl = ranks[static_cast<std::size_t>(i)];
        const Index rr = ranks[static_cast<std::size_t>(i + 1)];
        const Index n = modes[static_cast<std::size_t>(i)];
        Matrix u = (orthonormal_spatial && i + 1 < nd)
                       ? random_orthonormal(g, rl * n, rr)
                       : random_matrix(g, rl * n, rr);
        cores.push_back(TTCore::from_left_unfolding(u, rl, n));
    }
    return TensorTrain(std::move(cores), orthonormal_spatial ? nd - 1 : 0);
}

/// Slice G[., j, .] of a core as an r_left x r_right matrix.
inline Matrix core_slice(const TTCore& c, Index j) {
    Matrix s(c.r_left(), c.r_right());
    for (Index q = 0; q < c.r_right(); ++q) {
        for (Index p = 0; p < c.r_left(); ++p) {
            s(p, q) = c.data()[p + c.r_left() * (j + c.n() * q)];
        }
    }
    return s;
}

/// Brute-force reconstruction by multiplying core slices element by
/// element; independent of the library's contraction path.
inline DenseTensor oracle_dense(const TensorTrain& tt) {
    const auto modes = tt.mode_sizes();
    const Index total = ttstream::shape_product(modes);
    std::vector<double> out(static_cast<std::size_t>(total));
    std::vector<Index> idx(modes.size(), 0);
    for (Index p = 0; p < total; ++p) {
        Index rem = p;
        for (std::size_t k = 0; k < modes.size(); ++k) {
            idx[k] = rem % modes[k];
            rem /= modes[k];
        }
        Matrix acc = Matrix::Identity(1, 1);
        for (Index k = 0; k < tt.num_cores(); ++k) {
            acc = acc * core_slice(tt.core(k), idx[static_cast<std::size_t>(k)]);
        }
        out[static_cast<std::size_t>(p)] = acc(0, 0);
    }
    return DenseTensor(modes, std::move(out));
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix c = Matrix::Zero(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < b.cols(); ++j) {
            for (Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
        }
    }
    return c;
}

/// Compensated sum of squares, the reference for norm checks.
inline double kahan_frobenius(std::span<const double> v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double term = x * x - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return std::sqrt(sum);
}

inline double rel_diff(const DenseTensor& a, const DenseTensor& b) {
    const auto am = a.as_matrix(a.size(), 1);
    const auto bm = b.as_matrix(b.size(), 1);
    const double den = am.norm();
    return den == 0.0 ? (bm).norm() : (am - bm).norm() / den;
}

} // namespace tth
