#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ttstream/errors.hpp"

namespace ttstream {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using MatrixMap = Eigen::Map<const Eigen::MatrixXd>;

/// Immutable dense multiway array of doubles.
///
/// Elements are linearized first-index-fastest ("column-major"), so a
/// mode-i unfolding and any reshape are reinterpretations of the same
/// buffer. The buffer is shared between views; copies are cheap.
class DenseTensor {
public:
    /// Takes ownership of `data`; validates length and finiteness.
    DenseTensor(std::vector<Index> shape, std::vector<double> data);

    static DenseTensor zeros(std::vector<Index> shape);

    const std::vector<Index>& shape() const { return shape_; }
    Index ndim() const { return static_cast<Index>(shape_.size()); }
    Index size() const { return static_cast<Index>(data_->size()); }
    Index extent(Index i) const { return shape_[static_cast<std::size_t>(i)]; }

    const double* data() const { return data_->data(); }
    std::span<const double> values() const { return {data_->data(), data_->size()}; }

    /// Element access by multi-index; intended for tests and small tensors.
    double at(std::span<const Index> idx) const;

    /// Shape change over the same buffer. The extent product must match.
    DenseTensor reshape(std::vector<Index> new_shape) const;

    /// Mode-i unfolding: rows n_1...n_i, columns n_{i+1}...n_D, 1 <= i <= D-1.
    /// Zero-copy under the fixed linearization.
    MatrixMap unfold(Index i) const;

    /// View of the whole buffer as a rows x cols matrix (rows*cols == size()).
    MatrixMap as_matrix(Index rows, Index cols) const;

    double frobenius_norm() const;

private:
    DenseTensor(std::vector<Index> shape, std::shared_ptr<const std::vector<double>> data);

    std::vector<Index> shape_;
    std::shared_ptr<const std::vector<double>> data_;
};

/// Contraction of the last mode of `a` with the first mode of `b`;
/// output shape is a.shape[:-1] ++ b.shape[1:].
DenseTensor contract(const DenseTensor& a, const DenseTensor& b);

/// Concatenates tensors along the last mode. All other extents must agree.
DenseTensor stack_last(std::span<const DenseTensor> parts);

/// Product of extents. Empty span yields 1.
Index shape_product(std::span<const Index> shape);

/// Wraps an Eigen matrix (column-major) as a tensor with the given shape.
DenseTensor tensor_from_matrix(const Matrix& m, std::vector<Index> shape);

} // namespace ttstream
