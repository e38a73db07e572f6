#include "ttstream/dense_tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace ttstream {

namespace {

std::string shape_to_string(std::span<const Index> shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) os << ",";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

void validate_extents(std::span<const Index> shape) {
    for (Index n : shape) {
        if (n < 1) {
            throw DimensionError("tensor extent must be >= 1, got shape " +
                                 shape_to_string(shape));
        }
    }
}

} // namespace

Index shape_product(std::span<const Index> shape) {
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(std::vector<Index> shape, std::vector<double> data)
        : shape_(std::move(shape)) {
    validate_extents(shape_);
    const Index expected = shape_product(shape_);
    if (static_cast<Index>(data.size()) != expected) {
        std::ostringstream os;
        os << "buffer length " << data.size() << " does not match shape "
           << shape_to_string(shape_) << " (expects " << expected << ")";
        throw DimensionError(os.str());
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite element rejected at tensor construction");
        }
    }
    data_ = std::make_shared<const std::vector<double>>(std::move(data));
}

DenseTensor::DenseTensor(std::vector<Index> shape,
                         std::shared_ptr<const std::vector<double>> data)
        : shape_(std::move(shape)), data_(std::move(data)) {}

DenseTensor DenseTensor::zeros(std::vector<Index> shape) {
    validate_extents(shape);
    const Index n = shape_product(shape);
    return DenseTensor(std::move(shape),
                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

double DenseTensor::at(std::span<const Index> idx) const {
    if (static_cast<Index>(idx.size()) != ndim()) {
        throw DimensionError("index arity does not match tensor order");
    }
    Index linear = 0;
    Index stride = 1;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= shape_[i]) {
            throw IndexError("tensor index out of range");
        }
        linear += idx[i] * stride;
        stride *= shape_[i];
    }
    return (*data_)[static_cast<std::size_t>(linear)];
}

DenseTensor DenseTensor::reshape(std::vector<Index> new_shape) const {
    validate_extents(new_shape);
    if (shape_product(new_shape) != size()) {
        std::ostringstream os;
        os << "cannot reshape " << shape_to_string(shape_) << " to "
           << shape_to_string(new_shape) << ": extent products differ";
        throw DimensionError(os.str());
    }
    return DenseTensor(std::move(new_shape), data_);
}

MatrixMap DenseTensor::unfold(Index i) const {
    if (i < 1 || i > ndim() - 1) {
        std::ostringstream os;
        os << "unfolding mode " << i << " out of range [1, " << ndim() - 1 << "]";
        throw DimensionError(os.str());
    }
    const auto split = static_cast<std::size_t>(i);
    const Index rows = shape_product({shape_.data(), split});
    const Index cols = shape_product({shape_.data() + split, shape_.size() - split});
    return MatrixMap(data(), rows, cols);
}

MatrixMap DenseTensor::as_matrix(Index rows, Index cols) const {
    if (rows * cols != size()) {
        throw DimensionError("matrix view extents do not cover the buffer");
    }
    return MatrixMap(data(), rows, cols);
}

double DenseTensor::frobenius_norm() const {
    return MatrixMap(data(), size(), 1).norm();
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b) {
    if (a.ndim() < 1 || b.ndim() < 1) {
        throw DimensionError("contraction operands must have at least one mode");
    }
    const Index bond_a = a.shape().back();
    const Index bond_b = b.shape().front();
    if (bond_a != bond_b) {
        std::ostringstream os;
        os << "contraction bond mismatch: " << bond_a << " vs " << bond_b;
        throw DimensionError(os.str());
    }
    const Index m = a.size() / bond_a;
    const Index n = b.size() / bond_b;

    Matrix c = a.as_matrix(m, bond_a) * b.as_matrix(bond_b, n);

    std::vector<Index> out_shape(a.shape().begin(), a.shape().end() - 1);
    out_shape.insert(out_shape.end(), b.shape().begin() + 1, b.shape().end());
    return tensor_from_matrix(c, std::move(out_shape));
}

DenseTensor stack_last(std::span<const DenseTensor> parts) {
    if (parts.empty()) {
        throw DimensionError("cannot stack an empty list of tensors");
    }
    const auto& head = parts.front().shape();
    if (head.empty()) {
        throw DimensionError("cannot stack zero-order tensors");
    }
    Index total_last = 0;
    for (const auto& p : parts) {
        const auto& s = p.shape();
        if (s.size() != head.size() ||
            !std::equal(s.begin(), s.end() - 1, head.begin())) {
            throw DimensionError("stacked tensors must agree on all but the last extent");
        }
        total_last += s.back();
    }

    // Last-mode concatenation is buffer concatenation under this layout.
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(shape_product({head.data(), head.size() - 1}) *
                                          total_last));
    for (const auto& p : parts) {
        data.insert(data.end(), p.values().begin(), p.values().end());
    }
    std::vector<Index> out_shape(head.begin(), head.end() - 1);
    out_shape.push_back(total_last);
    return DenseTensor(std::move(out_shape), std::move(data));
}

DenseTensor tensor_from_matrix(const Matrix& m, std::vector<Index> shape) {
    std::vector<double> data(m.data(), m.data() + m.size());
    return DenseTensor(std::move(shape), std::move(data));
}

} // namespace ttstream
