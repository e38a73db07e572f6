#include "ttstream/tensor_train.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/QR>

#include "ttstream/truncated_svd.hpp"

namespace ttstream {

TTCore::TTCore(Index r_left, Index n, Index r_right, std::vector<double> data)
        : r_left_(r_left), n_(n), r_right_(r_right) {
    if (r_left < 1 || n < 1 || r_right < 1) {
        throw DimensionError("core extents must be >= 1");
    }
    if (static_cast<Index>(data.size()) != size()) {
        throw DimensionError("core buffer length does not match extents");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite element rejected at core construction");
        }
    }
    data_ = std::make_shared<const std::vector<double>>(std::move(data));
}

TTCore::TTCore(Index r_left, Index n, Index r_right,
               std::shared_ptr<const std::vector<double>> data)
        : r_left_(r_left), n_(n), r_right_(r_right), data_(std::move(data)) {}

TTCore TTCore::from_left_unfolding(const Eigen::Ref<const Matrix>& u,
                                   Index r_left, Index n) {
    if (u.rows() != r_left * n) {
        throw DimensionError("left unfolding rows do not factor as r_left * n");
    }
    std::vector<double> buf(u.size());
    Eigen::Map<Matrix>(buf.data(), u.rows(), u.cols()) = u;
    return TTCore(r_left, n, u.cols(), std::move(buf));
}

TTCore TTCore::from_right_unfolding(const Eigen::Ref<const Matrix>& m,
                                    Index n, Index r_right) {
    if (m.cols() != n * r_right) {
        throw DimensionError("right unfolding columns do not factor as n * r_right");
    }
    std::vector<double> buf(m.size());
    Eigen::Map<Matrix>(buf.data(), m.rows(), m.cols()) = m;
    return TTCore(m.rows(), n, r_right, std::move(buf));
}

MatrixMap TTCore::left_unfolding() const {
    return MatrixMap(data(), r_left_ * n_, r_right_);
}

MatrixMap TTCore::right_unfolding() const {
    return MatrixMap(data(), r_left_, n_ * r_right_);
}

TensorTrain::TensorTrain(std::vector<TTCore> cores, Index ortho_count,
                         std::vector<Index> batch_boundaries)
        : cores_(std::move(cores)),
          ortho_count_(ortho_count),
          batch_boundaries_(std::move(batch_boundaries)) {
    if (cores_.empty()) {
        throw DimensionError("a train needs at least one core");
    }
    if (cores_.front().r_left() != 1 || cores_.back().r_right() != 1) {
        throw DimensionError("boundary ranks must be 1");
    }
    for (std::size_t i = 0; i + 1 < cores_.size(); ++i) {
        if (cores_[i].r_right() != cores_[i + 1].r_left()) {
            std::ostringstream os;
            os << "bond rank mismatch between cores " << i << " and " << i + 1
               << ": " << cores_[i].r_right() << " vs " << cores_[i + 1].r_left();
            throw DimensionError(os.str());
        }
    }
    if (ortho_count_ < 0 || ortho_count_ > num_cores() - 1) {
        throw StateError("ortho_count outside [0, D-1]");
    }
    if (batch_boundaries_.empty()) {
        batch_boundaries_.push_back(obs_count());
    }
    Index prev = 0;
    for (Index b : batch_boundaries_) {
        if (b < prev) throw DimensionError("batch boundaries must be nondecreasing");
        prev = b;
    }
    if (batch_boundaries_.back() != obs_count()) {
        throw DimensionError("batch boundaries must end at the observation count");
    }
}

std::vector<Index> TensorTrain::ranks() const {
    std::vector<Index> r;
    r.reserve(cores_.size() + 1);
    r.push_back(cores_.front().r_left());
    for (const auto& c : cores_) r.push_back(c.r_right());
    return r;
}

std::vector<Index> TensorTrain::mode_sizes() const {
    std::vector<Index> n;
    n.reserve(cores_.size());
    for (const auto& c : cores_) n.push_back(c.n());
    return n;
}

std::vector<Index> TensorTrain::spatial_shape() const {
    std::vector<Index> n;
    n.reserve(cores_.size() - 1);
    for (std::size_t i = 0; i + 1 < cores_.size(); ++i) n.push_back(cores_[i].n());
    return n;
}

std::pair<Index, Index> TensorTrain::increment_range(Index k) const {
    if (k < 0 || k >= num_increments()) {
        throw IndexError("increment index out of range");
    }
    const Index begin = (k == 0) ? 0 : batch_boundaries_[static_cast<std::size_t>(k - 1)];
    return {begin, batch_boundaries_[static_cast<std::size_t>(k)]};
}

Index TensorTrain::param_count() const {
    Index total = 0;
    for (const auto& c : cores_) total += c.size();
    return total;
}

TensorTrain TensorTrain::with_batch_boundaries(std::vector<Index> boundaries) const {
    return TensorTrain(cores_, ortho_count_, std::move(boundaries));
}

Index TensorTrain::measure_ortho_count(double tol) const {
    Index count = 0;
    for (Index i = 0; i < num_cores() - 1; ++i) {
        const auto u = core(i).left_unfolding();
        const Matrix gram = u.transpose() * u;
        const double dev =
            (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
        if (dev > tol) break;
        ++count;
    }
    return count;
}

namespace {

// Chain the spatial cores into the n_1...n_d x r_d basis matrix product,
// one GEMM per core; every reshape is a reinterpretation.
Matrix spatial_chain(const TensorTrain& tt) {
    const Index d = tt.spatial_dims();
    if (d == 0) {
        return Matrix::Identity(1, 1);
    }
    Matrix acc = tt.core(0).left_unfolding(); // n_1 x r_1 since r_0 = 1
    Index rows = tt.core(0).n();
    for (Index i = 1; i < d; ++i) {
        const auto& c = tt.core(i);
        Matrix next = acc * c.right_unfolding(); // rows x (n_i * r_i)
        rows *= c.n();
        acc = Eigen::Map<const Matrix>(next.data(), rows, c.r_right());
    }
    return acc;
}

} // namespace

DenseTensor tt_expand(const TensorTrain& tt, const Eigen::Ref<const Matrix>& coeffs) {
    const Index d = tt.spatial_dims();
    const Index r_d = (d == 0) ? 1 : tt.core(d - 1).r_right();
    if (coeffs.rows() != r_d) {
        throw DimensionError("coefficient rows do not match the train's last bond rank");
    }
    Matrix dense = spatial_chain(tt) * coeffs;
    std::vector<Index> shape = tt.spatial_shape();
    shape.push_back(coeffs.cols());
    return tensor_from_matrix(dense, std::move(shape));
}

DenseTensor tt_reconstruct(const TensorTrain& tt, Index obs_begin, Index obs_end) {
    if (obs_begin < 0 || obs_end > tt.obs_count() || obs_begin > obs_end) {
        throw IndexError("observation range out of bounds");
    }
    const auto& last = tt.core(tt.num_cores() - 1);
    const auto coeffs = last.right_unfolding(); // r_d x n_obs
    return tt_expand(tt, coeffs.middleCols(obs_begin, obs_end - obs_begin));
}

DenseTensor tt_reconstruct(const TensorTrain& tt) {
    return tt_reconstruct(tt, 0, tt.obs_count());
}

Matrix tt_project(const TensorTrain& tt, const DenseTensor& y) {
    if (!tt.fully_orthonormal()) {
        throw StateError("projection requires a fully orthonormal train");
    }
    const Index d = tt.spatial_dims();
    if (y.ndim() != d + 1) {
        throw DimensionError("data must carry the spatial shape plus an observation mode");
    }
    const auto spatial = tt.spatial_shape();
    for (Index i = 0; i < d; ++i) {
        if (y.extent(i) != spatial[static_cast<std::size_t>(i)]) {
            throw DimensionError("data spatial shape does not match the train");
        }
    }
    const Index n_obs = y.extent(d);

    Matrix cur = y.as_matrix(y.extent(0), y.size() / y.extent(0));
    for (Index i = 0; i < d; ++i) {
        const auto u = tt.core(i).left_unfolding(); // (r_{i-1} n_i) x r_i
        Matrix next = u.transpose() * cur;          // r_i x rest
        if (i + 1 < d) {
            const Index rows = tt.core(i).r_right() * tt.core(i + 1).n();
            cur = Eigen::Map<const Matrix>(next.data(), rows, next.size() / rows);
        } else {
            cur = std::move(next); // r_d x n_obs
        }
    }
    if (cur.cols() != n_obs) {
        throw DimensionError("projection produced inconsistent observation count");
    }
    return cur;
}

TensorTrain tt_add(const TensorTrain& a, const TensorTrain& b) {
    if (a.num_cores() != b.num_cores() || a.mode_sizes() != b.mode_sizes()) {
        throw DimensionError("train addition requires identical mode sizes");
    }
    const Index nd = a.num_cores();
    std::vector<TTCore> cores;
    cores.reserve(static_cast<std::size_t>(nd));
    for (Index m = 0; m < nd; ++m) {
        const TTCore& ca = a.core(m);
        const TTCore& cb = b.core(m);
        const Index rl = (m == 0) ? 1 : ca.r_left() + cb.r_left();
        const Index rr = (m == nd - 1) ? 1 : ca.r_right() + cb.r_right();
        const Index n = ca.n();
        std::vector<double> buf(static_cast<std::size_t>(rl * n * rr), 0.0);
        auto put = [&](const TTCore& src, Index row_off, Index col_off) {
            const double* s = src.data();
            for (Index q = 0; q < src.r_right(); ++q) {
                for (Index j = 0; j < n; ++j) {
                    for (Index p = 0; p < src.r_left(); ++p) {
                        const Index dst =
                            (row_off + p) + rl * (j + n * (col_off + q));
                        buf[static_cast<std::size_t>(dst)] =
                            s[p + src.r_left() * (j + n * q)];
                    }
                }
            }
        };
        put(ca, 0, 0);
        put(cb, rl - cb.r_left(), rr - cb.r_right());
        cores.emplace_back(rl, n, rr, std::move(buf));
    }
    return TensorTrain(std::move(cores), /*ortho_count=*/0);
}

namespace {

struct WorkCore {
    Matrix left; // (r_left * n) x r_right unfolding
    Index r_left, n, r_right;
};

std::vector<WorkCore> to_work(const TensorTrain& tt) {
    std::vector<WorkCore> w;
    w.reserve(static_cast<std::size_t>(tt.num_cores()));
    for (Index i = 0; i < tt.num_cores(); ++i) {
        const auto& c = tt.core(i);
        w.push_back({c.left_unfolding(), c.r_left(), c.n(), c.r_right()});
    }
    return w;
}

// Right-to-left QR sweep; afterwards all cores except the first have
// orthonormal rows in their right unfoldings and the norm sits in core 0.
void orthogonalize_right_to_left(std::vector<WorkCore>& w) {
    for (std::size_t i = w.size() - 1; i >= 1; --i) {
        WorkCore& c = w[i];
        const Matrix rt =
            Eigen::Map<const Matrix>(c.left.data(), c.r_left, c.n * c.r_right)
                .transpose(); // (n r_right) x r_left
        const Index t = std::min(rt.rows(), rt.cols());
        Eigen::HouseholderQR<Matrix> qr(rt);
        Matrix q = Matrix::Identity(rt.rows(), t);
        q.applyOnTheLeft(qr.householderQ());
        Matrix r = qr.matrixQR().topRows(t).triangularView<Eigen::Upper>();

        Matrix qt = q.transpose(); // t x (n r_right)
        c.left = Eigen::Map<const Matrix>(qt.data(), t * c.n, c.r_right);
        c.r_left = t;

        WorkCore& prev = w[i - 1];
        prev.left = prev.left * r.transpose(); // (r_ll n_prev) x t
        prev.r_right = t;
    }
}

// Left-to-right QR sweep; pushes the norm into the last core.
void orthogonalize_left_to_right(std::vector<WorkCore>& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        WorkCore& c = w[i];
        const Index t = std::min(c.left.rows(), c.left.cols());
        Eigen::HouseholderQR<Matrix> qr(c.left);
        Matrix q = Matrix::Identity(c.left.rows(), t);
        q.applyOnTheLeft(qr.householderQ());
        Matrix r = qr.matrixQR().topRows(t).triangularView<Eigen::Upper>();

        c.left = q;
        c.r_right = t;

        WorkCore& next = w[i + 1];
        Matrix carried =
            r * Eigen::Map<const Matrix>(next.left.data(), next.r_left,
                                         next.n * next.r_right);
        next.r_left = t;
        next.left = Eigen::Map<const Matrix>(carried.data(), t * next.n, next.r_right);
    }
}

TensorTrain from_work(std::vector<WorkCore>& w, Index ortho_count,
                      std::vector<Index> boundaries) {
    std::vector<TTCore> cores;
    cores.reserve(w.size());
    for (auto& c : w) {
        cores.push_back(TTCore::from_left_unfolding(c.left, c.r_left, c.n));
    }
    return TensorTrain(std::move(cores), ortho_count, std::move(boundaries));
}

} // namespace

TensorTrain tt_round(const TensorTrain& tt, double eps_rel) {
    if (eps_rel < 0.0) {
        throw NumericError("rounding tolerance must be nonnegative");
    }
    const Index nd = tt.num_cores();
    if (nd == 1) return tt;

    auto w = to_work(tt);
    orthogonalize_right_to_left(w);
    const double norm = w[0].left.norm();
    const double delta = eps_rel / std::sqrt(static_cast<double>(nd - 1)) * norm;

    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        WorkCore& c = w[i];
        auto svd = svd_trunc(c.left, delta);
        Matrix carry;
        if (svd.rank == 0) {
            // Content below threshold: keep a unit placeholder column so the
            // chain stays contractible, and zero the carry.
            c.left = Matrix::Zero(c.left.rows(), 1);
            c.left(0, 0) = 1.0;
            carry = Matrix::Zero(1, c.r_right);
        } else {
            c.left = svd.u;
            carry = svd.scaled_vt();
        }
        const Index t = c.left.cols();
        c.r_right = t;

        WorkCore& next = w[i + 1];
        Matrix carried =
            carry * Eigen::Map<const Matrix>(next.left.data(), next.r_left,
                                             next.n * next.r_right);
        next.r_left = t;
        next.left = Eigen::Map<const Matrix>(carried.data(), t * next.n, next.r_right);
    }

    return from_work(w, nd - 1, tt.batch_boundaries());
}

double occupancy(const TTCore& core) {
    return static_cast<double>(core.r_right()) /
           static_cast<double>(core.r_left() * core.n());
}

double tt_norm(const TensorTrain& tt) {
    if (tt.fully_orthonormal()) {
        const auto& last = tt.core(tt.num_cores() - 1);
        return MatrixMap(last.data(), last.size(), 1).norm();
    }
    auto w = to_work(tt);
    orthogonalize_left_to_right(w);
    return w.back().left.norm();
}

} // namespace ttstream
