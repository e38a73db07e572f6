#include "ttstream/stream_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ttstream {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'B', '1'};

void validate_spec(const SyntheticStreamSpec& spec) {
    const auto d = static_cast<Index>(spec.spatial_shape.size());
    if (d < 1) throw ConfigError("synthetic stream needs at least one spatial mode");
    for (Index n : spec.spatial_shape) {
        if (n < 1) throw ConfigError("spatial extents must be >= 1");
    }
    if (static_cast<Index>(spec.true_ranks.size()) != d + 2) {
        throw ConfigError("true ranks must list r_0 .. r_{d+1}");
    }
    if (spec.true_ranks.front() != 1 || spec.true_ranks.back() != 1) {
        throw ConfigError("boundary ranks must be 1");
    }
    if (spec.increments < 1) throw ConfigError("need at least one increment");
    if (spec.batch_min < 1 || spec.batch_max < spec.batch_min) {
        throw ConfigError("batch size range must satisfy 1 <= min <= max");
    }
    if (spec.noise_rel < 0.0) throw ConfigError("noise level must be >= 0");

    // Each bond rank must be reachable both from the left unfolding and,
    // counting the smallest possible observation count, from the right.
    Index left = 1;
    for (Index i = 1; i <= d; ++i) {
        left *= spec.spatial_shape[static_cast<std::size_t>(i - 1)];
        Index right = spec.increments * spec.batch_min;
        for (Index j = i; j < d; ++j) {
            right *= spec.spatial_shape[static_cast<std::size_t>(j)];
        }
        const Index r = spec.true_ranks[static_cast<std::size_t>(i)];
        if (r < 1 || r > left || r > right) {
            std::ostringstream os;
            os << "rank r_" << i << " = " << r
               << " exceeds the unfolding maximum min(" << left << ", " << right
               << ")";
            throw ConfigError(os.str());
        }
    }
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

} // namespace

SyntheticStream::SyntheticStream(SyntheticStreamSpec spec)
        : spec_(std::move(spec)), rng_(spec_.seed) {
    validate_spec(spec_);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto d = static_cast<Index>(spec_.spatial_shape.size());

    // Chain randomly drawn cores into the dense spatial basis once.
    Matrix acc = Matrix::Identity(1, 1);
    Index rows = 1;
    for (Index i = 0; i < d; ++i) {
        const Index n = spec_.spatial_shape[static_cast<std::size_t>(i)];
        const Index rl = spec_.true_ranks[static_cast<std::size_t>(i)];
        const Index rr = spec_.true_ranks[static_cast<std::size_t>(i + 1)];
        Matrix core(rl, n * rr);
        for (Index k = 0; k < core.size(); ++k) core(k) = gauss(rng_);
        Matrix next = acc * core; // rows x (n * rr)
        rows *= n;
        acc = Eigen::Map<const Matrix>(next.data(), rows, rr);
    }
    basis_ = std::move(acc);
}

StreamIncrement SyntheticStream::next() {
    if (done()) throw IndexError("synthetic stream exhausted");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<Index> batch_dist(spec_.batch_min, spec_.batch_max);

    const Index batch = (spec_.batch_min == spec_.batch_max) ? spec_.batch_min
                                                             : batch_dist(rng_);
    const Index r = basis_.cols();
    Matrix coeffs(r, batch);
    for (Index k = 0; k < coeffs.size(); ++k) coeffs(k) = gauss(rng_);

    Matrix dense = basis_ * coeffs;
    if (spec_.noise_rel > 0.0) {
        Matrix white(dense.rows(), dense.cols());
        for (Index k = 0; k < white.size(); ++k) white(k) = gauss(rng_);
        const double wn = white.norm();
        if (wn > 0.0) {
            dense += white * (spec_.noise_rel * dense.norm() / wn);
        }
    }
    const double norm = dense.norm();
    if (norm > 0.0) dense /= norm;

    std::vector<Index> shape = spec_.spatial_shape;
    shape.push_back(batch);

    StreamIncrement inc{tensor_from_matrix(dense, std::move(shape)), produced_,
                        "synthetic"};
    ++produced_;
    return inc;
}

std::vector<StreamIncrement> gen_synthetic(const SyntheticStreamSpec& spec) {
    SyntheticStream stream(spec);
    std::vector<StreamIncrement> out;
    out.reserve(static_cast<std::size_t>(spec.increments));
    while (!stream.done()) out.push_back(stream.next());
    return out;
}

void write_batch(const DenseTensor& t, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(static_cast<std::size_t>(t.size()) * 8 + 64);
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    bytes.push_back(static_cast<std::uint8_t>(t.ndim()));
    for (Index n : t.shape()) append_u64(bytes, static_cast<std::uint64_t>(n));
    for (double v : t.values()) {
        append_u64(bytes, std::bit_cast<std::uint64_t>(v));
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw FormatError("write failed for " + path.string());
}

DenseTensor read_batch(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw FormatError("cannot open " + path.string());
    const auto size = static_cast<std::size_t>(is.tellg());
    is.seekg(0);
    std::vector<std::uint8_t> bytes(size);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!is) throw FormatError("read failed for " + path.string());

    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (pos + n > bytes.size()) {
            throw FormatError("truncated batch file " + path.string());
        }
    };
    auto u64 = [&]() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes[pos + static_cast<std::size_t>(i)])
                 << (8 * i);
        }
        pos += 8;
        return v;
    };

    need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic: " + path.string() + " is not a TTB1 batch");
    }
    pos = 4;
    need(1);
    const Index nd = bytes[pos++];
    if (nd < 1) throw FormatError("batch file declares zero modes");

    std::vector<Index> shape;
    shape.reserve(static_cast<std::size_t>(nd));
    for (Index i = 0; i < nd; ++i) shape.push_back(static_cast<Index>(u64()));

    const Index count = shape_product(shape);
    if (bytes.size() - pos != static_cast<std::size_t>(count) * 8) {
        throw FormatError("payload length disagrees with declared shape in " +
                          path.string());
    }
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        data.push_back(std::bit_cast<double>(u64()));
    }
    return DenseTensor(std::move(shape), std::move(data));
}

std::vector<std::filesystem::path> list_stream(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw FormatError("stream path is not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ttb") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return files;
}

} // namespace ttstream
