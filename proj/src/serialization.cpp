#include "ttstream/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ttstream {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'C', '1'};

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
    append_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)])
                 << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    void magic() {
        need(4);
        if (std::memcmp(bytes_.data() + pos_, kMagic, 4) != 0) {
            throw FormatError("bad magic: not a TTC1 train file");
        }
        pos_ += 4;
    }

    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) {
            throw FormatError("truncated train data");
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> serialize(const TensorTrain& tt) {
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(tt.param_count()) * 8 + 256);
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(static_cast<std::uint8_t>(tt.num_cores()));
    for (Index i = 0; i < tt.num_cores(); ++i) {
        const auto& c = tt.core(i);
        append_u64(out, static_cast<std::uint64_t>(c.r_left()));
        append_u64(out, static_cast<std::uint64_t>(c.n()));
        append_u64(out, static_cast<std::uint64_t>(c.r_right()));
        const double* p = c.data();
        for (Index k = 0; k < c.size(); ++k) append_f64(out, p[k]);
    }
    const auto& bounds = tt.batch_boundaries();
    append_u64(out, static_cast<std::uint64_t>(bounds.size()));
    for (Index b : bounds) append_u64(out, static_cast<std::uint64_t>(b));
    return out;
}

TensorTrain deserialize(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    r.magic();
    const Index nd = r.u8();
    if (nd < 1) throw FormatError("train file declares zero cores");

    std::vector<TTCore> cores;
    cores.reserve(static_cast<std::size_t>(nd));
    Index prev_rank = 1;
    for (Index i = 0; i < nd; ++i) {
        const auto rl = static_cast<Index>(r.u64());
        const auto n = static_cast<Index>(r.u64());
        const auto rr = static_cast<Index>(r.u64());
        if (rl < 1 || n < 1 || rr < 1) {
            throw FormatError("core extents must be positive");
        }
        if (rl != prev_rank) {
            throw FormatError("bond ranks of adjacent cores disagree");
        }
        // Cap per-core payload so a corrupt header cannot trigger a huge
        // allocation before the truncation check fires.
        if (rl * n * rr > static_cast<Index>(bytes.size() / 8) + 1) {
            throw FormatError("truncated train data");
        }
        std::vector<double> buf(static_cast<std::size_t>(rl * n * rr));
        for (auto& v : buf) v = r.f64();
        cores.emplace_back(rl, n, rr, std::move(buf));
        prev_rank = rr;
    }
    if (prev_rank != 1) throw FormatError("last core must close the chain with rank 1");

    const auto nb = static_cast<Index>(r.u64());
    std::vector<Index> bounds;
    bounds.reserve(static_cast<std::size_t>(nb));
    for (Index i = 0; i < nb; ++i) bounds.push_back(static_cast<Index>(r.u64()));
    if (!r.exhausted()) throw FormatError("trailing bytes after train data");

    try {
        // Core copies share buffers, so the validation pass is cheap.
        TensorTrain probe(cores, /*ortho_count=*/0, bounds);
        return TensorTrain(std::move(cores), probe.measure_ortho_count(),
                           std::move(bounds));
    } catch (const DimensionError& e) {
        throw FormatError(e.what());
    }
}

void save_ttc(const TensorTrain& tt, const std::filesystem::path& path) {
    const auto bytes = serialize(tt);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw FormatError("write failed for " + path.string());
}

TensorTrain load_ttc(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw FormatError("cannot open " + path.string());
    const auto size = static_cast<std::size_t>(is.tellg());
    is.seekg(0);
    std::vector<std::uint8_t> bytes(size);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!is) throw FormatError("read failed for " + path.string());
    return deserialize(bytes);
}

} // namespace ttstream
