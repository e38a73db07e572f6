#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "ttstream/dense_tensor.hpp"

namespace ttstream {

/// One streamed batch: a dense tensor of shape n_1 x ... x n_d x n_obs.
struct StreamIncrement {
    DenseTensor tensor;
    Index increment_index = 0;
    std::string source;
};

/// Recipe for a reproducible random stream with known bond ranks.
struct SyntheticStreamSpec {
    std::vector<Index> spatial_shape;
    std::vector<Index> true_ranks; ///< r_0 .. r_{d+1}, 1 at both ends
    Index increments = 1;
    Index batch_min = 1;
    Index batch_max = 1;
    double noise_rel = 0.0; ///< white noise, relative to each batch's norm
    std::uint64_t seed = 0;
};

/// Draws one random basis up front, then emits increments whose
/// observations are random combinations of it (plus optional noise),
/// each batch normalized to unit Frobenius norm. Bit-reproducible for a
/// fixed seed.
class SyntheticStream {
public:
    explicit SyntheticStream(SyntheticStreamSpec spec);

    bool done() const { return produced_ >= spec_.increments; }
    StreamIncrement next();

    const SyntheticStreamSpec& spec() const { return spec_; }
    /// The exact basis the observations are drawn from; tests compare
    /// recovered spans against it.
    const Matrix& basis() const { return basis_; }

private:
    SyntheticStreamSpec spec_;
    Matrix basis_; // (n_1 ... n_d) x r_d
    std::mt19937_64 rng_;
    Index produced_ = 0;
};

/// Materializes the whole stream.
std::vector<StreamIncrement> gen_synthetic(const SyntheticStreamSpec& spec);

/// Binary batch file ("TTB1"): magic, u8 mode count, u64 extents,
/// little-endian f64 payload in the fixed linearization.
void write_batch(const DenseTensor& t, const std::filesystem::path& path);
DenseTensor read_batch(const std::filesystem::path& path);

/// A stream on disk is a directory of .ttb files taken in lexicographic
/// order.
std::vector<std::filesystem::path> list_stream(const std::filesystem::path& dir);

} // namespace ttstream
