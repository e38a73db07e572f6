#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ttstream/tensor_train.hpp"

namespace ttstream {

/// Binary train image ("TTC1"): magic, u8 core count, then per core
/// u64 r_left / u64 n / u64 r_right and the little-endian f64 payload,
/// then u64 boundary count and the u64 cumulative batch boundaries.
std::vector<std::uint8_t> serialize(const TensorTrain& tt);

/// Inverse of serialize. Orthogonality is re-measured from the data,
/// not trusted from the file.
TensorTrain deserialize(std::span<const std::uint8_t> bytes);

void save_ttc(const TensorTrain& tt, const std::filesystem::path& path);
TensorTrain load_ttc(const std::filesystem::path& path);

} // namespace ttstream
