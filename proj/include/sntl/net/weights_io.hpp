#pragma once

#include "sntl/net/network.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace sntl {

// Weight file layout, all integers and floats little-endian:
//
//   "SNTL"                      4 bytes magic
//   version                     u16 (currently 1)
//   layer count                 u16
//   per layer:
//     out_dim, in_dim           u32, u32
//     weights                   out_dim * in_dim f64, row-major
//     bias                      out_dim f64
//   crc32                       u32, CRC-32 (IEEE) of every byte between the
//                               magic and this field
inline constexpr std::uint16_t kWeightFormatVersion = 1;

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_weights(const NetworkParams& params);

/// Throws FormatError for bad magic, version, dimensions, length or checksum,
/// and ArchitectureMismatch when `expected` is given and differs.
NetworkParams decode_weights(std::span<const std::uint8_t> bytes,
                             const std::optional<Architecture>& expected = std::nullopt);

/// Throws IoError when the file cannot be written.
void save_weights(const NetworkParams& params, const std::filesystem::path& path);

/// Throws IoError when the file cannot be read, otherwise as decode_weights.
NetworkParams load_weights(const std::filesystem::path& path,
                           const std::optional<Architecture>& expected = std::nullopt);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sntl
