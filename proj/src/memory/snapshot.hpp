#ifndef EHAM_MEMORY_SNAPSHOT_HPP
#define EHAM_MEMORY_SNAPSHOT_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "memory/hamr.hpp"

namespace eham {

// Binary layout, all integers big-endian:
//   "EHAM" | u16 version | u32 n m p q | u32 cap | n*m*p*q x u16 cells
inline constexpr std::uint16_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const Hamr4D& mem);
Hamr4D decode_snapshot(std::span<const std::uint8_t> bytes);

void save_snapshot(const Hamr4D& mem, const std::filesystem::path& path);
Hamr4D load_snapshot(const std::filesystem::path& path);

}  // namespace eham

#endif  // EHAM_MEMORY_SNAPSHOT_HPP
