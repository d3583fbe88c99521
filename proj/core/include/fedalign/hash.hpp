#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fedalign {

/// XXH64 (xxHash, 64-bit variant), bit-compatible with the reference
/// implementation. Test vectors live in docs/HASHING.md.
std::uint64_t xxh64(std::span<const std::byte> data, std::uint64_t seed = 0) noexcept;

inline std::uint64_t xxh64(std::string_view text, std::uint64_t seed = 0) noexcept {
  return xxh64(std::as_bytes(std::span(text.data(), text.size())), seed);
}

}  // namespace fedalign
