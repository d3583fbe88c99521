#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fedalign/alias_table.hpp"

namespace fedalign {

struct HashToken {
  std::string text;
  /// Index of the token within its segment (segments end at ',', ';',
  /// newline, or a token-final '.').
  std::size_t position = 0;

  friend bool operator==(const HashToken&, const HashToken&) = default;
};

/// Number of position buckets mixed into every token hash.
inline constexpr std::size_t kPositionBuckets = 4;

/// Tokenizer used by the hash encoder; see docs/HASHING.md for the grammar.
std::vector<HashToken> hash_tokenize(std::string_view text);

struct HashEncodeOptions {
  std::size_t dim = 768;
  bool canonicalize = true;
  const AliasTable* aliases = nullptr;
  std::size_t max_tokens = 128;
  std::uint64_t seed = 0;
};

/// Signed feature hashing of (token, position bucket) pairs, L2-normalized.
/// Empty input maps to the zero vector.
std::vector<double> hash_encode(std::string_view text, const HashEncodeOptions& options);

/// Bucket index and sign for one token; exposed for the docs test vectors.
struct HashSlot {
  std::size_t index;
  double sign;
};
HashSlot hash_slot(std::string_view token, std::size_t position, std::size_t dim,
                   std::uint64_t seed);

}  // namespace fedalign
