#include "fedalign/hash_encoder.hpp"

#include <cmath>

#include "fedalign/error.hpp"
#include "fedalign/hash.hpp"

namespace fedalign {
namespace {

bool is_token_char(unsigned char c) noexcept {
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         c == '_' || c == '.' || c == '+' || c == '-' || c >= 0x80;
}

bool is_segment_break(unsigned char c) noexcept { return c == ',' || c == ';' || c == '\n'; }

}  // namespace

std::vector<HashToken> hash_tokenize(std::string_view text) {
  std::vector<HashToken> tokens;
  std::size_t position = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_segment_break(c)) {
      position = 0;
      ++i;
      continue;
    }
    if (!is_token_char(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_token_char(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view raw = text.substr(i, j - i);
    i = j;
    while (!raw.empty() && raw.front() == '.') raw.remove_prefix(1);
    bool ends_segment = false;
    while (!raw.empty() && raw.back() == '.') {
      raw.remove_suffix(1);
      ends_segment = true;
    }
    if (!raw.empty()) tokens.push_back(HashToken{std::string(raw), position++});
    if (ends_segment) position = 0;
  }
  return tokens;
}

HashSlot hash_slot(std::string_view token, std::size_t position, std::size_t dim,
                   std::uint64_t seed) {
  std::string key(token);
  key.push_back('\x1f');
  key.push_back(static_cast<char>(position % kPositionBuckets));
  const auto h = xxh64(key, seed);
  return HashSlot{static_cast<std::size_t>(h % dim), (h >> 63) ? -1.0 : 1.0};
}

std::vector<double> hash_encode(std::string_view text, const HashEncodeOptions& options) {
  if (options.dim == 0) throw Error(Errc::invalid_argument, "hash encoder dim must be positive");
  std::vector<double> v(options.dim, 0.0);
  auto tokens = hash_tokenize(text);
  if (tokens.size() > options.max_tokens) tokens.resize(options.max_tokens);
  for (const auto& tok : tokens) {
    std::string_view word = tok.text;
    std::string canonical;
    if (options.canonicalize && options.aliases != nullptr) {
      if (auto c = options.aliases->canonical_of(tok.text)) {
        canonical = std::move(*c);
        word = canonical;
      }
    }
    const auto slot = hash_slot(word, tok.position, options.dim, options.seed);
    v[slot.index] += slot.sign;
  }
  double norm2 = 0.0;
  for (const double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (double& x : v) x /= norm;
  }
  return v;
}

}  // namespace fedalign
