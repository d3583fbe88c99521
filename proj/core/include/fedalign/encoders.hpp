#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fedalign/alias_table.hpp"
#include "fedalign/embedding_store.hpp"
#include "fedalign/serialization.hpp"

namespace fedalign {

struct EmbeddingVector {
  std::string record_id;
  std::vector<double> values;
  std::string encoder_id;
};

enum class EncoderKind {
  hash,   ///< canonicalizing feature-hashing encoder
  store,  ///< precomputed FEDEMB vectors (e.g. from the transformer sidecar)
  raw,    ///< positional raw-feature baseline; works on records, not text
};

std::string_view to_string(EncoderKind kind) noexcept;
std::optional<EncoderKind> parse_encoder_kind(std::string_view name) noexcept;

struct EncoderConfig {
  EncoderKind kind = EncoderKind::hash;
  std::size_t dim = 768;
  bool canonicalize = true;
  std::optional<AliasTable> alias_table;
  std::optional<std::filesystem::path> store_path;
  std::size_t max_tokens = 128;
  std::uint64_t hash_seed = 0;
  /// L2-normalize vectors read from a store. Off keeps sidecar output verbatim.
  bool normalize_store = false;

  /// Throws config_error when the combination is unusable.
  void validate() const;
};

/// Text -> fixed-width vector. Implementations are immutable after
/// construction, so concurrent encode() calls are safe.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual EmbeddingVector encode(const TextSequence& seq) const = 0;
  virtual std::size_t dim() const noexcept = 0;
  virtual const std::string& id() const noexcept = 0;
};

class HashEncoder final : public Encoder {
 public:
  explicit HashEncoder(const EncoderConfig& cfg);

  EmbeddingVector encode(const TextSequence& seq) const override;
  std::size_t dim() const noexcept override { return dim_; }
  const std::string& id() const noexcept override { return id_; }

 private:
  std::size_t dim_;
  bool canonicalize_;
  AliasTable aliases_;
  std::size_t max_tokens_;
  std::uint64_t seed_;
  std::string id_;
};

class StoreEncoder final : public Encoder {
 public:
  StoreEncoder(std::shared_ptr<const EmbeddingStore> store, bool normalize);

  /// Throws missing_embedding when the record id is absent.
  EmbeddingVector encode(const TextSequence& seq) const override;
  std::size_t dim() const noexcept override { return store_->dim(); }
  const std::string& id() const noexcept override { return store_->encoder_id(); }

 private:
  std::shared_ptr<const EmbeddingStore> store_;
  bool normalize_;
};

/// Builds the encoder for kind hash or store (the raw baseline has its own
/// type, see raw_encoder.hpp). For kind store, a store whose width differs
/// from cfg.dim raises dimension_mismatch.
std::unique_ptr<Encoder> make_encoder(const EncoderConfig& cfg);

/// One-off convenience wrapper around make_encoder(cfg)->encode(seq).
EmbeddingVector encode(const EncoderConfig& cfg, const TextSequence& seq);

}  // namespace fedalign
