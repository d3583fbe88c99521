#include "fedalign/encoders.hpp"

#include <cmath>

#include "fedalign/error.hpp"
#include "fedalign/hash_encoder.hpp"

namespace fedalign {

std::string_view to_string(EncoderKind kind) noexcept {
  switch (kind) {
    case EncoderKind::hash: return "hash";
    case EncoderKind::store: return "store";
    case EncoderKind::raw: return "raw";
  }
  return "hash";
}

std::optional<EncoderKind> parse_encoder_kind(std::string_view name) noexcept {
  if (name == "hash") return EncoderKind::hash;
  if (name == "store") return EncoderKind::store;
  if (name == "raw") return EncoderKind::raw;
  return std::nullopt;
}

void EncoderConfig::validate() const {
  if (dim == 0) throw Error(Errc::config_error, "encoder.dim: must be positive");
  if (max_tokens == 0) throw Error(Errc::config_error, "encoder.max_tokens: must be positive");
  if (kind == EncoderKind::store && !store_path) {
    throw Error(Errc::config_error, "encoder.store_path: required when encoder.kind is store");
  }
}

HashEncoder::HashEncoder(const EncoderConfig& cfg)
    : dim_(cfg.dim),
      canonicalize_(cfg.canonicalize),
      aliases_(cfg.alias_table.value_or(AliasTable{})),
      max_tokens_(cfg.max_tokens),
      seed_(cfg.hash_seed),
      id_("hash-xxh64-d" + std::to_string(cfg.dim) + (cfg.canonicalize ? "-canon" : "-plain")) {
  cfg.validate();
}

EmbeddingVector HashEncoder::encode(const TextSequence& seq) const {
  HashEncodeOptions opts;
  opts.dim = dim_;
  opts.canonicalize = canonicalize_;
  opts.aliases = &aliases_;
  opts.max_tokens = max_tokens_;
  opts.seed = seed_;
  return EmbeddingVector{seq.record_id, hash_encode(seq.text, opts), id_};
}

StoreEncoder::StoreEncoder(std::shared_ptr<const EmbeddingStore> store, bool normalize)
    : store_(std::move(store)), normalize_(normalize) {
  if (!store_) throw Error(Errc::invalid_argument, "null embedding store");
}

EmbeddingVector StoreEncoder::encode(const TextSequence& seq) const {
  const auto row = store_->find(seq.record_id);
  if (!row) throw Error(Errc::missing_embedding, "no embedding for record '" + seq.record_id + "'");
  std::vector<double> values(row->begin(), row->end());
  double norm2 = 0.0;
  for (const double x : values) {
    if (!std::isfinite(x)) {
      throw Error(Errc::bad_value, "non-finite embedding for record '" + seq.record_id + "'");
    }
    norm2 += x * x;
  }
  if (normalize_ && norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (double& x : values) x /= norm;
  }
  return EmbeddingVector{seq.record_id, std::move(values), store_->encoder_id()};
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case EncoderKind::hash:
      return std::make_unique<HashEncoder>(cfg);
    case EncoderKind::store: {
      auto store = std::make_shared<const EmbeddingStore>(read_store(*cfg.store_path));
      if (store->dim() != cfg.dim) {
        throw Error(Errc::dimension_mismatch, "store dim " + std::to_string(store->dim()) +
                                                  " but encoder.dim is " + std::to_string(cfg.dim));
      }
      return std::make_unique<StoreEncoder>(std::move(store), cfg.normalize_store);
    }
    case EncoderKind::raw:
      break;
  }
  throw Error(Errc::config_error, "encoder.kind raw encodes records, not text");
}

EmbeddingVector encode(const EncoderConfig& cfg, const TextSequence& seq) {
  return make_encoder(cfg)->encode(seq);
}

}  // namespace fedalign
