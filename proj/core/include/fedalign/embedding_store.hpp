#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fedalign {

/// In-memory FEDEMB store: record id -> float32 vector of a fixed width.
///
/// On-disk layout (all integers little-endian):
///   "FEDM" | u32 version = 1 | u32 dim | u64 count
///   | u16 len + encoder_id bytes
///   | count x ( u16 len + record_id bytes | dim x f32 )
class EmbeddingStore {
 public:
  static constexpr std::uint32_t kVersion = 1;

  EmbeddingStore(std::uint32_t dim, std::string encoder_id);

  std::uint32_t dim() const noexcept { return dim_; }
  const std::string& encoder_id() const noexcept { return encoder_id_; }
  std::size_t size() const noexcept { return ids_.size(); }

  /// Throws duplicate_record_id or dimension_mismatch.
  void add(const std::string& record_id, std::span<const float> values);
  void add(const std::string& record_id, std::span<const double> values);

  bool contains(const std::string& record_id) const { return index_.contains(record_id); }
  std::optional<std::span<const float>> find(const std::string& record_id) const;

  const std::vector<std::string>& record_ids() const noexcept { return ids_; }
  std::span<const float> row(std::size_t i) const {
    return std::span(data_).subspan(i * dim_, dim_);
  }

  /// Exact size of the serialized form.
  std::uint64_t file_size() const noexcept;

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

 private:
  std::uint32_t dim_;
  std::string encoder_id_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Errors: missing_file, bad_magic, version_unsupported, truncated_file,
/// duplicate_record_id.
EmbeddingStore read_store(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames into place.
void write_store(const std::filesystem::path& path, const EmbeddingStore& store);

std::vector<std::byte> encode_store(const EmbeddingStore& store);
EmbeddingStore decode_store(std::span<const std::byte> bytes);

}  // namespace fedalign
