#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fedalign {

/// Canonical feature name -> alternative labels used to rename features on
/// simulated clients. Every canonical name resolves to itself, and an alias
/// never resolves to more than one canonical name.
class AliasTable {
 public:
  AliasTable() = default;

  /// Registers aliases for a canonical name. Throws invalid_argument when an
  /// alias already belongs to a different canonical name, or when a label
  /// contains characters reserved by the text formats.
  void add(const std::string& canonical, const std::vector<std::string>& aliases);

  /// Listed alternatives for a canonical name (excluding the name itself).
  const std::vector<std::string>& aliases(const std::string& canonical) const;

  std::optional<std::string> canonical_of(const std::string& label) const;

  bool contains_canonical(const std::string& canonical) const {
    return entries_.contains(canonical);
  }

  const std::map<std::string, std::vector<std::string>>& entries() const noexcept {
    return entries_;
  }

  std::size_t size() const noexcept { return entries_.size(); }

  /// Renaming dictionary for the Framingham attributes; mirrors
  /// core/data/aliases_default.json.
  static AliasTable framingham_defaults();

  friend bool operator==(const AliasTable& a, const AliasTable& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
  std::map<std::string, std::string> reverse_;
};

/// File format: {"version": 1, "aliases": {"age": ["Age", "PatientAge"], ...}}
AliasTable load_alias_table(const std::filesystem::path& path);
void save_alias_table(const std::filesystem::path& path, const AliasTable& table);

/// True when a label is safe to embed in every serialization format.
bool is_valid_label(std::string_view label) noexcept;

}  // namespace fedalign
