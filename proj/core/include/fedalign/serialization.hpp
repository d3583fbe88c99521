#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedalign/dataset.hpp"
#include "fedalign/partition.hpp"

namespace fedalign {

enum class SerializationFormat { structured, natural, compact };

std::string_view to_string(SerializationFormat format) noexcept;
std::optional<SerializationFormat> parse_format(std::string_view name) noexcept;

/// A serialized record. The label travels alongside the text and is never
/// part of it.
struct TextSequence {
  std::string record_id;
  int client_id = 0;
  SerializationFormat format = SerializationFormat::structured;
  std::string text;
  int label = 0;

  friend bool operator==(const TextSequence&, const TextSequence&) = default;
};

struct RecordField {
  std::string name;       // label as seen by the client
  std::string canonical;  // source column name
  Cell value;
};

/// One client-side row: the client's renamed features, nothing else.
struct Record {
  std::string record_id;
  int client_id = 0;
  int label = 0;
  std::vector<RecordField> fields;
};

/// Stable record id for a source row, zero-padded so lexical order matches
/// row order.
std::string record_id_for_row(std::size_t row);

Record make_record(const TabularDataset& ds, std::size_t row, const ClientPartition& part);

/// Shortest round-trip decimal, fixed notation below 1e7 in magnitude,
/// scientific above. Negative zero renders as "0".
std::string format_number(double value);

/// Throws unserializable_value for missing or non-finite cells.
std::string render_cell(const Cell& cell);

/// Sentence templates keyed by feature label; "{}" marks the value.
class NaturalTemplateTable {
 public:
  NaturalTemplateTable() = default;

  /// Throws invalid_argument unless the template has exactly one "{}".
  void set(const std::string& label, const std::string& sentence);
  const std::string* find(const std::string& label) const;

  /// "The <name> is <value>." for labels without a template.
  static std::string apply_default(std::string_view name, std::string_view value);
  static std::string apply(std::string_view sentence, std::string_view value);

  std::size_t size() const noexcept { return templates_.size(); }
  const std::map<std::string, std::string>& entries() const noexcept { return templates_; }

  /// Templates for the Framingham attributes; mirrors
  /// core/data/templates_default.json.
  static NaturalTemplateTable framingham_defaults();

 private:
  std::map<std::string, std::string> templates_;
};

/// File format: {"version": 1, "templates": {"age": "The patient is {} years old."}}
NaturalTemplateTable load_template_table(const std::filesystem::path& path);

TextSequence serialize_structured(const Record& record);
TextSequence serialize_natural(const Record& record, const NaturalTemplateTable& templates);
TextSequence serialize_compact(const Record& record);
TextSequence serialize(const Record& record, SerializationFormat format,
                       const NaturalTemplateTable& templates);

/// Inverse of serialize_structured on the label -> rendered value map.
std::map<std::string, std::string> parse_structured(std::string_view text);
/// Inverse of serialize_compact on the label -> rendered value map.
std::map<std::string, std::string> parse_compact(std::string_view text);

}  // namespace fedalign
