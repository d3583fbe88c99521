#include "fedalign/serialization.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "fedalign/error.hpp"

namespace fedalign {
namespace {

constexpr std::string_view kPlaceholder = "{}";

std::vector<const RecordField*> sorted_fields(const Record& record) {
  if (record.fields.empty()) {
    throw Error(Errc::empty_record, "record '" + record.record_id + "' has no features");
  }
  std::vector<const RecordField*> out;
  out.reserve(record.fields.size());
  for (const auto& f : record.fields) out.push_back(&f);
  std::sort(out.begin(), out.end(),
            [](const RecordField* a, const RecordField* b) { return a->name < b->name; });
  return out;
}

TextSequence make_sequence(const Record& record, SerializationFormat format, std::string text) {
  return TextSequence{record.record_id, record.client_id, format, std::move(text), record.label};
}

std::map<std::string, std::string> parse_pairs(std::string_view text, std::string_view pair_sep,
                                               std::string_view kv_sep,
                                               std::string_view format_name) {
  if (text.empty()) throw Error(Errc::parse_error, std::string(format_name) + ": empty text at offset 0");
  std::map<std::string, std::string> out;
  std::size_t offset = 0;
  while (true) {
    const auto end = text.find(pair_sep, offset);
    const auto segment = text.substr(offset, end == std::string_view::npos ? end : end - offset);
    const auto kv = segment.find(kv_sep);
    auto fail = [&](std::size_t at, const char* what) {
      throw Error(Errc::parse_error, std::string(format_name) + ": " + what + " at offset " +
                                         std::to_string(at));
    };
    if (kv == std::string_view::npos) fail(offset, "missing key/value separator");
    const auto key = segment.substr(0, kv);
    const auto value = segment.substr(kv + kv_sep.size());
    if (key.empty()) fail(offset, "empty feature name");
    if (value.empty()) fail(offset + kv + kv_sep.size(), "empty value");
    if (value.find(kv_sep) != std::string_view::npos || key.find_first_of(",;=:") != std::string_view::npos) {
      fail(offset, "unexpected separator");
    }
    if (!out.emplace(std::string(key), std::string(value)).second) {
      fail(offset, "duplicate feature name");
    }
    if (end == std::string_view::npos) break;
    offset = end + pair_sep.size();
  }
  return out;
}

}  // namespace

std::string_view to_string(SerializationFormat format) noexcept {
  switch (format) {
    case SerializationFormat::structured: return "structured";
    case SerializationFormat::natural: return "natural";
    case SerializationFormat::compact: return "compact";
  }
  return "structured";
}

std::optional<SerializationFormat> parse_format(std::string_view name) noexcept {
  if (name == "structured") return SerializationFormat::structured;
  if (name == "natural") return SerializationFormat::natural;
  if (name == "compact") return SerializationFormat::compact;
  return std::nullopt;
}

std::string record_id_for_row(std::size_t row) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "r%07zu", row);
  return buf.data();
}

Record make_record(const TabularDataset& ds, std::size_t row, const ClientPartition& part) {
  Record rec;
  rec.record_id = record_id_for_row(row);
  rec.client_id = part.client_id;
  rec.label = ds.labels.at(row);
  rec.fields.reserve(part.schema.size());
  for (std::size_t i = 0; i < part.schema.size(); ++i) {
    const auto src = part.source_columns[i];
    rec.fields.push_back(RecordField{part.schema[i].name, ds.columns[src].name, ds.rows[row][src]});
  }
  return rec;
}

std::string format_number(double value) {
  if (!std::isfinite(value)) {
    throw Error(Errc::unserializable_value, "non-finite numeric value");
  }
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto fmt = std::fabs(value) < 1e7 ? std::chars_format::fixed : std::chars_format::scientific;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, fmt);
  if (ec != std::errc{}) throw Error(Errc::unserializable_value, "number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string render_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&cell)) {
    if (s->empty()) throw Error(Errc::unserializable_value, "empty categorical value");
    return *s;
  }
  throw Error(Errc::unserializable_value, "missing value; impute before serializing");
}

void NaturalTemplateTable::set(const std::string& label, const std::string& sentence) {
  const auto first = sentence.find(kPlaceholder);
  if (first == std::string::npos ||
      sentence.find(kPlaceholder, first + kPlaceholder.size()) != std::string::npos) {
    throw Error(Errc::invalid_argument,
                "template for '" + label + "' must contain exactly one {} placeholder");
  }
  templates_[label] = sentence;
}

const std::string* NaturalTemplateTable::find(const std::string& label) const {
  const auto it = templates_.find(label);
  return it == templates_.end() ? nullptr : &it->second;
}

std::string NaturalTemplateTable::apply_default(std::string_view name, std::string_view value) {
  std::string out = "The ";
  out += name;
  out += " is ";
  out += value;
  out += '.';
  return out;
}

std::string NaturalTemplateTable::apply(std::string_view sentence, std::string_view value) {
  const auto at = sentence.find(kPlaceholder);
  std::string out(sentence.substr(0, at));
  out += value;
  out += sentence.substr(at + kPlaceholder.size());
  return out;
}

NaturalTemplateTable NaturalTemplateTable::framingham_defaults() {
  NaturalTemplateTable t;
  t.set("sex", "The patient's sex is {}.");
  t.set("male", "The male indicator is {}.");
  t.set("age", "The patient is {} years old.");
  t.set("education", "The education level is {}.");
  t.set("is_smoking", "Current smoker status is {}.");
  t.set("currentSmoker", "Current smoker status is {}.");
  t.set("cigsPerDay", "The patient smokes {} cigarettes per day.");
  t.set("BPMeds", "Blood pressure medication status is {}.");
  t.set("prevalentStroke", "Prior stroke status is {}.");
  t.set("prevalentHyp", "Hypertension status is {}.");
  t.set("diabetes", "Diabetes status is {}.");
  t.set("totChol", "Total cholesterol is {}.");
  t.set("sysBP", "Systolic blood pressure is {}.");
  t.set("diaBP", "Diastolic blood pressure is {}.");
  t.set("BMI", "Body mass index is {}.");
  t.set("heartRate", "Heart rate is {}.");
  t.set("glucose", "Glucose level is {}.");
  return t;
}

NaturalTemplateTable load_template_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, "cannot open template table '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, "template table '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object() || doc.value("version", 0) != 1 || !doc.contains("templates") ||
      !doc["templates"].is_object()) {
    throw Error(Errc::config_error, "template table '" + path.string() +
                                        "': expected {\"version\": 1, \"templates\": {...}}");
  }
  NaturalTemplateTable table;
  for (const auto& [label, sentence] : doc["templates"].items()) {
    if (!sentence.is_string()) {
      throw Error(Errc::config_error, "templates." + label + ": expected a string");
    }
    table.set(label, sentence.get<std::string>());
  }
  return table;
}

TextSequence serialize_structured(const Record& record) {
  std::string text;
  for (const auto* f : sorted_fields(record)) {
    if (!text.empty()) text += ", ";
    text += f->name;
    text += ": ";
    text += render_cell(f->value);
  }
  return make_sequence(record, SerializationFormat::structured, std::move(text));
}

TextSequence serialize_natural(const Record& record, const NaturalTemplateTable& templates) {
  std::string text;
  for (const auto* f : sorted_fields(record)) {
    if (!text.empty()) text += ' ';
    const auto value = render_cell(f->value);
    if (const auto* sentence = templates.find(f->name)) {
      text += NaturalTemplateTable::apply(*sentence, value);
    } else {
      text += NaturalTemplateTable::apply_default(f->name, value);
    }
  }
  return make_sequence(record, SerializationFormat::natural, std::move(text));
}

TextSequence serialize_compact(const Record& record) {
  std::string text;
  for (const auto* f : sorted_fields(record)) {
    if (!text.empty()) text += "; ";
    text += f->name;
    text += '=';
    text += render_cell(f->value);
  }
  return make_sequence(record, SerializationFormat::compact, std::move(text));
}

TextSequence serialize(const Record& record, SerializationFormat format,
                       const NaturalTemplateTable& templates) {
  switch (format) {
    case SerializationFormat::structured: return serialize_structured(record);
    case SerializationFormat::natural: return serialize_natural(record, templates);
    case SerializationFormat::compact: return serialize_compact(record);
  }
  return serialize_structured(record);
}

std::map<std::string, std::string> parse_structured(std::string_view text) {
  return parse_pairs(text, ", ", ": ", "structured");
}

std::map<std::string, std::string> parse_compact(std::string_view text) {
  return parse_pairs(text, "; ", "=", "compact");
}

}  // namespace fedalign
