#include "fedalign/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "fedalign/error.hpp"
#include "fedalign/serialization.hpp"

namespace fedalign {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Minimal RFC 4180 field splitter: double quotes group, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

bool is_missing_token(std::string_view s) { return s.empty() || s == "NA"; }

std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(ColumnKind kind) noexcept {
  switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::binary: return "binary";
  }
  return "numeric";
}

std::size_t TabularDataset::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw Error(Errc::invalid_argument, "no column named '" + std::string(name) + "'");
}

std::size_t TabularDataset::count_missing() const noexcept {
  std::size_t n = 0;
  for (const auto& row : rows) {
    n += static_cast<std::size_t>(std::count_if(row.begin(), row.end(), is_missing));
  }
  return n;
}

TabularDataset parse_csv(std::istream& in, std::string_view label_column) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw Error(Errc::malformed_row, "line 1: missing header row");
  for (auto& h : header) h = std::string(trim(h));

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].empty()) {
      throw Error(Errc::malformed_row, "line " + std::to_string(line_no) + ": empty column name");
    }
    if (header[i] == label_column) label_idx = i;
  }
  if (label_idx == header.size()) {
    throw Error(Errc::invalid_argument,
                "label column '" + std::string(label_column) + "' not in header");
  }

  std::vector<std::vector<std::string>> raw;
  std::vector<std::size_t> raw_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(Errc::malformed_row,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (auto& f : fields) f = std::string(trim(f));
    raw.push_back(std::move(fields));
    raw_lines.push_back(line_no);
  }

  TabularDataset ds;
  ds.label_column = std::string(label_column);
  std::vector<std::size_t> feature_src;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_idx) continue;
    bool numeric = true;
    bool binary = true;
    for (const auto& r : raw) {
      if (is_missing_token(r[c])) continue;
      const auto v = parse_real(r[c]);
      if (!v) {
        numeric = false;
        break;
      }
      if (*v != 0.0 && *v != 1.0) binary = false;
    }
    ColumnKind kind = ColumnKind::categorical;
    if (numeric) kind = binary && !raw.empty() ? ColumnKind::binary : ColumnKind::numeric;
    ds.columns.push_back(ColumnSpec{header[c], kind, {}});
    feature_src.push_back(c);
  }

  ds.rows.reserve(raw.size());
  ds.labels.reserve(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    const auto& fields = raw[r];
    const auto label = parse_real(fields[label_idx]);
    if (!label || (*label != 0.0 && *label != 1.0)) {
      throw Error(Errc::non_binary_label, "line " + std::to_string(raw_lines[r]) +
                                              ": label value '" + fields[label_idx] +
                                              "' is not 0 or 1");
    }
    ds.labels.push_back(*label == 1.0 ? 1 : 0);

    std::vector<Cell> row;
    row.reserve(feature_src.size());
    for (std::size_t f = 0; f < feature_src.size(); ++f) {
      const auto& text = fields[feature_src[f]];
      if (is_missing_token(text)) {
        row.emplace_back(Missing{});
      } else if (ds.columns[f].kind == ColumnKind::categorical) {
        if (text.find_first_of(",;:=") != std::string::npos) {
          throw Error(Errc::bad_value, "line " + std::to_string(raw_lines[r]) +
                                           ": categorical value '" + text +
                                           "' contains a reserved separator");
        }
        row.emplace_back(text);
      } else {
        row.emplace_back(*parse_real(text));
      }
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, std::string_view label_column) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, "cannot open '" + path.string() + "'");
  return parse_csv(in, label_column);
}

void write_csv(const std::filesystem::path& path, const TabularDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  for (const auto& col : ds.columns) out << col.name << ',';
  out << ds.label_column << '\n';
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (const auto& cell : ds.rows[r]) {
      if (const auto* d = std::get_if<double>(&cell)) {
        out << format_number(*d);
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        out << *s;
      }
      out << ',';
    }
    out << ds.labels[r] << '\n';
  }
  if (!out) throw Error(Errc::io_error, "failed writing '" + path.string() + "'");
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TabularDataset impute(const TabularDataset& ds) {
  TabularDataset out = ds;
  for (std::size_t c = 0; c < ds.n_features(); ++c) {
    const auto& col = ds.columns[c];
    Cell fill;
    if (col.kind == ColumnKind::numeric) {
      std::vector<double> observed;
      for (const auto& row : ds.rows) {
        if (const auto* d = std::get_if<double>(&row[c])) observed.push_back(*d);
      }
      if (observed.empty()) {
        throw Error(Errc::all_missing_column, "column '" + col.name + "' has no values");
      }
      if (observed.size() == ds.n_rows()) continue;
      fill = median(std::move(observed));
    } else {
      // Mode; ties go to the smallest value so the choice is deterministic.
      std::map<Cell, std::size_t> counts;
      for (const auto& row : ds.rows) {
        if (!is_missing(row[c])) ++counts[row[c]];
      }
      if (counts.empty()) {
        throw Error(Errc::all_missing_column, "column '" + col.name + "' has no values");
      }
      auto best = counts.begin();
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      fill = best->first;
    }
    for (auto& row : out.rows) {
      if (is_missing(row[c])) row[c] = fill;
    }
  }
  return out;
}

}  // namespace fedalign
