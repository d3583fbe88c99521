#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string_view>
#include <string>
#include <variant>
#include <vector>

namespace fedalign {

enum class ColumnKind { numeric, categorical, binary };

std::string_view to_string(ColumnKind kind) noexcept;

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::string description;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
  friend bool operator<(Missing, Missing) { return false; }
};

/// One table cell. Numeric and binary columns hold doubles, categorical
/// columns hold strings.
using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& c) noexcept { return std::holds_alternative<Missing>(c); }

/// Feature table plus a binary label. The label column is kept apart from
/// the feature columns so it can never leak into serialized text.
struct TabularDataset {
  std::vector<ColumnSpec> columns;
  std::vector<std::vector<Cell>> rows;
  std::string label_column;
  std::vector<int> labels;

  std::size_t n_rows() const noexcept { return rows.size(); }
  std::size_t n_features() const noexcept { return columns.size(); }

  /// Index of a feature column by name; throws invalid_argument if absent.
  std::size_t column_index(std::string_view name) const;

  std::size_t count_missing() const noexcept;

  friend bool operator==(const TabularDataset&, const TabularDataset&) = default;
};

/// Reads a comma-delimited file with a header row. Empty cells are missing.
/// A column is numeric when every observed cell parses as a finite real,
/// binary when those reals are all 0 or 1, categorical otherwise.
TabularDataset load_csv(const std::filesystem::path& path, std::string_view label_column);
TabularDataset parse_csv(std::istream& in, std::string_view label_column);

void write_csv(const std::filesystem::path& path, const TabularDataset& ds);

/// Fills numeric gaps with the column median and categorical/binary gaps
/// with the column mode. Values that were present are left untouched.
TabularDataset impute(const TabularDataset& ds);

/// Median with the mean-of-middle-pair rule for even counts.
double median(std::vector<double> values);

}  // namespace fedalign
