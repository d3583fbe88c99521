#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fedalign/serialization.hpp"

namespace fedalign {

/// Baseline encoder that skips text entirely: a client's features, sorted
/// by their (renamed) labels, are z-scored and written to positions
/// 0..k-1 of a zero-padded vector. Clients whose schemas disagree put
/// different features in the same slot, which is exactly the failure mode
/// the aligned pipeline is meant to avoid.
class RawFeatureEncoder {
 public:
  /// Fits per-position statistics on one client's records.
  static RawFeatureEncoder fit(std::span<const Record> records, std::size_t dim);

  /// Throws shape_mismatch when the record's labels differ from the fitted ones.
  std::vector<double> encode(const Record& record) const;

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  struct Column {
    double mean = 0.0;
    double scale = 1.0;
    std::map<std::string, double> codes;  // categorical only
  };

  double raw_value(const Column& col, const Cell& cell) const;

  std::size_t dim_ = 0;
  std::vector<std::string> labels_;
  std::vector<Column> columns_;
};

}  // namespace fedalign
