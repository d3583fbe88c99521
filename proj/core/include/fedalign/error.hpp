#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedalign {

enum class Errc {
  // data ingestion and partitioning
  missing_file,
  malformed_row,
  non_binary_label,
  all_missing_column,
  insufficient_features,
  insufficient_rows,
  too_few_rows,
  bad_value,
  // serialization
  unserializable_value,
  empty_record,
  parse_error,
  // encoders and the embedding store
  missing_embedding,
  dimension_mismatch,
  bad_magic,
  version_unsupported,
  truncated_file,
  duplicate_record_id,
  // models and training
  non_finite_loss,
  empty_train_set,
  shape_mismatch,
  // federation
  empty_delta_set,
  config_mismatch,
  // statistics
  degenerate_differences,
  length_mismatch,
  // orchestration
  config_error,
  invalid_argument,
  io_error,
};

/// Coarse grouping used by the command-line tool to pick an exit code.
enum class ErrorCategory { config, data, runtime };

std::string_view to_string(Errc code) noexcept;
ErrorCategory category_of(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fedalign
