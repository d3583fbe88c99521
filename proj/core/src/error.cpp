#include "fedalign/error.hpp"

namespace fedalign {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::missing_file: return "MissingFile";
    case Errc::malformed_row: return "MalformedRow";
    case Errc::non_binary_label: return "NonBinaryLabel";
    case Errc::all_missing_column: return "AllMissingColumn";
    case Errc::insufficient_features: return "InsufficientFeatures";
    case Errc::insufficient_rows: return "InsufficientRows";
    case Errc::too_few_rows: return "TooFewRows";
    case Errc::bad_value: return "BadValue";
    case Errc::unserializable_value: return "UnserializableValue";
    case Errc::empty_record: return "EmptyRecord";
    case Errc::parse_error: return "ParseError";
    case Errc::missing_embedding: return "MissingEmbedding";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::bad_magic: return "BadMagic";
    case Errc::version_unsupported: return "VersionUnsupported";
    case Errc::truncated_file: return "TruncatedFile";
    case Errc::duplicate_record_id: return "DuplicateRecordId";
    case Errc::non_finite_loss: return "NonFiniteLoss";
    case Errc::empty_train_set: return "EmptyTrainSet";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::empty_delta_set: return "EmptyDeltaSet";
    case Errc::config_mismatch: return "ConfigMismatch";
    case Errc::degenerate_differences: return "DegenerateDifferences";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::config_error: return "ConfigError";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category_of(Errc code) noexcept {
  switch (code) {
    case Errc::config_error:
    case Errc::config_mismatch:
    case Errc::invalid_argument:
      return ErrorCategory::config;
    case Errc::missing_file:
    case Errc::malformed_row:
    case Errc::non_binary_label:
    case Errc::all_missing_column:
    case Errc::insufficient_features:
    case Errc::insufficient_rows:
    case Errc::too_few_rows:
    case Errc::bad_value:
    case Errc::unserializable_value:
    case Errc::empty_record:
    case Errc::parse_error:
    case Errc::missing_embedding:
    case Errc::dimension_mismatch:
    case Errc::bad_magic:
    case Errc::version_unsupported:
    case Errc::truncated_file:
    case Errc::duplicate_record_id:
      return ErrorCategory::data;
    default:
      return ErrorCategory::runtime;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace fedalign
