#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedalign/encoders.hpp"
#include "fedalign/fed_protocol.hpp"
#include "fedalign/models.hpp"
#include "fedalign/partition.hpp"
#include "fedalign/pipeline.hpp"
#include "fedalign/serialization.hpp"
#include "fedalign/synthetic.hpp"

namespace fedalign {

inline constexpr int kConfigVersion = 1;

/// Parsed experiment configuration (JSON, version 1; see docs/FORMATS.md).
/// Path fields keep the text written in the file; resolve() turns them
/// into paths relative to the config file's directory.
struct ExperimentConfig {
  // dataset: exactly one of path or synthetic
  std::optional<std::string> dataset_path;
  std::optional<SyntheticSpec> synthetic;
  std::string label_column = "TenYearCHD";

  Scenario scenario = FixedScenario{};
  std::optional<std::string> aliases_path;
  std::optional<std::string> templates_path;
  SerializationFormat format = SerializationFormat::structured;

  EncoderKind encoder_kind = EncoderKind::hash;
  std::size_t encoder_dim = 768;
  bool canonicalize = true;
  std::size_t max_tokens = 128;
  std::uint64_t hash_seed = 0;
  std::optional<std::string> store_path;
  bool normalize_store = false;

  ModelSpec model;  // input_dim follows encoder_dim
  TrainConfig train;
  FedConfig fed;
  SplitSpec split;

  std::vector<double> stress_overlaps = kDefaultOverlaps;
  std::vector<StressVariant> stress_variants = {StressVariant::aligned, StressVariant::raw};

  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_dir = "out";

  /// Directory relative paths are resolved against.
  std::filesystem::path base_dir = ".";

  std::filesystem::path resolve(const std::string& p) const;
  std::filesystem::path output_path() const { return resolve(output_dir); }

  /// Throws config_error with the offending field path.
  void validate() const;
};

/// Strict parse: unknown keys, wrong types, and out-of-range values raise
/// config_error naming the field path (e.g. "fed.rounds").
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Normalized JSON text with every field present and keys sorted.
std::string config_to_json(const ExperimentConfig& cfg);

/// XXH64 of config_to_json, as 16 hex digits. Equal for configs that
/// differ only in key order or in spelling out defaults.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace fedalign
