#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fedalign/experiment_config.hpp"
#include "fedalign/partition.hpp"

namespace fedalign {

/// Command-line overrides applied on top of a loaded config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<SerializationFormat> format;
  std::optional<EncoderKind> encoder;
};

/// Output directory overrides are taken relative to the working directory.
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

/// Loads the dataset and alias/template tables named by the config.
PipelineSpec pipeline_spec(const ExperimentConfig& cfg);

struct CommandContext {
  ExperimentConfig config;
  bool quiet = false;
  std::ostream* log = nullptr;  // progress and warnings; nullptr for silence
};

struct CommandResult {
  std::filesystem::path manifest;
  /// Paths relative to the output directory, in write order.
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;
};

/// Partition descriptors and train/test splits, one file each per client.
CommandResult cmd_prepare(const CommandContext& ctx);
/// corpus.jsonl and corpus_meta.json from the prepare outputs.
CommandResult cmd_serialize(const CommandContext& ctx);
/// embeddings.fedemb for the hash encoder; for a store encoder, validates
/// the configured store against the corpus instead.
CommandResult cmd_embed(const CommandContext& ctx);
/// Multi-seed federated training; round logs and summary reports under train/.
CommandResult cmd_train(const CommandContext& ctx);
/// Overlap sweep; reports under stress/.
CommandResult cmd_stress(const CommandContext& ctx);
/// Writes a synthetic dataset as CSV.
void cmd_generate(const std::filesystem::path& out, const SyntheticSpec& spec);

/// Run seed for replicate `label` under master seed `master`.
std::uint64_t run_seed_for(std::uint64_t master, std::uint64_t label);

std::string partition_to_json(const ClientPartition& part);
ClientPartition partition_from_json(const std::string& text);
std::string split_to_json(int client_id, const SplitIndices& split);
SplitIndices split_from_json(const std::string& text);

}  // namespace fedalign
