#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fedalign/alias_table.hpp"
#include "fedalign/dataset.hpp"
#include "fedalign/encoders.hpp"
#include "fedalign/fed_protocol.hpp"
#include "fedalign/metrics.hpp"
#include "fedalign/models.hpp"
#include "fedalign/partition.hpp"
#include "fedalign/serialization.hpp"

namespace fedalign {

struct FixedScenario {
  int n_clients = 3;
  int shared = 8;
  int unique = 3;
};

struct OverlapScenario {
  int n_clients = 3;
  double overlap_fraction = 0.8;
};

using Scenario = std::variant<FixedScenario, OverlapScenario>;

int client_count(const Scenario& s) noexcept;

/// Everything one federated experiment needs. The dataset must already be
/// imputed. `data_seed` drives partitioning and splitting; each run seed
/// passed to run()/multi_seed() drives initialization, sampling, and local
/// training.
struct PipelineSpec {
  std::shared_ptr<const TabularDataset> dataset;
  Scenario scenario = FixedScenario{};
  AliasTable aliases = AliasTable::framingham_defaults();
  SerializationFormat format = SerializationFormat::structured;
  NaturalTemplateTable templates = NaturalTemplateTable::framingham_defaults();
  EncoderConfig encoder;
  ModelSpec model;
  SplitSpec split;
  FedConfig fed;
  std::uint64_t data_seed = 0;

  /// Throws config_error or config_mismatch before any work is done.
  void validate() const;
};

std::vector<ClientPartition> make_partitions(const PipelineSpec& spec);

/// Per-client train/test splits, seeded from data_seed and the client id.
std::vector<SplitIndices> make_splits(const PipelineSpec& spec,
                                      const std::vector<ClientPartition>& parts);

/// Serialized text of every row a client holds, ordered by record id.
std::vector<TextSequence> serialize_client(const PipelineSpec& spec, const ClientPartition& part);

/// Serializes and encodes each client's rows once. The raw baseline is
/// fitted on each client's own training rows.
std::vector<ClientData> build_client_data(const PipelineSpec& spec,
                                          const std::vector<ClientPartition>& parts,
                                          const std::vector<SplitIndices>& splits);

/// Model input width for a pipeline. The raw baseline widens to the
/// largest client schema instead of the encoder width.
std::size_t model_input_dim(const PipelineSpec& spec, const std::vector<ClientPartition>& parts);

/// Prepared data shared by every seed of one experiment.
struct PreparedExperiment {
  std::vector<ClientPartition> partitions;
  std::vector<SplitIndices> splits;
  std::vector<ClientData> clients;
  ModelSpec model;
};

PreparedExperiment prepare(const PipelineSpec& spec);

FedRun run(const PipelineSpec& spec, const PreparedExperiment& data, std::uint64_t run_seed);

struct MultiSeedResult {
  RunSummary summary;
  std::vector<FedRun> runs;
};

MultiSeedResult multi_seed(const PipelineSpec& spec, const PreparedExperiment& data,
                           const std::vector<std::uint64_t>& seeds);
MultiSeedResult multi_seed(const PipelineSpec& spec, const std::vector<std::uint64_t>& seeds);

enum class StressVariant {
  aligned,  ///< the configured hash encoder with canonicalization
  plain,    ///< the same hash encoder without canonicalization
  raw,      ///< positional raw-feature baseline
};

std::string_view to_string(StressVariant v) noexcept;
std::optional<StressVariant> parse_stress_variant(std::string_view name) noexcept;

struct StressCell {
  double overlap = 0.0;
  StressVariant variant = StressVariant::aligned;
  RunSummary summary;
};

struct StressReport {
  std::vector<double> overlaps;  // sorted descending
  std::vector<StressVariant> variants;
  std::vector<StressCell> cells;  // overlap-major, variants in the given order

  const StressCell& at(double overlap, StressVariant variant) const;
};

inline const std::vector<double> kDefaultOverlaps = {0.8, 0.6, 0.4, 0.2};

/// Replaces the scenario with an overlap scenario (same client count) for
/// every level and runs multi_seed for each variant.
StressReport stress_sweep(const PipelineSpec& base, std::vector<double> overlaps,
                          const std::vector<StressVariant>& variants,
                          const std::vector<std::uint64_t>& seeds);

}  // namespace fedalign
