#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedalign/metrics.hpp"
#include "fedalign/models.hpp"

namespace fedalign {

struct FedConfig {
  int rounds = 25;
  double participation_fraction = 1.0;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::uint32_t bytes_per_param = 4;
  std::uint64_t per_round_overhead_bytes = 800;
  /// Classical FedAvg weighting by client sample count. Off: plain mean of
  /// deltas, as in the reference algorithm.
  bool sample_weighted = false;
  /// Train the round's clients on separate threads. Results do not depend
  /// on this setting.
  bool parallel_clients = false;

  void validate() const;
};

/// One client's frozen embeddings: the local training and test sets.
struct ClientData {
  int client_id = 0;
  LabeledSet train;
  LabeledSet test;
};

struct RoundLog {
  int round = 0;
  std::vector<int> participant_ids;
  /// Mean over clients of the new global model's BCE on their training sets.
  double global_train_loss_mean = 0.0;
  /// F1 of the new global model on the union of all clients' test sets.
  double global_f1 = 0.0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  /// Not part of equality or exported reports.
  std::chrono::nanoseconds wall_time{0};
};

bool same_telemetry(const RoundLog& a, const RoundLog& b) noexcept;

struct ClientMetric {
  int client_id = 0;
  Confusion confusion;
  double f1 = 0.0;
};

struct FedRun {
  FedConfig config;
  ModelShape shape;
  WeightVector initial_weights;
  WeightVector final_weights;
  std::vector<RoundLog> rounds;
  std::vector<ClientMetric> per_client;
  Confusion global_confusion;
  double final_f1 = 0.0;
  /// XXH64 of every client's embeddings before round 1 and after round T.
  std::uint64_t embedding_digest_before = 0;
  std::uint64_t embedding_digest_after = 0;
};

/// max(1, round(fraction * n)) distinct client ids in ascending order;
/// a pure function of (seed, round).
std::vector<int> sample_clients(int n_clients, double fraction, int round, std::uint64_t seed);

/// global + mean(deltas), or the weight-averaged mean when weights are
/// given. Each coordinate is summed over its values in sorted order with
/// Neumaier compensation, so the result does not depend on delta order.
WeightVector aggregate(const WeightVector& global, std::span<const WeightVector> deltas,
                       std::span<const double> weights = {});

struct CommCost {
  std::size_t params = 0;
  std::uint64_t payload_bytes = 0;               // params x bytes_per_param
  std::uint64_t bytes_per_client_per_round = 0;  // payload + overhead, each direction
};

CommCost comm_cost(const ModelShape& shape, const FedConfig& cfg);

/// Runs the federated rounds over already-encoded client data, starting
/// from `initial` (broadcast as W^0).
FedRun run_federated(const FedConfig& cfg, std::span<const ClientData> clients,
                     const Model& initial);

/// Digest of all client embeddings; used for the frozen-encoder check.
std::uint64_t embedding_digest(std::span<const ClientData> clients);

/// Round telemetry as CSV: round,f1,loss,bytes_up,bytes_down
std::string rounds_csv(const FedRun& run);
/// One JSON object per round.
std::string rounds_jsonl(const FedRun& run, std::uint64_t seed_tag);

}  // namespace fedalign
