#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fedalign/alias_table.hpp"
#include "fedalign/dataset.hpp"

namespace fedalign {

/// One simulated client: its rows of the source table, its feature subset,
/// and the renamed schema it sees.
struct ClientPartition {
  int client_id = 0;  // 1-based
  std::vector<std::size_t> row_indices;
  /// Renamed columns, in source-column order.
  std::vector<ColumnSpec> schema;
  /// Source column index for each schema entry.
  std::vector<std::size_t> source_columns;
  std::map<std::string, std::string> canonical_of;
  std::set<std::string> shared_features;
  std::set<std::string> unique_features;

  friend bool operator==(const ClientPartition&, const ClientPartition&) = default;
};

struct SplitSpec {
  double train_fraction = 0.8;
  bool stratified = true;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  friend bool operator==(const SplitIndices&, const SplitIndices&) = default;
};

/// Splits rows across clients (equal sizes, stratified by label) and gives
/// every client the shared features plus its own unique block. All labels
/// are renamed through the alias table.
///
/// Unique blocks are disjoint when shared + n * unique fits in the feature
/// count; otherwise they are cut from the non-shared pool cyclically and
/// neighbouring clients overlap. Only shared + unique > features is an error.
std::vector<ClientPartition> partition(const TabularDataset& ds, int n_clients,
                                       int shared_count, int unique_count,
                                       const AliasTable& aliases, std::uint64_t seed);

/// Shared count is round(overlap_fraction * features); the remaining
/// features are dealt round-robin as unique features.
std::vector<ClientPartition> overlap_partition(const TabularDataset& ds, int n_clients,
                                               double overlap_fraction,
                                               const AliasTable& aliases,
                                               std::uint64_t seed);

/// Train/test split of one client's rows. Returned indices refer to the
/// source dataset and are sorted ascending.
SplitIndices split(const TabularDataset& ds, const ClientPartition& part,
                   const SplitSpec& spec);

}  // namespace fedalign
