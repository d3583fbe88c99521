#include "fedalign/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedalign/error.hpp"
#include "fedalign/rng.hpp"

namespace fedalign {
namespace {

std::vector<std::size_t> iota_vector(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

std::vector<ClientPartition> build_partitions(
    const TabularDataset& ds, int n_clients, const std::vector<std::size_t>& shared,
    const std::vector<std::vector<std::size_t>>& unique, const AliasTable& aliases,
    std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(n_clients);
  std::vector<ClientPartition> parts(n);

  // Rows: shuffle each class, then deal both classes round-robin with one
  // shared counter so client sizes differ by at most one.
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) (ds.labels[r] ? pos : neg).push_back(r);
  Rng row_rng(derive_seed(seed, "partition.rows"));
  row_rng.shuffle(std::span(pos));
  row_rng.shuffle(std::span(neg));
  std::size_t k = 0;
  std::vector<std::size_t> n_pos(n, 0);
  std::vector<std::size_t> n_neg(n, 0);
  for (const auto r : pos) {
    parts[k % n].row_indices.push_back(r);
    ++n_pos[k % n];
    ++k;
  }
  for (const auto r : neg) {
    parts[k % n].row_indices.push_back(r);
    ++n_neg[k % n];
    ++k;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (n_pos[i] < 2 || n_neg[i] < 2) {
      throw Error(Errc::insufficient_rows,
                  "client " + std::to_string(i + 1) + " would receive " + std::to_string(n_pos[i]) +
                      " positive and " + std::to_string(n_neg[i]) + " negative rows");
    }
    std::sort(parts[i].row_indices.begin(), parts[i].row_indices.end());
  }

  // Aliases: per feature, a seeded permutation of its alias list; client i
  // takes entry i, so clients only collide when the list is too short.
  auto alias_for = [&](std::size_t col, std::size_t client) {
    const auto& canonical = ds.columns[col].name;
    std::vector<std::string> options = aliases.aliases(canonical);
    if (options.empty()) return canonical;
    Rng alias_rng(derive_seed(seed, "partition.alias." + canonical));
    alias_rng.shuffle(std::span(options));
    return options[client % options.size()];
  };

  for (std::size_t i = 0; i < n; ++i) {
    auto& part = parts[i];
    part.client_id = static_cast<int>(i) + 1;
    std::vector<std::size_t> cols = shared;
    cols.insert(cols.end(), unique[i].begin(), unique[i].end());
    std::sort(cols.begin(), cols.end());
    for (const auto c : cols) {
      ColumnSpec spec = ds.columns[c];
      spec.name = alias_for(c, i);
      part.canonical_of[spec.name] = ds.columns[c].name;
      part.schema.push_back(std::move(spec));
      part.source_columns.push_back(c);
    }
    for (const auto c : shared) part.shared_features.insert(ds.columns[c].name);
    for (const auto c : unique[i]) part.unique_features.insert(ds.columns[c].name);
  }
  return parts;
}

}  // namespace

std::vector<ClientPartition> partition(const TabularDataset& ds, int n_clients,
                                       int shared_count, int unique_count,
                                       const AliasTable& aliases, std::uint64_t seed) {
  if (n_clients < 1) throw Error(Errc::invalid_argument, "n_clients must be at least 1");
  if (shared_count < 0 || unique_count < 0) {
    throw Error(Errc::invalid_argument, "feature counts must be non-negative");
  }
  const int per_client_unique = n_clients == 1 ? 0 : unique_count;
  const auto total = static_cast<long long>(ds.n_features());
  const long long needed = static_cast<long long>(shared_count) + per_client_unique;
  if (needed > total) {
    throw Error(Errc::insufficient_features,
                std::to_string(needed) + " features per client requested, dataset has " +
                    std::to_string(total));
  }
  if (shared_count + per_client_unique == 0) {
    throw Error(Errc::insufficient_features, "clients would receive no features");
  }

  auto order = iota_vector(ds.n_features());
  Rng feat_rng(derive_seed(seed, "partition.features"));
  feat_rng.shuffle(std::span(order));
  const auto s = static_cast<std::size_t>(shared_count);
  const auto u = static_cast<std::size_t>(per_client_unique);
  std::vector<std::size_t> shared(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  const std::vector<std::size_t> pool(order.begin() + static_cast<std::ptrdiff_t>(s), order.end());
  // Clients take consecutive blocks of the shuffled pool, wrapping around
  // when it is too small for disjoint blocks.
  std::vector<std::vector<std::size_t>> unique(static_cast<std::size_t>(n_clients));
  for (std::size_t i = 0; i < unique.size(); ++i) {
    for (std::size_t j = 0; j < u; ++j) unique[i].push_back(pool[(i * u + j) % pool.size()]);
    std::sort(unique[i].begin(), unique[i].end());
  }
  return build_partitions(ds, n_clients, shared, unique, aliases, seed);
}

std::vector<ClientPartition> overlap_partition(const TabularDataset& ds, int n_clients,
                                               double overlap_fraction,
                                               const AliasTable& aliases,
                                               std::uint64_t seed) {
  if (n_clients < 1) throw Error(Errc::invalid_argument, "n_clients must be at least 1");
  if (!(overlap_fraction > 0.0 && overlap_fraction <= 1.0)) {
    throw Error(Errc::invalid_argument, "overlap fraction must lie in (0, 1]");
  }
  const std::size_t total = ds.n_features();
  const auto shared_count = std::min<std::size_t>(
      total, static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(total))));

  auto order = iota_vector(total);
  Rng feat_rng(derive_seed(seed, "partition.features"));
  feat_rng.shuffle(std::span(order));
  std::vector<std::size_t> shared(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(shared_count));
  const auto n = static_cast<std::size_t>(n_clients);
  std::vector<std::vector<std::size_t>> unique(n);
  for (std::size_t j = shared_count; j < total; ++j) {
    unique[(j - shared_count) % n].push_back(order[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (shared.empty() && unique[i].empty()) {
      throw Error(Errc::insufficient_features,
                  "client " + std::to_string(i + 1) + " would receive no features");
    }
  }
  return build_partitions(ds, n_clients, shared, unique, aliases, seed);
}

SplitIndices split(const TabularDataset& ds, const ClientPartition& part,
                   const SplitSpec& spec) {
  if (part.row_indices.empty()) throw Error(Errc::too_few_rows, "partition has no rows");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(Errc::invalid_argument, "train_fraction must lie in (0, 1)");
  }
  Rng rng(derive_seed(spec.seed, "split.client." + std::to_string(part.client_id)));
  SplitIndices out;

  if (!spec.stratified) {
    auto rows = part.row_indices;
    rng.shuffle(std::span(rows));
    const auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(rows.size())));
    out.train.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  } else {
    // Largest-remainder allocation of the rounded train total across the
    // two classes; ties favour the positive class.
    std::vector<std::size_t> by_class[2];
    for (const auto r : part.row_indices) by_class[ds.labels[r] ? 1 : 0].push_back(r);
    rng.shuffle(std::span(by_class[1]));
    rng.shuffle(std::span(by_class[0]));
    const auto n_total = part.row_indices.size();
    const auto target = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(n_total)));
    std::size_t take[2];
    double rem[2];
    for (int c = 0; c < 2; ++c) {
      const double exact = spec.train_fraction * static_cast<double>(by_class[c].size());
      take[c] = static_cast<std::size_t>(std::floor(exact));
      rem[c] = exact - std::floor(exact);
    }
    std::size_t assigned = take[0] + take[1];
    const int first = rem[1] >= rem[0] ? 1 : 0;
    for (const int c : {first, 1 - first}) {
      if (assigned < target && take[c] < by_class[c].size()) {
        ++take[c];
        ++assigned;
      }
    }
    for (const int c : {1, 0}) {
      const auto& rows = by_class[c];
      out.train.insert(out.train.end(), rows.begin(),
                       rows.begin() + static_cast<std::ptrdiff_t>(take[c]));
      out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(take[c]),
                      rows.end());
    }
  }
  if (out.train.empty() || out.test.empty()) {
    throw Error(Errc::too_few_rows, "client " + std::to_string(part.client_id) +
                                        ": split leaves one side empty");
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace fedalign
