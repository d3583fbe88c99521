#include "fedalign/fed_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fedalign/error.hpp"
#include "fedalign/hash.hpp"
#include "fedalign/rng.hpp"
#include "fedalign/serialization.hpp"
#include "fedalign/train.hpp"

namespace fedalign {

void FedConfig::validate() const {
  if (rounds < 1) throw Error(Errc::config_error, "rounds must be at least 1");
  if (!(participation_fraction > 0.0 && participation_fraction <= 1.0))
    throw Error(Errc::config_error, "participation_fraction must lie in (0, 1]");
  if (bytes_per_param == 0) throw Error(Errc::config_error, "bytes_per_param must be positive");
  train.validate();
}

bool same_telemetry(const RoundLog& a, const RoundLog& b) noexcept {
  return a.round == b.round && a.participant_ids == b.participant_ids &&
         a.global_train_loss_mean == b.global_train_loss_mean && a.global_f1 == b.global_f1 &&
         a.bytes_up == b.bytes_up && a.bytes_down == b.bytes_down;
}

std::vector<int> sample_clients(int n_clients, double fraction, int round, std::uint64_t seed) {
  if (n_clients < 1) throw Error(Errc::invalid_argument, "need at least one client");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw Error(Errc::invalid_argument, "participation fraction must lie in (0, 1]");
  const auto k = std::clamp<long long>(std::llround(fraction * n_clients), 1, n_clients);

  std::vector<int> ids(static_cast<std::size_t>(n_clients));
  std::iota(ids.begin(), ids.end(), 1);
  if (k < n_clients) {
    Rng rng(derive_seed(seed, "sample.round." + std::to_string(round)));
    rng.shuffle(std::span(ids));
    ids.resize(static_cast<std::size_t>(k));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

double neumaier_sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  double comp = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - s) + t;
    else
      comp += (t - s) + sum;
    sum = s;
  }
  return sum + comp;
}

}  // namespace

WeightVector aggregate(const WeightVector& global, std::span<const WeightVector> deltas,
                       std::span<const double> weights) {
  global.check();
  if (deltas.empty()) throw Error(Errc::empty_delta_set, "no client deltas to aggregate");
  for (const auto& d : deltas) {
    if (d.shape != global.shape || d.values.size() != global.values.size())
      throw Error(Errc::shape_mismatch, "delta shape differs from the global weights");
  }

  std::vector<double> share;
  if (!weights.empty()) {
    if (weights.size() != deltas.size())
      throw Error(Errc::length_mismatch, "one weight per delta is required");
    std::vector<double> w(weights.begin(), weights.end());
    for (double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x))
        throw Error(Errc::invalid_argument, "aggregation weights must be finite and non-negative");
    }
    const double total = neumaier_sorted_sum(w);
    if (!(total > 0.0)) throw Error(Errc::invalid_argument, "aggregation weights sum to zero");
    share.reserve(weights.size());
    for (double x : weights) share.push_back(x / total);
  }

  WeightVector next = global;
  std::vector<double> terms(deltas.size());
  const auto k = static_cast<double>(deltas.size());
  for (std::size_t j = 0; j < next.values.size(); ++j) {
    for (std::size_t i = 0; i < deltas.size(); ++i)
      terms[i] = share.empty() ? deltas[i].values[j] : share[i] * deltas[i].values[j];
    const double s = neumaier_sorted_sum(terms);
    next.values[j] += share.empty() ? s / k : s;
  }
  return next;
}

CommCost comm_cost(const ModelShape& shape, const FedConfig& cfg) {
  CommCost c;
  c.params = shape.param_count();
  c.payload_bytes = static_cast<std::uint64_t>(c.params) * cfg.bytes_per_param;
  c.bytes_per_client_per_round = c.payload_bytes + cfg.per_round_overhead_bytes;
  return c;
}

std::uint64_t embedding_digest(std::span<const ClientData> clients) {
  std::uint64_t h = 0;
  auto mix = [&h](const LabeledSet& s) {
    h = xxh64(std::as_bytes(std::span(s.x)), h);
    h = xxh64(std::as_bytes(std::span(s.y)), h);
  };
  for (const auto& c : clients) {
    mix(c.train);
    mix(c.test);
  }
  return h;
}

namespace {

WeightVector delta_of(const Model& local, const WeightVector& global) {
  WeightVector d = flatten(local);
  for (std::size_t j = 0; j < d.values.size(); ++j) d.values[j] -= global.values[j];
  return d;
}

}  // namespace

FedRun run_federated(const FedConfig& cfg, std::span<const ClientData> clients,
                     const Model& initial) {
  cfg.validate();
  if (clients.empty()) throw Error(Errc::invalid_argument, "no clients");
  const ModelShape shape = shape_of(initial);
  for (const auto& c : clients) {
    if (c.train.dim != shape.input_dim || c.test.dim != shape.input_dim)
      throw Error(Errc::config_mismatch,
                  "client " + std::to_string(c.client_id) + " embeddings have dimension " +
                      std::to_string(c.train.dim) + " but the model expects " +
                      std::to_string(shape.input_dim));
  }
  std::vector<int> ids;
  for (const auto& c : clients) ids.push_back(c.client_id);
  {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(Errc::invalid_argument, "client ids must be distinct");
  }

  FedRun run;
  run.config = cfg;
  run.shape = shape;
  run.initial_weights = flatten(initial);
  run.embedding_digest_before = embedding_digest(clients);

  LabeledSet pooled_test(shape.input_dim);
  for (const auto& c : clients) {
    pooled_test.x.insert(pooled_test.x.end(), c.test.x.begin(), c.test.x.end());
    pooled_test.y.insert(pooled_test.y.end(), c.test.y.begin(), c.test.y.end());
  }

  const CommCost cost = comm_cost(shape, cfg);
  Model global = initial;
  WeightVector global_w = run.initial_weights;
  const auto n = static_cast<int>(clients.size());

  for (int t = 1; t <= cfg.rounds; ++t) {
    const auto start = std::chrono::steady_clock::now();
    // Sampled positions index into `clients`, which is ordered by the caller.
    const auto picked = sample_clients(n, cfg.participation_fraction, t, cfg.seed);

    std::vector<WeightVector> deltas(picked.size());
    std::vector<std::exception_ptr> errors(picked.size());
    auto train_one = [&](std::size_t slot) {
      try {
        const ClientData& c = clients[static_cast<std::size_t>(picked[slot] - 1)];
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.seed, "train.round." + std::to_string(t) + ".client." +
                                            std::to_string(c.client_id));
        const TrainResult local = train_local(global, c.train, tc);
        deltas[slot] = delta_of(local.model, global_w);
      } catch (...) {
        errors[slot] = std::current_exception();
      }
    };
    if (cfg.parallel_clients && picked.size() > 1) {
      std::vector<std::thread> pool;
      pool.reserve(picked.size());
      for (std::size_t s = 0; s < picked.size(); ++s) pool.emplace_back(train_one, s);
      for (auto& th : pool) th.join();
    } else {
      for (std::size_t s = 0; s < picked.size(); ++s) train_one(s);
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    std::vector<double> sizes;
    if (cfg.sample_weighted) {
      for (int p : picked)
        sizes.push_back(static_cast<double>(clients[static_cast<std::size_t>(p - 1)].train.size()));
    }
    global_w = aggregate(global_w, deltas, sizes);
    assign_params(global, global_w);

    RoundLog log;
    log.round = t;
    for (int p : picked) log.participant_ids.push_back(clients[static_cast<std::size_t>(p - 1)].client_id);
    double loss_sum = 0.0;
    std::size_t loss_n = 0;
    for (const auto& c : clients) {
      if (c.train.empty()) continue;
      loss_sum += mean_bce(global, c.train);
      ++loss_n;
    }
    log.global_train_loss_mean = loss_n ? loss_sum / static_cast<double>(loss_n) : 0.0;
    log.global_f1 = f1(evaluate(global, pooled_test));
    log.bytes_up = cost.bytes_per_client_per_round * picked.size();
    log.bytes_down = cost.bytes_per_client_per_round * picked.size();
    log.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start);
    run.rounds.push_back(std::move(log));
  }

  run.final_weights = global_w;
  for (const auto& c : clients) {
    ClientMetric m;
    m.client_id = c.client_id;
    m.confusion = evaluate(global, c.test);
    m.f1 = f1(m.confusion);
    run.global_confusion += m.confusion;
    run.per_client.push_back(m);
  }
  run.final_f1 = f1(run.global_confusion);
  run.embedding_digest_after = embedding_digest(clients);
  return run;
}

std::string rounds_csv(const FedRun& run) {
  std::ostringstream os;
  os << "round,f1,loss,bytes_up,bytes_down\n";
  for (const auto& r : run.rounds) {
    os << r.round << ',' << format_number(r.global_f1) << ','
       << format_number(r.global_train_loss_mean) << ',' << r.bytes_up << ',' << r.bytes_down
       << '\n';
  }
  return os.str();
}

std::string rounds_jsonl(const FedRun& run, std::uint64_t seed_tag) {
  std::string out;
  for (const auto& r : run.rounds) {
    nlohmann::json j;
    j["seed"] = seed_tag;
    j["round"] = r.round;
    j["participants"] = r.participant_ids;
    j["global_f1"] = r.global_f1;
    j["global_train_loss_mean"] = r.global_train_loss_mean;
    j["bytes_up"] = r.bytes_up;
    j["bytes_down"] = r.bytes_down;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace fedalign
