// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fedalign/commands.hpp"
#include "fedalign/embedding_store.hpp"
#include "fedalign/encoders.hpp"
#include "fedalign/error.hpp"
#include "fedalign/experiment_config.hpp"
#include "fedalign/fed_protocol.hpp"
#include "fedalign/hash_encoder.hpp"
#include "fedalign/models.hpp"
#include "fedalign/partition.hpp"
#include "fedalign/pipeline.hpp"
#include "fedalign/rng.hpp"
#include "fedalign/serialization.hpp"
#include "fedalign/stats.hpp"
#include "fedalign/synthetic.hpp"

using namespace fedalign;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path configs_dir() { return FEDALIGN_CONFIGS_DIR; }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fedalign_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- gradients

Outcome gradient_oracle() {
  Rng rng(20240601);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t d = 1 + rng.below(16);
    const std::size_t n = 1 + rng.below(12);
    LabeledSet s(d);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : x) v = rng.normal();
      s.add(x, rng.bernoulli(0.5) ? 1 : 0);
    }
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);

    const bool mlp = c % 2 == 1;
    Model m = mlp ? Model(MlpModel(d, 0.25)) : Model(LrModel(d, 0.05));
    for (auto& p : params_of(m)) p = rng.normal(0, 0.5);
    DropoutMask mask;
    const DropoutMask* mp = nullptr;
    if (mlp && c % 4 == 3) {
      mask = sample_dropout_mask(rng, n, 0.25);
      mp = &mask;
    }
    const auto analytic = loss_and_grad(m, s, rows, mp).grad.values;
    const double h = 1e-6;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      Model up = m, dn = m;
      params_of(up)[k] += h;
      params_of(dn)[k] -= h;
      const double fd =
          (loss_and_grad(up, s, rows, mp).loss - loss_and_grad(dn, s, rows, mp).loss) / (2 * h);
      const double denom = std::max({std::fabs(fd), std::fabs(analytic[k]), 1e-6});
      worst = std::max(worst, std::fabs(fd - analytic[k]) / denom);
    }
  }
  return {worst < 1e-4, fmt("max relative error %.3g over 50 cases (limit 1e-4)", worst)};
}

// -------------------------------------------------------------- aggregation

WeightVector random_weights(std::size_t n, Rng& rng, double scale) {
  WeightVector w{ModelShape{ModelKind::lr, n - 1}, std::vector<double>(n)};
  for (auto& v : w.values) v = rng.normal(0, scale);
  return w;
}

Outcome aggregation_identities() {
  Rng rng(7);
  const std::size_t n = 513;
  const auto g = random_weights(n, rng, 1.0);

  const std::vector<WeightVector> zeros(5, WeightVector{g.shape, std::vector<double>(n, 0.0)});
  const bool fixed_point = aggregate(g, zeros) == g;

  std::vector<WeightVector> a, b, ab;
  for (int i = 0; i < 6; ++i) {
    a.push_back(random_weights(n, rng, 0.1));
    b.push_back(random_weights(n, rng, 0.1));
    auto s = a.back();
    for (std::size_t j = 0; j < n; ++j) s.values[j] += b.back().values[j];
    ab.push_back(std::move(s));
  }
  const WeightVector zero{g.shape, std::vector<double>(n, 0.0)};
  const auto ra = aggregate(zero, a), rb = aggregate(zero, b), rab = aggregate(g, ab);
  double lin = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    lin = std::max(lin, std::fabs(rab.values[j] - (g.values[j] + ra.values[j] + rb.values[j])));

  std::vector<WeightVector> mixed;
  for (int i = 0; i < 10; ++i) mixed.push_back(random_weights(n, rng, std::pow(10.0, i - 5)));
  const auto ref = aggregate(g, mixed);
  bool perm = true;
  for (int t = 0; t < 50; ++t) {
    rng.shuffle(std::span(mixed));
    const auto r = aggregate(g, mixed);
    perm = perm && std::memcmp(r.values.data(), ref.values.data(), n * sizeof(double)) == 0;
  }
  return {fixed_point && lin <= 1e-12 && perm,
          fmt("zero-delta fixed point %s, linearity error %.3g (limit 1e-12), permutation %s",
              fixed_point ? "exact" : "BROKEN", lin, perm ? "bitwise" : "DIFFERS")};
}

// ------------------------------------------------------------------- FEDEMB

Outcome fedemb_round_trip() {
  const auto dir = scratch("fedemb");
  Rng rng(99);
  const std::pair<std::uint32_t, std::size_t> cases[] = {
      {4, 10000}, {4, 1}, {7, 333}, {64, 10000}, {300, 2500}, {768, 10000}, {768, 17}};
  std::size_t ok = 0;
  for (const auto& [dim, count] : cases) {
    EmbeddingStore s(dim, "enc-" + std::to_string(rng.next_u64()));
    std::vector<float> v(dim);
    for (std::size_t i = 0; i < count; ++i) {
      for (auto& x : v) {
        std::uint32_t bits = static_cast<std::uint32_t>(rng.next_u64());
        std::memcpy(&x, &bits, sizeof x);  // any bit pattern, NaNs included
      }
      s.add("rec" + std::to_string(i) + "_" + std::to_string(rng.below(1000)), v);
    }
    write_store(dir / "s.fedemb", s);
    const auto back = read_store(dir / "s.fedemb");
    if (back == s && fs::file_size(dir / "s.fedemb") == s.file_size()) ++ok;
  }
  fs::remove_all(dir);
  const std::size_t n = std::size(cases);
  return {ok == n, fmt("%zu/%zu randomized stores bit-exact (dims 4..768, up to 10000 records)", ok, n)};
}

// ---------------------------------------------------------------- alignment

Outcome alignment_invariant() {
  const auto ds = generate_synthetic({500, 0.15, 2718});
  const auto aliases = AliasTable::framingham_defaults();
  // Two clients holding every feature under different aliases.
  auto parts = partition(ds, 2, static_cast<int>(ds.n_features()), 0, aliases, 31);
  for (std::size_t i = 0; i < parts[0].schema.size(); ++i) {
    if (parts[0].schema[i].name == parts[1].schema[i].name)
      return {false, "alias assignments are not disjoint"};
  }
  EncoderConfig canon;
  canon.alias_table = aliases;
  EncoderConfig plain = canon;
  plain.canonicalize = false;
  const HashEncoder ec(canon), ep(plain);
  std::size_t equal = 0, differ = 0;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const auto ta = serialize_structured(make_record(ds, r, parts[0]));
    const auto tb = serialize_structured(make_record(ds, r, parts[1]));
    if (ec.encode(ta).values == ec.encode(tb).values) ++equal;
    if (ep.encode(ta).values != ep.encode(tb).values) ++differ;
  }
  return {equal == 500 && differ >= 475,
          fmt("canonical equal %zu/500 (need 500), plain differ %zu/500 (need >= 475)", equal, differ)};
}

// ------------------------------------------------- heterogeneity + convergence

struct SyntheticRuns {
  MultiSeedResult aligned_hi, aligned_lo, raw_lo;
  bool ready = false;
};

SyntheticRuns& synthetic_runs() {
  static SyntheticRuns runs;
  if (runs.ready) return runs;
  const auto cfg = load_config(configs_dir() / "stress_synthetic.json");
  const auto base = pipeline_spec(cfg);
  std::vector<std::uint64_t> seeds;
  for (const auto label : cfg.seeds) seeds.push_back(run_seed_for(cfg.seed, label));
  auto at = [&](double overlap, EncoderKind kind) {
    PipelineSpec s = base;
    s.scenario = OverlapScenario{client_count(base.scenario), overlap};
    s.encoder.kind = kind;
    s.encoder.canonicalize = true;
    return multi_seed(s, prepare(s), seeds);
  };
  runs.aligned_hi = at(0.8, EncoderKind::hash);
  runs.aligned_lo = at(0.2, EncoderKind::hash);
  runs.raw_lo = at(0.2, EncoderKind::raw);
  runs.ready = true;
  return runs;
}

Outcome heterogeneity() {
  const auto& r = synthetic_runs();
  const double al = r.aligned_lo.summary.mean, ah = r.aligned_hi.summary.mean;
  const double raw = r.raw_lo.summary.mean;
  const std::size_t n = r.aligned_lo.summary.f1s.size();
  const bool gap = al - raw >= 0.15, ratio = al >= 0.85 * ah;
  return {gap && ratio && n == 5,
          fmt("%zu seeds; aligned@0.2=%.4f raw@0.2=%.4f gap=%.4f (need >= 0.15); "
              "aligned@0.8=%.4f ratio=%.4f (need >= 0.85)",
              n, al, raw, al - raw, ah, al / ah)};
}

Outcome convergence() {
  const auto& runs = synthetic_runs().aligned_hi.runs;
  double worst = 0.0;
  bool shape_ok = runs.size() == 5;
  for (const auto& run : runs) {
    if (run.rounds.size() < 25) {
      shape_ok = false;
      continue;
    }
    worst = std::max(worst, std::fabs(run.rounds[14].global_f1 - run.rounds[24].global_f1));
  }
  return {shape_ok && worst <= 0.02,
          fmt("%zu seeds at overlap 0.8 (same runs as heterogeneity); max |F1(r15) - F1(r25)| = %.4f (limit 0.02)", runs.size(), worst)};
}

// ------------------------------------------------------------ communication

Outcome communication() {
  const FedConfig defaults;
  const auto mlp = comm_cost({ModelKind::mlp, 768}, defaults);
  const auto lr = comm_cost({ModelKind::lr, 768}, defaults);

  PipelineSpec s;
  s.dataset = std::make_shared<const TabularDataset>(generate_synthetic({600, 0.15, 5}));
  s.encoder.dim = 768;
  s.model = {ModelKind::mlp, 768, 0.01, 0.2};
  s.fed.rounds = 25;
  s.fed.participation_fraction = 1.0;
  s.fed.train.epochs = 1;
  s.data_seed = 3;
  const auto prep = prepare(s);
  const auto run = fedalign::run(s, prep, 11);
  const auto per = comm_cost(run.shape, s.fed).bytes_per_client_per_round;
  std::uint64_t up = 0, down = 0, participations = 0;
  bool full = run.rounds.size() == 25;
  for (const auto& r : run.rounds) {
    full = full && r.participant_ids == std::vector<int>{1, 2, 3};
    up += r.bytes_up;
    down += r.bytes_down;
    participations += r.participant_ids.size();
  }
  const std::uint64_t expect = 25ULL * 3 * (12321ULL * 4 + 800);
  const bool ok = mlp.params == 12321 && lr.params == 769 && full && up == expect &&
                  down == expect && up == per * participations;
  return {ok, fmt("MLP %zu params / %llu bytes, LR %zu params / %llu bytes; 25 rounds x 3 clients: "
                  "up %llu down %llu (expected %llu each)",
                  mlp.params, static_cast<unsigned long long>(mlp.payload_bytes), lr.params,
                  static_cast<unsigned long long>(lr.payload_bytes),
                  static_cast<unsigned long long>(up), static_cast<unsigned long long>(down),
                  static_cast<unsigned long long>(expect))};
}

// -------------------------------------------------------------- statistics

Outcome statistics() {
  // scipy.stats.ttest_rel and scipy.special.betainc reference values.
  const std::vector<double> d{1, 2, 3, 4, 5}, zero(5, 0.0);
  const auto t = paired_t_test(d, zero);
  const bool tp = std::fabs(t.t - 4.2426) <= 1e-3 && std::fabs(t.p - 0.0132) <= 5e-4;
  struct B { double a, b, x, want; };
  const B cases[] = {
      {0.5, 0.5, 0.3, 0.36901011956554536},  {2.0, 3.0, 0.4, 0.5247999999999999},
      {5.0, 0.5, 0.9, 0.3166429150200122},   {10.0, 10.0, 0.5, 0.5},
      {1.5, 2.5, 0.01, 0.0033648023419160004}, {2.0, 0.5, 0.999, 0.9525816464857751},
      {50.0, 40.0, 0.55, 0.4547952108638683}, {0.1, 10.0, 0.05, 0.9402167355790857},
      {2.0, 0.5, 0.64, 0.208},               {30.0, 0.5, 0.98, 0.27289826523467664},
  };
  double worst = 0.0;
  for (const auto& c : cases) worst = std::max(worst, std::fabs(incomplete_beta(c.a, c.b, c.x) - c.want));
  return {tp && worst <= 1e-8,
          fmt("t=%.6f p=%.6f (want 4.2426+-1e-3, 0.0132+-5e-4); incomplete beta max error %.3g (limit 1e-8)",
              t.t, t.p, worst)};
}

// ------------------------------------------------------------- determinism

Outcome determinism() {
  std::map<std::string, std::string> first;
  std::size_t compared = 0, mismatched = 0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto out = scratch("determinism_" + std::to_string(attempt));
    CommandContext ctx{load_config(configs_dir() / "synthetic_3clients.json"), true, nullptr};
    apply_overrides(ctx.config, Overrides{std::nullopt, out.string(), std::nullopt, std::nullopt});
    cmd_prepare(ctx);
    cmd_serialize(ctx);
    cmd_embed(ctx);
    const auto result = cmd_train(ctx);
    for (const auto& rel : result.artifacts) {
      const auto body = slurp(out / rel);
      if (attempt == 0) {
        first[rel] = body;
      } else {
        ++compared;
        const auto it = first.find(rel);
        if (it == first.end() || it->second != body) ++mismatched;
      }
    }
    fs::remove_all(out);
  }
  return {compared > 0 && compared == first.size() && mismatched == 0,
          fmt("%zu train artifacts compared across two runs, %zu differ", compared, mismatched)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"gradient-oracle", 10, gradient_oracle},
      {"aggregation-identities", 1, aggregation_identities},
      {"fedemb-round-trip", 30, fedemb_round_trip},
      {"alignment-invariant", 10, alignment_invariant},
      {"heterogeneity", 300, heterogeneity},
      {"convergence", 300, convergence},
      {"communication", 60, communication},
      {"statistics", 1, statistics},
      {"determinism", 600, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failures;
    std::printf("%s %s: %s [%.2fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs, c.budget_s, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
