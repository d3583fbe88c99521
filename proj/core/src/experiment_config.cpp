#include "fedalign/experiment_config.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "fedalign/error.hpp"
#include "fedalign/hash.hpp"

namespace fedalign {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(Errc::config_error, field + ": " + what);
}

// Reads the members of one JSON object and remembers which keys were used,
// so leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  bool has(const std::string& key) const {
    const auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }

  void read(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) fail(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) fail(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename U>
    requires std::is_unsigned_v<U>
  void read(const std::string& key, U& out) {
    if (const auto* v = find(key)) {
      const auto x = as_u64(*v, field(key));
      if (x > std::numeric_limits<U>::max()) fail(field(key), "out of range");
      out = static_cast<U>(x);
    }
  }

  void read(const std::string& key, int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) fail(field(key), "expected an integer");
      const auto x = v->get<long long>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        fail(field(key), "out of range");
      out = static_cast<int>(x);
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void read(const std::string& key, std::optional<std::string>& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  static std::uint64_t as_u64(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      if (v.get<long long>() < 0) fail(where, "must be non-negative");
      return static_cast<std::uint64_t>(v.get<long long>());
    }
    fail(where, "expected a non-negative integer");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) fail(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json opt_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

}  // namespace

std::filesystem::path ExperimentConfig::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

void ExperimentConfig::validate() const {
  if (dataset_path.has_value() == synthetic.has_value())
    fail("dataset", "set exactly one of path or synthetic");
  if (synthetic) {
    if (synthetic->rows < 4) fail("dataset.synthetic.rows", "must be at least 4");
    if (!(synthetic->positive_rate > 0.0 && synthetic->positive_rate < 1.0))
      fail("dataset.synthetic.positive_rate", "must lie in (0, 1)");
  }
  if (label_column.empty()) fail("dataset.label_column", "must not be empty");
  if (client_count(scenario) < 1) fail("scenario.n_clients", "must be at least 1");
  if (const auto* f = std::get_if<FixedScenario>(&scenario)) {
    if (f->shared < 0) fail("scenario.shared", "must be non-negative");
    if (f->unique < 0) fail("scenario.unique", "must be non-negative");
  } else {
    const double o = std::get<OverlapScenario>(scenario).overlap_fraction;
    if (!(o > 0.0 && o <= 1.0)) fail("scenario.overlap_fraction", "must lie in (0, 1]");
  }
  if (encoder_dim == 0) fail("encoder.dim", "must be positive");
  if (max_tokens == 0) fail("encoder.max_tokens", "must be positive");
  if (encoder_kind == EncoderKind::store && !store_path)
    fail("encoder.store_path", "required when encoder.kind is store");
  if (!(model.lambda >= 0.0)) fail("model.lambda", "must be non-negative");
  if (!(model.dropout_p >= 0.0 && model.dropout_p < 1.0)) fail("model.dropout", "must lie in [0, 1)");
  if (train.epochs < 0) fail("train.epochs", "must be non-negative");
  if (train.batch_size == 0) fail("train.batch_size", "must be positive");
  if (!(train.lr > 0.0)) fail("train.lr", "must be positive");
  if (!(train.beta1 >= 0.0 && train.beta1 < 1.0)) fail("train.beta1", "must lie in [0, 1)");
  if (!(train.beta2 >= 0.0 && train.beta2 < 1.0)) fail("train.beta2", "must lie in [0, 1)");
  if (!(train.eps > 0.0)) fail("train.eps", "must be positive");
  if (train.patience < 1) fail("train.patience", "must be at least 1");
  if (!(train.val_fraction >= 0.0 && train.val_fraction < 1.0))
    fail("train.val_fraction", "must lie in [0, 1)");
  if (fed.rounds < 1) fail("fed.rounds", "must be at least 1");
  if (!(fed.participation_fraction > 0.0 && fed.participation_fraction <= 1.0))
    fail("fed.participation_fraction", "must lie in (0, 1]");
  if (fed.bytes_per_param == 0) fail("fed.bytes_per_param", "must be positive");
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
    fail("split.train_fraction", "must lie in (0, 1)");
  if (stress_overlaps.empty()) fail("stress.overlaps", "must not be empty");
  for (double o : stress_overlaps)
    if (!(o > 0.0 && o <= 1.0)) fail("stress.overlaps", "levels must lie in (0, 1]");
  if (stress_variants.empty()) fail("stress.variants", "must not be empty");
  if (seeds.empty()) fail("seeds", "must list at least one seed");
  if (output_dir.empty()) fail("output_dir", "must not be empty");
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config_error, std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  Fields top(root, "");

  int version = kConfigVersion;
  top.read("version", version);
  if (version != kConfigVersion) fail("version", "unsupported version " + std::to_string(version));

  if (const auto* d = top.find("dataset")) {
    Fields f(*d, "dataset");
    f.read("path", cfg.dataset_path);
    f.read("label_column", cfg.label_column);
    if (const auto* s = f.find("synthetic")) {
      Fields sf(*s, "dataset.synthetic");
      SyntheticSpec spec;
      sf.read("rows", spec.rows);
      sf.read("positive_rate", spec.positive_rate);
      sf.read("seed", spec.seed);
      sf.finish();
      cfg.synthetic = spec;
    }
    f.finish();
  }

  if (const auto* s = top.find("scenario")) {
    Fields f(*s, "scenario");
    const bool fixed = f.has("shared") || f.has("unique");
    const bool overlap = f.has("overlap_fraction");
    if (fixed && overlap) fail("scenario", "set either shared/unique or overlap_fraction, not both");
    if (overlap) {
      OverlapScenario o;
      f.read("n_clients", o.n_clients);
      f.read("overlap_fraction", o.overlap_fraction);
      cfg.scenario = o;
    } else {
      FixedScenario x;
      f.read("n_clients", x.n_clients);
      f.read("shared", x.shared);
      f.read("unique", x.unique);
      cfg.scenario = x;
    }
    f.find("shared");
    f.find("unique");
    f.find("overlap_fraction");
    f.finish();
  }

  top.read("aliases", cfg.aliases_path);
  top.read("templates", cfg.templates_path);

  if (const auto* s = top.find("serialization")) {
    Fields f(*s, "serialization");
    std::string name(to_string(cfg.format));
    f.read("format", name);
    const auto fmt = parse_format(name);
    if (!fmt) fail("serialization.format", "unknown format '" + name + "'");
    cfg.format = *fmt;
    f.finish();
  }

  std::optional<std::size_t> explicit_input_dim;
  if (const auto* e = top.find("encoder")) {
    Fields f(*e, "encoder");
    std::string kind(to_string(cfg.encoder_kind));
    f.read("kind", kind);
    const auto k = parse_encoder_kind(kind);
    if (!k) fail("encoder.kind", "unknown encoder '" + kind + "'");
    cfg.encoder_kind = *k;
    f.read("dim", cfg.encoder_dim);
    f.read("canonicalize", cfg.canonicalize);
    f.read("max_tokens", cfg.max_tokens);
    f.read("hash_seed", cfg.hash_seed);
    f.read("store_path", cfg.store_path);
    f.read("normalize_store", cfg.normalize_store);
    f.finish();
  }

  if (const auto* m = top.find("model")) {
    Fields f(*m, "model");
    std::string kind(to_string(cfg.model.kind));
    f.read("kind", kind);
    const auto k = parse_model_kind(kind);
    if (!k) fail("model.kind", "unknown model '" + kind + "'");
    cfg.model.kind = *k;
    if (f.has("input_dim")) {
      std::size_t d = 0;
      f.read("input_dim", d);
      explicit_input_dim = d;
    } else {
      f.find("input_dim");
    }
    f.read("lambda", cfg.model.lambda);
    f.read("dropout", cfg.model.dropout_p);
    f.finish();
  }
  cfg.model.input_dim = cfg.encoder_dim;
  if (explicit_input_dim && cfg.encoder_kind != EncoderKind::raw &&
      *explicit_input_dim != cfg.encoder_dim) {
    fail("model.input_dim", std::to_string(*explicit_input_dim) + " differs from encoder.dim " +
                                std::to_string(cfg.encoder_dim));
  }

  if (const auto* t = top.find("train")) {
    Fields f(*t, "train");
    f.read("epochs", cfg.train.epochs);
    f.read("batch_size", cfg.train.batch_size);
    f.read("lr", cfg.train.lr);
    f.read("beta1", cfg.train.beta1);
    f.read("beta2", cfg.train.beta2);
    f.read("eps", cfg.train.eps);
    f.read("patience", cfg.train.patience);
    f.read("val_fraction", cfg.train.val_fraction);
    f.finish();
  }

  if (const auto* t = top.find("fed")) {
    Fields f(*t, "fed");
    f.read("rounds", cfg.fed.rounds);
    f.read("participation_fraction", cfg.fed.participation_fraction);
    f.read("bytes_per_param", cfg.fed.bytes_per_param);
    f.read("overhead_bytes", cfg.fed.per_round_overhead_bytes);
    f.read("sample_weighted", cfg.fed.sample_weighted);
    f.read("parallel_clients", cfg.fed.parallel_clients);
    f.finish();
  }

  if (const auto* t = top.find("split")) {
    Fields f(*t, "split");
    f.read("train_fraction", cfg.split.train_fraction);
    f.read("stratified", cfg.split.stratified);
    f.finish();
  }

  if (const auto* t = top.find("stress")) {
    Fields f(*t, "stress");
    if (const auto* o = f.find("overlaps")) {
      if (!o->is_array()) fail("stress.overlaps", "expected an array of numbers");
      cfg.stress_overlaps.clear();
      for (const auto& x : *o) {
        if (!x.is_number()) fail("stress.overlaps", "expected an array of numbers");
        cfg.stress_overlaps.push_back(x.get<double>());
      }
    }
    if (const auto* v = f.find("variants")) {
      if (!v->is_array()) fail("stress.variants", "expected an array of names");
      cfg.stress_variants.clear();
      for (const auto& x : *v) {
        if (!x.is_string()) fail("stress.variants", "expected an array of names");
        const auto name = x.get<std::string>();
        const auto parsed = parse_stress_variant(name);
        if (!parsed) fail("stress.variants", "unknown variant '" + name + "'");
        cfg.stress_variants.push_back(*parsed);
      }
    }
    f.finish();
  }

  top.read("seed", cfg.seed);
  if (const auto* s = top.find("seeds")) {
    if (!s->is_array()) fail("seeds", "expected an array of integers");
    cfg.seeds.clear();
    for (const auto& x : *s) cfg.seeds.push_back(Fields::as_u64(x, "seeds"));
  }
  top.read("output_dir", cfg.output_dir);
  top.finish();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config_error, "cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  return parse_config(ss.str(), dir);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["version"] = kConfigVersion;
  json ds;
  ds["path"] = opt_string(cfg.dataset_path);
  ds["label_column"] = cfg.label_column;
  if (cfg.synthetic) {
    ds["synthetic"] = {{"rows", cfg.synthetic->rows},
                       {"positive_rate", cfg.synthetic->positive_rate},
                       {"seed", cfg.synthetic->seed}};
  } else {
    ds["synthetic"] = nullptr;
  }
  j["dataset"] = ds;
  if (const auto* f = std::get_if<FixedScenario>(&cfg.scenario)) {
    j["scenario"] = {{"n_clients", f->n_clients}, {"shared", f->shared}, {"unique", f->unique}};
  } else {
    const auto& o = std::get<OverlapScenario>(cfg.scenario);
    j["scenario"] = {{"n_clients", o.n_clients}, {"overlap_fraction", o.overlap_fraction}};
  }
  j["aliases"] = opt_string(cfg.aliases_path);
  j["templates"] = opt_string(cfg.templates_path);
  j["serialization"] = {{"format", std::string(to_string(cfg.format))}};
  j["encoder"] = {{"kind", std::string(to_string(cfg.encoder_kind))},
                  {"dim", cfg.encoder_dim},
                  {"canonicalize", cfg.canonicalize},
                  {"max_tokens", cfg.max_tokens},
                  {"hash_seed", cfg.hash_seed},
                  {"store_path", opt_string(cfg.store_path)},
                  {"normalize_store", cfg.normalize_store}};
  j["model"] = {{"kind", std::string(to_string(cfg.model.kind))},
                {"input_dim", cfg.model.input_dim},
                {"lambda", cfg.model.lambda},
                {"dropout", cfg.model.dropout_p}};
  j["train"] = {{"epochs", cfg.train.epochs},       {"batch_size", cfg.train.batch_size},
                {"lr", cfg.train.lr},               {"beta1", cfg.train.beta1},
                {"beta2", cfg.train.beta2},         {"eps", cfg.train.eps},
                {"patience", cfg.train.patience},   {"val_fraction", cfg.train.val_fraction}};
  j["fed"] = {{"rounds", cfg.fed.rounds},
              {"participation_fraction", cfg.fed.participation_fraction},
              {"bytes_per_param", cfg.fed.bytes_per_param},
              {"overhead_bytes", cfg.fed.per_round_overhead_bytes},
              {"sample_weighted", cfg.fed.sample_weighted},
              {"parallel_clients", cfg.fed.parallel_clients}};
  j["split"] = {{"train_fraction", cfg.split.train_fraction}, {"stratified", cfg.split.stratified}};
  json variants = json::array();
  for (const auto v : cfg.stress_variants) variants.push_back(std::string(to_string(v)));
  j["stress"] = {{"overlaps", cfg.stress_overlaps}, {"variants", variants}};
  j["seed"] = cfg.seed;
  j["seeds"] = cfg.seeds;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(xxh64(config_to_json(cfg), 0)));
  return buf;
}

}  // namespace fedalign
