#include "fedalign/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fedalign/corpus.hpp"
#include "fedalign/dataset.hpp"
#include "fedalign/embedding_store.hpp"
#include "fedalign/error.hpp"
#include "fedalign/hash.hpp"
#include "fedalign/pipeline.hpp"
#include "fedalign/reports.hpp"
#include "fedalign/synthetic.hpp"

#ifndef FEDALIGN_VERSION_STRING
#define FEDALIGN_VERSION_STRING "0.0.0"
#endif

namespace fedalign {

using nlohmann::json;
namespace fs = std::filesystem;

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.output_dir) cfg.output_dir = fs::absolute(*o.output_dir).string();
  if (o.format) cfg.format = *o.format;
  if (o.encoder) {
    cfg.encoder_kind = *o.encoder;
    if (cfg.encoder_kind == EncoderKind::store && !cfg.store_path)
      throw Error(Errc::config_error, "encoder.store_path: required when encoder.kind is store");
  }
}

std::uint64_t run_seed_for(std::uint64_t master, std::uint64_t label) {
  return derive_seed(master, "run." + std::to_string(label));
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects output files and writes the manifest at the end of a command.
class Session {
 public:
  Session(const CommandContext& ctx, std::string command)
      : ctx_(ctx), command_(std::move(command)), out_(ctx.config.output_path()), started_(utc_now()) {
    fs::create_directories(out_);
  }

  const fs::path& out() const { return out_; }

  void info(const std::string& msg) const {
    if (ctx_.log && !ctx_.quiet) *ctx_.log << msg << '\n';
  }

  void warn(const std::string& msg) {
    result_.warnings.push_back(msg);
    if (ctx_.log) *ctx_.log << "warning: " << msg << '\n';
  }

  void write(const std::string& rel, const std::string& content) {
    const fs::path p = out_ / rel;
    fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw Error(Errc::io_error, "cannot write '" + p.string() + "'");
      os << content;
      if (!os) throw Error(Errc::io_error, "short write to '" + p.string() + "'");
    }
    fs::rename(tmp, p);
    record(rel);
  }

  void record(const std::string& rel) { result_.artifacts.push_back(rel); }

  CommandResult finish() {
    json arts = json::array();
    for (const auto& rel : result_.artifacts) {
      const auto bytes = read_file(out_ / rel);
      char digest[17];
      std::snprintf(digest, sizeof digest, "%016llx",
                    static_cast<unsigned long long>(xxh64(bytes, 0)));
      arts.push_back({{"path", rel}, {"bytes", bytes.size()}, {"xxh64", digest}});
    }
    json m;
    m["tool"] = "fedalign";
    m["version"] = FEDALIGN_VERSION_STRING;
    m["command"] = command_;
    m["config_hash"] = config_hash(ctx_.config);
    m["started_at"] = started_;
    m["finished_at"] = utc_now();
    m["artifacts"] = arts;
    m["warnings"] = result_.warnings;
    result_.manifest = out_ / ("manifest_" + command_ + ".json");
    std::ofstream os(result_.manifest, std::ios::binary | std::ios::trunc);
    os << m.dump(2) << '\n';
    if (!os) throw Error(Errc::io_error, "cannot write '" + result_.manifest.string() + "'");
    return result_;
  }

 private:
  const CommandContext& ctx_;
  std::string command_;
  fs::path out_;
  std::string started_;
  CommandResult result_;
};

std::shared_ptr<const TabularDataset> load_dataset(const ExperimentConfig& cfg) {
  if (cfg.synthetic) return std::make_shared<TabularDataset>(impute(generate_synthetic(*cfg.synthetic)));
  const auto path = cfg.resolve(*cfg.dataset_path);
  try {
    return std::make_shared<TabularDataset>(impute(load_csv(path, cfg.label_column)));
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_argument)
      throw Error(Errc::config_error, std::string("dataset.label_column: ") + e.what());
    throw;
  }
}

EncoderConfig encoder_config(const ExperimentConfig& cfg, const AliasTable& aliases) {
  EncoderConfig e;
  e.kind = cfg.encoder_kind;
  e.dim = cfg.encoder_dim;
  e.canonicalize = cfg.canonicalize;
  e.alias_table = aliases;
  if (cfg.store_path) e.store_path = cfg.resolve(*cfg.store_path);
  e.max_tokens = cfg.max_tokens;
  e.hash_seed = cfg.hash_seed;
  e.normalize_store = cfg.normalize_store;
  return e;
}

}  // namespace

PipelineSpec pipeline_spec(const ExperimentConfig& cfg) {
  PipelineSpec s;
  s.dataset = load_dataset(cfg);
  s.scenario = cfg.scenario;
  s.aliases = cfg.aliases_path ? load_alias_table(cfg.resolve(*cfg.aliases_path))
                               : AliasTable::framingham_defaults();
  s.templates = cfg.templates_path ? load_template_table(cfg.resolve(*cfg.templates_path))
                                   : NaturalTemplateTable::framingham_defaults();
  s.format = cfg.format;
  s.encoder = encoder_config(cfg, s.aliases);
  s.model = cfg.model;
  s.split = cfg.split;
  s.fed = cfg.fed;
  s.fed.train = cfg.train;
  s.data_seed = cfg.seed;
  return s;
}

namespace {

std::string client_file(const std::string& dir, int id) {
  return dir + "/client_" + std::to_string(id) + ".json";
}

struct PreparedFiles {
  std::vector<ClientPartition> partitions;
  std::vector<SplitIndices> splits;
};

PreparedFiles read_prepared(const ExperimentConfig& cfg) {
  const fs::path out = cfg.output_path();
  PreparedFiles pf;
  const int n = client_count(cfg.scenario);
  for (int id = 1; id <= n; ++id) {
    const auto ppath = out / client_file("partitions", id);
    const auto spath = out / client_file("splits", id);
    if (!fs::exists(ppath) || !fs::exists(spath))
      throw Error(Errc::missing_file,
                  "prepare outputs for client " + std::to_string(id) + " not found in '" +
                      out.string() + "'; run the prepare command first");
    pf.partitions.push_back(partition_from_json(read_file(ppath)));
    pf.splits.push_back(split_from_json(read_file(spath)));
  }
  return pf;
}

std::string corpus_meta_json(const std::vector<TextSequence>& corpus, SerializationFormat fmt,
                             const std::vector<ClientPartition>& parts) {
  std::map<int, std::size_t> per_client;
  for (const auto& p : parts) per_client[p.client_id] = 0;
  for (const auto& t : corpus) ++per_client[t.client_id];
  json clients = json::array();
  for (const auto& [id, count] : per_client) clients.push_back({{"client_id", id}, {"records", count}});
  json m;
  m["version"] = 1;
  m["format"] = std::string(to_string(fmt));
  m["records"] = corpus.size();
  m["clients"] = clients;
  return m.dump(2) + "\n";
}

fs::path hash_store_path(const ExperimentConfig& cfg) { return cfg.output_path() / "embeddings.fedemb"; }

}  // namespace

std::string partition_to_json(const ClientPartition& part) {
  json feats = json::array();
  for (std::size_t i = 0; i < part.schema.size(); ++i) {
    const auto& col = part.schema[i];
    const auto& canonical = part.canonical_of.at(col.name);
    feats.push_back({{"name", col.name},
                     {"canonical", canonical},
                     {"kind", std::string(to_string(col.kind))},
                     {"description", col.description},
                     {"source_column", part.source_columns[i]},
                     {"shared", part.shared_features.contains(canonical)}});
  }
  json j;
  j["version"] = 1;
  j["client_id"] = part.client_id;
  j["features"] = feats;
  j["shared_features"] = part.shared_features;
  j["unique_features"] = part.unique_features;
  j["rows"] = part.row_indices;
  return j.dump(2) + "\n";
}

ClientPartition partition_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    if (j.at("version").get<int>() != 1)
      throw Error(Errc::version_unsupported, "partition file version");
    ClientPartition p;
    p.client_id = j.at("client_id").get<int>();
    for (const auto& f : j.at("features")) {
      ColumnSpec col;
      col.name = f.at("name").get<std::string>();
      const auto kind = f.at("kind").get<std::string>();
      if (kind == "numeric") col.kind = ColumnKind::numeric;
      else if (kind == "categorical") col.kind = ColumnKind::categorical;
      else if (kind == "binary") col.kind = ColumnKind::binary;
      else throw Error(Errc::parse_error, "unknown column kind '" + kind + "'");
      col.description = f.value("description", std::string{});
      p.canonical_of[col.name] = f.at("canonical").get<std::string>();
      p.source_columns.push_back(f.at("source_column").get<std::size_t>());
      p.schema.push_back(std::move(col));
    }
    p.shared_features = j.at("shared_features").get<std::set<std::string>>();
    p.unique_features = j.at("unique_features").get<std::set<std::string>>();
    p.row_indices = j.at("rows").get<std::vector<std::size_t>>();
    return p;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("partition file: ") + e.what());
  }
}

std::string split_to_json(int client_id, const SplitIndices& split) {
  json j;
  j["version"] = 1;
  j["client_id"] = client_id;
  j["train"] = split.train;
  j["test"] = split.test;
  return j.dump(2) + "\n";
}

SplitIndices split_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    if (j.at("version").get<int>() != 1) throw Error(Errc::version_unsupported, "split file version");
    return {j.at("train").get<std::vector<std::size_t>>(), j.at("test").get<std::vector<std::size_t>>()};
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("split file: ") + e.what());
  }
}

CommandResult cmd_prepare(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  const PipelineSpec spec = pipeline_spec(cfg);
  Session s(ctx, "prepare");
  const auto parts = make_partitions(spec);
  const auto splits = make_splits(spec, parts);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    s.write(client_file("partitions", parts[i].client_id), partition_to_json(parts[i]));
    s.write(client_file("splits", parts[i].client_id), split_to_json(parts[i].client_id, splits[i]));
    s.info("client " + std::to_string(parts[i].client_id) + ": " +
           std::to_string(parts[i].row_indices.size()) + " rows, " +
           std::to_string(parts[i].schema.size()) + " features");
  }
  return s.finish();
}

CommandResult cmd_serialize(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  const PipelineSpec spec = pipeline_spec(cfg);
  const auto pf = read_prepared(cfg);
  Session s(ctx, "serialize");
  std::vector<TextSequence> corpus;
  for (const auto& part : pf.partitions) {
    const auto texts = serialize_client(spec, part);
    if (texts.empty()) s.warn("client " + std::to_string(part.client_id) + " has no records");
    corpus.insert(corpus.end(), texts.begin(), texts.end());
  }
  std::string body;
  for (const auto& t : corpus) {
    body += corpus_line(t);
    body += '\n';
  }
  s.write("corpus.jsonl", body);
  s.write("corpus_meta.json", corpus_meta_json(corpus, cfg.format, pf.partitions));
  s.info(std::to_string(corpus.size()) + " records serialized as " + std::string(to_string(cfg.format)));
  return s.finish();
}

CommandResult cmd_embed(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.encoder_kind == EncoderKind::raw)
    throw Error(Errc::config_error, "encoder.kind: the raw baseline has no embedding stage");
  const fs::path corpus_path = cfg.output_path() / "corpus.jsonl";
  if (!fs::exists(corpus_path))
    throw Error(Errc::missing_file, "'" + corpus_path.string() + "' not found; run the serialize command first");
  const auto corpus = read_corpus(corpus_path);

  Session s(ctx, "embed");
  if (cfg.encoder_kind == EncoderKind::store) {
    const auto store_path = cfg.resolve(*cfg.store_path);
    const auto store = read_store(store_path);
    if (store.dim() != cfg.encoder_dim)
      throw Error(Errc::dimension_mismatch, "store '" + store_path.string() + "' has dimension " +
                                               std::to_string(store.dim()) + ", encoder.dim is " +
                                               std::to_string(cfg.encoder_dim));
    std::vector<std::string> missing;
    for (const auto& t : corpus)
      if (!store.contains(t.record_id)) missing.push_back(t.record_id);
    if (!missing.empty()) {
      std::string list;
      for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
      throw Error(Errc::missing_embedding, std::to_string(missing.size()) +
                                               " corpus records have no embedding: " + list);
    }
    for (std::size_t i = 0; i < store.size(); ++i) {
      for (float v : store.row(i)) {
        if (!std::isfinite(v))
          throw Error(Errc::bad_value, "non-finite embedding for record '" + store.record_ids()[i] + "'");
      }
    }
    json report;
    report["store"] = store_path.string();
    report["encoder_id"] = store.encoder_id();
    report["dim"] = store.dim();
    report["records"] = store.size();
    report["corpus_records"] = corpus.size();
    s.write("embed_report.json", report.dump(2) + "\n");
    s.info("store ok, " + std::to_string(store.size()) + " records, dim " + std::to_string(store.dim()));
    return s.finish();
  }

  const PipelineSpec spec = pipeline_spec(cfg);
  const auto encoder = make_encoder(spec.encoder);

  std::optional<fs::path> cached;
  if (const char* dir = std::getenv("FEDALIGN_CACHE_DIR"); dir && *dir) {
    std::ostringstream key;
    key << encoder->id() << '|' << cfg.max_tokens << '|' << cfg.hash_seed << '|';
    for (const auto& [canonical, aliases] : spec.aliases.entries()) {
      key << canonical << '=';
      for (const auto& a : aliases) key << a << ',';
      key << ';';
    }
    const auto corpus_digest = xxh64(read_file(corpus_path), xxh64(key.str(), 0));
    char name[40];
    std::snprintf(name, sizeof name, "%016llx.fedemb", static_cast<unsigned long long>(corpus_digest));
    cached = fs::path(dir) / name;
  }

  EmbeddingStore store(static_cast<std::uint32_t>(cfg.encoder_dim), encoder->id());
  if (cached && fs::exists(*cached)) {
    store = read_store(*cached);
    s.info("embeddings loaded from cache " + cached->string());
  } else {
    for (const auto& t : corpus) store.add(t.record_id, encoder->encode(t).values);
    if (cached) {
      fs::create_directories(cached->parent_path());
      write_store(*cached, store);
    }
  }
  const auto bytes = encode_store(store);
  s.write("embeddings.fedemb",
          std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  s.info(std::to_string(store.size()) + " records embedded with " + encoder->id());
  return s.finish();
}

namespace {

PreparedExperiment data_from_store(const PipelineSpec& spec, const PreparedFiles& pf,
                                   const EmbeddingStore& store) {
  PreparedExperiment data;
  data.partitions = pf.partitions;
  data.splits = pf.splits;
  data.model = spec.model;
  data.model.input_dim = store.dim();
  StoreEncoder enc(std::make_shared<const EmbeddingStore>(store), spec.encoder.normalize_store);
  const auto& ds = *spec.dataset;
  for (std::size_t i = 0; i < pf.partitions.size(); ++i) {
    ClientData cd{pf.partitions[i].client_id, LabeledSet(store.dim()), LabeledSet(store.dim())};
    auto fill = [&](const std::vector<std::size_t>& rows, LabeledSet& set) {
      for (const auto r : rows) {
        TextSequence key;
        key.record_id = record_id_for_row(r);
        set.add(enc.encode(key).values, ds.labels.at(r));
      }
    };
    fill(pf.splits[i].train, cd.train);
    fill(pf.splits[i].test, cd.test);
    data.clients.push_back(std::move(cd));
  }
  return data;
}

std::string method_name(const ExperimentConfig& cfg, const std::string& encoder_id) {
  return std::string(to_string(cfg.model.kind)) + "/" + encoder_id + "/" +
         std::string(to_string(cfg.format));
}

}  // namespace

CommandResult cmd_train(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  PipelineSpec spec = pipeline_spec(cfg);
  spec.validate();
  const auto pf = read_prepared(cfg);

  PreparedExperiment data;
  std::string encoder_id;
  if (cfg.encoder_kind == EncoderKind::raw) {
    data.partitions = pf.partitions;
    data.splits = pf.splits;
    data.clients = build_client_data(spec, pf.partitions, pf.splits);
    data.model = spec.model;
    data.model.input_dim = model_input_dim(spec, pf.partitions);
    encoder_id = "raw";
  } else {
    const fs::path meta_path = cfg.output_path() / "corpus_meta.json";
    if (!fs::exists(meta_path))
      throw Error(Errc::missing_file, "'" + meta_path.string() + "' not found; run the serialize command first");
    const auto meta = json::parse(read_file(meta_path));
    if (meta.value("format", std::string{}) != to_string(cfg.format))
      throw Error(Errc::config_mismatch, "serialization.format differs from the corpus on disk; rerun serialize and embed");

    const fs::path store_path = cfg.encoder_kind == EncoderKind::store
                                    ? cfg.resolve(*cfg.store_path)
                                    : hash_store_path(cfg);
    if (!fs::exists(store_path))
      throw Error(Errc::missing_file, "'" + store_path.string() + "' not found; run the embed command first");
    const auto store = read_store(store_path);
    if (store.dim() != cfg.encoder_dim)
      throw Error(Errc::dimension_mismatch, "store has dimension " + std::to_string(store.dim()) +
                                               ", encoder.dim is " + std::to_string(cfg.encoder_dim));
    if (cfg.encoder_kind == EncoderKind::hash) {
      const auto expected = make_encoder(spec.encoder)->id();
      if (store.encoder_id() != expected)
        throw Error(Errc::config_mismatch, "embeddings were made by '" + store.encoder_id() +
                                               "', config expects '" + expected + "'; rerun embed");
    }
    data = data_from_store(spec, pf, store);
    encoder_id = store.encoder_id();
  }

  std::vector<std::uint64_t> run_seeds;
  for (const auto label : cfg.seeds) run_seeds.push_back(run_seed_for(cfg.seed, label));

  Session s(ctx, "train");
  auto result = multi_seed(spec, data, run_seeds);
  result.summary.seeds = cfg.seeds;

  std::string jsonl;
  std::ostringstream per_client;
  per_client << "seed,client_id,f1,tp,fp,tn,fn\n";
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& r = result.runs[i];
    const auto label = cfg.seeds[i];
    s.write("train/rounds_seed" + std::to_string(label) + ".csv", rounds_csv(r));
    jsonl += rounds_jsonl(r, label);
    for (const auto& m : r.per_client) {
      per_client << label << ',' << m.client_id << ',' << format_number(m.f1) << ','
                 << m.confusion.tp << ',' << m.confusion.fp << ',' << m.confusion.tn << ','
                 << m.confusion.fn << '\n';
    }
    s.info("seed " + std::to_string(label) + ": F1 " + format_number(r.final_f1));
  }
  s.write("train/rounds.jsonl", jsonl);
  s.write("train/per_client.csv", per_client.str());

  const std::vector<MethodResult> rows = {
      {method_name(cfg, encoder_id), client_count(cfg.scenario), result.summary}};
  s.write("train/summary.csv", summary_csv(rows));
  s.write("train/summary.txt", summary_text(rows));
  s.write("train/stability.csv", stability_csv(rows));
  s.write("train/comm.csv", comm_csv(result.runs.front()));
  return s.finish();
}

CommandResult cmd_stress(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  PipelineSpec spec = pipeline_spec(cfg);
  std::vector<std::uint64_t> run_seeds;
  for (const auto label : cfg.seeds) run_seeds.push_back(run_seed_for(cfg.seed, label));

  auto report = stress_sweep(spec, cfg.stress_overlaps, cfg.stress_variants, run_seeds);
  for (auto& c : report.cells) c.summary.seeds = cfg.seeds;

  Session s(ctx, "stress");
  s.write("stress/stress.csv", stress_csv(report));
  s.write("stress/stress.txt", stress_text(report));
  if (report.variants.size() >= 2 && cfg.seeds.size() >= 2) {
    const auto a = report.variants[0];
    for (std::size_t i = 1; i < report.variants.size(); ++i) {
      const auto b = report.variants[i];
      s.write("stress/ttest_" + std::string(to_string(a)) + "_vs_" + std::string(to_string(b)) + ".csv",
              stress_ttests_csv(report, a, b));
    }
  }
  s.info(stress_text(report));
  return s.finish();
}

void cmd_generate(const fs::path& out, const SyntheticSpec& spec) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_csv(out, generate_synthetic(spec));
}

}  // namespace fedalign
