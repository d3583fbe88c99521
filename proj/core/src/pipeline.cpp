#include "fedalign/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "fedalign/error.hpp"
#include "fedalign/raw_encoder.hpp"
#include "fedalign/rng.hpp"

namespace fedalign {

int client_count(const Scenario& s) noexcept {
  return std::visit([](const auto& v) { return v.n_clients; }, s);
}

void PipelineSpec::validate() const {
  if (!dataset) throw Error(Errc::config_error, "dataset: not loaded");
  if (client_count(scenario) < 1) throw Error(Errc::config_error, "scenario.n_clients: must be at least 1");
  if (const auto* o = std::get_if<OverlapScenario>(&scenario)) {
    if (!(o->overlap_fraction > 0.0 && o->overlap_fraction <= 1.0))
      throw Error(Errc::config_error, "scenario.overlap_fraction: must lie in (0, 1]");
  }
  encoder.validate();
  fed.validate();
  if (encoder.kind != EncoderKind::raw && model.input_dim != encoder.dim) {
    throw Error(Errc::config_mismatch,
                "model.input_dim (" + std::to_string(model.input_dim) +
                    ") differs from encoder.dim (" + std::to_string(encoder.dim) + ")");
  }
}

std::vector<ClientPartition> make_partitions(const PipelineSpec& spec) {
  const auto& ds = *spec.dataset;
  if (const auto* f = std::get_if<FixedScenario>(&spec.scenario))
    return partition(ds, f->n_clients, f->shared, f->unique, spec.aliases, spec.data_seed);
  const auto& o = std::get<OverlapScenario>(spec.scenario);
  return overlap_partition(ds, o.n_clients, o.overlap_fraction, spec.aliases, spec.data_seed);
}

std::vector<SplitIndices> make_splits(const PipelineSpec& spec,
                                      const std::vector<ClientPartition>& parts) {
  SplitSpec s = spec.split;
  s.seed = spec.data_seed;
  std::vector<SplitIndices> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back(split(*spec.dataset, p, s));
  return out;
}

std::vector<TextSequence> serialize_client(const PipelineSpec& spec, const ClientPartition& part) {
  auto rows = part.row_indices;
  std::sort(rows.begin(), rows.end());
  std::vector<TextSequence> out;
  out.reserve(rows.size());
  for (const auto r : rows)
    out.push_back(serialize(make_record(*spec.dataset, r, part), spec.format, spec.templates));
  return out;
}

std::size_t model_input_dim(const PipelineSpec& spec, const std::vector<ClientPartition>& parts) {
  if (spec.encoder.kind != EncoderKind::raw) return spec.encoder.dim;
  std::size_t widest = 0;
  for (const auto& p : parts) widest = std::max(widest, p.schema.size());
  return widest;
}

std::vector<ClientData> build_client_data(const PipelineSpec& spec,
                                          const std::vector<ClientPartition>& parts,
                                          const std::vector<SplitIndices>& splits) {
  if (parts.size() != splits.size())
    throw Error(Errc::length_mismatch, "one split per partition is required");
  const auto& ds = *spec.dataset;
  const std::size_t dim = model_input_dim(spec, parts);

  std::unique_ptr<Encoder> text_encoder;
  if (spec.encoder.kind != EncoderKind::raw) {
    EncoderConfig cfg = spec.encoder;
    if (!cfg.alias_table) cfg.alias_table = spec.aliases;
    text_encoder = make_encoder(cfg);
  }

  std::vector<ClientData> out;
  out.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& part = parts[i];
    ClientData cd{part.client_id, LabeledSet(dim), LabeledSet(dim)};

    auto records_of = [&](const std::vector<std::size_t>& rows) {
      std::vector<Record> recs;
      recs.reserve(rows.size());
      for (const auto r : rows) recs.push_back(make_record(ds, r, part));
      return recs;
    };
    const auto train_recs = records_of(splits[i].train);
    const auto test_recs = records_of(splits[i].test);

    if (text_encoder) {
      auto fill = [&](const std::vector<Record>& recs, LabeledSet& set) {
        for (const auto& rec : recs) {
          const auto seq = serialize(rec, spec.format, spec.templates);
          set.add(text_encoder->encode(seq).values, rec.label);
        }
      };
      fill(train_recs, cd.train);
      fill(test_recs, cd.test);
    } else {
      const auto raw = RawFeatureEncoder::fit(train_recs, dim);
      for (const auto& rec : train_recs) cd.train.add(raw.encode(rec), rec.label);
      for (const auto& rec : test_recs) cd.test.add(raw.encode(rec), rec.label);
    }
    out.push_back(std::move(cd));
  }
  return out;
}

PreparedExperiment prepare(const PipelineSpec& spec) {
  spec.validate();
  PreparedExperiment p;
  p.partitions = make_partitions(spec);
  p.splits = make_splits(spec, p.partitions);
  p.clients = build_client_data(spec, p.partitions, p.splits);
  p.model = spec.model;
  p.model.input_dim = model_input_dim(spec, p.partitions);
  return p;
}

FedRun run(const PipelineSpec& spec, const PreparedExperiment& data, std::uint64_t run_seed) {
  Rng init_rng(derive_seed(run_seed, "init"));
  const Model initial = init_model(data.model, init_rng);
  FedConfig cfg = spec.fed;
  cfg.seed = run_seed;
  return run_federated(cfg, data.clients, initial);
}

MultiSeedResult multi_seed(const PipelineSpec& spec, const PreparedExperiment& data,
                           const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error(Errc::config_error, "seeds: at least one seed is required");
  MultiSeedResult out;
  std::vector<double> f1s;
  std::vector<std::vector<double>> per_client;
  for (const auto s : seeds) {
    out.runs.push_back(run(spec, data, s));
    const auto& r = out.runs.back();
    f1s.push_back(r.final_f1);
    std::vector<double> pc;
    for (const auto& m : r.per_client) pc.push_back(m.f1);
    per_client.push_back(std::move(pc));
  }
  out.summary = summarize(seeds, std::move(f1s), std::move(per_client));
  return out;
}

MultiSeedResult multi_seed(const PipelineSpec& spec, const std::vector<std::uint64_t>& seeds) {
  return multi_seed(spec, prepare(spec), seeds);
}

std::string_view to_string(StressVariant v) noexcept {
  switch (v) {
    case StressVariant::aligned: return "aligned";
    case StressVariant::plain: return "plain";
    case StressVariant::raw: return "raw";
  }
  return "?";
}

std::optional<StressVariant> parse_stress_variant(std::string_view name) noexcept {
  if (name == "aligned") return StressVariant::aligned;
  if (name == "plain") return StressVariant::plain;
  if (name == "raw") return StressVariant::raw;
  return std::nullopt;
}

const StressCell& StressReport::at(double overlap, StressVariant variant) const {
  for (const auto& c : cells)
    if (c.overlap == overlap && c.variant == variant) return c;
  throw Error(Errc::invalid_argument, "no stress cell for that overlap and variant");
}

StressReport stress_sweep(const PipelineSpec& base, std::vector<double> overlaps,
                          const std::vector<StressVariant>& variants,
                          const std::vector<std::uint64_t>& seeds) {
  if (overlaps.empty()) throw Error(Errc::config_error, "stress.overlaps: empty");
  if (variants.empty()) throw Error(Errc::config_error, "stress.variants: empty");
  for (double o : overlaps) {
    if (!(o > 0.0 && o <= 1.0))
      throw Error(Errc::config_error, "stress.overlaps: levels must lie in (0, 1]");
  }
  if (base.encoder.kind != EncoderKind::hash)
    throw Error(Errc::config_error, "encoder.kind: stress sweeps need the hash encoder");
  std::sort(overlaps.begin(), overlaps.end(), std::greater<>());
  overlaps.erase(std::unique(overlaps.begin(), overlaps.end()), overlaps.end());

  StressReport report;
  report.overlaps = overlaps;
  report.variants = variants;
  for (double o : overlaps) {
    PipelineSpec spec = base;
    spec.scenario = OverlapScenario{client_count(base.scenario), o};
    spec.validate();
    const auto parts = make_partitions(spec);
    const auto splits = make_splits(spec, parts);
    for (const auto v : variants) {
      PipelineSpec vs = spec;
      switch (v) {
        case StressVariant::aligned: vs.encoder.canonicalize = true; break;
        case StressVariant::plain: vs.encoder.canonicalize = false; break;
        case StressVariant::raw: vs.encoder.kind = EncoderKind::raw; break;
      }
      PreparedExperiment data;
      data.partitions = parts;
      data.splits = splits;
      data.clients = build_client_data(vs, parts, splits);
      data.model = vs.model;
      data.model.input_dim = model_input_dim(vs, parts);
      report.cells.push_back({o, v, multi_seed(vs, data, seeds).summary});
    }
  }
  return report;
}

}  // namespace fedalign
