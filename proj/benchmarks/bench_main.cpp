#include <benchmark/benchmark.h>

#include <filesystem>
#include <numeric>

#include "fedalign/embedding_store.hpp"
#include "fedalign/encoders.hpp"
#include "fedalign/fed_protocol.hpp"
#include "fedalign/models.hpp"
#include "fedalign/partition.hpp"
#include "fedalign/rng.hpp"
#include "fedalign/serialization.hpp"
#include "fedalign/synthetic.hpp"

using namespace fedalign;

namespace {

std::vector<TextSequence> corpus(std::size_t n) {
  const auto ds = generate_synthetic({n, 0.15, 1});
  const auto parts = partition(ds, 1, 13, 0, AliasTable::framingham_defaults(), 1);
  std::vector<TextSequence> out;
  for (std::size_t r = 0; r < n; ++r) out.push_back(serialize_structured(make_record(ds, r, parts[0])));
  return out;
}

void BM_HashEncode(benchmark::State& state) {
  EncoderConfig cfg;
  cfg.dim = static_cast<std::size_t>(state.range(0));
  cfg.alias_table = AliasTable::framingham_defaults();
  const auto enc = make_encoder(cfg);
  const auto texts = corpus(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc->encode(texts[i++ % texts.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HashEncode)->Arg(64)->Arg(768);

void BM_MlpStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  LabeledSet s(d);
  std::vector<double> x(d);
  for (int i = 0; i < 32; ++i) {
    for (auto& v : x) v = rng.normal();
    s.add(x, i % 2);
  }
  Model m = init_model({ModelKind::mlp, d, 0.01, 0.2}, rng);
  std::vector<std::size_t> batch(32);
  std::iota(batch.begin(), batch.end(), 0);
  TrainConfig cfg;
  AdamState adam(params_of(m).size());
  for (auto _ : state) {
    const auto mask = sample_dropout_mask(rng, batch.size(), 0.2);
    const auto lg = loss_and_grad(m, s, batch, &mask);
    adam_step(params_of(m), lg.grad.values, adam, cfg);
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_MlpStep)->Arg(64)->Arg(768);

void BM_Aggregate(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const ModelShape shape{ModelKind::mlp, 768};
  WeightVector g{shape, std::vector<double>(shape.param_count())};
  std::vector<WeightVector> deltas(k, g);
  for (auto& d : deltas)
    for (auto& v : d.values) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(aggregate(g, deltas));
}
BENCHMARK(BM_Aggregate)->Arg(3)->Arg(10);

void BM_StoreRoundTrip(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  EmbeddingStore s(768, "bench");
  std::vector<float> v(768);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = static_cast<float>(rng.normal());
    s.add(record_id_for_row(i), v);
  }
  for (auto _ : state) benchmark::DoNotOptimize(decode_store(encode_store(s)));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * s.file_size()));
}
BENCHMARK(BM_StoreRoundTrip)->Arg(1000)->Arg(4238);

}  // namespace

BENCHMARK_MAIN();
