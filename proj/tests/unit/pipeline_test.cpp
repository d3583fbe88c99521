#include "fedalign/pipeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fedalign/error.hpp"
#include "fedalign/synthetic.hpp"
#include "unit/test_util.hpp"

using namespace fedalign;

namespace {

PipelineSpec small_spec(EncoderKind kind = EncoderKind::hash) {
  PipelineSpec s;
  s.dataset = std::make_shared<const TabularDataset>(generate_synthetic({600, 0.3, 4}));
  s.encoder.kind = kind;
  s.encoder.dim = 64;
  s.model.kind = ModelKind::lr;
  s.model.input_dim = 64;
  s.fed.rounds = 3;
  s.fed.train.epochs = 2;
  s.fed.train.lr = 0.01;
  s.data_seed = 8;
  return s;
}

}  // namespace

TEST(Pipeline, ValidateCatchesWidthMismatch) {
  auto s = small_spec();
  EXPECT_NO_THROW(s.validate());
  s.model.input_dim = 32;
  EXPECT_FEDALIGN_ERROR(s.validate(), config_mismatch);
  s = small_spec();
  s.dataset.reset();
  EXPECT_FEDALIGN_ERROR(s.validate(), config_error);
}

TEST(Pipeline, PrepareShapes) {
  const auto s = small_spec();
  const auto prep = prepare(s);
  ASSERT_EQ(prep.partitions.size(), 3u);
  ASSERT_EQ(prep.clients.size(), 3u);
  std::set<std::size_t> rows;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& part = prep.partitions[c];
    EXPECT_EQ(part.client_id, static_cast<int>(c + 1));
    EXPECT_EQ(part.schema.size(), 11u);
    EXPECT_EQ(prep.clients[c].client_id, part.client_id);
    const auto& sp = prep.splits[c];
    EXPECT_EQ(sp.train.size() + sp.test.size(), part.row_indices.size());
    EXPECT_EQ(prep.clients[c].train.size(), sp.train.size());
    EXPECT_EQ(prep.clients[c].test.size(), sp.test.size());
    EXPECT_EQ(prep.clients[c].train.dim, 64u);
    for (auto r : part.row_indices) EXPECT_TRUE(rows.insert(r).second);
  }
  EXPECT_EQ(rows.size(), 600u);
  EXPECT_EQ(prep.model.input_dim, 64u);
}

TEST(Pipeline, SerializedTextIsOrderedAndLabelFree) {
  const auto s = small_spec();
  const auto parts = make_partitions(s);
  const auto text = serialize_client(s, parts[0]);
  ASSERT_EQ(text.size(), parts[0].row_indices.size());
  EXPECT_TRUE(std::is_sorted(text.begin(), text.end(),
                             [](const auto& a, const auto& b) { return a.record_id < b.record_id; }));
  for (const auto& t : text) EXPECT_EQ(t.text.find("TenYearCHD"), std::string::npos);
}

TEST(Pipeline, RawBaselineUsesWidestSchema) {
  auto s = small_spec(EncoderKind::raw);
  s.scenario = OverlapScenario{3, 0.2};
  const auto parts = make_partitions(s);
  std::size_t widest = 0;
  for (const auto& p : parts) widest = std::max(widest, p.schema.size());
  EXPECT_EQ(model_input_dim(s, parts), widest);
  const auto prep = prepare(s);
  EXPECT_EQ(prep.model.input_dim, widest);
  for (const auto& c : prep.clients) EXPECT_EQ(c.train.dim, widest);
}

TEST(Pipeline, RunIsDeterministicPerSeed) {
  const auto s = small_spec();
  const auto prep = prepare(s);
  const auto a = run(s, prep, 1);
  const auto b = run(s, prep, 1);
  const auto c = run(s, prep, 2);
  EXPECT_EQ(a.final_weights, b.final_weights);
  EXPECT_EQ(rounds_csv(a), rounds_csv(b));
  EXPECT_NE(a.final_weights, c.final_weights);
  EXPECT_EQ(a.rounds.size(), 3u);
}

TEST(Pipeline, MultiSeedSummary) {
  const auto s = small_spec();
  const auto r = multi_seed(s, {1, 2, 3});
  ASSERT_EQ(r.runs.size(), 3u);
  EXPECT_EQ(r.summary.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  ASSERT_EQ(r.summary.f1s.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.summary.f1s[i], r.runs[i].final_f1);
  ASSERT_EQ(r.summary.per_client_f1.size(), 3u);
  EXPECT_EQ(r.summary.per_client_f1[0].size(), 3u);
}

TEST(Pipeline, StressSweepLayout) {
  auto s = small_spec();
  s.fed.rounds = 1;
  const auto rep = stress_sweep(s, {0.2, 0.8, 0.8}, {StressVariant::aligned, StressVariant::raw}, {1});
  EXPECT_EQ(rep.overlaps, (std::vector<double>{0.8, 0.2}));
  ASSERT_EQ(rep.cells.size(), 4u);
  EXPECT_EQ(rep.cells[0].overlap, 0.8);
  EXPECT_EQ(rep.cells[0].variant, StressVariant::aligned);
  EXPECT_EQ(rep.cells[1].variant, StressVariant::raw);
  EXPECT_EQ(&rep.at(0.2, StressVariant::raw), &rep.cells[3]);
  s.encoder.kind = EncoderKind::raw;
  EXPECT_FEDALIGN_ERROR(stress_sweep(s, {0.8}, {StressVariant::aligned}, {1}), config_error);
}

TEST(Pipeline, StressVariantNames) {
  for (auto v : {StressVariant::aligned, StressVariant::plain, StressVariant::raw})
    EXPECT_EQ(parse_stress_variant(to_string(v)), v);
  EXPECT_FALSE(parse_stress_variant("nope"));
}
