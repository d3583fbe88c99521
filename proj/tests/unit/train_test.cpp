#include "fedalign/train.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fedalign/error.hpp"
#include "fedalign/rng.hpp"
#include "unit/test_util.hpp"

using namespace fedalign;

namespace {

LabeledSet separable(std::size_t n, std::size_t d, std::uint64_t seed, double noise = 0.0) {
  Rng rng(seed);
  LabeledSet s(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = rng.normal();
    int y = x[0] + 0.5 * x[1] > 0 ? 1 : 0;
    if (rng.bernoulli(noise)) y = 1 - y;
    s.add(x, y);
  }
  return s;
}

}  // namespace

TEST(TrainLocal, ZeroEpochsReturnsInput) {
  Rng rng(1);
  const auto m = init_model({ModelKind::mlp, 4, 0.01, 0.2}, rng);
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto r = train_local(m, separable(50, 4, 2), cfg);
  EXPECT_EQ(flatten(r.model), flatten(m));
  EXPECT_EQ(r.epochs_run, 0);
  // Zero epochs on an empty set is still a no-op.
  EXPECT_NO_THROW(train_local(m, LabeledSet(4), cfg));
}

TEST(TrainLocal, EmptyTrainSet) {
  TrainConfig cfg;
  EXPECT_FEDALIGN_ERROR(train_local(LrModel(3), LabeledSet(3), cfg), empty_train_set);
}

TEST(TrainLocal, InvalidConfig) {
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_FEDALIGN_ERROR(train_local(LrModel(3), separable(10, 3, 1), cfg), config_error);
  cfg = {};
  cfg.val_fraction = 0.5;
  EXPECT_FEDALIGN_ERROR(cfg.validate(), config_error);
  cfg = {};
  cfg.patience = 0;
  EXPECT_FEDALIGN_ERROR(cfg.validate(), config_error);
}

TEST(TrainLocal, LearnsSeparableData) {
  const auto data = separable(400, 6, 3);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.lr = 0.01;
  cfg.seed = 5;
  const LrModel start(6, 0.0);
  const auto r = train_local(start, data, cfg);
  EXPECT_LT(mean_bce(r.model, data), 0.5 * mean_bce(start, data));
}

TEST(TrainLocal, DeterministicForSeed) {
  const auto data = separable(200, 5, 4, 0.1);
  Rng rng(2);
  const auto m = init_model({ModelKind::mlp, 5, 0.01, 0.2}, rng);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 77;
  const auto a = train_local(m, data, cfg);
  const auto b = train_local(m, data, cfg);
  EXPECT_EQ(flatten(a.model), flatten(b.model));
  cfg.seed = 78;
  EXPECT_NE(flatten(train_local(m, data, cfg).model), flatten(a.model));
}

TEST(TrainLocal, EarlyStoppingReturnsBestCheckpoint) {
  // Pure label noise with a large step size overfits quickly.
  const auto data = separable(60, 12, 6, 0.5);
  Rng rng(3);
  const auto m = init_model({ModelKind::mlp, 12, 0.01, 0.0}, rng);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.lr = 0.05;
  cfg.patience = 2;
  cfg.val_fraction = 0.3;
  cfg.seed = 1;
  const auto r = train_local(m, data, cfg);
  ASSERT_LT(r.epochs_run, 200);
  ASSERT_EQ(static_cast<int>(r.history.size()), r.epochs_run);
  int last_improved = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : r.history) {
    if (e.improved) last_improved = e.epoch;
    best = std::min(best, e.val_loss);
  }
  EXPECT_EQ(r.epochs_run - last_improved, cfg.patience);
  if (last_improved > 0) EXPECT_DOUBLE_EQ(r.best_val_loss, best);
  EXPECT_LE(r.best_val_loss, r.history.back().val_loss);
}

TEST(TrainLocal, TinySetSkipsValidation) {
  const auto data = separable(3, 2, 1);
  TrainConfig cfg;
  cfg.epochs = 2;
  const auto r = train_local(LrModel(2), data, cfg);
  EXPECT_EQ(r.epochs_run, 2);
  EXPECT_TRUE(std::isnan(r.best_val_loss));
}

TEST(TrainLocal, FullBatchLrReachesStationaryPoint) {
  const auto data = separable(300, 3, 8, 0.2);
  TrainConfig cfg;
  cfg.epochs = 4000;
  cfg.batch_size = 300;
  cfg.lr = 0.01;
  cfg.val_fraction = 0.0;
  const auto r = train_local(LrModel(3, 0.05), data, cfg);
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  const auto lg = loss_and_grad(r.model, data, rows);
  for (double g : lg.grad.values) EXPECT_LT(std::fabs(g), 1e-4);
}
