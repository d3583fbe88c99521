#include "fedalign/train.hpp"

#include <algorithm>
#include <numeric>

#include "fedalign/error.hpp"
#include "fedalign/rng.hpp"

namespace fedalign {

TrainResult train_local(const Model& model, const LabeledSet& train, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result{model, 0, std::numeric_limits<double>::quiet_NaN(), {}};
  if (cfg.epochs == 0) return result;
  if (train.empty()) throw Error(Errc::empty_train_set, "no training rows");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));

  auto n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(train.size()));
  if (n_val >= train.size()) n_val = 0;
  const std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> fit(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  const double dropout_p = std::holds_alternative<MlpModel>(model)
                               ? std::get<MlpModel>(model).dropout_p()
                               : 0.0;
  Model current = model;
  auto params = params_of(current);
  AdamState adam(params.size());

  Model best = model;
  double best_val = val.empty() ? 0.0 : mean_bce(model, train, val);
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span(fit));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < fit.size(); start += cfg.batch_size) {
      const auto len = std::min(cfg.batch_size, fit.size() - start);
      const std::span<const std::size_t> batch(fit.data() + start, len);
      LossGrad lg;
      if (dropout_p > 0.0) {
        const auto mask = sample_dropout_mask(rng, len, dropout_p);
        lg = loss_and_grad(current, train, batch, &mask);
      } else {
        lg = loss_and_grad(current, train, batch, nullptr);
      }
      adam_step(params, lg.grad.values, adam, cfg);
      loss_sum += lg.loss;
      ++batches;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
    result.epochs_run = epoch;
    if (!val.empty()) {
      rec.val_loss = mean_bce(current, train, val);
      if (rec.val_loss < best_val) {
        best_val = rec.val_loss;
        best = current;
        since_best = 0;
        rec.improved = true;
      } else {
        ++since_best;
      }
    }
    result.history.push_back(rec);
    if (!val.empty() && since_best >= cfg.patience) break;
  }

  if (val.empty()) {
    result.model = std::move(current);
  } else {
    result.model = std::move(best);
    result.best_val_loss = best_val;
  }
  return result;
}

}  // namespace fedalign
