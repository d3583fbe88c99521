#pragma once

#include <limits>
#include <vector>

#include "fedalign/models.hpp"

namespace fedalign {

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean mini-batch loss during the epoch
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  bool improved = false;
};

struct TrainResult {
  Model model;
  int epochs_run = 0;
  /// Validation loss of the returned weights (NaN without a validation split).
  double best_val_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<EpochRecord> history;
};

/// Local mini-batch Adam training with early stopping.
///
/// A fresh optimizer state is used on every call. A seeded val_fraction of
/// the rows is held out; after each epoch its BCE is compared against the
/// best seen so far (the starting weights count as the first checkpoint),
/// training stops after `patience` epochs without improvement, and the best
/// checkpoint is returned. With too few rows for a validation split the
/// final weights are returned.
TrainResult train_local(const Model& model, const LabeledSet& train, const TrainConfig& cfg);

}  // namespace fedalign
