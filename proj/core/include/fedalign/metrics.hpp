#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedalign/models.hpp"

namespace fedalign {

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  Confusion& operator+=(const Confusion& o) noexcept;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// 2tp / (2tp + fp + fn); 0 when the denominator is 0.
double f1(const Confusion& c) noexcept;
double accuracy(const Confusion& c) noexcept;

/// Positive prediction when P(y=1) >= threshold.
inline constexpr double kDecisionThreshold = 0.5;

Confusion evaluate(const Model& model, const LabeledSet& data,
                   double threshold = kDecisionThreshold);

/// Summary of one quantity over seeds (sample std, 0 for a single seed).
struct RunSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<double> f1s;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// per_client_f1[seed][client]
  std::vector<std::vector<double>> per_client_f1;
};

RunSummary summarize(std::vector<std::uint64_t> seeds, std::vector<double> f1s,
                     std::vector<std::vector<double>> per_client_f1 = {});

/// Cross-client stability quartet: mean, std, min, max of per-client F1,
/// pooled over every seed.
struct StabilitySummary {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

StabilitySummary stability(const RunSummary& summary);

}  // namespace fedalign
