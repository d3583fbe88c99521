#include "fedalign/metrics.hpp"

#include <algorithm>

#include "fedalign/error.hpp"
#include "fedalign/stats.hpp"

namespace fedalign {

Confusion& Confusion::operator+=(const Confusion& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

double f1(const Confusion& c) noexcept {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double accuracy(const Confusion& c) noexcept {
  if (c.total() == 0) return 0.0;
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

Confusion evaluate(const Model& model, const LabeledSet& data, double threshold) {
  Confusion c;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool predicted = predict(model, data.row(i)) >= threshold;
    const bool actual = data.y[i] == 1;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

RunSummary summarize(std::vector<std::uint64_t> seeds, std::vector<double> f1s,
                     std::vector<std::vector<double>> per_client_f1) {
  if (f1s.empty()) throw Error(Errc::invalid_argument, "summary needs at least one run");
  RunSummary s;
  s.std = sample_std(f1s);
  s.min = *std::min_element(f1s.begin(), f1s.end());
  s.max = *std::max_element(f1s.begin(), f1s.end());
  // Rounding in the sum can push the mean of equal values past min/max.
  s.mean = std::clamp(mean(f1s), s.min, s.max);
  s.seeds = std::move(seeds);
  s.f1s = std::move(f1s);
  s.per_client_f1 = std::move(per_client_f1);
  return s;
}

StabilitySummary stability(const RunSummary& summary) {
  std::vector<double> pooled;
  for (const auto& row : summary.per_client_f1) pooled.insert(pooled.end(), row.begin(), row.end());
  StabilitySummary out;
  if (pooled.empty()) return out;
  out.mean = mean(pooled);
  out.std = sample_std(pooled);
  out.min = *std::min_element(pooled.begin(), pooled.end());
  out.max = *std::max_element(pooled.begin(), pooled.end());
  return out;
}

}  // namespace fedalign
