#include "fedalign/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include "fedalign/rng.hpp"

namespace fedalign {
namespace {

struct GaussianFeature {
  std::string_view name;
  double mean;
  double stddev;
  double shift;  // class-1 mean offset, in units of stddev
  double floor;
};

struct BernoulliFeature {
  std::string_view name;
  double p_negative;
  double p_positive;
  std::string_view yes;  // empty: numeric 0/1 column
  std::string_view no;
};

// Centres are spread far enough apart that rounded values of different
// features rarely coincide. Class effects are split between raising and
// lowering features, so a model keyed on feature position rather than
// meaning picks up little signal.
constexpr std::array<GaussianFeature, 7> kGaussian{{
    {"age", 46.0, 4.0, 1.5, 20.0},
    {"cigsPerDay", 12.0, 3.0, -1.3, 0.0},
    {"totChol", 240.0, 5.0, -1.4, 100.0},
    {"sysBP", 175.0, 5.0, 1.5, 80.0},
    {"diaBP", 105.0, 3.0, -1.3, 50.0},
    {"heartRate", 75.0, 3.0, 1.4, 40.0},
    {"glucose", 140.0, 4.0, -1.3, 40.0},
}};

constexpr std::array<BernoulliFeature, 6> kBernoulli{{
    {"sex", 0.40, 0.80, "M", "F"},
    {"is_smoking", 0.30, 0.75, "YES", "NO"},
    {"BPMeds", 0.45, 0.10, {}, {}},
    {"prevalentStroke", 0.05, 0.35, {}, {}},
    {"prevalentHyp", 0.65, 0.20, {}, {}},
    {"diabetes", 0.40, 0.05, {}, {}},
}};

}  // namespace

TabularDataset generate_synthetic(const SyntheticSpec& spec) {
  TabularDataset ds;
  ds.label_column = "TenYearCHD";

  // Column order follows the attribute table: sex, age, is_smoking, ...
  const std::array<std::string_view, 13> order{
      "sex",        "age",      "is_smoking", "cigsPerDay", "BPMeds", "prevalentStroke",
      "prevalentHyp", "diabetes", "totChol",  "sysBP",      "diaBP",  "heartRate",
      "glucose"};
  for (const auto name : order) {
    ColumnSpec col{std::string(name), ColumnKind::numeric, {}};
    for (const auto& b : kBernoulli) {
      if (b.name == name) col.kind = b.yes.empty() ? ColumnKind::binary : ColumnKind::categorical;
    }
    ds.columns.push_back(std::move(col));
  }

  Rng rng(derive_seed(spec.seed, "synthetic"));
  ds.rows.reserve(spec.rows);
  ds.labels.reserve(spec.rows);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    const int y = rng.bernoulli(spec.positive_rate) ? 1 : 0;
    std::vector<Cell> row;
    row.reserve(order.size());
    for (const auto name : order) {
      Cell cell;
      for (const auto& g : kGaussian) {
        if (g.name != name) continue;
        const double mu = g.mean + (y ? g.shift * g.stddev : 0.0);
        cell = std::max(g.floor, std::round(rng.normal(mu, g.stddev)));
      }
      for (const auto& b : kBernoulli) {
        if (b.name != name) continue;
        const bool on = rng.bernoulli(y ? b.p_positive : b.p_negative);
        if (b.yes.empty()) {
          cell = on ? 1.0 : 0.0;
        } else {
          cell = std::string(on ? b.yes : b.no);
        }
      }
      row.push_back(std::move(cell));
    }
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(y);
  }
  return ds;
}

}  // namespace fedalign
