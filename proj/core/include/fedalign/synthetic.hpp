#pragma once

#include <cstddef>
#include <cstdint>

#include "fedalign/dataset.hpp"

namespace fedalign {

struct SyntheticSpec {
  std::size_t rows = 4238;
  double positive_rate = 0.15;
  std::uint64_t seed = 0;
};

/// Two-class tabular generator shaped like the Framingham attributes:
/// 13 features (sex, age, is_smoking, cigsPerDay, BPMeds, prevalentStroke,
/// prevalentHyp, diabetes, totChol, sysBP, diaBP, heartRate, glucose) and a
/// TenYearCHD label. Continuous features are class-conditional Gaussians
/// rounded to integers; binary and categorical ones are class-conditional
/// Bernoulli draws. Class effects have mixed signs.
TabularDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace fedalign
