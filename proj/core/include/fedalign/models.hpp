#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "fedalign/rng.hpp"

namespace fedalign {

enum class ModelKind { lr, mlp };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

inline constexpr std::size_t kHiddenWidth = 16;

/// Layer dimensions of a classifier; fixes the flat parameter layout.
struct ModelShape {
  ModelKind kind = ModelKind::lr;
  std::size_t input_dim = 0;

  /// lr: input_dim + 1. mlp: input_dim*16 + 16 + 16 + 1.
  std::size_t param_count() const noexcept;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Flat classifier parameters; the only thing clients and server exchange.
struct WeightVector {
  ModelShape shape;
  std::vector<double> values;

  /// Throws shape_mismatch unless values match the shape.
  void check() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

/// Logistic regression, P(y=1|e) = sigmoid(w.e + b), with an L2 penalty of
/// lambda/2 * |w|^2 on the weights (not the bias).
/// Parameter layout: w[0..d), b.
class LrModel {
 public:
  explicit LrModel(std::size_t input_dim, double lambda = 0.01);

  std::size_t input_dim() const noexcept { return params_.size() - 1; }
  double lambda() const noexcept { return lambda_; }

  std::span<double> w() noexcept { return std::span(params_).first(input_dim()); }
  std::span<const double> w() const noexcept { return std::span(params_).first(input_dim()); }
  double& b() noexcept { return params_.back(); }
  double b() const noexcept { return params_.back(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  friend bool operator==(const LrModel&, const LrModel&) = default;

 private:
  std::vector<double> params_;
  double lambda_;
};

/// d -> 16 (ReLU, inverted dropout) -> 1 (sigmoid).
/// Parameter layout: W1 as d x 16 row-major (input-major), b1[16], W2[16], b2.
class MlpModel {
 public:
  explicit MlpModel(std::size_t input_dim, double dropout_p = 0.2);

  std::size_t input_dim() const noexcept { return input_dim_; }
  double dropout_p() const noexcept { return dropout_p_; }

  std::span<double> w1() noexcept { return std::span(params_).first(input_dim_ * kHiddenWidth); }
  std::span<const double> w1() const noexcept {
    return std::span(params_).first(input_dim_ * kHiddenWidth);
  }
  std::span<double> b1() noexcept { return std::span(params_).subspan(input_dim_ * kHiddenWidth, kHiddenWidth); }
  std::span<const double> b1() const noexcept {
    return std::span(params_).subspan(input_dim_ * kHiddenWidth, kHiddenWidth);
  }
  std::span<double> w2() noexcept {
    return std::span(params_).subspan((input_dim_ + 1) * kHiddenWidth, kHiddenWidth);
  }
  std::span<const double> w2() const noexcept {
    return std::span(params_).subspan((input_dim_ + 1) * kHiddenWidth, kHiddenWidth);
  }
  double& b2() noexcept { return params_.back(); }
  double b2() const noexcept { return params_.back(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;

 private:
  std::size_t input_dim_;
  double dropout_p_;
  std::vector<double> params_;
};

using Model = std::variant<LrModel, MlpModel>;

struct ModelSpec {
  ModelKind kind = ModelKind::mlp;
  std::size_t input_dim = 768;
  double lambda = 0.01;
  double dropout_p = 0.2;

  ModelShape shape() const noexcept { return {kind, input_dim}; }
};

/// LR starts at zero; MLP weights are uniform in +-1/sqrt(fan_in), biases zero.
Model init_model(const ModelSpec& spec, Rng& rng);

ModelShape shape_of(const Model& model) noexcept;
std::span<const double> params_of(const Model& model) noexcept;
std::span<double> params_of(Model& model) noexcept;

/// Row-major feature matrix with binary labels.
struct LabeledSet {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<int> y;

  explicit LabeledSet(std::size_t d = 0) : dim(d) {}

  std::size_t size() const noexcept { return y.size(); }
  bool empty() const noexcept { return y.empty(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span(x).subspan(i * dim, dim);
  }
  void add(std::span<const double> features, int label);
};

/// Per-sample, per-hidden-unit dropout multipliers (0 or 1/(1-p)).
struct DropoutMask {
  std::size_t rows = 0;
  std::vector<double> scale;

  std::span<const double> row(std::size_t i) const noexcept {
    return std::span(scale).subspan(i * kHiddenWidth, kHiddenWidth);
  }
};

DropoutMask sample_dropout_mask(Rng& rng, std::size_t rows, double p);

/// Final logit. For the MLP a non-empty mask row applies dropout to the
/// hidden activations; inference passes none.
double predict_logit(const Model& model, std::span<const double> e,
                     std::span<const double> mask_row = {});

/// Probability of the positive class, inference mode. Throws dimension_mismatch.
double predict(const Model& model, std::span<const double> e);

struct LossGrad {
  double loss = 0.0;
  WeightVector grad;
};

/// Mean binary cross-entropy over the batch (plus the L2 term for LR) and
/// its analytic gradient. mask == nullptr trains the MLP without dropout.
LossGrad loss_and_grad(const Model& model, const LabeledSet& data,
                       std::span<const std::size_t> batch, const DropoutMask* mask = nullptr);

/// Mean BCE in inference mode, without any regularization term.
double mean_bce(const Model& model, const LabeledSet& data, std::span<const std::size_t> rows);
double mean_bce(const Model& model, const LabeledSet& data);

WeightVector flatten(const Model& model);
/// Rebuilds a model with default hyperparameters.
Model unflatten(const WeightVector& weights);
/// Overwrites the parameters of an existing model, keeping its hyperparameters.
void assign_params(Model& model, const WeightVector& weights);

struct TrainConfig {
  int epochs = 10;
  std::size_t batch_size = 32;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int patience = 5;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam update, in place. Throws dimension_mismatch.
void adam_step(std::span<double> weights, std::span<const double> grad, AdamState& state,
               const TrainConfig& cfg);

}  // namespace fedalign
