#include "fedalign/models.hpp"

#include <algorithm>
#include <cmath>

#include "fedalign/error.hpp"

namespace fedalign {
namespace {

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// BCE for a logit: log(1 + e^z) - y*z, evaluated without overflow.
double bce_from_logit(double z, int y) noexcept {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
  return softplus - (y ? z : 0.0);
}

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(Errc::dimension_mismatch, "input has dimension " + std::to_string(got) +
                                              ", model expects " + std::to_string(expected));
  }
}

// Hidden pre-activations; zero inputs are skipped so sparse embeddings cost
// O(nnz * 16) instead of O(d * 16).
void mlp_hidden(const MlpModel& m, std::span<const double> x, double* z1) {
  const auto b1 = m.b1();
  std::copy(b1.begin(), b1.end(), z1);
  const double* w1 = m.w1().data();
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* row = w1 + j * kHiddenWidth;
    for (std::size_t h = 0; h < kHiddenWidth; ++h) z1[h] += xj * row[h];
  }
}

double lr_logit(const LrModel& m, std::span<const double> x) {
  double z = m.b();
  const auto w = m.w();
  for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
  return z;
}

double mlp_logit(const MlpModel& m, std::span<const double> x, std::span<const double> mask) {
  double z1[kHiddenWidth];
  mlp_hidden(m, x, z1);
  const auto w2 = m.w2();
  double z2 = m.b2();
  for (std::size_t h = 0; h < kHiddenWidth; ++h) {
    double a = z1[h] > 0.0 ? z1[h] : 0.0;
    if (!mask.empty()) a *= mask[h];
    z2 += w2[h] * a;
  }
  return z2;
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::lr ? "lr" : "mlp";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  if (name == "lr") return ModelKind::lr;
  if (name == "mlp") return ModelKind::mlp;
  return std::nullopt;
}

std::size_t ModelShape::param_count() const noexcept {
  if (kind == ModelKind::lr) return input_dim + 1;
  return input_dim * kHiddenWidth + kHiddenWidth + kHiddenWidth + 1;
}

void WeightVector::check() const {
  if (values.size() != shape.param_count()) {
    throw Error(Errc::shape_mismatch, "weight vector has " + std::to_string(values.size()) +
                                          " values, shape needs " +
                                          std::to_string(shape.param_count()));
  }
  for (const double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::shape_mismatch, "weight vector has non-finite values");
  }
}

LrModel::LrModel(std::size_t input_dim, double lambda)
    : params_(input_dim + 1, 0.0), lambda_(lambda) {
  if (input_dim == 0) throw Error(Errc::invalid_argument, "input_dim must be positive");
}

MlpModel::MlpModel(std::size_t input_dim, double dropout_p)
    : input_dim_(input_dim),
      dropout_p_(dropout_p),
      params_(ModelShape{ModelKind::mlp, input_dim}.param_count(), 0.0) {
  if (input_dim == 0) throw Error(Errc::invalid_argument, "input_dim must be positive");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw Error(Errc::invalid_argument, "dropout_p must lie in [0, 1)");
  }
}

Model init_model(const ModelSpec& spec, Rng& rng) {
  if (spec.kind == ModelKind::lr) return LrModel(spec.input_dim, spec.lambda);
  MlpModel m(spec.input_dim, spec.dropout_p);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
  for (double& w : m.w1()) w = rng.uniform(-a1, a1);
  const double a2 = 1.0 / std::sqrt(static_cast<double>(kHiddenWidth));
  for (double& w : m.w2()) w = rng.uniform(-a2, a2);
  return m;
}

ModelShape shape_of(const Model& model) noexcept {
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        return ModelShape{std::is_same_v<T, LrModel> ? ModelKind::lr : ModelKind::mlp,
                          m.input_dim()};
      },
      model);
}

std::span<const double> params_of(const Model& model) noexcept {
  return std::visit([](const auto& m) { return m.params(); }, model);
}

std::span<double> params_of(Model& model) noexcept {
  return std::visit([](auto& m) { return m.params(); }, model);
}

void LabeledSet::add(std::span<const double> features, int label) {
  check_dim(dim, features.size());
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(label);
}

DropoutMask sample_dropout_mask(Rng& rng, std::size_t rows, double p) {
  DropoutMask mask;
  mask.rows = rows;
  mask.scale.resize(rows * kHiddenWidth);
  const double keep = 1.0 / (1.0 - p);
  for (double& s : mask.scale) s = rng.uniform() < p ? 0.0 : keep;
  return mask;
}

double predict_logit(const Model& model, std::span<const double> e,
                     std::span<const double> mask_row) {
  check_dim(shape_of(model).input_dim, e.size());
  if (const auto* lr = std::get_if<LrModel>(&model)) return lr_logit(*lr, e);
  return mlp_logit(std::get<MlpModel>(model), e, mask_row);
}

double predict(const Model& model, std::span<const double> e) {
  return sigmoid(predict_logit(model, e));
}

LossGrad loss_and_grad(const Model& model, const LabeledSet& data,
                       std::span<const std::size_t> batch, const DropoutMask* mask) {
  if (batch.empty()) throw Error(Errc::invalid_argument, "empty batch");
  const auto shape = shape_of(model);
  check_dim(shape.input_dim, data.dim);
  if (mask != nullptr && mask->rows < batch.size()) {
    throw Error(Errc::invalid_argument, "dropout mask has fewer rows than the batch");
  }
  LossGrad out;
  out.grad.shape = shape;
  out.grad.values.assign(shape.param_count(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;

  if (const auto* lr = std::get_if<LrModel>(&model)) {
    const std::size_t d = shape.input_dim;
    auto& g = out.grad.values;
    for (const auto idx : batch) {
      const auto x = data.row(idx);
      const int y = data.y[idx];
      const double z = lr_logit(*lr, x);
      loss += bce_from_logit(z, y);
      const double dz = (sigmoid(z) - y) * inv_n;
      for (std::size_t j = 0; j < d; ++j) {
        if (x[j] != 0.0) g[j] += dz * x[j];
      }
      g[d] += dz;
    }
    loss *= inv_n;
    double w2 = 0.0;
    const auto w = lr->w();
    for (std::size_t j = 0; j < d; ++j) {
      w2 += w[j] * w[j];
      g[j] += lr->lambda() * w[j];
    }
    loss += 0.5 * lr->lambda() * w2;
  } else {
    const auto& m = std::get<MlpModel>(model);
    const std::size_t d = shape.input_dim;
    double* g = out.grad.values.data();
    double* g_w1 = g;
    double* g_b1 = g + d * kHiddenWidth;
    double* g_w2 = g_b1 + kHiddenWidth;
    double* g_b2 = g_w2 + kHiddenWidth;
    const auto w2 = m.w2();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto idx = batch[i];
      const auto x = data.row(idx);
      const int y = data.y[idx];
      double z1[kHiddenWidth];
      double act[kHiddenWidth];
      mlp_hidden(m, x, z1);
      double z2 = m.b2();
      for (std::size_t h = 0; h < kHiddenWidth; ++h) {
        const double s = mask ? mask->row(i)[h] : 1.0;
        act[h] = (z1[h] > 0.0 ? z1[h] : 0.0) * s;
        z2 += w2[h] * act[h];
      }
      loss += bce_from_logit(z2, y);
      const double dz2 = (sigmoid(z2) - y) * inv_n;
      *g_b2 += dz2;
      double dz1[kHiddenWidth];
      for (std::size_t h = 0; h < kHiddenWidth; ++h) {
        g_w2[h] += dz2 * act[h];
        const double s = mask ? mask->row(i)[h] : 1.0;
        dz1[h] = z1[h] > 0.0 ? dz2 * w2[h] * s : 0.0;
        g_b1[h] += dz1[h];
      }
      for (std::size_t j = 0; j < d; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        double* row = g_w1 + j * kHiddenWidth;
        for (std::size_t h = 0; h < kHiddenWidth; ++h) row[h] += xj * dz1[h];
      }
    }
    loss *= inv_n;
  }
  if (!std::isfinite(loss)) throw Error(Errc::non_finite_loss, "loss is not finite");
  out.loss = loss;
  return out;
}

double mean_bce(const Model& model, const LabeledSet& data, std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (const auto idx : rows) total += bce_from_logit(predict_logit(model, data.row(idx)), data.y[idx]);
  return total / static_cast<double>(rows.size());
}

double mean_bce(const Model& model, const LabeledSet& data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += bce_from_logit(predict_logit(model, data.row(i)), data.y[i]);
  }
  return total / static_cast<double>(data.size());
}

WeightVector flatten(const Model& model) {
  const auto p = params_of(model);
  return WeightVector{shape_of(model), std::vector<double>(p.begin(), p.end())};
}

Model unflatten(const WeightVector& weights) {
  weights.check();
  Model m = weights.shape.kind == ModelKind::lr
                ? Model(LrModel(weights.shape.input_dim))
                : Model(MlpModel(weights.shape.input_dim));
  assign_params(m, weights);
  return m;
}

void assign_params(Model& model, const WeightVector& weights) {
  if (weights.shape != shape_of(model)) {
    throw Error(Errc::shape_mismatch, "weight vector shape differs from the model");
  }
  weights.check();
  auto p = params_of(model);
  std::copy(weights.values.begin(), weights.values.end(), p.begin());
}

void TrainConfig::validate() const {
  if (epochs < 0) throw Error(Errc::config_error, "train.epochs: must be non-negative");
  if (batch_size == 0) throw Error(Errc::config_error, "train.batch_size: must be positive");
  if (!(lr > 0.0)) throw Error(Errc::config_error, "train.lr: must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw Error(Errc::config_error, "train.beta1: must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw Error(Errc::config_error, "train.beta2: must lie in (0, 1)");
  if (!(eps > 0.0)) throw Error(Errc::config_error, "train.eps: must be positive");
  if (patience < 1) throw Error(Errc::config_error, "train.patience: must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 0.5)) {
    throw Error(Errc::config_error, "train.val_fraction: must lie in [0, 0.5)");
  }
}

void adam_step(std::span<double> weights, std::span<const double> grad, AdamState& state,
               const TrainConfig& cfg) {
  if (weights.size() != grad.size() || state.m.size() != grad.size() ||
      state.v.size() != grad.size()) {
    throw Error(Errc::dimension_mismatch, "Adam state, weights and gradient differ in length");
  }
  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    weights[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

}  // namespace fedalign
