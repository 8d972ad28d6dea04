#pragma once

// Binary logistic regression on standardized features, fitted by full-batch
// gradient descent on the L2-regularized cross-entropy.

#include <algorithm>
#include <functional>

#include "ddos/train_config.hpp"

namespace ddos {

struct LgrModel {
  Vector weights;
  double bias = 0;
  Standardizer scaler;

  Eigen::Index arity() const noexcept { return weights.size(); }
};

/// Called once per epoch with the objective value before that epoch's step.
using loss_observer = std::function<void(std::size_t epoch, double loss)>;

inline double lgr_objective(const Matrix& Xs, const Vector& y, const Vector& w, double b,
                            double l2) {
  const Vector z = (Xs * w).array() + b;
  double loss = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += bce_with_logit(z(i), y(i));
  return loss / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

/// The step is 1/L with L an upper bound on the objective's curvature
/// (0.25 * ||[X 1]||_F^2 / n + l2), so the loss never increases.
inline LgrModel lgr_fit(const Matrix& X, std::span<const std::uint8_t> y, const TrainConfig& cfg,
                        const loss_observer& observe = {}) {
  cfg.validate();
  detail::check_binary_training_set(X, y);
  LgrModel model;
  model.scaler = Standardizer::fit(X);
  const Matrix Xs = model.scaler.transform(X);
  const Vector t = detail::as_target(y);
  const double n = static_cast<double>(Xs.rows());

  const double curvature = 0.25 * (Xs.squaredNorm() / n + 1.0) + cfg.l2;
  const double step = 1.0 / curvature;

  Vector w = Vector::Zero(Xs.cols());
  double b = 0;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const Vector z = (Xs * w).array() + b;
    Vector residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) residual(i) = sigmoid(z(i)) - t(i);
    const Vector grad_w = Xs.transpose() * residual / n + cfg.l2 * w;
    const double grad_b = residual.sum() / n;
    if (observe) observe(epoch, lgr_objective(Xs, t, w, b, cfg.l2));
    const double max_grad = std::max(grad_w.cwiseAbs().maxCoeff(), std::abs(grad_b));
    if (max_grad <= cfg.tolerance) break;
    w -= step * grad_w;
    b -= step * grad_b;
  }
  model.weights = std::move(w);
  model.bias = b;
  return model;
}

inline BinaryPrediction lgr_predict(const LgrModel& model, const Matrix& X) {
  if (X.cols() != model.arity()) {
    throw contract_violation("lgr_predict: expected " + std::to_string(model.arity()) +
                             " features, got " + std::to_string(X.cols()));
  }
  const Vector z = (model.scaler.transform(X) * model.weights).array() + model.bias;
  BinaryPrediction out;
  out.probability.resize(static_cast<std::size_t>(z.size()));
  out.label.resize(out.probability.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.probability[k] = sigmoid(z(i));
    out.label[k] = decide(out.probability[k]);
  }
  return out;
}

}  // namespace ddos
