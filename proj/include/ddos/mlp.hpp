#pragma once

// Three-layer perceptron: d inputs -> 6 ReLU units -> 1 sigmoid output,
// trained by mini-batch gradient descent on the binary cross-entropy.

#include <random>
#include <utility>

#include "ddos/random.hpp"
#include "ddos/train_config.hpp"

namespace ddos {

inline constexpr Eigen::Index mlp_hidden_width = 6;
inline constexpr Eigen::Index mlp_batch_size = 32;

/// Which detection features the network consumes; fixes the input width.
enum class MlpInput { counts = 1, frames = 12, frames_sigma = 13 };

inline Eigen::Index input_width(MlpInput input) noexcept {
  return static_cast<Eigen::Index>(input);
}

struct MlpModel {
  Matrix W1;   // hidden x d
  Vector b1;   // hidden
  Vector W2;   // hidden (the single output row)
  double b2 = 0;
  Standardizer scaler;

  Eigen::Index arity() const noexcept { return W1.cols(); }

  static MlpModel zeros(Eigen::Index d) {
    MlpModel m;
    m.W1 = Matrix::Zero(mlp_hidden_width, d);
    m.b1 = Vector::Zero(mlp_hidden_width);
    m.W2 = Vector::Zero(mlp_hidden_width);
    m.scaler.mean = Vector::Zero(d);
    m.scaler.std = Vector::Ones(d);
    return m;
  }
};

struct MlpGradient {
  Matrix W1;
  Vector b1;
  Vector W2;
  double b2 = 0;
};

/// Output logits for already-standardized rows.
inline Vector mlp_logits(const MlpModel& m, const Matrix& Xs) {
  const Matrix hidden = ((Xs * m.W1.transpose()).rowwise() + m.b1.transpose()).cwiseMax(0.0);
  return (hidden * m.W2).array() + m.b2;
}

/// Mean cross-entropy (plus 0.5*l2*||W||^2 on both weight matrices) over a
/// standardized batch, and its gradient by backpropagation.
inline std::pair<double, MlpGradient> mlp_loss_and_gradient(const MlpModel& m, const Matrix& Xs,
                                                            const Vector& y, double l2) {
  const double n = static_cast<double>(Xs.rows());
  const Matrix pre = (Xs * m.W1.transpose()).rowwise() + m.b1.transpose();
  const Matrix hidden = pre.cwiseMax(0.0);
  const Vector z = (hidden * m.W2).array() + m.b2;

  double loss = 0;
  Vector dz(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += bce_with_logit(z(i), y(i));
    dz(i) = (sigmoid(z(i)) - y(i)) / n;
  }
  loss = loss / n + 0.5 * l2 * (m.W1.squaredNorm() + m.W2.squaredNorm());

  MlpGradient g;
  g.W2 = hidden.transpose() * dz + l2 * m.W2;
  g.b2 = dz.sum();
  const Matrix dhidden =
      (dz * m.W2.transpose()).cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  g.W1 = dhidden.transpose() * Xs + l2 * m.W1;
  g.b1 = dhidden.colwise().sum().transpose();
  return {loss, std::move(g)};
}

inline MlpModel mlp_fit(const Matrix& X, std::span<const std::uint8_t> y, const TrainConfig& cfg,
                        MlpInput input) {
  cfg.validate();
  if (X.cols() != input_width(input)) {
    throw config_error("network input expects " + std::to_string(input_width(input)) +
                       " features, got " + std::to_string(X.cols()));
  }
  detail::check_binary_training_set(X, y);

  const Eigen::Index d = X.cols();
  MlpModel m = MlpModel::zeros(d);
  m.scaler = Standardizer::fit(X);
  const Matrix Xs = m.scaler.transform(X);
  const Vector t = detail::as_target(y);

  auto init_rng = make_rng(cfg.seed, stream::mlp_init);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(mlp_hidden_width));
  for (Eigen::Index r = 0; r < m.W1.rows(); ++r)
    for (Eigen::Index c = 0; c < d; ++c) m.W1(r, c) = unit(init_rng) * s1;
  for (Eigen::Index r = 0; r < mlp_hidden_width; ++r) m.W2(r) = unit(init_rng) * s2;

  auto batch_rng = make_rng(cfg.seed, stream::mlp_batches);
  const auto n = static_cast<std::size_t>(Xs.rows());
  Matrix xb;
  Vector yb;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto order = shuffled_indices(n, batch_rng);
    for (std::size_t start = 0; start < n; start += mlp_batch_size) {
      const auto len = std::min<std::size_t>(mlp_batch_size, n - start);
      xb.resize(static_cast<Eigen::Index>(len), d);
      yb.resize(static_cast<Eigen::Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        const auto src = static_cast<Eigen::Index>(order[start + k]);
        xb.row(static_cast<Eigen::Index>(k)) = Xs.row(src);
        yb(static_cast<Eigen::Index>(k)) = t(src);
      }
      const auto [loss, g] = mlp_loss_and_gradient(m, xb, yb, cfg.l2);
      m.W1 -= cfg.learning_rate * g.W1;
      m.b1 -= cfg.learning_rate * g.b1;
      m.W2 -= cfg.learning_rate * g.W2;
      m.b2 -= cfg.learning_rate * g.b2;
    }
  }
  return m;
}

inline BinaryPrediction mlp_predict(const MlpModel& model, const Matrix& X) {
  if (X.cols() != model.arity()) {
    throw contract_violation("mlp_predict: expected " + std::to_string(model.arity()) +
                             " features, got " + std::to_string(X.cols()));
  }
  const Vector z = mlp_logits(model, model.scaler.transform(X));
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
