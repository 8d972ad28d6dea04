#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddos/error.hpp"
#include "ddos/scaler.hpp"

namespace ddos {

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t max_epochs = 200;
  double tolerance = 1e-6;
  double l2 = 1e-4;
  std::uint64_t seed = 42;

  void validate() const {
    if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
      throw config_error("learning_rate must be positive");
    }
    if (max_epochs == 0) throw config_error("max_epochs must be positive");
    if (!(tolerance > 0)) throw config_error("tolerance must be positive");
    if (!(l2 >= 0) || !std::isfinite(l2)) throw config_error("l2 must be non-negative");
  }
};

struct BinaryPrediction {
  std::vector<double> probability;
  std::vector<std::uint8_t> label;  // 1 iff probability >= 0.5
};

inline double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Binary cross-entropy of a logit, computed without overflow.
inline double bce_with_logit(double z, double y) noexcept {
  return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
}

inline std::uint8_t decide(double probability) noexcept { return probability >= 0.5 ? 1 : 0; }

namespace detail {

inline void check_binary_training_set(const Matrix& X, std::span<const std::uint8_t> y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw contract_violation("feature rows and labels differ in length");
  }
  if (X.rows() < 2) throw training_error("need at least 2 training samples");
  require_finite(X, "training features");
  bool seen[2] = {false, false};
  for (auto v : y) {
    if (v > 1) throw contract_violation("labels must be 0 or 1");
    seen[v] = true;
  }
  if (!seen[0] || !seen[1]) throw training_error("degenerate labels: only one class present");
}

inline Vector as_target(std::span<const std::uint8_t> y) {
  Vector t(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) t(static_cast<Eigen::Index>(i)) = y[i];
  return t;
}

}  // namespace detail

}  // namespace ddos
