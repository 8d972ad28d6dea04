#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ddos/error.hpp"

namespace ddos {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline void require_finite(const Matrix& X, const char* what) {
  if (!X.allFinite()) throw contract_violation(std::string(what) + " contains non-finite values");
}

/// Per-feature z-scoring. Constant features keep std 1 so they map to 0.
struct Standardizer {
  Vector mean;
  Vector std;

  static Standardizer fit(const Matrix& X) {
    Standardizer s;
    const auto n = static_cast<double>(X.rows());
    s.mean = X.colwise().mean().transpose();
    s.std.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double var = (X.col(j).array() - s.mean(j)).square().sum() / n;
      const double sd = std::sqrt(var);
      s.std(j) = sd > 0 ? sd : 1.0;
    }
    return s;
  }

  Eigen::Index arity() const noexcept { return mean.size(); }

  Matrix transform(const Matrix& X) const {
    if (X.cols() != arity()) {
      throw contract_violation("expected " + std::to_string(arity()) + " features, got " +
                               std::to_string(X.cols()));
    }
    return (X.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
  }
};

}  // namespace ddos
