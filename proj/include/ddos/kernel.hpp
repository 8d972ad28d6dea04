#pragma once

#include <cmath>
#include <string>

#include "ddos/scaler.hpp"

namespace ddos {

/// Gaussian RBF: exp(-gamma * ||x - z||^2).
template <typename A, typename B>
double rbf_kernel(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& z, double gamma) {
  if (x.size() != z.size()) {
    throw contract_violation("rbf_kernel: arity mismatch (" + std::to_string(x.size()) + " vs " +
                             std::to_string(z.size()) + ")");
  }
  double d2 = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x(i) - z(i);
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

/// K[i][j] = k(a_i, b_j) for the rows of a and b.
inline Matrix rbf_cross_gram(const Matrix& a, const Matrix& b, double gamma) {
  if (a.cols() != b.cols()) throw contract_violation("rbf_cross_gram: arity mismatch");
  Matrix K(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) K(i, j) = rbf_kernel(a.row(i), b.row(j), gamma);
  return K;
}

/// Symmetric Gram matrix with exact unit diagonal.
inline Matrix rbf_gram(const Matrix& X, double gamma) {
  const Eigen::Index n = X.rows();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      K(i, j) = K(j, i) = rbf_kernel(X.row(i), X.row(j), gamma);
    }
  }
  return K;
}

/// 1 / (d * feature variance), pooling all features of the training inputs.
inline double default_gamma(const Matrix& X) {
  const double n = static_cast<double>(X.size());
  if (n == 0) return 1.0;
  const double mean = X.mean();
  const double var = (X.array() - mean).square().sum() / n;
  if (!(var > 0)) return 1.0;
  return 1.0 / (static_cast<double>(X.cols()) * var);
}

inline void check_gamma(double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw config_error("gamma must be positive");
}

}  // namespace ddos
