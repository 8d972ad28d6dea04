#pragma once

// Kernel ridge regression with the RBF kernel, solved densely.

#include <algorithm>

#include "ddos/kernel.hpp"

namespace ddos {

struct KrrModel {
  Vector alphas;
  Matrix train_inputs;
  double lambda = 1.0;
  double gamma = 1.0;

  Eigen::Index arity() const noexcept { return train_inputs.cols(); }
};

inline double krr_residual_bound(const Vector& y) {
  return 1e-8 * std::max(1.0, y.size() ? y.cwiseAbs().maxCoeff() : 0.0);
}

/// Solves (K + lambda I) alpha = y by Cholesky, with a few steps of iterative
/// refinement. Throws a numeric error if the residual bound cannot be met.
inline KrrModel krr_fit(const Matrix& X, const Vector& y, double lambda, double gamma) {
  if (X.rows() < 1) throw training_error("krr needs at least one sample");
  if (X.rows() != y.size()) throw contract_violation("krr_fit: rows and targets differ");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw config_error("lambda must be non-negative");
  check_gamma(gamma);
  require_finite(X, "krr inputs");
  if (!y.allFinite()) throw contract_violation("krr targets contain non-finite values");

  KrrModel model;
  model.train_inputs = X;
  model.lambda = lambda;
  model.gamma = gamma;

  Matrix A = rbf_gram(X, gamma);
  A.diagonal().array() += lambda;
  const double bound = krr_residual_bound(y);

  auto refine = [&](const auto& factor) {
    Vector a = factor.solve(y);
    for (int step = 0; step < 3 && (A * a - y).cwiseAbs().maxCoeff() > bound; ++step) {
      a += factor.solve(y - A * a);
    }
    return a;
  };
  Vector alpha;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) {
    alpha = refine(llt);
  } else {
    // Positive semi-definite at best (lambda = 0); pivoted LDL^T still works
    // when the kernel matrix is numerically nonsingular.
    Eigen::LDLT<Matrix> ldlt(A);
    if (ldlt.info() == Eigen::Success) alpha = refine(ldlt);
  }
  if (alpha.size() != y.size() || !alpha.allFinite() ||
      (A * alpha - y).cwiseAbs().maxCoeff() > bound) {
    throw numeric_error("krr: kernel system is singular or ill-conditioned (lambda=" +
                        std::to_string(lambda) + ")");
  }
  model.alphas = std::move(alpha);
  return model;
}

inline Vector krr_predict(const KrrModel& model, const Matrix& X) {
  if (X.cols() != model.arity()) {
    throw contract_violation("krr_predict: expected " + std::to_string(model.arity()) +
                             " features, got " + std::to_string(X.cols()));
  }
  return rbf_cross_gram(X, model.train_inputs, model.gamma) * model.alphas;
}

}  // namespace ddos
