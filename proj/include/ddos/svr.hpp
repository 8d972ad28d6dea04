#pragma once

// Epsilon-insensitive support vector regression with the RBF kernel.
//
// The dual is solved over 2n box-constrained variables (a_i for the upper
// tube edge, a*_i for the lower one):
//
//   min  0.5 (a - a*)' K (a - a*) + eps * sum(a + a*) - y' (a - a*)
//   s.t. 0 <= a, a* <= C,  sum(a - a*) = 0
//
// by sequential pairwise optimization: take the maximal KKT violator, pair it
// with the partner giving the largest second-order decrease, solve the
// two-variable subproblem in closed form, repeat until the maximal violation
// falls below the tolerance.

#include <algorithm>
#include <limits>
#include <tuple>
#include <vector>

#include "ddos/kernel.hpp"

namespace ddos {

struct SvrModel {
  Vector dual_deltas;  // a_i - a*_i, each in [-C, C]
  double bias = 0;
  Matrix train_inputs;
  double C = 1.0;
  double epsilon = 0.1;
  double gamma = 1.0;

  bool converged = false;
  double final_violation = 0;
  std::size_t iterations = 0;

  Eigen::Index arity() const noexcept { return train_inputs.cols(); }
};

struct SvrOptions {
  double tolerance = 1e-3;         // on the maximal pairwise KKT violation
  std::size_t max_iterations = 0;  // 0 means 1000 * n
};

namespace detail {

class SvrSolver {
 public:
  SvrSolver(const Matrix& K, const Vector& y, double C, double epsilon)
      : K_(K), C_(C), n_(static_cast<std::size_t>(y.size())) {
    const std::size_t m = 2 * n_;
    alpha_.assign(m, 0.0);
    grad_.resize(m);
    sign_.resize(m);
    for (std::size_t t = 0; t < n_; ++t) {
      const double yt = y(static_cast<Eigen::Index>(t));
      sign_[t] = 1.0;
      grad_[t] = epsilon - yt;
      sign_[t + n_] = -1.0;
      grad_[t + n_] = epsilon + yt;
    }
  }

  // Returns the number of pair updates performed.
  std::size_t run(double tolerance, std::size_t max_iterations) {
    std::size_t it = 0;
    for (; it < max_iterations; ++it) {
      const auto [i, j, gap] = select_pair();
      violation_ = gap;
      if (gap <= tolerance) {
        converged_ = true;
        return it;
      }
      update_pair(i, j);
    }
    violation_ = std::get<2>(select_pair());
    converged_ = violation_ <= tolerance;
    return it;
  }

  bool converged() const noexcept { return converged_; }
  double violation() const noexcept { return violation_; }

  Vector deltas() const {
    Vector d(static_cast<Eigen::Index>(n_));
    for (std::size_t t = 0; t < n_; ++t) d(static_cast<Eigen::Index>(t)) = alpha_[t] - alpha_[t + n_];
    return d;
  }

  /// Bias from the KKT conditions: average over free variables, or the
  /// midpoint of the feasible interval when none is free.
  double bias() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -ub;
    double sum_free = 0;
    std::size_t free = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double yg = sign_[t] * grad_[t];
      if (at_upper(t)) {
        if (sign_[t] < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (sign_[t] > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++free;
        sum_free += yg;
      }
    }
    const double rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
    return -rho;
  }

 private:
  double q(std::size_t s, std::size_t t) const {
    return sign_[s] * sign_[t] *
           K_(static_cast<Eigen::Index>(s % n_), static_cast<Eigen::Index>(t % n_));
  }
  bool at_upper(std::size_t t) const { return alpha_[t] >= C_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0; }
  bool in_up(std::size_t t) const { return sign_[t] > 0 ? !at_upper(t) : !at_lower(t); }
  bool in_low(std::size_t t) const { return sign_[t] > 0 ? !at_lower(t) : !at_upper(t); }

  // i is the maximal violator; j is picked among the variables violating
  // together with i by the largest second-order decrease of the objective.
  // The returned gap is the maximal violation max_up - min_low.
  std::tuple<std::size_t, std::size_t, double> select_pair() const {
    constexpr double tau = 1e-12;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    std::size_t i = 0, j = 0;
    bool have_i = false;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      if (in_up(t) && -sign_[t] * grad_[t] > g_max) {
        g_max = -sign_[t] * grad_[t];
        i = t;
        have_i = true;
      }
    }
    double best_gain = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      if (!in_low(t)) continue;
      const double v = -sign_[t] * grad_[t];
      g_min = std::min(g_min, v);
      if (!have_i) continue;
      const double b = g_max - v;
      if (b > 0) {
        double a = q(i, i) + q(t, t) - 2.0 * sign_[i] * sign_[t] * q(i, t);
        if (a <= 0) a = tau;
        const double gain = -(b * b) / a;
        if (gain <= best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (!std::isfinite(g_max) || !std::isfinite(g_min)) return {i, j, 0.0};
    return {i, j, g_max - g_min};
  }

  void update_pair(std::size_t i, std::size_t j) {
    constexpr double tau = 1e-12;
    const double old_i = alpha_[i], old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    const double qij = q(i, j);
    if (sign_[i] != sign_[j]) {
      double quad = q(i, i) + q(j, j) + 2 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) { aj = 0; ai = diff; }
      } else {
        if (ai < 0) { ai = 0; aj = -diff; }
      }
      if (diff > 0) {
        if (ai > C_) { ai = C_; aj = C_ - diff; }
      } else {
        if (aj > C_) { aj = C_; ai = C_ + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C_) {
        if (ai > C_) { ai = C_; aj = sum - C_; }
      } else {
        if (aj < 0) { aj = 0; ai = sum; }
      }
      if (sum > C_) {
        if (aj > C_) { aj = C_; ai = sum - C_; }
      } else {
        if (ai < 0) { ai = 0; aj = sum; }
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    for (std::size_t t = 0; t < 2 * n_; ++t) grad_[t] += q(t, i) * di + q(t, j) * dj;
  }

  const Matrix& K_;
  double C_;
  std::size_t n_;
  std::vector<double> alpha_, grad_, sign_;
  bool converged_ = false;
  double violation_ = std::numeric_limits<double>::infinity();
};

}  // namespace detail

/// Never throws on non-convergence: the model carries `converged` and the
/// final violation, and the caller decides what to do.
inline SvrModel svr_fit(const Matrix& X, const Vector& y, double C, double epsilon, double gamma,
                        const SvrOptions& options = {}) {
  if (X.rows() < 2) throw training_error("svr needs at least 2 samples");
  if (X.rows() != y.size()) throw contract_violation("svr_fit: rows and targets differ");
  if (!(C > 0) || !std::isfinite(C)) throw config_error("C must be positive");
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) throw config_error("epsilon must be non-negative");
  check_gamma(gamma);
  require_finite(X, "svr inputs");
  if (!y.allFinite()) throw contract_violation("svr targets contain non-finite values");

  const Matrix K = rbf_gram(X, gamma);
  detail::SvrSolver solver(K, y, C, epsilon);
  const std::size_t cap =
      options.max_iterations ? options.max_iterations : 1000 * static_cast<std::size_t>(X.rows());

  SvrModel model;
  model.iterations = solver.run(options.tolerance, cap);
  model.converged = solver.converged();
  model.final_violation = solver.violation();
  model.dual_deltas = solver.deltas();
  model.bias = solver.bias();
  model.train_inputs = X;
  model.C = C;
  model.epsilon = epsilon;
  model.gamma = gamma;
  return model;
}

inline Vector svr_predict(const SvrModel& model, const Matrix& X) {
  if (X.cols() != model.arity()) {
    throw contract_violation("svr_predict: expected " + std::to_string(model.arity()) +
                             " features, got " + std::to_string(X.cols()));
  }
  return (rbf_cross_gram(X, model.train_inputs, model.gamma) * model.dual_deltas).array() +
         model.bias;
}

/// 0.5 d'Kd + eps*||d||_1 - y'd at the model's dual point.
inline double svr_dual_objective(const SvrModel& model, const Vector& y) {
  const Matrix K = rbf_gram(model.train_inputs, model.gamma);
  const Vector& d = model.dual_deltas;
  return 0.5 * d.dot(K * d) + model.epsilon * d.cwiseAbs().sum() - y.dot(d);
}

}  // namespace ddos
