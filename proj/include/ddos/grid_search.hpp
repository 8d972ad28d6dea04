#pragma once

// K-fold cross-validated grid search over RBF regressor hyperparameters.

#include <future>
#include <limits>
#include <ostream>
#include <vector>

#include "ddos/krr.hpp"
#include "ddos/random.hpp"
#include "ddos/svr.hpp"
#include "ddos/text.hpp"

namespace ddos {

enum class RegressorKind { krr, svr };

struct GridSpec {
  std::vector<double> C_values{0.1, 1, 10, 100};
  std::vector<double> gamma_values{0.01, 0.1, 1};
  std::vector<double> epsilon_values{0.01, 0.1};
  std::vector<double> lambda_values{0.001, 0.01, 0.1, 1};
  std::size_t folds = 3;

  void validate() const {
    auto check = [](const std::vector<double>& v, const char* name) {
      if (v.empty()) throw config_error(std::string(name) + " grid is empty");
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0) || !std::isfinite(v[i])) {
          throw config_error(std::string(name) + " grid values must be positive");
        }
        if (i > 0 && !(v[i] > v[i - 1])) {
          throw config_error(std::string(name) + " grid must be ascending");
        }
      }
    };
    check(C_values, "C");
    check(gamma_values, "gamma");
    check(epsilon_values, "epsilon");
    check(lambda_values, "lambda");
    if (folds < 2) throw config_error("folds must be at least 2");
  }
};

/// One hyperparameter combination. For KRR, C and epsilon are unused (0);
/// for SVR, lambda is unused (0).
struct GridCell {
  double C = 0;
  double gamma = 0;
  double epsilon = 0;
  double lambda = 0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct CvRow {
  std::size_t cell = 0;
  std::size_t fold = 0;
  double rmse = 0;
};

struct GridResult {
  RegressorKind kind = RegressorKind::krr;
  std::vector<GridCell> cells;       // iteration order
  std::vector<double> mean_rmse;     // per cell
  std::vector<CvRow> table;          // per cell and fold
  std::size_t best = 0;

  const GridCell& best_cell() const { return cells[best]; }
};

/// Cells in iteration order: C, then gamma, then epsilon (SVR) or lambda
/// (KRR), each ascending.
inline std::vector<GridCell> grid_cells(RegressorKind kind, const GridSpec& grid) {
  std::vector<GridCell> cells;
  if (kind == RegressorKind::krr) {
    for (double g : grid.gamma_values)
      for (double l : grid.lambda_values) cells.push_back({0, g, 0, l});
  } else {
    for (double c : grid.C_values)
      for (double g : grid.gamma_values)
        for (double e : grid.epsilon_values) cells.push_back({c, g, e, 0});
  }
  return cells;
}

/// Validation fold f holds shuffled positions [f*n/F, (f+1)*n/F).
inline std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t folds,
                                                           std::uint64_t seed) {
  if (n < folds) {
    throw config_error("grid search needs at least " + std::to_string(folds) + " samples");
  }
  auto rng = make_rng(seed, stream::folds);
  const auto order = shuffled_indices(n, rng);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(f * n / folds),
                  order.begin() + static_cast<std::ptrdiff_t>((f + 1) * n / folds));
  }
  return out;
}

/// Validation RMSE of one cell on one train/validation split. A singular
/// KRR system scores +inf rather than aborting the search.
inline double cv_fold_rmse(RegressorKind kind, const GridCell& cell, const Matrix& X_train,
                           const Vector& y_train, const Matrix& X_val, const Vector& y_val) {
  Vector pred;
  if (kind == RegressorKind::krr) {
    try {
      pred = krr_predict(krr_fit(X_train, y_train, cell.lambda, cell.gamma), X_val);
    } catch (const error& e) {
      if (e.kind() != error_kind::numeric) throw;
      return std::numeric_limits<double>::infinity();
    }
  } else {
    pred = svr_predict(svr_fit(X_train, y_train, cell.C, cell.epsilon, cell.gamma), X_val);
  }
  return std::sqrt((pred - y_val).squaredNorm() / static_cast<double>(y_val.size()));
}

inline GridResult grid_search(const Matrix& X, const Vector& y, RegressorKind kind,
                              const GridSpec& grid, std::uint64_t seed) {
  grid.validate();
  if (X.rows() != y.size()) throw contract_violation("grid_search: rows and targets differ");
  const auto n = static_cast<std::size_t>(X.rows());
  const auto folds = kfold_indices(n, grid.folds, seed);

  struct Split {
    Matrix X_train, X_val;
    Vector y_train, y_val;
  };
  std::vector<Split> splits(grid.folds);
  for (std::size_t f = 0; f < grid.folds; ++f) {
    std::vector<bool> in_val(n, false);
    for (auto i : folds[f]) in_val[i] = true;
    auto& s = splits[f];
    const auto n_val = static_cast<Eigen::Index>(folds[f].size());
    s.X_val.resize(n_val, X.cols());
    s.y_val.resize(n_val);
    s.X_train.resize(static_cast<Eigen::Index>(n) - n_val, X.cols());
    s.y_train.resize(static_cast<Eigen::Index>(n) - n_val);
    for (Eigen::Index k = 0; k < n_val; ++k) {
      const auto src = static_cast<Eigen::Index>(folds[f][static_cast<std::size_t>(k)]);
      s.X_val.row(k) = X.row(src);
      s.y_val(k) = y(src);
    }
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_val[i]) continue;
      s.X_train.row(k) = X.row(static_cast<Eigen::Index>(i));
      s.y_train(k) = y(static_cast<Eigen::Index>(i));
      ++k;
    }
  }

  GridResult result;
  result.kind = kind;
  result.cells = grid_cells(kind, grid);

  // Cells run concurrently; results land in fixed slots so the reduction
  // below sees them in iteration order regardless of completion order.
  std::vector<std::future<std::vector<double>>> pending;
  pending.reserve(result.cells.size());
  for (const auto& cell : result.cells) {
    pending.push_back(std::async(std::launch::async, [&, cell] {
      std::vector<double> scores;
      for (const auto& s : splits) {
        scores.push_back(cv_fold_rmse(kind, cell, s.X_train, s.y_train, s.X_val, s.y_val));
      }
      return scores;
    }));
  }
  result.mean_rmse.resize(result.cells.size());
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto scores = pending[c].get();
    double sum = 0;
    for (std::size_t f = 0; f < scores.size(); ++f) {
      result.table.push_back({c, f, scores[f]});
      sum += scores[f];
    }
    result.mean_rmse[c] = sum / static_cast<double>(scores.size());
    if (result.mean_rmse[c] < result.mean_rmse[result.best]) result.best = c;
  }
  return result;
}

/// `C,gamma,epsilon|lambda,fold,rmse` per cell and fold. The third column is
/// epsilon for SVR and lambda for KRR; KRR has no C and writes `na`.
inline void write_cv_table(std::ostream& out, const GridResult& result) {
  for (const auto& row : result.table) {
    const auto& cell = result.cells[row.cell];
    if (result.kind == RegressorKind::krr) {
      out << "na," << text::format_exact(cell.gamma) << ',' << text::format_exact(cell.lambda);
    } else {
      out << text::format_exact(cell.C) << ',' << text::format_exact(cell.gamma) << ','
          << text::format_exact(cell.epsilon);
    }
    out << ',' << row.fold << ',' << text::format_exact(row.rmse) << '\n';
  }
}

}  // namespace ddos
