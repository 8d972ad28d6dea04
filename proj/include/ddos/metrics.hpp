#pragma once

// Evaluation arithmetic. Confusion counts follow the convention used
// throughout this project's reports, which inverts the textbook naming:
//   fp = attack traffic classified as legitimate (a missed attack)
//   fn = legitimate traffic classified as attack (a false alarm)

#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "ddos/error.hpp"

namespace ddos {

struct Confusion {
  std::size_t tp = 0;  // attack -> attack
  std::size_t tn = 0;  // legitimate -> legitimate
  std::size_t fp = 0;  // attack -> legitimate
  std::size_t fn = 0;  // legitimate -> attack

  std::size_t total() const noexcept { return tp + tn + fp + fn; }

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct ClassificationScores {
  double accuracy_pct = 0;
  double fp_pct = 0;
  double fn_pct = 0;
  double f1 = 0;
};

inline Confusion confusion(std::span<const std::uint8_t> y_true,
                           std::span<const std::uint8_t> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw contract_violation("confusion: length mismatch (" + std::to_string(y_true.size()) +
                             " vs " + std::to_string(y_pred.size()) + ")");
  }
  if (y_true.empty()) throw contract_violation("confusion: empty input");
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool attack = y_true[i] != 0;
    const bool flagged = y_pred[i] != 0;
    if (attack && flagged) ++c.tp;
    else if (!attack && !flagged) ++c.tn;
    else if (attack) ++c.fp;
    else ++c.fn;
  }
  return c;
}

/// Percentages are of all evaluated samples. F1 is 1 for the degenerate
/// all-negative perfect case (tp = fp = fn = 0).
inline ClassificationScores classification_scores(const Confusion& c) {
  const auto total = static_cast<double>(c.total());
  if (c.total() == 0) throw contract_violation("classification_scores: empty confusion");
  ClassificationScores s;
  s.accuracy_pct = 100.0 * static_cast<double>(c.tp + c.tn) / total;
  s.fp_pct = 100.0 * static_cast<double>(c.fp) / total;
  s.fn_pct = 100.0 * static_cast<double>(c.fn) / total;
  const auto denom = 2 * c.tp + c.fp + c.fn;
  s.f1 = denom == 0 ? 1.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
  return s;
}

inline double rmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw contract_violation("rmse: length mismatch");
  if (y.empty()) throw contract_violation("rmse: empty input");
  double sse = 0;
  for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(sse / static_cast<double>(y.size()));
}

/// 1 - SSE/SST. Undefined for a constant target.
inline double r_squared(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw contract_violation("r_squared: length mismatch");
  if (y.size() < 2) throw contract_violation("r_squared: need at least 2 samples");
  double mean = 0;
  for (auto v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sse = 0, sst = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  if (sst == 0) throw error(error_kind::degenerate, "r_squared: constant target has no baseline");
  return 1.0 - sse / sst;
}

}  // namespace ddos
