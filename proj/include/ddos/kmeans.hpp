#pragma once

// Lloyd's K-Means with seeded initialization, elbow-based choice of k, and
// the two-cluster to {legitimate, attack} label mapping.

#include <functional>
#include <limits>
#include <vector>

#include "ddos/random.hpp"
#include "ddos/train_config.hpp"

namespace ddos {

struct KMeansModel {
  Matrix centroids;  // k x d
  std::size_t k = 0;
  double wcss = 0;
  std::vector<std::uint8_t> label_map;  // cluster id -> label; empty when unmapped
  std::size_t iterations = 0;

  Eigen::Index arity() const noexcept { return centroids.cols(); }
};

/// Called after each assignment step with the within-cluster sum of squares.
using wcss_observer = std::function<void(std::size_t iteration, double wcss)>;

namespace detail {

inline std::size_t nearest_centroid(const Matrix& centroids, const Matrix& X, Eigen::Index row,
                                    double* dist_out = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (X.row(row) - centroids.row(c)).squaredNorm();
    if (d < best_d) {  // strict: ties stay with the lower id
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

inline double assign_all(const Matrix& centroids, const Matrix& X,
                         std::vector<std::size_t>& assignment) {
  double wcss = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double d = 0;
    assignment[static_cast<std::size_t>(i)] = nearest_centroid(centroids, X, i, &d);
    wcss += d;
  }
  return wcss;
}

/// k rows in seeded-random order, preferring rows with distinct values.
inline Matrix initial_centroids(const Matrix& X, std::size_t k, rng_t& rng) {
  const auto order = shuffled_indices(static_cast<std::size_t>(X.rows()), rng);
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(order.size(), false);
  for (std::size_t pos = 0; pos < order.size() && chosen.size() < k; ++pos) {
    const auto i = static_cast<Eigen::Index>(order[pos]);
    bool duplicate = false;
    for (auto c : chosen) {
      if (X.row(i) == X.row(static_cast<Eigen::Index>(c))) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      chosen.push_back(order[pos]);
      taken[pos] = true;
    }
  }
  for (std::size_t pos = 0; pos < order.size() && chosen.size() < k; ++pos) {
    if (!taken[pos]) chosen.push_back(order[pos]);
  }
  Matrix centroids(static_cast<Eigen::Index>(k), X.cols());
  for (std::size_t c = 0; c < k; ++c) {
    centroids.row(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(chosen[c]));
  }
  return centroids;
}

inline KMeansModel lloyd(const Matrix& X, std::size_t k, std::size_t max_iterations, rng_t& rng,
                         const wcss_observer& observe) {
  const auto n = static_cast<std::size_t>(X.rows());
  KMeansModel model;
  model.k = k;
  model.centroids = initial_centroids(X, k, rng);

  std::vector<std::size_t> assignment(n), previous;
  std::vector<std::size_t> sizes(k);
  double wcss = assign_all(model.centroids, X, assignment);
  if (observe) observe(0, wcss);

  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (auto a : assignment) ++sizes[a];

    // An empty cluster takes over the point farthest from its own centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      double far_d = 0;
      std::size_t far_i = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assignment[i]] < 2) continue;
        const auto r = static_cast<Eigen::Index>(i);
        const double d =
            (X.row(r) - model.centroids.row(static_cast<Eigen::Index>(assignment[i]))).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_i == n) continue;  // every point sits on its centroid
      --sizes[assignment[far_i]];
      assignment[far_i] = c;
      sizes[c] = 1;
      model.centroids.row(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(far_i));
    }

    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), X.cols());
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(assignment[i])) += X.row(static_cast<Eigen::Index>(i));
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        model.centroids.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(sizes[c]);
      }
    }

    previous = assignment;
    wcss = assign_all(model.centroids, X, assignment);
    if (observe) observe(it + 1, wcss);
    if (assignment == previous) {
      ++it;
      break;
    }
  }
  model.iterations = it;
  model.wcss = wcss;
  return model;
}

inline void check_arity(const KMeansModel& model, const Matrix& X) {
  if (X.cols() != model.arity()) {
    throw contract_violation("kmeans: expected " + std::to_string(model.arity()) +
                             " features, got " + std::to_string(X.cols()));
  }
}

}  // namespace detail

inline KMeansModel kmeans_fit(const Matrix& X, std::size_t k, const TrainConfig& cfg,
                              const wcss_observer& observe = {}) {
  cfg.validate();
  if (k == 0) throw config_error("k must be positive");
  if (static_cast<std::size_t>(X.rows()) < k) {
    throw training_error("kmeans needs at least k=" + std::to_string(k) + " points, got " +
                         std::to_string(X.rows()));
  }
  require_finite(X, "kmeans input");
  auto rng = make_rng(cfg.seed, stream::kmeans);
  return detail::lloyd(X, k, cfg.max_epochs, rng, observe);
}

/// Best (lowest wcss, earliest on ties) of `restarts` independently seeded runs.
inline KMeansModel kmeans_fit_best(const Matrix& X, std::size_t k, const TrainConfig& cfg,
                                   std::size_t restarts) {
  cfg.validate();
  if (restarts == 0) throw config_error("restarts must be positive");
  if (k == 0) throw config_error("k must be positive");
  if (static_cast<std::size_t>(X.rows()) < k) {
    throw training_error("kmeans needs at least k=" + std::to_string(k) + " points");
  }
  require_finite(X, "kmeans input");
  KMeansModel best;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto rng = make_rng(cfg.seed, stream::kmeans + (static_cast<std::uint64_t>(r) << 16));
    auto model = detail::lloyd(X, k, cfg.max_epochs, rng, {});
    if (r == 0 || model.wcss < best.wcss) best = std::move(model);
  }
  return best;
}

inline std::vector<std::size_t> kmeans_assign(const KMeansModel& model, const Matrix& X) {
  detail::check_arity(model, X);
  std::vector<std::size_t> ids(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    ids[static_cast<std::size_t>(i)] = detail::nearest_centroid(model.centroids, X, i);
  }
  return ids;
}

struct ElbowResult {
  std::vector<std::pair<std::size_t, double>> curve;  // (k, wcss)
  std::size_t chosen_k = 1;
};

inline constexpr std::size_t elbow_restarts = 5;

/// WCSS for k = 1..k_max and the k with the largest discrete second difference.
inline ElbowResult elbow_curve(const Matrix& X, std::size_t k_max, const TrainConfig& cfg) {
  if (k_max == 0) throw config_error("k_max must be positive");
  if (static_cast<std::size_t>(X.rows()) < k_max) {
    throw training_error("elbow needs at least k_max=" + std::to_string(k_max) + " points");
  }
  ElbowResult out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    out.curve.emplace_back(k, kmeans_fit_best(X, k, cfg, elbow_restarts).wcss);
  }
  if (k_max < 3) {
    out.chosen_k = k_max;
    return out;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k < k_max; ++k) {
    const double bend =
        out.curve[k - 2].second - 2.0 * out.curve[k - 1].second + out.curve[k].second;
    if (bend > best) {
      best = bend;
      out.chosen_k = k;
    }
  }
  return out;
}

/// The cluster with the higher mean centroid coordinate is the attack cluster;
/// on equal means cluster 1 is.
inline KMeansModel map_clusters_to_labels(KMeansModel model) {
  if (model.k != 2 || model.centroids.rows() != 2) {
    throw config_error("label mapping needs exactly 2 clusters, got " + std::to_string(model.k));
  }
  const double m0 = model.centroids.row(0).mean();
  const double m1 = model.centroids.row(1).mean();
  model.label_map = m0 > m1 ? std::vector<std::uint8_t>{1, 0} : std::vector<std::uint8_t>{0, 1};
  return model;
}

/// Cluster assignment pushed through the label map.
inline std::vector<std::uint8_t> kmeans_labels(const KMeansModel& model, const Matrix& X) {
  if (model.label_map.size() != model.k) throw contract_violation("kmeans model has no label map");
  const auto ids = kmeans_assign(model, X);
  std::vector<std::uint8_t> labels(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) labels[i] = model.label_map[ids[i]];
  return labels;
}

}  // namespace ddos
