#pragma once

// Feature matrices for detection, stratified train/test splitting, and SMOTE
// oversampling of the minority class.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ddos/framing.hpp"
#include "ddos/random.hpp"
#include "ddos/scaler.hpp"
#include "ddos/traffic.hpp"

namespace ddos {

struct DataSet {
  Matrix X;
  std::vector<std::uint8_t> y;
  std::vector<std::string> feature_names;

  std::size_t size() const noexcept { return y.size(); }

  void validate() const {
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
      throw contract_violation("dataset rows and labels differ");
    }
    if (static_cast<std::size_t>(X.cols()) != feature_names.size()) {
      throw contract_violation("dataset columns and feature names differ");
    }
    require_finite(X, "dataset");
  }

  DataSet rows(std::span<const std::size_t> idx) const {
    DataSet out;
    out.feature_names = feature_names;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    out.y.reserve(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.X.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(idx[k]));
      out.y.push_back(y[idx[k]]);
    }
    return out;
  }
};

enum class DetectionVariant { per_interval, frames, frames_sigma };

inline DataSet build_detection_dataset(const IntervalSeries& series, DetectionVariant variant) {
  series.validate();
  DataSet ds;
  if (variant == DetectionVariant::per_interval) {
    if (series.empty()) throw error(error_kind::empty_dataset, "series has no intervals");
    ds.X.resize(static_cast<Eigen::Index>(series.size()), 1);
    for (std::size_t i = 0; i < series.size(); ++i) {
      ds.X(static_cast<Eigen::Index>(i), 0) = static_cast<double>(series.counts[i]);
    }
    ds.y = series.labels;
    ds.feature_names = {"count"};
    return ds;
  }

  const bool with_sigma = variant == DetectionVariant::frames_sigma;
  FramingConfig fc;
  fc.with_sigma = with_sigma;
  const auto frames = make_frames(series, fc);
  if (frames.empty()) {
    throw error(error_kind::empty_dataset, "series is shorter than one 12-interval frame");
  }
  const Eigen::Index d = frame_width + (with_sigma ? 1 : 0);
  ds.X.resize(static_cast<Eigen::Index>(frames.size()), d);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto r = static_cast<Eigen::Index>(f);
    for (std::size_t j = 0; j < frame_width; ++j) {
      ds.X(r, static_cast<Eigen::Index>(j)) = static_cast<double>(frames[f].values[j]);
    }
    if (with_sigma) ds.X(r, frame_width) = *frames[f].sigma;
    ds.y.push_back(frames[f].label);
  }
  for (std::size_t j = 1; j <= frame_width; ++j) ds.feature_names.push_back("v" + std::to_string(j));
  if (with_sigma) ds.feature_names.push_back("sigma");
  return ds;
}

struct Split {
  DataSet train;
  DataSet test;
  std::vector<std::size_t> train_rows;  // source row of each train sample
  std::vector<std::size_t> test_rows;
};

/// Stratified split: rows are visited in one seeded random order and each
/// goes to train until its class has ceil(ratio * class size) there.
inline Split split_train_test(const DataSet& data, double ratio, std::uint64_t seed) {
  data.validate();
  if (!(ratio > 0 && ratio < 1)) throw config_error("split ratio must lie in (0,1)");
  std::size_t class_size[2] = {0, 0};
  for (auto v : data.y) {
    if (v > 1) throw contract_violation("labels must be 0 or 1");
    ++class_size[v];
  }
  if (class_size[0] < 2 || class_size[1] < 2) {
    throw config_error("stratified split needs at least 2 samples of each class (have " +
                       std::to_string(class_size[0]) + "/" + std::to_string(class_size[1]) + ")");
  }
  std::size_t quota[2];
  for (int c = 0; c < 2; ++c) {
    quota[c] = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(class_size[c])));
  }
  auto rng = make_rng(seed, stream::split);
  Split out;
  for (auto i : shuffled_indices(data.size(), rng)) {
    auto& q = quota[data.y[i]];
    if (q > 0) {
      --q;
      out.train_rows.push_back(i);
    } else {
      out.test_rows.push_back(i);
    }
  }
  out.train = data.rows(out.train_rows);
  out.test = data.rows(out.test_rows);
  return out;
}

/// Oversamples the minority class to parity. Original rows come first and are
/// left untouched; synthetic rows are appended. The neighbour count is capped
/// at minority size - 1.
inline DataSet smote_balance(const DataSet& train, std::size_t k, std::uint64_t seed) {
  train.validate();
  if (k == 0) throw config_error("smote k must be positive");
  std::vector<std::size_t> members[2];
  for (std::size_t i = 0; i < train.size(); ++i) members[train.y[i] != 0].push_back(i);
  if (members[0].size() == members[1].size()) return train;

  const std::uint8_t minority_label = members[0].size() < members[1].size() ? 0 : 1;
  const auto& minority = members[minority_label];
  const std::size_t needed = members[1 - minority_label].size() - minority.size();
  if (minority.size() < 2) {
    throw error(error_kind::balancing, "smote needs at least 2 minority samples, have " +
                                           std::to_string(minority.size()));
  }
  const std::size_t kk = std::min(k, minority.size() - 1);

  // k nearest minority neighbours of each minority row (ties by index).
  const std::size_t m = minority.size();
  std::vector<std::vector<std::size_t>> neighbours(m);
  std::vector<std::pair<double, std::size_t>> dist(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double d = a == b ? std::numeric_limits<double>::infinity()
                              : (train.X.row(static_cast<Eigen::Index>(minority[a])) -
                                 train.X.row(static_cast<Eigen::Index>(minority[b])))
                                    .squaredNorm();
      dist[b] = {d, b};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    for (std::size_t r = 0; r < kk; ++r) neighbours[a].push_back(dist[r].second);
  }

  DataSet out = train;
  out.X.conservativeResize(static_cast<Eigen::Index>(train.size() + needed), Eigen::NoChange);
  out.y.resize(train.size() + needed, minority_label);
  auto rng = make_rng(seed, stream::smote);
  std::uniform_int_distribution<std::size_t> pick_base(0, m - 1);
  std::uniform_int_distribution<std::size_t> pick_nn(0, kk - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < needed; ++s) {
    const std::size_t a = pick_base(rng);
    const std::size_t b = neighbours[a][pick_nn(rng)];
    const double u = unit(rng);
    const auto base = train.X.row(static_cast<Eigen::Index>(minority[a]));
    const auto nn = train.X.row(static_cast<Eigen::Index>(minority[b]));
    out.X.row(static_cast<Eigen::Index>(train.size() + s)) = base + u * (nn - base);
  }
  return out;
}

}  // namespace ddos
