#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "ddos/pipeline.hpp"

using namespace ddos;

namespace {

DataSet labelled(std::size_t n, std::size_t minority, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  DataSet ds;
  ds.X.resize(Eigen::Index(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const bool attack = i < minority;
    ds.X(Eigen::Index(i), 0) = g(rng) + (attack ? 6 : 0);
    ds.X(Eigen::Index(i), 1) = g(rng);
    ds.y.push_back(attack);
  }
  ds.feature_names = {"a", "b"};
  return ds;
}

IntervalSeries small_reference(std::size_t n = 2400, std::uint64_t seed = 42) {
  SynthesisConfig cfg;
  cfg.n_intervals = n;
  cfg.seed = seed;
  return inject_attacks(generate_baseline(cfg), cfg);
}

std::size_t count_label(const std::vector<std::uint8_t>& y, std::uint8_t v) {
  return std::size_t(std::count(y.begin(), y.end(), v));
}

std::string without_timing(const EvalReport& r) {
  std::ostringstream out;
  write_report(out, r);
  std::istringstream in(out.str());
  std::string kept;
  for (const auto& [k, v] : read_report(in)) {
    if (is_timing_key(k)) continue;
    kept += k + "=" + v + "\n";
  }
  return kept;
}

}  // namespace

// ---- dataset building ------------------------------------------------------

TEST(DetectionDataset, FramesFromTwentyFourIntervals) {
  IntervalSeries s;
  for (int i = 0; i < 24; ++i) {
    s.counts.push_back(i);
    s.labels.push_back(i == 20);
  }
  const auto ds = build_detection_dataset(s, DetectionVariant::frames);
  EXPECT_EQ(ds.X.rows(), 2);
  EXPECT_EQ(ds.X.cols(), 12);
  EXPECT_EQ(ds.y, (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(ds.X(1, 0), 12.0);

  const auto sig = build_detection_dataset(s, DetectionVariant::frames_sigma);
  ASSERT_EQ(sig.X.cols(), 13);
  EXPECT_EQ(sig.feature_names.back(), "sigma");
  EXPECT_NEAR(sig.X(0, 12), std::sqrt(143.0 / 12.0), 1e-12);  // 0..11

  const auto per = build_detection_dataset(s, DetectionVariant::per_interval);
  EXPECT_EQ(per.X.rows(), 24);
  EXPECT_EQ(per.X.cols(), 1);
  EXPECT_EQ(per.y, s.labels);
}

TEST(DetectionDataset, TooShortForAFrame) {
  IntervalSeries s;
  s.counts.assign(11, 3);
  s.labels.assign(11, 0);
  try {
    build_detection_dataset(s, DetectionVariant::frames);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::empty_dataset);
  }
}

// ---- splitting -------------------------------------------------------------

TEST(Split, TenBalancedSamples) {
  const auto split = split_train_test(labelled(10, 5), 0.8, 42);
  EXPECT_EQ(split.train.size(), 8u);
  EXPECT_EQ(split.test.size(), 2u);
  EXPECT_EQ(count_label(split.test.y, 1), 1u);
}

TEST(Split, StratifiesTheMinority) {
  const auto split = split_train_test(labelled(100, 10), 0.8, 7);
  EXPECT_EQ(split.test.size(), 20u);
  EXPECT_EQ(count_label(split.test.y, 1), 2u);
  EXPECT_EQ(count_label(split.train.y, 1), 8u);
}

TEST(Split, PartitionsRowsDeterministically) {
  const auto ds = labelled(57, 13);
  const auto a = split_train_test(ds, 0.8, 3);
  const auto b = split_train_test(ds, 0.8, 3);
  EXPECT_EQ(a.train_rows, b.train_rows);
  std::set<std::size_t> all(a.train_rows.begin(), a.train_rows.end());
  all.insert(a.test_rows.begin(), a.test_rows.end());
  EXPECT_EQ(all.size(), 57u);
  for (std::size_t k = 0; k < a.test_rows.size(); ++k)
    EXPECT_EQ(a.test.X.row(Eigen::Index(k)), ds.X.row(Eigen::Index(a.test_rows[k])));
}

TEST(Split, RejectsBadInput) {
  EXPECT_THROW(split_train_test(labelled(10, 5), 1.0, 1), error);
  EXPECT_THROW(split_train_test(labelled(10, 1), 0.8, 1), error);
}

// ---- SMOTE -----------------------------------------------------------------

TEST(Smote, BalancedInputIsUnchanged) {
  const auto ds = labelled(20, 10);
  const auto out = smote_balance(ds, 5, 1);
  EXPECT_EQ(out.X, ds.X);
  EXPECT_EQ(out.y, ds.y);
}

TEST(Smote, OversamplesToParityWithConvexCombinations) {
  const auto ds = labelled(100, 10);
  const auto out = smote_balance(ds, 5, 9);
  EXPECT_EQ(count_label(out.y, 0), 90u);
  EXPECT_EQ(count_label(out.y, 1), 90u);
  EXPECT_EQ(out.X.topRows(100), ds.X);  // originals untouched and first

  // Each synthetic row lies on a segment between two minority rows.
  for (Eigen::Index s = 100; s < out.X.rows(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < 10; ++a) {
      for (Eigen::Index b = 0; b < 10; ++b) {
        if (a == b) continue;
        const Vector pa = ds.X.row(a), pb = ds.X.row(b), q = out.X.row(s);
        const Vector dir = pb - pa;
        const double u = std::clamp((q - pa).dot(dir) / dir.squaredNorm(), 0.0, 1.0);
        best = std::min(best, (pa + u * dir - q).norm());
      }
    }
    EXPECT_LE(best, 1e-9);
  }
}

TEST(Smote, FailsWithOneMinoritySample) {
  try {
    smote_balance(labelled(10, 1), 5, 1);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::balancing);
  }
}

// ---- detection runs --------------------------------------------------------

TEST(Detection, SemiSupervisedWithTrueLabelsEqualsSupervised) {
  const auto s = small_reference();
  for (auto kind : {ModelKind::kmeans_lgr, ModelKind::kmeans_ann_frames}) {
    const auto semi_cfg = ExperimentConfig::for_kind(kind);
    const auto sup_cfg = ExperimentConfig::for_kind(supervised_stage(kind));
    auto semi = run_semi_supervised_with_labels(s, s.labels, semi_cfg);
    auto sup = run_supervised(s, sup_cfg);
    EXPECT_EQ(semi.confusion, sup.confusion);
    EXPECT_EQ(semi.n_train, sup.n_train);
    // Reports differ only in the model name and its echo.
    semi.model = sup.model;
    semi.config = sup.config;
    EXPECT_EQ(without_timing(semi), without_timing(sup));
  }
}

TEST(Detection, UnsupervisedLabelsFollowNearestCentroid) {
  const auto s = small_reference(1200);
  const auto cfg = ExperimentConfig::for_kind(ModelKind::kmeans);
  KMeansModel model;
  const auto labels = cluster_labels(s, cfg.train_cfg, &model);
  const double attack_c = model.centroids(model.label_map[0] == 1 ? 0 : 1, 0);
  const double legit_c = model.centroids(model.label_map[0] == 1 ? 1 : 0, 0);
  EXPECT_GT(attack_c, legit_c);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = double(s.counts[i]);
    const bool nearer_attack = std::abs(x - attack_c) < std::abs(x - legit_c);
    EXPECT_EQ(labels[i], nearer_attack ? 1 : 0) << "interval " << i;
  }
  const auto report = run_unsupervised(s, cfg);
  EXPECT_EQ(report.confusion, confusion(s.labels, labels));
}

TEST(Detection, ConstantTrafficIsDegenerate) {
  IntervalSeries s;
  s.counts.assign(100, 50);
  s.labels.assign(100, 0);
  try {
    run_unsupervised(s, ExperimentConfig::for_kind(ModelKind::kmeans));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::degenerate);
  }
}

TEST(Detection, EmptySeriesIsAnError) {
  const IntervalSeries s;
  for (auto kind : {ModelKind::lgr, ModelKind::kmeans, ModelKind::kmeans_lgr}) {
    try {
      run_experiment(s, ExperimentConfig::for_kind(kind));
      FAIL() << to_string(kind);
    } catch (const error& e) {
      EXPECT_EQ(e.kind(), error_kind::empty_dataset) << to_string(kind);
    }
  }
}

TEST(Detection, StoredDetectorReproducesPredictions) {
  const auto s = small_reference(1200);
  for (auto kind : {ModelKind::lgr, ModelKind::kmeans, ModelKind::kmeans_ann_frames_sigma}) {
    const auto cfg = ExperimentConfig::for_kind(kind);
    const auto d = train_detector(s, cfg);
    std::stringstream buf;
    for (const auto& r : to_records(d)) write_record(buf, r);
    const auto loaded = detector_from_records(kind, read_records(buf));
    EXPECT_EQ(without_timing(evaluate_detector(loaded, s, cfg)),
              without_timing(evaluate_detector(d, s, cfg)));
  }
}

TEST(Detection, ReportsAreReproducible) {
  const auto s = small_reference(1200);
  const auto cfg = ExperimentConfig::for_kind(ModelKind::ann_frames_sigma);
  EXPECT_EQ(without_timing(run_experiment(s, cfg)), without_timing(run_experiment(s, cfg)));
}

TEST(ModelKinds, NamesRoundTrip) {
  for (const auto& [kind, name] : model_kind_names) {
    EXPECT_EQ(parse_model_kind(name), kind);
    EXPECT_EQ(to_string(kind), name);
  }
  EXPECT_THROW(parse_model_kind("forest"), error);
}

// ---- forecasting -----------------------------------------------------------

TEST(Forecast, PeriodOfASquareWave) {
  std::vector<double> status(400);
  for (std::size_t i = 0; i < status.size(); ++i) status[i] = i % 40 < 6;
  EXPECT_EQ(estimate_period(status), 40u);
  EXPECT_EQ(estimate_period(std::vector<double>(30, 1.0)), 30u);
}

TEST(Forecast, ChronologicalSplit) {
  SynthesisConfig cfg;
  cfg.n_intervals = 300;
  const auto s = inject_periodic_attacks(generate_baseline(cfg), cfg, 30);
  const auto out = run_prediction(s, ExperimentConfig::for_kind(ModelKind::krr));
  EXPECT_EQ(out.report.n_train, 240u);
  EXPECT_EQ(out.report.n_test, 60u);
  ASSERT_EQ(out.series.size(), 60u);
  EXPECT_EQ(out.series.front().t_s, s.start_time(240));
  for (std::size_t i = 0; i < out.series.size(); ++i)
    EXPECT_EQ(out.series[i].actual, double(s.labels[240 + i]));
  EXPECT_EQ(out.forecaster.features.period_s, 300.0);
}

TEST(Forecast, GridDoesNotApplyToLogistic) {
  SynthesisConfig cfg;
  cfg.n_intervals = 200;
  const auto s = inject_periodic_attacks(generate_baseline(cfg), cfg, 20);
  auto ecfg = ExperimentConfig::for_kind(ModelKind::lgr_reg);
  ecfg.grid = GridSpec{};
  try {
    run_prediction(s, ecfg);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::config);
  }
}

TEST(Forecast, StoredForecasterReproducesPredictions) {
  SynthesisConfig cfg;
  cfg.n_intervals = 300;
  const auto s = inject_periodic_attacks(generate_baseline(cfg), cfg, 30);
  for (auto kind : {ModelKind::krr, ModelKind::svr, ModelKind::lgr_reg}) {
    const auto out = run_prediction(s, ExperimentConfig::for_kind(kind));
    std::stringstream buf;
    for (const auto& r : to_records(out.forecaster)) write_record(buf, r);
    const auto loaded = forecaster_from_records(kind, read_records(buf));
    std::vector<std::int64_t> times;
    for (const auto& p : out.series) times.push_back(p.t_s);
    const Vector raw = loaded.predict_raw(times);
    for (std::size_t i = 0; i < times.size(); ++i)
      EXPECT_EQ(raw(Eigen::Index(i)), out.series[i].predicted_raw);
  }
}

TEST(Forecast, ScoresAgainstHandValues) {
  // A forecaster that always answers 0.5 on a 0/1 target: rmse 0.5, r2 0.
  Forecaster f;
  f.kind = ModelKind::krr;
  f.features.period_s = 20;
  f.features.scaler.mean = Vector::Zero(2);
  f.features.scaler.std = Vector::Ones(2);
  KrrModel k;
  k.train_inputs = Matrix::Zero(1, 2);
  k.alphas = Vector::Constant(1, 0.5);
  k.gamma = 1e-300;  // kernel is 1 everywhere
  f.krr = k;
  const std::vector<std::int64_t> times = {0, 10};
  const std::vector<double> status = {0, 1};
  const auto r = score_forecast(f, times, status, ExperimentConfig::for_kind(ModelKind::krr));
  EXPECT_DOUBLE_EQ(*r.rmse, 0.5);
  EXPECT_DOUBLE_EQ(*r.r2, 0.0);
}

TEST(Report, OmitsRSquaredForConstantTarget) {
  EvalReport r;
  r.model = "krr";
  r.rmse = 0.25;
  std::ostringstream out;
  write_report(out, r);
  EXPECT_EQ(out.str().find("r2="), std::string::npos);
  EXPECT_NE(out.str().find("rmse=0.250000"), std::string::npos);
}
