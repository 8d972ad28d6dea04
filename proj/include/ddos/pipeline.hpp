#pragma once

// Experiment orchestration: supervised, unsupervised and semi-supervised
// detection, and attack forecasting, each producing an EvalReport.

#include <array>
#include <chrono>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ddos/dataset.hpp"
#include "ddos/grid_search.hpp"
#include "ddos/kmeans.hpp"
#include "ddos/krr.hpp"
#include "ddos/logistic.hpp"
#include "ddos/metrics.hpp"
#include "ddos/mlp.hpp"
#include "ddos/model_io.hpp"
#include "ddos/svr.hpp"
#include "ddos/traffic.hpp"

namespace ddos {

enum class ModelKind {
  lgr,
  ann,
  ann_frames,
  ann_frames_sigma,
  kmeans,
  kmeans_lgr,
  kmeans_ann,
  kmeans_ann_frames,
  kmeans_ann_frames_sigma,
  krr,
  svr,
  lgr_reg,
};

inline constexpr std::array<std::pair<ModelKind, std::string_view>, 12> model_kind_names{{
    {ModelKind::lgr, "lgr"},
    {ModelKind::ann, "ann"},
    {ModelKind::ann_frames, "ann_frames"},
    {ModelKind::ann_frames_sigma, "ann_frames_sigma"},
    {ModelKind::kmeans, "kmeans"},
    {ModelKind::kmeans_lgr, "kmeans+lgr"},
    {ModelKind::kmeans_ann, "kmeans+ann"},
    {ModelKind::kmeans_ann_frames, "kmeans+ann_frames"},
    {ModelKind::kmeans_ann_frames_sigma, "kmeans+ann_frames_sigma"},
    {ModelKind::krr, "krr"},
    {ModelKind::svr, "svr"},
    {ModelKind::lgr_reg, "lgr_reg"},
}};

inline std::string to_string(ModelKind kind) {
  for (const auto& [k, name] : model_kind_names)
    if (k == kind) return std::string(name);
  return "?";
}

inline ModelKind parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : model_kind_names)
    if (n == name) return k;
  throw config_error("unknown model kind '" + std::string(name) + "'");
}

inline bool is_supervised(ModelKind k) {
  return k == ModelKind::lgr || k == ModelKind::ann || k == ModelKind::ann_frames ||
         k == ModelKind::ann_frames_sigma;
}
inline bool is_semi_supervised(ModelKind k) {
  return k == ModelKind::kmeans_lgr || k == ModelKind::kmeans_ann ||
         k == ModelKind::kmeans_ann_frames || k == ModelKind::kmeans_ann_frames_sigma;
}
inline bool is_forecaster(ModelKind k) {
  return k == ModelKind::krr || k == ModelKind::svr || k == ModelKind::lgr_reg;
}

/// The supervised learner a semi-supervised kind feeds its cluster labels to.
inline ModelKind supervised_stage(ModelKind k) {
  switch (k) {
    case ModelKind::kmeans_lgr: return ModelKind::lgr;
    case ModelKind::kmeans_ann: return ModelKind::ann;
    case ModelKind::kmeans_ann_frames: return ModelKind::ann_frames;
    case ModelKind::kmeans_ann_frames_sigma: return ModelKind::ann_frames_sigma;
    default: return k;
  }
}

inline DetectionVariant detection_variant(ModelKind k) {
  switch (supervised_stage(k)) {
    case ModelKind::ann_frames: return DetectionVariant::frames;
    case ModelKind::ann_frames_sigma: return DetectionVariant::frames_sigma;
    default: return DetectionVariant::per_interval;
  }
}

/// Logistic models get a larger epoch budget: each epoch is one full-batch
/// step rather than a pass of mini-batch updates.
inline TrainConfig default_train_config(ModelKind kind, std::uint64_t seed = 42) {
  TrainConfig cfg;
  cfg.seed = seed;
  const auto stage = supervised_stage(kind);
  if (stage == ModelKind::lgr || kind == ModelKind::lgr_reg) cfg.max_epochs = 5000;
  return cfg;
}

struct ExperimentConfig {
  ModelKind model_kind = ModelKind::lgr;
  double split_ratio = 0.8;
  std::size_t smote_k = 5;
  std::uint64_t seed = 42;
  TrainConfig train_cfg;
  std::optional<GridSpec> grid;

  static ExperimentConfig for_kind(ModelKind kind, std::uint64_t seed = 42) {
    ExperimentConfig cfg;
    cfg.model_kind = kind;
    cfg.seed = seed;
    cfg.train_cfg = default_train_config(kind, seed);
    return cfg;
  }
};

struct EvalReport {
  std::string model;
  Confusion confusion;
  ClassificationScores scores;
  std::optional<double> r2;
  std::optional<double> rmse;
  double train_seconds = 0;
  double infer_seconds = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<std::pair<std::string, std::string>> config;  // echo, in order
  std::vector<std::pair<std::string, std::string>> params;  // fitted hyperparameters
};

struct PredictionPoint {
  std::int64_t t_s = 0;
  double actual = 0;
  double predicted_raw = 0;
  std::uint8_t predicted_label = 0;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& cfg) {
  return {
      {"model", to_string(cfg.model_kind)},
      {"seed", std::to_string(cfg.seed)},
      {"split_ratio", text::format_exact(cfg.split_ratio)},
      {"smote_k", std::to_string(cfg.smote_k)},
      {"learning_rate", text::format_exact(cfg.train_cfg.learning_rate)},
      {"max_epochs", std::to_string(cfg.train_cfg.max_epochs)},
      {"tolerance", text::format_exact(cfg.train_cfg.tolerance)},
      {"l2", text::format_exact(cfg.train_cfg.l2)},
      {"train_seed", std::to_string(cfg.train_cfg.seed)},
      {"grid", cfg.grid ? "on" : "off"},
  };
}

inline void fill_scores(EvalReport& report, std::span<const std::uint8_t> truth,
                        std::span<const std::uint8_t> predicted) {
  report.confusion = confusion(truth, predicted);
  report.scores = classification_scores(report.confusion);
  report.n_test = truth.size();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Detection

/// A fitted detector: optionally a clusterer (kmeans kinds), and for every
/// kind except plain kmeans exactly one of the supervised models.
struct Detector {
  ModelKind kind = ModelKind::lgr;
  std::optional<KMeansModel> clusterer;
  std::optional<LgrModel> lgr;
  std::optional<MlpModel> mlp;

  std::vector<std::uint8_t> classify(const Matrix& X) const {
    if (lgr) return lgr_predict(*lgr, X).label;
    if (mlp) return mlp_predict(*mlp, X).label;
    if (clusterer) return kmeans_labels(*clusterer, X);
    throw contract_violation("detector holds no model");
  }
};

inline std::vector<ModelRecord> to_records(const Detector& d) {
  std::vector<ModelRecord> out;
  if (d.clusterer) out.push_back(to_record(*d.clusterer));
  if (d.lgr) out.push_back(to_record(*d.lgr));
  if (d.mlp) out.push_back(to_record(*d.mlp));
  return out;
}

inline Detector detector_from_records(ModelKind kind, const std::vector<ModelRecord>& records) {
  if (is_forecaster(kind)) throw config_error(to_string(kind) + " is not a detection model");
  Detector d;
  d.kind = kind;
  if (kind == ModelKind::kmeans || is_semi_supervised(kind)) {
    d.clusterer = kmeans_from_record(find_record(records, "kmeans"));
  }
  const auto stage = supervised_stage(kind);
  if (stage == ModelKind::lgr) d.lgr = lgr_from_record(find_record(records, "lgr"));
  if (stage == ModelKind::ann || stage == ModelKind::ann_frames ||
      stage == ModelKind::ann_frames_sigma) {
    d.mlp = mlp_from_record(find_record(records, "mlp"));
  }
  return d;
}

/// Two-cluster K-Means on raw per-interval counts, mapped to labels.
inline KMeansModel fit_traffic_clusterer(const IntervalSeries& series, const TrainConfig& cfg) {
  const auto ds = build_detection_dataset(series, DetectionVariant::per_interval);
  if (ds.X.rows() > 0 && (ds.X.array() == ds.X(0, 0)).all()) {
    throw error(error_kind::degenerate, "all interval counts are identical; clusters are undefined");
  }
  return map_clusters_to_labels(kmeans_fit(ds.X, 2, cfg));
}

inline MlpInput mlp_input_for(DetectionVariant v) {
  switch (v) {
    case DetectionVariant::frames: return MlpInput::frames;
    case DetectionVariant::frames_sigma: return MlpInput::frames_sigma;
    default: return MlpInput::counts;
  }
}

struct DetectionFit {
  Detector detector;
  DataSet test;                        // held-out features
  std::vector<std::uint8_t> truth;     // ground-truth labels of the held-out rows
  std::size_t n_train = 0;             // after balancing
  double train_seconds = 0;
};

/// Builds features from `series`, but takes training labels from `labels`
/// (ground truth for supervised runs, cluster labels for semi-supervised
/// ones). Split and balancing see only the training labels; the held-out
/// rows keep their ground truth for evaluation.
inline DetectionFit fit_detector(const IntervalSeries& series,
                                 std::span<const std::uint8_t> labels,
                                 const ExperimentConfig& cfg) {
  const ModelKind stage = supervised_stage(cfg.model_kind);
  if (!is_supervised(stage)) throw config_error(to_string(cfg.model_kind) + " is not a classifier");
  if (labels.size() != series.size()) throw contract_violation("label count differs from series");

  IntervalSeries training = series;
  training.labels.assign(labels.begin(), labels.end());
  const auto variant = detection_variant(stage);
  const DataSet truth_ds = build_detection_dataset(series, variant);
  const DataSet train_ds = build_detection_dataset(training, variant);

  const Split split = split_train_test(train_ds, cfg.split_ratio, cfg.seed);
  DetectionFit fit;
  fit.detector.kind = cfg.model_kind;
  fit.test = truth_ds.rows(split.test_rows);
  fit.truth = fit.test.y;

  detail::Stopwatch clock;
  const DataSet balanced = smote_balance(split.train, cfg.smote_k, cfg.seed);
  if (stage == ModelKind::lgr) {
    fit.detector.lgr = lgr_fit(balanced.X, balanced.y, cfg.train_cfg);
  } else {
    fit.detector.mlp = mlp_fit(balanced.X, balanced.y, cfg.train_cfg, mlp_input_for(variant));
  }
  fit.train_seconds = clock.seconds();
  fit.n_train = balanced.size();
  return fit;
}

inline EvalReport evaluate_fit(const DetectionFit& fit, const ExperimentConfig& cfg,
                               double extra_train_seconds = 0) {
  EvalReport report;
  report.model = to_string(cfg.model_kind);
  report.config = detail::echo(cfg);
  detail::Stopwatch clock;
  const auto predicted = fit.detector.classify(fit.test.X);
  report.infer_seconds = clock.seconds();
  detail::fill_scores(report, fit.truth, predicted);
  report.train_seconds = fit.train_seconds + extra_train_seconds;
  report.n_train = fit.n_train;
  return report;
}

inline EvalReport run_supervised(const IntervalSeries& series, const ExperimentConfig& cfg) {
  if (!is_supervised(cfg.model_kind)) {
    throw config_error(to_string(cfg.model_kind) + " is not a supervised detection model");
  }
  return evaluate_fit(fit_detector(series, series.labels, cfg), cfg);
}

inline EvalReport run_unsupervised(const IntervalSeries& series, const ExperimentConfig& cfg) {
  if (cfg.model_kind != ModelKind::kmeans) {
    throw config_error(to_string(cfg.model_kind) + " is not the unsupervised model");
  }
  const auto ds = build_detection_dataset(series, DetectionVariant::per_interval);
  EvalReport report;
  report.model = to_string(cfg.model_kind);
  report.config = detail::echo(cfg);
  detail::Stopwatch train_clock;
  const auto model = fit_traffic_clusterer(series, cfg.train_cfg);
  report.train_seconds = train_clock.seconds();
  detail::Stopwatch infer_clock;
  const auto predicted = kmeans_labels(model, ds.X);
  report.infer_seconds = infer_clock.seconds();
  detail::fill_scores(report, ds.y, predicted);
  report.n_train = ds.size();
  report.params.emplace_back("wcss", text::format_exact(model.wcss));
  return report;
}

/// Semi-supervised run with externally supplied training labels (normally
/// the cluster labels). Evaluation is always against the series' own labels.
inline EvalReport run_semi_supervised_with_labels(const IntervalSeries& series,
                                                  std::span<const std::uint8_t> auto_labels,
                                                  const ExperimentConfig& cfg,
                                                  double labeling_seconds = 0) {
  ExperimentConfig stage_cfg = cfg;
  stage_cfg.model_kind = supervised_stage(cfg.model_kind);
  auto report = evaluate_fit(fit_detector(series, auto_labels, stage_cfg), stage_cfg,
                             labeling_seconds);
  report.model = to_string(cfg.model_kind);
  report.config = detail::echo(cfg);
  return report;
}

inline std::vector<std::uint8_t> cluster_labels(const IntervalSeries& series, const TrainConfig& cfg,
                                                KMeansModel* model_out = nullptr) {
  const auto model = fit_traffic_clusterer(series, cfg);
  const auto ds = build_detection_dataset(series, DetectionVariant::per_interval);
  auto labels = kmeans_labels(model, ds.X);
  if (model_out) *model_out = model;
  return labels;
}

inline EvalReport run_semi_supervised(const IntervalSeries& series, const ExperimentConfig& cfg) {
  if (!is_semi_supervised(cfg.model_kind)) {
    throw config_error(to_string(cfg.model_kind) + " is not a semi-supervised model");
  }
  detail::Stopwatch clock;
  const auto labels = cluster_labels(series, cfg.train_cfg);
  const double labeling = clock.seconds();
  return run_semi_supervised_with_labels(series, labels, cfg, labeling);
}

/// Fits the full detector for `cfg.model_kind` (the training half of the
/// matching run_*), for persisting with to_records.
inline Detector train_detector(const IntervalSeries& series, const ExperimentConfig& cfg) {
  if (cfg.model_kind == ModelKind::kmeans) {
    Detector d;
    d.kind = cfg.model_kind;
    d.clusterer = fit_traffic_clusterer(series, cfg.train_cfg);
    return d;
  }
  if (is_semi_supervised(cfg.model_kind)) {
    KMeansModel clusterer;
    const auto labels = cluster_labels(series, cfg.train_cfg, &clusterer);
    ExperimentConfig stage_cfg = cfg;
    stage_cfg.model_kind = supervised_stage(cfg.model_kind);
    auto d = fit_detector(series, labels, stage_cfg).detector;
    d.kind = cfg.model_kind;
    d.clusterer = std::move(clusterer);
    return d;
  }
  return fit_detector(series, series.labels, cfg).detector;
}

/// Scores a stored detector on every row of `series`.
inline EvalReport evaluate_detector(const Detector& detector, const IntervalSeries& series,
                                    const ExperimentConfig& cfg) {
  const auto variant = detector.kind == ModelKind::kmeans ? DetectionVariant::per_interval
                                                          : detection_variant(detector.kind);
  const auto ds = build_detection_dataset(series, variant);
  EvalReport report;
  report.model = to_string(detector.kind);
  report.config = detail::echo(cfg);
  detail::Stopwatch clock;
  const auto predicted = detector.classify(ds.X);
  report.infer_seconds = clock.seconds();
  detail::fill_scores(report, ds.y, predicted);
  return report;
}

// ---------------------------------------------------------------------------
// Forecasting
//
// Status is forecast as a function of time alone. Time enters through its
// phase within the dominant attack period, estimated from the training
// history, so a fitted model extrapolates periodic attack schedules.

/// Lag in [2, n/2] maximizing the autocorrelation of the status history; the
/// smallest such lag wins near-ties. Returns n when the history is constant.
inline std::size_t estimate_period(std::span<const double> status) {
  const std::size_t n = status.size();
  if (n < 4) return std::max<std::size_t>(n, 1);
  double mean = 0;
  for (auto v : status) mean += v;
  mean /= static_cast<double>(n);
  double var = 0;
  for (auto v : status) var += (v - mean) * (v - mean);
  if (var == 0) return n;
  std::vector<double> acf(n / 2 + 1, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t lag = 2; lag <= n / 2; ++lag) {
    double s = 0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (status[t] - mean) * (status[t + lag] - mean);
    acf[lag] = s / static_cast<double>(n - lag);
    best = std::max(best, acf[lag]);
  }
  for (std::size_t lag = 2; lag <= n / 2; ++lag) {
    if (acf[lag] >= best - 1e-9 * std::abs(best)) return lag;
  }
  return n;
}

struct PhaseFeatures {
  double period_s = 1;  // seconds
  Standardizer scaler;

  Matrix raw(std::span<const std::int64_t> times) const {
    Matrix X(static_cast<Eigen::Index>(times.size()), 2);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double phase = 2.0 * std::numbers::pi *
                           std::fmod(static_cast<double>(times[i]), period_s) / period_s;
      X(static_cast<Eigen::Index>(i), 0) = std::cos(phase);
      X(static_cast<Eigen::Index>(i), 1) = std::sin(phase);
    }
    return X;
  }
  Matrix operator()(std::span<const std::int64_t> times) const { return scaler.transform(raw(times)); }

  static PhaseFeatures fit(std::span<const std::int64_t> times, std::span<const double> status,
                           std::int64_t interval_seconds) {
    PhaseFeatures f;
    f.period_s = static_cast<double>(estimate_period(status)) * static_cast<double>(interval_seconds);
    f.scaler = Standardizer::fit(f.raw(times));
    return f;
  }
};

/// Hyperparameters used when no grid search is requested.
struct RegressorDefaults {
  double krr_lambda = 0.01;
  double svr_C = 10;
  double svr_epsilon = 0.1;
};

struct Forecaster {
  ModelKind kind = ModelKind::krr;
  PhaseFeatures features;
  std::optional<LgrModel> lgr;
  std::optional<KrrModel> krr;
  std::optional<SvrModel> svr;

  Vector predict_raw(std::span<const std::int64_t> times) const {
    const Matrix X = features(times);
    if (lgr) {
      const auto p = lgr_predict(*lgr, X).probability;
      return Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
    }
    if (krr) return krr_predict(*krr, X);
    if (svr) return svr_predict(*svr, X);
    throw contract_violation("forecaster holds no model");
  }
};

inline std::vector<ModelRecord> to_records(const Forecaster& f) {
  ModelRecord phase{"phase_features", {}};
  phase.put("period_s", std::vector<double>{f.features.period_s});
  put_scaler(phase, f.features.scaler);
  std::vector<ModelRecord> out{phase};
  if (f.lgr) out.push_back(to_record(*f.lgr));
  if (f.krr) out.push_back(to_record(*f.krr));
  if (f.svr) out.push_back(to_record(*f.svr));
  return out;
}

inline Forecaster forecaster_from_records(ModelKind kind, const std::vector<ModelRecord>& records) {
  if (!is_forecaster(kind)) throw config_error(to_string(kind) + " is not a forecasting model");
  Forecaster f;
  f.kind = kind;
  const auto& phase = find_record(records, "phase_features");
  f.features.period_s = phase.scalar("period_s");
  f.features.scaler = get_scaler(phase);
  if (kind == ModelKind::lgr_reg) f.lgr = lgr_from_record(find_record(records, "lgr"));
  if (kind == ModelKind::krr) f.krr = krr_from_record(find_record(records, "krr"));
  if (kind == ModelKind::svr) f.svr = svr_from_record(find_record(records, "svr"));
  return f;
}

struct ForecastFit {
  Forecaster forecaster;
  std::optional<GridResult> grid;
  std::vector<std::int64_t> train_times, test_times;
  std::vector<double> train_status, test_status;
  double train_seconds = 0;
};

/// Chronological split: the first ceil(ratio * n) intervals train, the rest test.
inline ForecastFit fit_forecaster(const IntervalSeries& series, const ExperimentConfig& cfg,
                                  const RegressorDefaults& defaults = {}) {
  if (!is_forecaster(cfg.model_kind)) {
    throw config_error(to_string(cfg.model_kind) + " is not a forecasting model");
  }
  if (cfg.grid && cfg.model_kind == ModelKind::lgr_reg) {
    throw config_error("grid search does not apply to lgr_reg");
  }
  if (!(cfg.split_ratio > 0 && cfg.split_ratio < 1)) throw config_error("split ratio must lie in (0,1)");
  series.validate();
  const std::size_t n = series.size();
  const auto n_train =
      static_cast<std::size_t>(std::ceil(cfg.split_ratio * static_cast<double>(n)));
  if (n_train < 2 || n_train >= n) {
    throw error(error_kind::empty_dataset, "series too short for a chronological split");
  }

  ForecastFit fit;
  for (std::size_t i = 0; i < n; ++i) {
    const bool train = i < n_train;
    (train ? fit.train_times : fit.test_times).push_back(series.start_time(i));
    (train ? fit.train_status : fit.test_status).push_back(series.labels[i]);
  }

  detail::Stopwatch clock;
  auto& f = fit.forecaster;
  f.kind = cfg.model_kind;
  f.features = PhaseFeatures::fit(fit.train_times, fit.train_status, series.interval_seconds);
  const Matrix X = f.features(fit.train_times);
  const Vector y = Eigen::Map<const Vector>(fit.train_status.data(),
                                            static_cast<Eigen::Index>(fit.train_status.size()));

  if (cfg.model_kind == ModelKind::lgr_reg) {
    std::vector<std::uint8_t> labels(series.labels.begin(),
                                     series.labels.begin() + static_cast<std::ptrdiff_t>(n_train));
    f.lgr = lgr_fit(X, labels, cfg.train_cfg);
  } else {
    const auto kind = cfg.model_kind == ModelKind::krr ? RegressorKind::krr : RegressorKind::svr;
    GridCell cell{defaults.svr_C, default_gamma(X), defaults.svr_epsilon, defaults.krr_lambda};
    if (cfg.grid) {
      fit.grid = grid_search(X, y, kind, *cfg.grid, cfg.seed);
      cell = fit.grid->best_cell();
    }
    if (kind == RegressorKind::krr) {
      f.krr = krr_fit(X, y, cell.lambda, cell.gamma);
    } else {
      f.svr = svr_fit(X, y, cell.C, cell.epsilon, cell.gamma);
      if (!f.svr->converged) {
        throw numeric_error("svr did not converge (violation " +
                            text::format_exact(f.svr->final_violation) + ")");
      }
    }
  }
  fit.train_seconds = clock.seconds();
  return fit;
}

struct PredictionOutcome {
  EvalReport report;
  std::vector<PredictionPoint> series;
  Forecaster forecaster;
  std::optional<GridResult> grid;
};

inline EvalReport score_forecast(const Forecaster& forecaster, std::span<const std::int64_t> times,
                                 std::span<const double> status, const ExperimentConfig& cfg,
                                 std::vector<PredictionPoint>* points = nullptr) {
  EvalReport report;
  report.model = to_string(forecaster.kind);
  report.config = detail::echo(cfg);
  detail::Stopwatch clock;
  const Vector raw = forecaster.predict_raw(times);
  report.infer_seconds = clock.seconds();

  std::vector<double> predicted(raw.begin(), raw.end());
  std::vector<std::uint8_t> truth, decided;
  for (std::size_t i = 0; i < status.size(); ++i) {
    truth.push_back(status[i] >= 0.5 ? 1 : 0);
    decided.push_back(predicted[i] >= 0.5 ? 1 : 0);
    if (points) points->push_back({times[i], status[i], predicted[i], decided.back()});
  }
  detail::fill_scores(report, truth, decided);
  report.rmse = rmse(status, predicted);
  try {
    report.r2 = r_squared(status, predicted);
  } catch (const error& e) {
    if (e.kind() != error_kind::degenerate) throw;
  }
  report.params.emplace_back("period_s", text::format_exact(forecaster.features.period_s));
  if (forecaster.krr) {
    report.params.emplace_back("lambda", text::format_exact(forecaster.krr->lambda));
    report.params.emplace_back("gamma", text::format_exact(forecaster.krr->gamma));
  }
  if (forecaster.svr) {
    report.params.emplace_back("C", text::format_exact(forecaster.svr->C));
    report.params.emplace_back("epsilon", text::format_exact(forecaster.svr->epsilon));
    report.params.emplace_back("gamma", text::format_exact(forecaster.svr->gamma));
  }
  return report;
}

inline PredictionOutcome run_prediction(const IntervalSeries& series, const ExperimentConfig& cfg,
                                        const RegressorDefaults& defaults = {}) {
  auto fit = fit_forecaster(series, cfg, defaults);
  PredictionOutcome out;
  out.report = score_forecast(fit.forecaster, fit.test_times, fit.test_status, cfg, &out.series);
  out.report.train_seconds = fit.train_seconds;
  out.report.n_train = fit.train_times.size();
  out.forecaster = std::move(fit.forecaster);
  out.grid = std::move(fit.grid);
  return out;
}

/// Dispatches on the model kind.
inline EvalReport run_experiment(const IntervalSeries& series, const ExperimentConfig& cfg) {
  if (is_supervised(cfg.model_kind)) return run_supervised(series, cfg);
  if (is_semi_supervised(cfg.model_kind)) return run_semi_supervised(series, cfg);
  if (cfg.model_kind == ModelKind::kmeans) return run_unsupervised(series, cfg);
  return run_prediction(series, cfg).report;
}

// ---------------------------------------------------------------------------
// Report and prediction-series files

inline bool is_timing_key(std::string_view key) {
  return key == "train_seconds" || key == "infer_seconds";
}

inline void write_report(std::ostream& out, const EvalReport& r) {
  out << "model=" << r.model << '\n';
  out << "n_train=" << r.n_train << '\n';
  out << "n_test=" << r.n_test << '\n';
  out << "tp=" << r.confusion.tp << '\n';
  out << "tn=" << r.confusion.tn << '\n';
  out << "fp=" << r.confusion.fp << '\n';
  out << "fn=" << r.confusion.fn << '\n';
  out << "accuracy_pct=" << text::format_fixed(r.scores.accuracy_pct, 3) << '\n';
  out << "fp_pct=" << text::format_fixed(r.scores.fp_pct, 3) << '\n';
  out << "fn_pct=" << text::format_fixed(r.scores.fn_pct, 3) << '\n';
  out << "f1=" << text::format_fixed(r.scores.f1, 6) << '\n';
  if (r.r2) out << "r2=" << text::format_fixed(*r.r2, 6) << '\n';
  if (r.rmse) out << "rmse=" << text::format_fixed(*r.rmse, 6) << '\n';
  out << "train_seconds=" << text::format_fixed(r.train_seconds, 6) << '\n';
  out << "infer_seconds=" << text::format_fixed(r.infer_seconds, 6) << '\n';
  for (const auto& [k, v] : r.params) out << "param." << k << '=' << v << '\n';
  for (const auto& [k, v] : r.config) out << "config." << k << '=' << v << '\n';
}

/// Reads any `key=value` report back as ordered pairs.
inline std::vector<std::pair<std::string, std::string>> read_report(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw parse_error(lineno, "expected key=value");
    out.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
  }
  return out;
}

inline void write_prediction_series(std::ostream& out, std::span<const PredictionPoint> points) {
  for (const auto& p : points) {
    out << p.t_s << ',' << text::format_exact(p.actual) << ',' << text::format_exact(p.predicted_raw)
        << ',' << int(p.predicted_label) << '\n';
  }
}

}  // namespace ddos
