// ddosctl: one subcommand per pipeline stage.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error,
// 3 numeric or convergence error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddos/ddos.hpp"

namespace {

using namespace ddos;

using Echo = std::vector<std::pair<std::string, std::string>>;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(error_kind::io, "cannot open input file '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw error(error_kind::io, "cannot open output file '" + path + "'");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw error(error_kind::io, "failed writing '" + path + "'");
  std::cout << "wrote " << path << '\n';
}

IntervalSeries load_series(const std::string& path) {
  auto in = open_in(path);
  return read_series(in);
}

void print_config(const std::string& command, const Echo& echo) {
  std::cout << "command=" << command << '\n';
  for (const auto& [k, v] : echo) std::cout << "config." << k << '=' << v << '\n';
}

std::string fmt(double v) { return text::format_exact(v); }

/// Flag values shared by the subcommands; each subcommand binds the ones it uses.
struct Flags {
  std::size_t intervals = 10000;
  double rate = 50;
  double attack_fraction = 0.2;
  double multiplier = 10;
  std::size_t burst = 6;
  std::size_t period = 0;  // 0: bursts placed at random
  std::uint64_t seed = 42;
  std::string out, series, log, dst, model, model_file, report, cv_out;
  std::int64_t interval = 10;
  bool sigma = false;
  bool grid = false;
  std::size_t kmax = 6;
  std::vector<std::string> reports;
};

/// --seed when given, else SYN_SEED, else 42.
std::uint64_t effective_seed(const CLI::Option* opt, std::uint64_t flag_value) {
  if (opt && opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("SYN_SEED"); env && *env) {
    const auto v = text::parse_int(env);
    if (!v || *v < 0) throw config_error(std::string("SYN_SEED is not a seed: '") + env + "'");
    return static_cast<std::uint64_t>(*v);
  }
  return 42;
}

SynthesisConfig synthesis(const Flags& f) {
  SynthesisConfig cfg;
  cfg.n_intervals = f.intervals;
  cfg.baseline_rate = f.rate;
  cfg.attack_fraction = f.attack_fraction;
  cfg.attack_multiplier = f.multiplier;
  cfg.burst_length = f.burst;
  cfg.seed = f.seed;
  return cfg;
}

Echo synthesis_echo(const SynthesisConfig& cfg, std::size_t period) {
  return {{"intervals", std::to_string(cfg.n_intervals)},
          {"rate", fmt(cfg.baseline_rate)},
          {"attack_fraction", fmt(cfg.attack_fraction)},
          {"multiplier", fmt(cfg.attack_multiplier)},
          {"burst", std::to_string(cfg.burst_length)},
          {"period", period ? std::to_string(period) : "random"},
          {"seed", std::to_string(cfg.seed)}};
}

IntervalSeries attack(IntervalSeries base, const SynthesisConfig& cfg, std::size_t period) {
  return period ? inject_periodic_attacks(std::move(base), cfg, period)
                : inject_attacks(std::move(base), cfg);
}

ExperimentConfig experiment(const Flags& f) {
  auto cfg = ExperimentConfig::for_kind(parse_model_kind(f.model), f.seed);
  if (f.grid) cfg.grid = GridSpec{};
  return cfg;
}

void cmd_generate(const Flags& f) {
  const auto cfg = synthesis(f);
  print_config("generate", synthesis_echo(cfg, f.period));
  const auto series = attack(generate_baseline(cfg), cfg, f.period);
  auto out = open_out(f.out);
  write_series(out, series);
  finish(out, f.out);
}

void cmd_ingest(const Flags& f) {
  print_config("ingest", {{"log", f.log},
                          {"interval", std::to_string(f.interval)},
                          {"dst", f.dst.empty() ? "any" : f.dst}});
  if (f.interval < 1) throw config_error("--interval must be positive");
  auto in = open_in(f.log);
  const auto records = parse_packet_log(in);
  std::optional<std::string> dst;
  if (!f.dst.empty()) dst = f.dst;
  const auto series = bucketize(records, f.interval, dst);
  std::cout << "records=" << records.size() << " intervals=" << series.size() << '\n';
  auto out = open_out(f.out);
  write_series(out, series);
  finish(out, f.out);
}

void cmd_inject(const Flags& f) {
  const auto cfg = synthesis(f);
  auto echo = synthesis_echo(cfg, f.period);
  echo.erase(echo.begin(), echo.begin() + 2);  // size and rate come from the series
  echo.insert(echo.begin(), {"series", f.series});
  print_config("inject", echo);
  auto series = load_series(f.series);
  series = attack(std::move(series), cfg, f.period);
  auto out = open_out(f.out);
  write_series(out, series);
  finish(out, f.out);
}

void cmd_frame(const Flags& f) {
  print_config("frame", {{"series", f.series}, {"sigma", f.sigma ? "on" : "off"}});
  FramingConfig fc;
  fc.with_sigma = f.sigma;
  const auto frames = make_frames(load_series(f.series), fc);
  std::cout << "frames=" << frames.size() << '\n';
  auto out = open_out(f.out);
  write_frames(out, frames);
  finish(out, f.out);
}

void cmd_elbow(const Flags& f) {
  TrainConfig cfg;
  cfg.seed = f.seed;
  print_config("elbow", {{"series", f.series},
                         {"kmax", std::to_string(f.kmax)},
                         {"seed", std::to_string(f.seed)},
                         {"max_epochs", std::to_string(cfg.max_epochs)}});
  const auto ds = build_detection_dataset(load_series(f.series), DetectionVariant::per_interval);
  const auto result = elbow_curve(ds.X, f.kmax, cfg);
  auto out = open_out(f.out);
  for (const auto& [k, wcss] : result.curve) out << k << ',' << fmt(wcss) << '\n';
  std::cout << "chosen_k=" << result.chosen_k << '\n';
  finish(out, f.out);
}

void cmd_train(const Flags& f) {
  const auto cfg = experiment(f);
  auto echo = detail::echo(cfg);
  echo.insert(echo.begin(), {"series", f.series});
  print_config("train", echo);
  const auto series = load_series(f.series);
  std::vector<ModelRecord> records;
  if (is_forecaster(cfg.model_kind)) {
    const auto fit = fit_forecaster(series, cfg);
    records = to_records(fit.forecaster);
  } else {
    if (cfg.grid) throw config_error("--grid applies to krr and svr only");
    records = to_records(train_detector(series, cfg));
  }
  auto out = open_out(f.out);
  for (const auto& r : records) write_record(out, r);
  finish(out, f.out);
}

EvalReport evaluate_stored(const Flags& f, const ExperimentConfig& cfg,
                           const IntervalSeries& series) {
  auto in = open_in(f.model_file);
  const auto records = read_records(in);
  if (!is_forecaster(cfg.model_kind)) {
    return evaluate_detector(detector_from_records(cfg.model_kind, records), series, cfg);
  }
  const auto forecaster = forecaster_from_records(cfg.model_kind, records);
  std::vector<std::int64_t> times;
  std::vector<double> status;
  for (std::size_t i = 0; i < series.size(); ++i) {
    times.push_back(series.start_time(i));
    status.push_back(series.labels[i]);
  }
  if (times.empty()) throw error(error_kind::empty_dataset, "series has no intervals");
  return score_forecast(forecaster, times, status, cfg);
}

void cmd_evaluate(const Flags& f) {
  const auto cfg = experiment(f);
  auto echo = detail::echo(cfg);
  echo.insert(echo.begin(), {"series", f.series});
  echo.emplace_back("model_file", f.model_file.empty() ? "none" : f.model_file);
  print_config("evaluate", echo);
  const auto series = load_series(f.series);
  const auto report = f.model_file.empty() ? run_experiment(series, cfg)
                                           : evaluate_stored(f, cfg, series);
  std::cout << "accuracy_pct=" << text::format_fixed(report.scores.accuracy_pct, 3) << '\n';
  auto out = open_out(f.report);
  write_report(out, report);
  finish(out, f.report);
}

void cmd_predict(const Flags& f) {
  const auto cfg = experiment(f);
  if (!is_forecaster(cfg.model_kind)) {
    throw config_error("predict takes krr, svr or lgr_reg, not " + f.model);
  }
  auto echo = detail::echo(cfg);
  echo.insert(echo.begin(), {"series", f.series});
  print_config("predict", echo);
  const auto outcome = run_prediction(load_series(f.series), cfg);
  for (const auto& [k, v] : outcome.report.params) std::cout << "param." << k << '=' << v << '\n';
  auto report = open_out(f.report);
  write_report(report, outcome.report);
  finish(report, f.report);
  auto series = open_out(f.out);
  write_prediction_series(series, outcome.series);
  finish(series, f.out);
  if (!f.cv_out.empty()) {
    if (!outcome.grid) throw config_error("--cv-out needs --grid");
    auto cv = open_out(f.cv_out);
    write_cv_table(cv, *outcome.grid);
    finish(cv, f.cv_out);
  }
}

/// One CSV row per report file, in argument order.
void cmd_report(const Flags& f) {
  print_config("report", {{"reports", std::to_string(f.reports.size())},
                          {"out", f.out.empty() ? "stdout" : f.out}});
  const std::vector<std::string> columns = {"model", "accuracy_pct", "fp_pct", "fn_pct",
                                            "f1",    "r2",           "rmse"};
  std::ostringstream table;
  table << "file";
  for (const auto& c : columns) table << ',' << c;
  table << '\n';
  for (const auto& path : f.reports) {
    auto in = open_in(path);
    const auto fields = read_report(in);
    table << path;
    for (const auto& c : columns) {
      std::string value = "na";
      for (const auto& [k, v] : fields)
        if (k == c) value = v;
      table << ',' << value;
    }
    table << '\n';
  }
  if (f.out.empty()) {
    std::cout << table.str();
    return;
  }
  auto out = open_out(f.out);
  out << table.str();
  finish(out, f.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DDoS detection and forecasting pipeline"};
  app.require_subcommand(1, 1);
  Flags f;

  auto synth_flags = [&f](CLI::App* sub) {
    sub->add_option("--attack-fraction", f.attack_fraction, "share of attacked intervals")
        ->capture_default_str();
    sub->add_option("--multiplier", f.multiplier, "attack rate multiplier")->capture_default_str();
    sub->add_option("--burst", f.burst, "attack burst length in intervals")->capture_default_str();
    sub->add_option("--period", f.period, "repeat bursts every N intervals instead of at random");
    sub->add_option("--out", f.out, "output series file")->required();
  };
  std::vector<std::pair<CLI::App*, CLI::Option*>> seeded;
  auto seed_flag = [&](CLI::App* sub) {
    seeded.emplace_back(sub, sub->add_option("--seed", f.seed, "random seed (default 42 or SYN_SEED)"));
  };
  auto model_flag = [&f](CLI::App* sub) {
    sub->add_option("--model", f.model, "model kind")->required();
  };

  auto* generate = app.add_subcommand("generate", "synthesize a labeled interval series");
  generate->add_option("--intervals", f.intervals, "number of intervals")->capture_default_str();
  generate->add_option("--rate", f.rate, "baseline packets per interval")->capture_default_str();
  synth_flags(generate);
  seed_flag(generate);

  auto* ingest = app.add_subcommand("ingest", "bucket a packet log into interval counts");
  ingest->add_option("--log", f.log, "packet log (timestamp_ms,src,dst)")->required();
  ingest->add_option("--interval", f.interval, "interval width in seconds")->capture_default_str();
  ingest->add_option("--dst", f.dst, "count only packets to this host");
  ingest->add_option("--out", f.out, "output series file")->required();

  auto* inject = app.add_subcommand("inject", "inject labeled attack bursts into a series");
  inject->add_option("--series", f.series, "input series file")->required();
  synth_flags(inject);
  seed_flag(inject);

  auto* frame = app.add_subcommand("frame", "group intervals into 12-interval frames");
  frame->add_option("--series", f.series, "input series file")->required();
  frame->add_flag("--sigma", f.sigma, "append the frame standard deviation");
  frame->add_option("--out", f.out, "output frames file")->required();

  auto* elbow = app.add_subcommand("elbow", "K-Means wcss for k = 1..kmax");
  elbow->add_option("--series", f.series, "input series file")->required();
  elbow->add_option("--kmax", f.kmax, "largest k")->capture_default_str();
  elbow->add_option("--out", f.out, "output k,wcss file")->required();
  seed_flag(elbow);

  auto* train = app.add_subcommand("train", "fit a model and store it");
  model_flag(train);
  train->add_option("--series", f.series, "input series file")->required();
  train->add_flag("--grid", f.grid, "select regressor hyperparameters by cross-validation");
  train->add_option("--out", f.out, "output model file")->required();
  seed_flag(train);

  auto* evaluate = app.add_subcommand("evaluate", "run an experiment or score a stored model");
  model_flag(evaluate);
  evaluate->add_option("--series", f.series, "input series file")->required();
  evaluate->add_option("--model-file", f.model_file, "score this stored model on every row");
  evaluate->add_option("--report", f.report, "output report file")->required();
  seed_flag(evaluate);

  auto* predict = app.add_subcommand("predict", "forecast attack status over time");
  model_flag(predict);
  predict->add_option("--series", f.series, "input series file")->required();
  predict->add_flag("--grid", f.grid, "select hyperparameters by cross-validation");
  predict->add_option("--report", f.report, "output report file")->required();
  predict->add_option("--out", f.out, "output prediction series file")->required();
  predict->add_option("--cv-out", f.cv_out, "write the cross-validation table here");
  seed_flag(predict);

  auto* report = app.add_subcommand("report", "tabulate report files as CSV");
  report->add_option("reports", f.reports, "report files")->required();
  report->add_option("--out", f.out, "output CSV (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    for (const auto& [sub, opt] : seeded) {
      if (sub->parsed()) f.seed = effective_seed(opt, f.seed);
    }
    if (generate->parsed()) cmd_generate(f);
    else if (ingest->parsed()) cmd_ingest(f);
    else if (inject->parsed()) cmd_inject(f);
    else if (frame->parsed()) cmd_frame(f);
    else if (elbow->parsed()) cmd_elbow(f);
    else if (train->parsed()) cmd_train(f);
    else if (evaluate->parsed()) cmd_evaluate(f);
    else if (predict->parsed()) cmd_predict(f);
    else if (report->parsed()) cmd_report(f);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
