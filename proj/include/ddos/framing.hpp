#pragma once

// Fixed 120-second frames (12 consecutive 10-second counts) with an optional
// standard-deviation feature, plus the threshold heuristic for flagging frames.

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ddos/error.hpp"
#include "ddos/text.hpp"
#include "ddos/traffic.hpp"

namespace ddos {

inline constexpr std::size_t frame_width = 12;
inline constexpr std::int64_t frame_interval_seconds = 10;

struct Frame {
  std::array<std::int64_t, frame_width> values{};
  std::optional<double> sigma;
  std::uint8_t label = 0;

  double mean() const noexcept {
    double s = 0;
    for (auto v : values) s += static_cast<double>(v);
    return s / static_cast<double>(frame_width);
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct FramingConfig {
  bool with_sigma = false;
  double sigma_threshold = std::numeric_limits<double>::infinity();
  double mean_threshold = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(sigma_threshold >= 0) || !(mean_threshold >= 0)) {
      throw config_error("frame thresholds must be non-negative");
    }
  }
};

/// Population (divide-by-n) standard deviation.
template <typename T>
  requires std::is_arithmetic_v<T>
double population_stddev(std::span<const T> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  double mean = 0;
  for (auto v : values) mean += static_cast<double>(v);
  mean /= n;
  double ss = 0;
  for (auto v : values) {
    const double d = static_cast<double>(v) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / n);
}

template <typename T>
  requires std::is_arithmetic_v<T>
double frame_sigma(std::span<const T> values) {
  if (values.size() != frame_width) {
    throw contract_violation("frame_sigma needs exactly 12 values, got " +
                             std::to_string(values.size()));
  }
  return population_stddev(values);
}

/// Frame i covers counts[12i, 12i+12). Trailing intervals that do not fill a
/// whole frame are dropped. A frame is an attack frame if any member is.
inline std::vector<Frame> make_frames(const IntervalSeries& series, const FramingConfig& cfg) {
  series.validate();
  cfg.validate();
  if (series.interval_seconds != frame_interval_seconds) {
    throw config_error("framing requires 10-second intervals, got " +
                       std::to_string(series.interval_seconds));
  }
  const std::size_t n_frames = series.size() / frame_width;
  std::vector<Frame> frames(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    auto& frame = frames[f];
    for (std::size_t j = 0; j < frame_width; ++j) {
      frame.values[j] = series.counts[f * frame_width + j];
      frame.label |= series.labels[f * frame_width + j];
    }
    if (cfg.with_sigma) {
      frame.sigma = frame_sigma(std::span<const std::int64_t>(frame.values));
    }
  }
  return frames;
}

/// Flags a frame as under attack when its spread or its level is high. The
/// level clause catches sustained floods, where every count is high and the
/// spread is small.
inline bool threshold_flag(const Frame& frame, const FramingConfig& cfg) {
  if (!frame.sigma) throw contract_violation("threshold_flag needs a frame with sigma");
  return *frame.sigma > cfg.sigma_threshold || frame.mean() > cfg.mean_threshold;
}

/// Thresholds at 3x the average sigma and average mean of frames labeled
/// legitimate. Frames without sigma have it computed on the fly.
inline FramingConfig calibrate_thresholds(std::span<const Frame> frames, bool with_sigma = true) {
  double sigma_sum = 0, mean_sum = 0;
  std::size_t n = 0;
  for (const auto& f : frames) {
    if (f.label != 0) continue;
    sigma_sum += f.sigma ? *f.sigma : frame_sigma(std::span<const std::int64_t>(f.values));
    mean_sum += f.mean();
    ++n;
  }
  if (n == 0) throw training_error("no legitimate frames to calibrate thresholds on");
  FramingConfig cfg;
  cfg.with_sigma = with_sigma;
  cfg.sigma_threshold = 3.0 * sigma_sum / static_cast<double>(n);
  cfg.mean_threshold = 3.0 * mean_sum / static_cast<double>(n);
  return cfg;
}

// ---------------------------------------------------------------------------
// Frames file: `v1,...,v12[,sigma],label` per line.

inline void write_frames(std::ostream& out, std::span<const Frame> frames) {
  for (const auto& f : frames) {
    for (auto v : f.values) out << v << ',';
    if (f.sigma) out << text::format_exact(*f.sigma) << ',';
    out << int(f.label) << '\n';
  }
}

inline std::vector<Frame> read_frames(std::istream& in) {
  std::vector<Frame> frames;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto fields = text::split(body, ',');
    if (fields.size() != frame_width + 1 && fields.size() != frame_width + 2) {
      throw parse_error(lineno, "expected 13 or 14 fields");
    }
    Frame f;
    for (std::size_t j = 0; j < frame_width; ++j) {
      const auto v = text::parse_int(fields[j]);
      if (!v || *v < 0) throw parse_error(lineno, "frame value must be a non-negative integer");
      f.values[j] = *v;
    }
    if (fields.size() == frame_width + 2) {
      const auto s = text::parse_double(fields[frame_width]);
      if (!s || *s < 0) throw parse_error(lineno, "sigma must be a non-negative number");
      f.sigma = *s;
    }
    const auto label = text::parse_int(fields.back());
    if (!label || (*label != 0 && *label != 1)) throw parse_error(lineno, "label must be 0 or 1");
    f.label = static_cast<std::uint8_t>(*label);
    frames.push_back(f);
  }
  return frames;
}

}  // namespace ddos
