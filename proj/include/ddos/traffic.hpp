#pragma once

// Labeled packet-count time series: parsing packet logs, bucketing them into
// fixed intervals, and synthesizing baseline traffic with injected floods.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ddos/error.hpp"
#include "ddos/random.hpp"
#include "ddos/text.hpp"

namespace ddos {

struct PacketRecord {
  std::int64_t timestamp_ms = 0;
  std::string src;
  std::string dst;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct IntervalSeries {
  std::int64_t interval_seconds = 10;
  std::int64_t origin_s = 0;
  std::vector<std::int64_t> counts;
  std::vector<std::uint8_t> labels;  // 0 = legitimate, 1 = attack

  std::size_t size() const noexcept { return counts.size(); }
  bool empty() const noexcept { return counts.empty(); }

  std::int64_t start_time(std::size_t i) const noexcept {
    return origin_s + static_cast<std::int64_t>(i) * interval_seconds;
  }

  void validate() const {
    if (interval_seconds < 1) throw config_error("interval_seconds must be >= 1");
    if (counts.size() != labels.size()) {
      throw contract_violation("counts and labels differ in length");
    }
    for (auto c : counts) {
      if (c < 0) throw contract_violation("negative packet count");
    }
    for (auto l : labels) {
      if (l > 1) throw contract_violation("label outside {0,1}");
    }
  }

  friend bool operator==(const IntervalSeries&, const IntervalSeries&) = default;
};

struct SynthesisConfig {
  std::size_t n_intervals = 10000;
  double baseline_rate = 50.0;
  double attack_fraction = 0.2;
  double attack_multiplier = 10.0;
  std::size_t burst_length = 6;
  std::uint64_t seed = 42;

  void validate() const {
    if (!(baseline_rate > 0) || !std::isfinite(baseline_rate)) {
      throw config_error("baseline_rate must be positive");
    }
    if (!(attack_fraction >= 0 && attack_fraction <= 1)) {
      throw config_error("attack_fraction must lie in [0,1]");
    }
    if (!(attack_multiplier > 1) || !std::isfinite(attack_multiplier)) {
      throw config_error("attack_multiplier must exceed 1");
    }
    if (burst_length == 0) throw config_error("burst_length must be positive");
  }
};

// ---------------------------------------------------------------------------
// Packet logs

/// Reads `timestamp_ms,src,dst` lines. Blank lines and `#` comments are
/// skipped; line numbers in errors are 1-based physical lines.
inline std::vector<PacketRecord> parse_packet_log(std::istream& in) {
  std::vector<PacketRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split(body, ',');
    if (fields.size() != 3) {
      throw parse_error(lineno, "expected 3 fields, got " +
                                    std::to_string(fields.size()));
    }
    const auto ts = text::parse_int(fields[0]);
    if (!ts) throw parse_error(lineno, "timestamp is not an integer");
    if (*ts < 0) throw parse_error(lineno, "negative timestamp");
    const auto src = text::trim(fields[1]);
    const auto dst = text::trim(fields[2]);
    if (src.empty() || dst.empty()) {
      throw parse_error(lineno, "empty endpoint");
    }
    out.push_back({*ts, std::string(src), std::string(dst)});
  }
  return out;
}

namespace detail {
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const auto q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}
}  // namespace detail

/// Counts packets per interval. The origin snaps down to a multiple of the
/// interval; empty trailing intervals are never emitted.
inline IntervalSeries bucketize(std::span<const PacketRecord> records,
                                std::int64_t interval_seconds,
                                const std::optional<std::string>& dst_filter = {}) {
  if (interval_seconds < 1) throw config_error("interval_seconds must be >= 1");
  IntervalSeries series;
  series.interval_seconds = interval_seconds;

  auto keep = [&](const PacketRecord& r) {
    return !dst_filter || r.dst == *dst_filter;
  };
  std::optional<std::int64_t> min_ms, max_ms;
  for (const auto& r : records) {
    if (!keep(r)) continue;
    min_ms = min_ms ? std::min(*min_ms, r.timestamp_ms) : r.timestamp_ms;
    max_ms = max_ms ? std::max(*max_ms, r.timestamp_ms) : r.timestamp_ms;
  }
  if (!min_ms) return series;

  const std::int64_t width_ms = interval_seconds * 1000;
  const std::int64_t origin_ms = detail::floor_div(*min_ms, width_ms) * width_ms;
  series.origin_s = origin_ms / 1000;
  const auto n = static_cast<std::size_t>((*max_ms - origin_ms) / width_ms) + 1;
  series.counts.assign(n, 0);
  series.labels.assign(n, 0);
  for (const auto& r : records) {
    if (!keep(r)) continue;
    ++series.counts[static_cast<std::size_t>((r.timestamp_ms - origin_ms) / width_ms)];
  }
  return series;
}

// ---------------------------------------------------------------------------
// Synthesis

inline IntervalSeries generate_baseline(const SynthesisConfig& cfg) {
  cfg.validate();
  IntervalSeries series;
  auto rng = make_rng(cfg.seed, stream::baseline);
  std::poisson_distribution<std::int64_t> draw(cfg.baseline_rate);
  series.counts.reserve(cfg.n_intervals);
  for (std::size_t i = 0; i < cfg.n_intervals; ++i) series.counts.push_back(draw(rng));
  series.labels.assign(cfg.n_intervals, 0);
  return series;
}

/// Number of intervals an injection with `attack_fraction` attacks.
inline std::size_t attacked_interval_count(std::size_t n, double attack_fraction) {
  return static_cast<std::size_t>(std::llround(attack_fraction * static_cast<double>(n)));
}

namespace detail {

inline void redraw_attacked(IntervalSeries& series, std::size_t begin, std::size_t len,
                            std::poisson_distribution<std::int64_t>& draw, rng_t& rng) {
  for (std::size_t i = begin; i < begin + len; ++i) {
    series.counts[i] = draw(rng);
    series.labels[i] = 1;
  }
}

inline void require_unlabeled(const IntervalSeries& series) {
  series.validate();
  if (std::any_of(series.labels.begin(), series.labels.end(),
                  [](auto l) { return l != 0; })) {
    throw contract_violation("attacks can only be injected into an unlabeled series");
  }
}

}  // namespace detail

/// Places non-overlapping, non-adjacent floods at seeded-random positions
/// covering exactly round(attack_fraction * n) intervals. When that count is
/// not a multiple of burst_length, the final burst is shorter.
inline IntervalSeries inject_attacks(IntervalSeries series, const SynthesisConfig& cfg) {
  cfg.validate();
  detail::require_unlabeled(series);
  const std::size_t n = series.size();
  const std::size_t attacked = attacked_interval_count(n, cfg.attack_fraction);
  if (attacked == 0) return series;

  const std::size_t bursts = (attacked + cfg.burst_length - 1) / cfg.burst_length;
  // Free intervals must supply one separator between consecutive bursts.
  if (n < attacked + (bursts - 1)) {
    throw config_error("attack_fraction needs " + std::to_string(bursts) +
                       " bursts which do not fit without overlap");
  }
  const std::size_t slack = n - attacked - (bursts - 1);

  auto rng = make_rng(cfg.seed, stream::injection);
  // Stars and bars: choosing `bursts` distinct slots out of slack + bursts
  // yields a uniformly random arrangement of the extra free intervals.
  auto slots = shuffled_indices(slack + bursts, rng);
  slots.resize(bursts);
  std::sort(slots.begin(), slots.end());

  std::poisson_distribution<std::int64_t> draw(cfg.baseline_rate * cfg.attack_multiplier);
  std::size_t covered = 0;
  for (std::size_t j = 0; j < bursts; ++j) {
    const std::size_t len = std::min(cfg.burst_length, attacked - covered);
    const std::size_t start = (slots[j] - j) + covered + j;
    detail::redraw_attacked(series, start, len, draw, rng);
    covered += len;
  }
  return series;
}

/// Floods of burst_length intervals repeating every `period` intervals from
/// a seeded-random phase offset. attack_fraction is not consulted.
inline IntervalSeries inject_periodic_attacks(IntervalSeries series,
                                              const SynthesisConfig& cfg,
                                              std::size_t period) {
  cfg.validate();
  detail::require_unlabeled(series);
  if (period <= cfg.burst_length) {
    throw config_error("period must exceed burst_length");
  }
  auto rng = make_rng(cfg.seed, stream::injection);
  std::uniform_int_distribution<std::size_t> phase(0, period - 1);
  const std::size_t offset = phase(rng);
  std::poisson_distribution<std::int64_t> draw(cfg.baseline_rate * cfg.attack_multiplier);
  for (std::size_t start = offset; start < series.size(); start += period) {
    detail::redraw_attacked(series, start,
                            std::min(cfg.burst_length, series.size() - start), draw, rng);
  }
  return series;
}

// ---------------------------------------------------------------------------
// Series file: `interval_seconds=<n>,origin_s=<n>` then `index,count,label`.

inline void write_series(std::ostream& out, const IntervalSeries& series) {
  series.validate();
  out << "interval_seconds=" << series.interval_seconds
      << ",origin_s=" << series.origin_s << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << i << ',' << series.counts[i] << ',' << int(series.labels[i]) << '\n';
  }
}

inline IntervalSeries read_series(std::istream& in) {
  IntervalSeries series;
  std::string line;
  if (!std::getline(in, line)) throw parse_error(1, "missing series header");
  {
    const auto fields = text::split(text::trim(line), ',');
    auto value_of = [&](std::string_view field, std::string_view key) {
      const auto eq = field.find('=');
      if (eq == std::string_view::npos || text::trim(field.substr(0, eq)) != key) {
        throw parse_error(1, "expected " + std::string(key) + "=<n>");
      }
      const auto v = text::parse_int(field.substr(eq + 1));
      if (!v) throw parse_error(1, std::string(key) + " is not an integer");
      return *v;
    };
    if (fields.size() != 2) throw parse_error(1, "malformed series header");
    series.interval_seconds = value_of(fields[0], "interval_seconds");
    series.origin_s = value_of(fields[1], "origin_s");
    if (series.interval_seconds < 1) throw parse_error(1, "interval_seconds must be >= 1");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto fields = text::split(body, ',');
    if (fields.size() != 3) throw parse_error(lineno, "expected index,count,label");
    const auto index = text::parse_int(fields[0]);
    const auto count = text::parse_int(fields[1]);
    const auto label = text::parse_int(fields[2]);
    if (!index || *index != static_cast<std::int64_t>(series.size())) {
      throw parse_error(lineno, "indices must run 0,1,2,... in order");
    }
    if (!count || *count < 0) throw parse_error(lineno, "count must be a non-negative integer");
    if (!label || (*label != 0 && *label != 1)) throw parse_error(lineno, "label must be 0 or 1");
    series.counts.push_back(*count);
    series.labels.push_back(static_cast<std::uint8_t>(*label));
  }
  return series;
}

}  // namespace ddos
