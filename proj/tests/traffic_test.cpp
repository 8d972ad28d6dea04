#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "ddos/traffic.hpp"

using namespace ddos;

namespace {

std::vector<PacketRecord> records_at_seconds(std::int64_t from, std::int64_t to) {
  std::vector<PacketRecord> out;
  for (std::int64_t s = from; s <= to; ++s) out.push_back({s * 1000, "h1", "h2"});
  return out;
}

// Direct counting: records in [origin + i*w, origin + (i+1)*w).
std::vector<std::int64_t> count_directly(const std::vector<PacketRecord>& recs,
                                         std::int64_t origin_s, std::int64_t width_s,
                                         std::size_t n) {
  std::vector<std::int64_t> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto lo = (origin_s + std::int64_t(i) * width_s) * 1000;
    const auto hi = lo + width_s * 1000;
    for (const auto& r : recs) counts[i] += (r.timestamp_ms >= lo && r.timestamp_ms < hi);
  }
  return counts;
}

std::vector<std::pair<std::size_t, std::size_t>> label_runs(const IntervalSeries& s) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.labels[i] && (i == 0 || !s.labels[i - 1])) runs.emplace_back(i, 0);
    if (s.labels[i]) ++runs.back().second;
  }
  return runs;
}

}  // namespace

TEST(ParsePacketLog, EmptyInputGivesNoRecords) {
  std::istringstream in("");
  EXPECT_TRUE(parse_packet_log(in).empty());
}

TEST(ParsePacketLog, WellFormedLinesMatchTokens) {
  std::istringstream in("# capture\n1000,10.0.0.1,10.0.0.9\n\n1500,a,b\n  2999 , src , dst \n");
  const auto recs = parse_packet_log(in);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0], (PacketRecord{1000, "10.0.0.1", "10.0.0.9"}));
  EXPECT_EQ(recs[1], (PacketRecord{1500, "a", "b"}));
  EXPECT_EQ(recs[2], (PacketRecord{2999, "src", "dst"}));
}

TEST(ParsePacketLog, ErrorsNameTheLine) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_packet_log(in);
    } catch (const parse_error& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("abc,h1,h2\n"), 1u);
  EXPECT_EQ(line_of("1,a,b\n2,a\n"), 2u);
  EXPECT_EQ(line_of("1,a,b\n#x\n-5,a,b\n"), 3u);
  EXPECT_EQ(line_of("1,a,b,c\n"), 1u);
  EXPECT_EQ(line_of("1,,b\n"), 1u);
}

TEST(Bucketize, NoRecordsGivesEmptySeries) {
  EXPECT_TRUE(bucketize({}, 10).empty());
}

TEST(Bucketize, ThirtySecondsOfOnePerSecond) {
  const auto recs = records_at_seconds(0, 29);
  const auto s = bucketize(recs, 10);
  EXPECT_EQ(s.origin_s, 0);
  EXPECT_EQ(s.counts, count_directly(recs, 0, 10, 3));
  EXPECT_EQ(s.counts, (std::vector<std::int64_t>{10, 10, 10}));
  EXPECT_EQ(s.labels, (std::vector<std::uint8_t>{0, 0, 0}));
}

TEST(Bucketize, OriginSnapsToIntervalMultiple) {
  const auto recs = records_at_seconds(25, 29);
  const auto s = bucketize(recs, 10);
  EXPECT_EQ(s.origin_s, 20);
  EXPECT_EQ(s.counts, count_directly(recs, 20, 10, 1));
  EXPECT_EQ(s.counts, (std::vector<std::int64_t>{5}));
}

TEST(Bucketize, DestinationFilter) {
  std::vector<PacketRecord> recs = {{0, "a", "victim"}, {100, "a", "other"}, {12000, "b", "victim"}};
  const auto s = bucketize(recs, 10, std::string("victim"));
  EXPECT_EQ(s.counts, (std::vector<std::int64_t>{1, 1}));
  EXPECT_TRUE(bucketize(recs, 10, std::string("nobody")).empty());
}

TEST(Bucketize, PermutationInvariantAndConservesCount) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> ts(3'000, 500'000);
  std::bernoulli_distribution to_victim(0.7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PacketRecord> recs;
    for (int i = 0; i < 300; ++i) recs.push_back({ts(rng), "s", to_victim(rng) ? "v" : "w"});
    const auto a = bucketize(recs, 10, std::string("v"));
    std::shuffle(recs.begin(), recs.end(), rng);
    const auto b = bucketize(recs, 10, std::string("v"));
    EXPECT_EQ(a, b);
    const auto matching = std::count_if(recs.begin(), recs.end(), [](auto& r) { return r.dst == "v"; });
    EXPECT_EQ(std::accumulate(a.counts.begin(), a.counts.end(), std::int64_t{0}), matching);
  }
}

TEST(GenerateBaseline, ZeroIntervals) {
  SynthesisConfig cfg;
  cfg.n_intervals = 0;
  EXPECT_TRUE(generate_baseline(cfg).empty());
}

TEST(GenerateBaseline, SampleMeanNearRate) {
  SynthesisConfig cfg;
  cfg.n_intervals = 10000;
  cfg.baseline_rate = 50;
  const auto s = generate_baseline(cfg);
  const double mean =
      std::accumulate(s.counts.begin(), s.counts.end(), 0.0) / double(s.counts.size());
  EXPECT_NEAR(mean, 50.0, 0.02 * 50.0);
  EXPECT_TRUE(std::all_of(s.labels.begin(), s.labels.end(), [](auto l) { return l == 0; }));
}

TEST(GenerateBaseline, DeterministicPerSeed) {
  SynthesisConfig cfg;
  cfg.n_intervals = 500;
  EXPECT_EQ(generate_baseline(cfg), generate_baseline(cfg));
  auto other = cfg;
  other.seed = 43;
  EXPECT_NE(generate_baseline(cfg), generate_baseline(other));
}

TEST(GenerateBaseline, RejectsNonPositiveRate) {
  SynthesisConfig cfg;
  cfg.baseline_rate = 0;
  EXPECT_THROW(generate_baseline(cfg), error);
}

TEST(InjectAttacks, ZeroFractionIsNoOp) {
  SynthesisConfig cfg;
  cfg.n_intervals = 200;
  cfg.attack_fraction = 0;
  const auto base = generate_baseline(cfg);
  EXPECT_EQ(inject_attacks(base, cfg), base);
}

TEST(InjectAttacks, ExactCoverageInDisjointRuns) {
  SynthesisConfig cfg;
  cfg.n_intervals = 100;
  cfg.attack_fraction = 0.25;
  cfg.burst_length = 5;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    cfg.seed = seed;
    const auto s = inject_attacks(generate_baseline(cfg), cfg);
    EXPECT_EQ(std::count(s.labels.begin(), s.labels.end(), 1), 25);
    const auto runs = label_runs(s);
    ASSERT_EQ(runs.size(), 5u);
    for (const auto& [start, len] : runs) EXPECT_EQ(len, 5u);
  }
}

TEST(InjectAttacks, ShortFinalBurstKeepsExactFraction) {
  SynthesisConfig cfg;  // 10,000 x 0.2 = 2,000 intervals; 2,000 / 6 is not whole
  const auto s = inject_attacks(generate_baseline(cfg), cfg);
  EXPECT_EQ(std::count(s.labels.begin(), s.labels.end(), 1), 2000);
  const auto runs = label_runs(s);
  EXPECT_EQ(runs.size(), 334u);
  EXPECT_EQ(std::count_if(runs.begin(), runs.end(), [](auto& r) { return r.second == 6; }), 333);
}

TEST(InjectAttacks, AttackedMeanNearScaledRate) {
  SynthesisConfig cfg;
  cfg.attack_multiplier = 10;
  const auto s = inject_attacks(generate_baseline(cfg), cfg);
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.labels[i]) {
      sum += double(s.counts[i]);
      ++n;
    }
  }
  EXPECT_NEAR(sum / double(n), 500.0, 50.0);
}

TEST(InjectAttacks, OnlyAttackedPositionsChange) {
  SynthesisConfig cfg;
  cfg.n_intervals = 3000;
  for (std::uint64_t seed = 1; seed < 6; ++seed) {
    cfg.seed = seed;
    const auto base = generate_baseline(cfg);
    const auto s = inject_attacks(base, cfg);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.labels[i]) EXPECT_EQ(s.counts[i], base.counts[i]);
    }
  }
}

TEST(InjectAttacks, RejectsFractionThatCannotFit) {
  SynthesisConfig cfg;
  cfg.n_intervals = 20;
  cfg.attack_fraction = 0.95;  // 19 intervals in 4 bursts need 3 separators
  cfg.burst_length = 5;
  EXPECT_THROW(inject_attacks(generate_baseline(cfg), cfg), error);
}

TEST(InjectPeriodicAttacks, BurstsRepeatAtPeriod) {
  SynthesisConfig cfg;
  cfg.n_intervals = 1000;
  const auto s = inject_periodic_attacks(generate_baseline(cfg), cfg, 50);
  for (std::size_t i = 50; i < s.size(); ++i) EXPECT_EQ(s.labels[i], s.labels[i - 50]);
  EXPECT_EQ(std::count(s.labels.begin(), s.labels.begin() + 50, 1), 6);
  EXPECT_THROW(inject_periodic_attacks(generate_baseline(cfg), cfg, 6), error);
}

TEST(SeriesFile, RoundTripsAndValidates) {
  SynthesisConfig cfg;
  cfg.n_intervals = 300;
  auto s = inject_attacks(generate_baseline(cfg), cfg);
  s.origin_s = 1200;
  std::stringstream buf;
  write_series(buf, s);
  EXPECT_TRUE(buf.str().starts_with("interval_seconds=10,origin_s=1200\n0,"));
  EXPECT_EQ(read_series(buf), s);

  std::istringstream bad("interval_seconds=10,origin_s=0\n0,5,0\n2,5,0\n");
  EXPECT_THROW(read_series(bad), parse_error);
  std::istringstream bad_label("interval_seconds=10,origin_s=0\n0,5,2\n");
  EXPECT_THROW(read_series(bad_label), parse_error);
}
