#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ddos/metrics.hpp"

using namespace ddos;

TEST(Confusion, HandWorkedExample) {
  // truth:      1 1 1 0 0 0 0 1
  // predicted:  1 0 1 0 1 0 0 1
  const std::vector<std::uint8_t> t = {1, 1, 1, 0, 0, 0, 0, 1};
  const std::vector<std::uint8_t> p = {1, 0, 1, 0, 1, 0, 0, 1};
  const auto c = confusion(t, p);
  EXPECT_EQ(c.tp, 3u);
  EXPECT_EQ(c.tn, 3u);
  EXPECT_EQ(c.fp, 1u);  // attack missed
  EXPECT_EQ(c.fn, 1u);  // false alarm
  const auto s = classification_scores(c);
  EXPECT_DOUBLE_EQ(s.accuracy_pct, 75.0);
  EXPECT_DOUBLE_EQ(s.fp_pct, 12.5);
  EXPECT_DOUBLE_EQ(s.fn_pct, 12.5);
  EXPECT_DOUBLE_EQ(s.f1, 0.75);
}

TEST(Confusion, MissedAttacksCountAsFalsePositives) {
  const std::vector<std::uint8_t> t = {1, 1, 0, 0};
  const std::vector<std::uint8_t> p = {0, 0, 0, 0};
  const auto c = confusion(t, p);
  EXPECT_EQ(c, (Confusion{0, 2, 2, 0}));
  const auto s = classification_scores(c);
  EXPECT_DOUBLE_EQ(s.fp_pct, 50.0);
  EXPECT_DOUBLE_EQ(s.fn_pct, 0.0);
  EXPECT_DOUBLE_EQ(s.f1, 0.0);
}

TEST(Confusion, AllLegitimatePerfectPrediction) {
  const std::vector<std::uint8_t> z(5, 0);
  const auto s = classification_scores(confusion(z, z));
  EXPECT_DOUBLE_EQ(s.accuracy_pct, 100.0);
  EXPECT_DOUBLE_EQ(s.f1, 1.0);
}

TEST(Confusion, Errors) {
  const std::vector<std::uint8_t> a = {1, 0}, b = {1};
  EXPECT_THROW(confusion(a, b), error);
  EXPECT_THROW(confusion({}, {}), error);
  EXPECT_THROW(classification_scores(Confusion{}), error);
}

TEST(Confusion, InvariantsOnRandomLabels) {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> t(50), p(50);
    for (std::size_t i = 0; i < 50; ++i) {
      t[i] = coin(rng);
      p[i] = coin(rng);
    }
    const auto c = confusion(t, p);
    EXPECT_EQ(c.total(), 50u);
    const auto s = classification_scores(c);
    EXPECT_NEAR(s.accuracy_pct + s.fp_pct + s.fn_pct, 100.0, 1e-9);

    // Swapping truth and prediction swaps missed attacks with false alarms.
    const auto swapped = confusion(p, t);
    EXPECT_EQ(swapped.fp, c.fn);
    EXPECT_EQ(swapped.fn, c.fp);
    EXPECT_EQ(swapped.tp, c.tp);

    std::vector<std::size_t> order(50);
    for (std::size_t i = 0; i < 50; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint8_t> tp(50), pp(50);
    for (std::size_t i = 0; i < 50; ++i) {
      tp[i] = t[order[i]];
      pp[i] = p[order[i]];
    }
    EXPECT_EQ(confusion(tp, pp), c);
  }
}

TEST(Regression, HandWorkedValues) {
  const std::vector<double> y = {0, 1}, yhat = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(rmse(y, yhat), 0.5);
  EXPECT_DOUBLE_EQ(r_squared(y, yhat), 0.0);
  EXPECT_DOUBLE_EQ(r_squared(y, y), 1.0);
  const std::vector<double> a = {1, 2, 3, 4}, b = {2, 2, 2, 6};
  EXPECT_DOUBLE_EQ(rmse(a, b), std::sqrt(6.0 / 4));
  EXPECT_DOUBLE_EQ(r_squared(a, b), 1.0 - 6.0 / 5.0);
}

TEST(Regression, RmseIsSymmetricAndNonNegative) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(20);
    for (std::size_t i = 0; i < 20; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    EXPECT_EQ(rmse(a, b), rmse(b, a));
    EXPECT_GE(rmse(a, b), 0.0);
    EXPECT_EQ(rmse(a, a), 0.0);
    EXPECT_LE(r_squared(a, b), 1.0);
  }
}

TEST(Regression, Errors) {
  const std::vector<double> one = {1}, two = {1, 2}, flat = {3, 3, 3}, any = {1, 2, 3};
  EXPECT_THROW(rmse(one, two), error);
  EXPECT_THROW(rmse({}, {}), error);
  EXPECT_THROW(r_squared(one, one), error);
  try {
    r_squared(flat, any);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::degenerate);
  }
}
