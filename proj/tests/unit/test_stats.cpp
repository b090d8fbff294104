#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "intersafe/errors.hpp"
#include "intersafe/stats.hpp"

using namespace intersafe;

TEST(Normalize, Examples) {
  EXPECT_EQ(min_max_normalize(std::vector<double>{2, 4, 6}), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(min_max_normalize(std::vector<double>{0, 1}), (std::vector<double>{0, 1}));
  EXPECT_THROW(min_max_normalize(std::vector<double>{5, 5, 5}), ComputationError);
}

TEST(Pearson, PerfectLinear) {
  const std::vector<double> xs = {1, 2, 3, 4, 5};
  std::vector<double> up;
  std::vector<double> down;
  for (double x : xs) {
    up.push_back(2 * x + 1);
    down.push_back(-x);
  }
  EXPECT_NEAR(pearson_r(xs, up), 1.0, 1e-12);
  EXPECT_NEAR(pearson_r(xs, down), -1.0, 1e-12);
}

TEST(Pearson, HandComputed) {
  EXPECT_NEAR(pearson_r(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 1, 4, 3}), 0.6, 1e-12);
}

TEST(Pearson, DegenerateInputs) {
  EXPECT_THROW(pearson_r(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ComputationError);
  EXPECT_THROW(pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}), ComputationError);
  EXPECT_THROW(pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), ComputationError);
}

TEST(PValue, ZeroCorrelationIsOne) {
  const std::vector<double> xs = {1, 2, 3, 4};
  const std::vector<double> ys = {1, -1, -1, 1};
  EXPECT_NEAR(pearson_r(xs, ys), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(p_value_t(0.0, 4), 1.0);
  EXPECT_DOUBLE_EQ(p_value_permutation(xs, ys, 1000, 1), 1.0);
}

TEST(PValue, MonotoneSixIsTwoOverSevenTwenty) {
  const std::vector<double> xs = {1, 2, 3, 4, 5, 6};
  const std::vector<double> ys = {3, 5, 7, 9, 11, 13};
  EXPECT_EQ(p_value_permutation(xs, ys, 0, 0), 2.0 / 720.0);
}

TEST(PValue, TDistributionMatchesReportedValue) { EXPECT_NEAR(p_value_t(0.89, 6), 0.017, 0.001); }

TEST(PValue, PerfectCorrelationIsZero) { EXPECT_EQ(p_value_t(1.0, 6), 0.0); }

TEST(PValue, MonteCarloIsSeededAndBounded) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < 12; ++i) {
    xs.push_back(i);
    ys.push_back(i + 3.0 * std::sin(i));
  }
  const double a = p_value_permutation(xs, ys, 5000, 42);
  EXPECT_EQ(a, p_value_permutation(xs, ys, 5000, 42));
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 0.05);
}

TEST(PValue, MethodSelection) {
  const std::vector<double> xs = {1, 2, 3, 4, 5, 6};
  const std::vector<double> ys = {1, 3, 2, 5, 4, 6};
  StatsParams p;
  p.p_method = PValueMethod::TDist;
  EXPECT_DOUBLE_EQ(p_value(xs, ys, p), p_value_t(pearson_r(xs, ys), 6));
  p.p_method = PValueMethod::Permutation;
  EXPECT_DOUBLE_EQ(p_value(xs, ys, p), p_value_permutation(xs, ys, p.monte_carlo_samples, p.seed));
}

TEST(Confidence, TextbookBand) {
  const MeanBand b = mean_confidence(std::vector<double>{3, 5, 7});
  EXPECT_DOUBLE_EQ(b.mean, 5.0);
  const double half = 4.302652729911275 * 2.0 / std::sqrt(3.0);
  EXPECT_NEAR(b.high - b.mean, half, 1e-9);
  EXPECT_NEAR(b.mean - b.low, half, 1e-9);
  EXPECT_NEAR(t_critical(0.95, 2), 4.303, 5e-4);
}

TEST(Confidence, SingleDayCollapses) {
  const MeanBand b = mean_confidence(std::vector<double>{4});
  EXPECT_EQ(b.low, 4.0);
  EXPECT_EQ(b.high, 4.0);
}
