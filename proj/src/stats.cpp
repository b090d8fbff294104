#include "intersafe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "intersafe/errors.hpp"

namespace intersafe {

std::vector<double> min_max_normalize(std::span<const double> xs) {
  if (xs.size() < 2) throw ComputationError("min-max normalization needs at least two values");
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw ComputationError("min-max normalization of a constant series");
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((x - *lo) / range);
  return out;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ComputationError("pearson_r: series lengths differ");
  if (xs.size() < 3) throw ComputationError("pearson_r needs n >= 3");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ComputationError("pearson_r of a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double p_value_t(double r, std::size_t n) {
  if (n < 3) throw ComputationError("p-value needs n >= 3");
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

namespace {

constexpr double kTieTolerance = 1e-12;

// Unbiased draw in [0, bound) straight from the engine so results do not depend on the
// standard library's distribution implementation.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

}  // namespace

double p_value_permutation(std::span<const double> xs, std::span<const double> ys, std::size_t samples,
                           std::uint64_t seed) {
  const double observed = std::abs(pearson_r(xs, ys));
  const std::size_t n = ys.size();
  std::vector<double> perm(ys.begin(), ys.end());
  std::size_t hits = 0;
  std::size_t total = 0;
  if (n <= 8) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      for (std::size_t i = 0; i < n; ++i) perm[i] = ys[idx[i]];
      if (std::abs(pearson_r(xs, perm)) >= observed - kTieTolerance) ++hits;
      ++total;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
  }
  std::mt19937_64 rng(seed);
  hits = 1;  // the observed pairing
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[draw_below(rng, i + 1)]);
    if (std::abs(pearson_r(xs, perm)) >= observed - kTieTolerance) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples + 1);
}

double p_value(std::span<const double> xs, std::span<const double> ys, const StatsParams& params) {
  if (params.p_method == PValueMethod::Permutation) {
    return p_value_permutation(xs, ys, params.monte_carlo_samples, params.seed);
  }
  return p_value_t(pearson_r(xs, ys), xs.size());
}

double t_critical(double level, double df) {
  const boost::math::students_t dist(df);
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

MeanBand mean_confidence(std::span<const double> xs, double level) {
  if (xs.empty()) throw ComputationError("confidence band of an empty sample");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() == 1) return {mean, mean, mean};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double half = t_critical(level, n - 1.0) * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

}  // namespace intersafe
