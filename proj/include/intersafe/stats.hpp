#pragma once
/**
 * @file stats.hpp
 * @brief Min-max normalization, Pearson correlation, p-values and t confidence bands.
 */

#include <cstdint>
#include <span>
#include <vector>

#include "intersafe/config.hpp"

namespace intersafe {

/// (x - min) / (max - min). Needs at least two values and max > min.
std::vector<double> min_max_normalize(std::span<const double> xs);

/// Sample correlation coefficient. Needs equal lengths, n >= 3, neither series constant.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Two-tailed p from t = r * sqrt((n - 2) / (1 - r^2)) on n - 2 degrees of freedom.
/// |r| = 1 gives 0.
double p_value_t(double r, std::size_t n);

/// Share of pairings of ys against xs with |r| >= |r_observed| (identity included).
/// All n! pairings for n <= 8, otherwise `samples` seeded random shuffles.
double p_value_permutation(std::span<const double> xs, std::span<const double> ys, std::size_t samples,
                           std::uint64_t seed);

double p_value(std::span<const double> xs, std::span<const double> ys, const StatsParams& params);

/// Two-sided Student-t critical value, e.g. t_critical(0.95, 2) = 4.303.
double t_critical(double level, double df);

struct MeanBand {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// mean +/- t * sd / sqrt(n); a single value gives a degenerate band.
MeanBand mean_confidence(std::span<const double> xs, double level = 0.95);

}  // namespace intersafe
