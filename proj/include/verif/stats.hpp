#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "verif/backend_config.hpp"

namespace verif {

class StatsError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo results for one program output, ordered by stream id.
struct SampleSet {
  std::string name;
  std::vector<double> values;
  std::vector<std::uint64_t> stream_ids;
  int precision_bits = 53;  ///< carrier precision; bounds the reported digits
};

struct SampleStats {
  std::size_t n = 0;          ///< samples, NaNs included
  double mean = 0.0;
  double std = 0.0;           ///< divisor n - 1
  double s_prime = 0.0;       ///< -log_beta(std / |mean|), floored at 0
  int beta = 10;
  bool exact = false;         ///< std == 0; s_prime holds the carrier maximum
  bool valid = true;          ///< false when fewer than two non-NaN samples
  std::size_t nan_count = 0;
};

/// Most digits a carrier with `precision_bits` can carry in base beta
/// (53 bits: 53 in base 2, 15.95 in base 10).
double max_digits(int beta, int precision_bits = 53);

/// -log_beta(std / |mean|) floored at 0 and capped at max_digits.
double relative_std_digits(double std, double mean, int beta, int precision_bits = 53);

/// Sample mean, standard deviation and stochastic significant digits. The
/// result does not depend on the order of `samples.values`.
SampleStats summarize(const SampleSet& samples, int beta);

struct DigitsVsReference {
  double s = 0.0;
  bool unbounded = false;  ///< x_hat == x_ref; s holds the clamp value
  bool absolute = false;   ///< x_ref == 0: s counts digits of absolute error
};

/// Digits of agreement -log_beta |(x_hat - x_ref) / x_ref|, floored at 0.
DigitsVsReference sig_digits_vs_reference(double x_hat, double x_ref, int beta,
                                          int precision_bits = 53);

/// One traced value of one sample.
struct TraceSample {
  std::string label;
  std::int64_t iteration = 0;
  double value = 0.0;
};

struct DigitsPoint {
  std::int64_t iteration = 0;
  double bits = 0.0;
};

/// Significant bits across samples at every traced iteration of `label`.
/// Throws StatsError if samples traced different iterations.
std::vector<DigitsPoint> digits_evolution(std::span<const std::vector<TraceSample>> per_sample,
                                          std::string_view label, int precision_bits = 53);

/// Least-squares slope of log(relative error) against log(n).
double error_scaling_fit(std::span<const std::pair<double, double>> points);

/// Lag-1 sample autocorrelation; NaN for a constant series.
double lag1_autocorrelation(std::span<const double> series);

}  // namespace verif
