#include "verif/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "verif/cestac.hpp"

namespace verif {
namespace {

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

double log_base(double x, int beta) {
  return beta == 2 ? std::log2(x) : std::log10(x);
}

}  // namespace

double max_digits(int beta, int precision_bits) {
  if (beta == 2) return precision_bits;
  return max_decimal_digits(precision_bits);
}

double relative_std_digits(double std, double mean, int beta, int precision_bits) {
  if (std == 0.0) return max_digits(beta, precision_bits);
  if (mean == 0.0 || !std::isfinite(std) || !std::isfinite(mean)) return 0.0;
  const double s = -log_base(std / std::fabs(mean), beta);
  return std::clamp(s, 0.0, max_digits(beta, precision_bits));
}

SampleStats summarize(const SampleSet& samples, int beta) {
  if (samples.values.size() < 2) {
    throw StatsError("output '" + samples.name + "': need at least 2 samples, got " +
                     std::to_string(samples.values.size()));
  }
  SampleStats st;
  st.beta = beta;
  st.n = samples.values.size();

  std::vector<double> sorted;
  sorted.reserve(st.n);
  for (double x : samples.values) {
    if (std::isnan(x)) {
      ++st.nan_count;
    } else {
      sorted.push_back(x);
    }
  }
  if (sorted.size() < 2) {
    st.valid = false;
    st.mean = st.std = st.s_prime = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  std::sort(sorted.begin(), sorted.end());

  CompensatedSum sum;
  for (double x : sorted) sum.add(x);
  st.mean = sum.value() / static_cast<double>(sorted.size());

  CompensatedSum squares;
  for (double x : sorted) squares.add((x - st.mean) * (x - st.mean));
  st.std = std::sqrt(squares.value() / static_cast<double>(sorted.size() - 1));

  st.exact = st.std == 0.0;
  st.s_prime = relative_std_digits(st.std, st.mean, beta, samples.precision_bits);
  return st;
}

DigitsVsReference sig_digits_vs_reference(double x_hat, double x_ref, int beta,
                                          int precision_bits) {
  DigitsVsReference d;
  const double clamp = max_digits(beta, precision_bits);
  if (x_hat == x_ref) {
    d.unbounded = true;
    d.absolute = x_ref == 0.0;
    d.s = clamp;
    return d;
  }
  double err = std::fabs(x_hat - x_ref);
  if (x_ref == 0.0) {
    d.absolute = true;
  } else {
    err /= std::fabs(x_ref);
  }
  if (std::isnan(err)) {
    d.s = 0.0;
    return d;
  }
  d.s = std::clamp(-log_base(err, beta), 0.0, clamp);
  return d;
}

std::vector<DigitsPoint> digits_evolution(std::span<const std::vector<TraceSample>> per_sample,
                                          std::string_view label, int precision_bits) {
  if (per_sample.size() < 2) throw StatsError("digits_evolution needs at least 2 samples");

  std::vector<std::vector<const TraceSample*>> picked(per_sample.size());
  for (std::size_t s = 0; s < per_sample.size(); ++s) {
    for (const auto& tp : per_sample[s]) {
      if (tp.label == label) picked[s].push_back(&tp);
    }
  }
  const std::size_t len = picked.front().size();
  for (std::size_t s = 1; s < picked.size(); ++s) {
    if (picked[s].size() != len) {
      throw StatsError("ragged trace for '" + std::string(label) + "': sample " +
                       std::to_string(s) + " has " + std::to_string(picked[s].size()) +
                       " points, sample 0 has " + std::to_string(len));
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (picked[s][i]->iteration != picked[0][i]->iteration) {
        throw StatsError("ragged trace for '" + std::string(label) + "': sample " +
                         std::to_string(s) + " diverges at point " + std::to_string(i));
      }
    }
  }

  std::vector<DigitsPoint> series;
  series.reserve(len);
  SampleSet set;
  set.name = std::string(label);
  set.precision_bits = precision_bits;
  set.values.resize(picked.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t s = 0; s < picked.size(); ++s) set.values[s] = picked[s][i]->value;
    const auto st = summarize(set, 2);
    series.push_back({picked[0][i]->iteration, st.valid ? st.s_prime : 0.0});
  }
  return series;
}

double error_scaling_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw StatsError("error_scaling_fit needs at least 3 points");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [n, rel] : points) {
    if (!(n > 0.0) || !(rel > 0.0)) {
      throw StatsError("error_scaling_fit needs positive values");
    }
    mx += std::log(n);
    my += std::log(rel);
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [n, rel] : points) {
    const double dx = std::log(n) - mx;
    sxy += dx * (std::log(rel) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw StatsError("error_scaling_fit needs distinct sizes");
  return sxy / sxx;
}

double lag1_autocorrelation(std::span<const double> series) {
  if (series.size() < 3) throw StatsError("autocorrelation needs at least 3 values");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(series.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double d = series[i] - mean;
    den += d * d;
    if (i + 1 < series.size()) num += d * (series[i + 1] - mean);
  }
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

}  // namespace verif
