#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "verif/arith.hpp"
#include "verif/backend_config.hpp"
#include "verif/double_word.hpp"
#include "verif/rng.hpp"

namespace verif {

enum class RoundingDirection { toward_pos_inf, toward_neg_inf };

constexpr RoundingDirection opposite(RoundingDirection m) noexcept {
  return m == RoundingDirection::toward_pos_inf ? RoundingDirection::toward_neg_inf
                                                : RoundingDirection::toward_pos_inf;
}

/// Directed rounding of an exact double-word result, emulated from the
/// round-to-nearest value hi and the sign of the residual lo.
template <class T>
T directed_round(DoubleWord<T> exact, RoundingDirection mode) noexcept {
  const T z = exact.hi;
  if (mode == RoundingDirection::toward_pos_inf) {
    return exact.lo > T(0) ? std::nextafter(z, std::numeric_limits<T>::infinity()) : z;
  }
  return exact.lo < T(0) ? std::nextafter(z, -std::numeric_limits<T>::infinity()) : z;
}

/// Rounding modes of the three CESTAC components for one operation. The first
/// two are random (bits 63 and 62 of `bits`); the third is the opposite of
/// the second.
constexpr std::array<RoundingDirection, 3> cestac_modes(std::uint64_t bits) noexcept {
  const auto m1 = (bits >> 63) ? RoundingDirection::toward_pos_inf
                               : RoundingDirection::toward_neg_inf;
  const auto m2 = ((bits >> 62) & 1U) ? RoundingDirection::toward_pos_inf
                                      : RoundingDirection::toward_neg_inf;
  return {m1, m2, opposite(m2)};
}

inline constexpr int kCestacSamples = 3;
/// Student t quantile at 95% with 2 degrees of freedom.
inline constexpr double kStudentTau = 4.303;

/// Three carrier values evolved synchronously by the same operations.
template <class T>
struct StochasticTriple {
  std::array<T, 3> v{};
  std::uint64_t op_count = 0;  ///< depth of stochastic operations behind v

  static StochasticTriple exact(T c) noexcept { return {{c, c, c}, 0}; }

  /// Mean of the non-NaN components, NaN when all are NaN.
  double mean() const noexcept {
    double sum = 0.0;
    int n = 0;
    for (T x : v) {
      if (!std::isnan(x)) {
        sum += static_cast<double>(x);
        ++n;
      }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / n;
  }

  bool has_nan() const noexcept {
    return std::any_of(v.begin(), v.end(), [](T x) { return std::isnan(x); });
  }
};

struct CestacDigits {
  double digits = 0.0;
  bool is_noise = true;  ///< printed as "@.0"
};

/// Decimal digits reported for an exact (zero-spread) result:
/// floor(p * log10(2)) to two decimals, 15.95 for binary64.
inline double max_decimal_digits(int precision_bits) noexcept {
  return std::floor(precision_bits * std::log10(2.0) * 100.0) / 100.0;
}

/// Student-based significant digits of a triple:
/// log10(sqrt(3) |m| / (sigma * tau)), sigma with divisor N - 1.
template <class T>
CestacDigits cestac_digits(const StochasticTriple<T>& a) noexcept {
  const double clamp_high = max_decimal_digits(std::numeric_limits<T>::digits);
  for (T x : a.v) {
    if (!std::isfinite(x)) return {0.0, true};
  }
  const double m = (static_cast<double>(a.v[0]) + a.v[1] + a.v[2]) / kCestacSamples;
  if (m == 0.0) return {0.0, true};
  double ss = 0.0;
  for (T x : a.v) ss += (x - m) * (x - m);
  const double sigma = std::sqrt(ss / (kCestacSamples - 1));
  if (sigma == 0.0) return {clamp_high, false};
  const double digits =
      std::log10(std::sqrt(double(kCestacSamples)) * std::fabs(m) / (sigma * kStudentTau));
  if (!(digits > 0.0)) return {0.0, true};
  return {std::min(digits, clamp_high), false};
}

/// One synchronous CESTAC operation. Each component is the directed rounding
/// of the exact A[i] op B[i]; specials propagate per component.
template <class T, class Bits>
StochasticTriple<T> cestac_binary(ArithOp op, const StochasticTriple<T>& a,
                                  const StochasticTriple<T>& b, Bits& rng,
                                  ExceptionCounters& counters,
                                  std::vector<std::array<RoundingDirection, 3>>* mode_log = nullptr) {
  const auto modes = cestac_modes(rng.next_u64());
  if (mode_log) mode_log->push_back(modes);
  StochasticTriple<T> r;
  r.op_count = std::max(a.op_count, b.op_count) + 1;
  for (int i = 0; i < kCestacSamples; ++i) {
    const T x = a.v[i];
    const T y = b.v[i];
    const T nearest = apply(op, x, y);
    if (!std::isfinite(nearest)) {
      tally(op, x, y, nearest, counters);
      r.v[i] = nearest;
    } else {
      r.v[i] = directed_round(exact_op(op, x, y, counters), modes[i]);
    }
  }
  return r;
}

template <class T, class Bits>
StochasticTriple<T> cestac_sqrt(const StochasticTriple<T>& a, Bits& rng,
                                ExceptionCounters& counters,
                                std::vector<std::array<RoundingDirection, 3>>* mode_log = nullptr) {
  const auto modes = cestac_modes(rng.next_u64());
  if (mode_log) mode_log->push_back(modes);
  StochasticTriple<T> r;
  r.op_count = a.op_count + 1;
  for (int i = 0; i < kCestacSamples; ++i) {
    const T x = a.v[i];
    if (x < T(0)) {
      ++counters.invalid_sqrt;
      r.v[i] = std::sqrt(x);
    } else if (!std::isfinite(x) || x == T(0)) {
      r.v[i] = std::sqrt(x);
    } else {
      r.v[i] = directed_round(exact_sqrt(x), modes[i]);
    }
  }
  return r;
}

/// Synchronous comparison: `rel` is decided once on the component means so
/// that all three traces follow the same branch. NaN components are left out
/// of the means; an all-NaN operand yields false. A comparison whose
/// difference is numerical noise is counted as a noisy branch.
template <class T>
bool cestac_compare(const StochasticTriple<T>& a, Relation rel, const StochasticTriple<T>& b,
                    ExceptionCounters& counters) noexcept {
  const double ma = a.mean();
  const double mb = b.mean();
  if (std::isnan(ma) || std::isnan(mb)) {
    ++counters.nan_comparisons;
    return false;
  }
  StochasticTriple<T> diff;
  for (int i = 0; i < kCestacSamples; ++i) diff.v[i] = a.v[i] - b.v[i];
  bool same = diff.v[0] == T(0) && diff.v[1] == T(0) && diff.v[2] == T(0);
  if (!same && cestac_digits(diff).is_noise) ++counters.noisy_branches;
  return holds(rel, ma, mb);
}

/// CESTAC arithmetic policy for the interpreter.
template <class T, class Bits = RngStream>
class CestacArithmetic {
 public:
  using Value = StochasticTriple<T>;
  using Carrier = T;

  CestacArithmetic(Bits& rng, ExceptionCounters& counters) : rng_(&rng), counters_(&counters) {}

  Value constant(T c) const noexcept { return Value::exact(c); }

  Value binary(ArithOp op, const Value& a, const Value& b) {
    return cestac_binary(op, a, b, *rng_, *counters_, mode_log_);
  }
  Value sqrt(const Value& a) { return cestac_sqrt(a, *rng_, *counters_, mode_log_); }
  Value neg(Value a) const noexcept {
    for (T& x : a.v) x = -x;
    return a;
  }
  Value fabs(Value a) const noexcept {
    for (T& x : a.v) x = std::fabs(x);
    return a;
  }
  bool compare(const Value& a, Relation rel, const Value& b) {
    return cestac_compare(a, rel, b, *counters_);
  }

  /// Records the rounding modes of every subsequent operation.
  void set_mode_log(std::vector<std::array<RoundingDirection, 3>>* log) noexcept { mode_log_ = log; }

 private:
  Bits* rng_;
  ExceptionCounters* counters_;
  std::vector<std::array<RoundingDirection, 3>>* mode_log_ = nullptr;
};

}  // namespace verif
