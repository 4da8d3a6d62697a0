#pragma once

#include <cmath>

#include "verif/arith.hpp"
#include "verif/backend_config.hpp"
#include "verif/double_word.hpp"
#include "verif/rng.hpp"

namespace verif {

/// Parker's randomization v + 2^(e_v - t) * xi, accumulated into the
/// double-word. Zero, NaN and infinities are returned untouched; exactly one
/// xi is drawn for every other input.
template <class T, class Noise>
[[gnu::always_inline]] inline DoubleWord<T> inexact(DoubleWord<T> v, int t, Noise& noise) {
  if (!std::isfinite(v.hi) || (v.hi == T(0) && v.lo == T(0))) return v;
  const double xi = noise.next_unit_centered();
  if (xi == 0.0) return v;
  const int e = magnitude_exponent(v.hi);
  const T perturbation = static_cast<T>(scale_pow2(xi, e - t));
  return two_sum(v.hi, v.lo + perturbation);
}

/// One MCA arithmetic operation on carrier values.
///
///   ieee : RN(a op b)
///   rr   : round(inexact(a op b))
///   pb   : round(inexact(a) op inexact(b))
///   full : round(inexact(inexact(a) op inexact(b)))
///
/// Draws happen in the order left operand, right operand, result. Special
/// results (overflow, division by zero, NaN) keep IEEE semantics and are never
/// perturbed.
template <class T, class Noise>
T mca_binary(ArithOp op, T a, T b, BackendKind kind, int t, Noise& noise,
             ExceptionCounters& counters) {
  const T nearest = apply(op, a, b);
  if (!std::isfinite(nearest)) {
    tally(op, a, b, nearest, counters);
    return nearest;
  }

  switch (kind) {
    case BackendKind::mca_rr:
      return inexact(exact_op(op, a, b, counters), t, noise).rounded();
    case BackendKind::mca_pb: {
      const auto x = inexact(DoubleWord<T>{a, T(0)}, t, noise);
      const auto y = inexact(DoubleWord<T>{b, T(0)}, t, noise);
      return dw_op(op, x, y).rounded();
    }
    case BackendKind::mca_full: {
      const auto x = inexact(DoubleWord<T>{a, T(0)}, t, noise);
      const auto y = inexact(DoubleWord<T>{b, T(0)}, t, noise);
      return inexact(dw_op(op, x, y), t, noise).rounded();
    }
    case BackendKind::ieee:
    case BackendKind::cestac:
      break;
  }
  return nearest;
}

/// MCA square root. Negative operands give an unperturbed NaN and bump
/// `invalid_sqrt`.
template <class T, class Noise>
T mca_sqrt(T a, BackendKind kind, int t, Noise& noise, ExceptionCounters& counters) {
  if (a < T(0)) {
    ++counters.invalid_sqrt;
    return std::sqrt(a);
  }
  if (!std::isfinite(a) || a == T(0)) return std::sqrt(a);

  switch (kind) {
    case BackendKind::mca_rr:
      return inexact(exact_sqrt(a), t, noise).rounded();
    case BackendKind::mca_pb:
      return dw_sqrt(inexact(DoubleWord<T>{a, T(0)}, t, noise)).rounded();
    case BackendKind::mca_full:
      return inexact(dw_sqrt(inexact(DoubleWord<T>{a, T(0)}, t, noise)), t, noise)
          .rounded();
    case BackendKind::ieee:
    case BackendKind::cestac:
      break;
  }
  return std::sqrt(a);
}

/// Plain round-to-nearest arithmetic with exception accounting.
template <class T>
class IeeeArithmetic {
 public:
  using Value = T;
  using Carrier = T;

  explicit IeeeArithmetic(ExceptionCounters& counters) : counters_(&counters) {}

  Value constant(T c) const noexcept { return c; }

  Value binary(ArithOp op, Value a, Value b) {
    const T r = apply(op, a, b);
    if (!std::isfinite(r)) tally(op, a, b, r, *counters_);
    return r;
  }
  Value sqrt(Value a) {
    if (a < T(0)) ++counters_->invalid_sqrt;
    return std::sqrt(a);
  }
  Value neg(Value a) const noexcept { return -a; }
  Value fabs(Value a) const noexcept { return std::fabs(a); }
  bool compare(Value a, Relation rel, Value b) const noexcept { return holds(rel, a, b); }

 private:
  ExceptionCounters* counters_;
};

/// Monte Carlo Arithmetic at virtual precision t. Negation and absolute value
/// are exact and never perturbed; comparisons act on the sample's own values.
template <class T, class Noise = RngStream>
class McaArithmetic {
 public:
  using Value = T;
  using Carrier = T;

  McaArithmetic(BackendKind kind, int t, Noise& noise, ExceptionCounters& counters)
      : kind_(kind), t_(t), noise_(&noise), counters_(&counters) {}

  Value constant(T c) const noexcept { return c; }

  Value binary(ArithOp op, Value a, Value b) {
    return mca_binary(op, a, b, kind_, t_, *noise_, *counters_);
  }
  Value sqrt(Value a) { return mca_sqrt(a, kind_, t_, *noise_, *counters_); }
  Value neg(Value a) const noexcept { return -a; }
  Value fabs(Value a) const noexcept { return std::fabs(a); }
  bool compare(Value a, Relation rel, Value b) const noexcept { return holds(rel, a, b); }

 private:
  BackendKind kind_;
  int t_;
  Noise* noise_;
  ExceptionCounters* counters_;
};

}  // namespace verif
