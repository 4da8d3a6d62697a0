#pragma once

#include <cmath>
#include <limits>
#include <type_traits>

namespace verif {

/// Unevaluated sum hi + lo of two carrier floats with hi = RN(hi + lo).
///
/// Collapsing a normalized pair to the carrier is therefore just `hi`; every
/// constructor in this header maintains that invariant.
template <class T>
struct DoubleWord {
  static_assert(std::is_floating_point_v<T>);
  T hi{};
  T lo{};

  constexpr T rounded() const noexcept { return hi; }
  friend constexpr bool operator==(const DoubleWord&, const DoubleWord&) = default;
};

/// Knuth's branch-free TwoSum. An overflowing sum yields (±inf, 0).
template <class T>
DoubleWord<T> two_sum(T a, T b) noexcept {
  const T s = a + b;
  if (!std::isfinite(s)) return {s, T(0)};
  const T bb = s - a;
  const T err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

/// Dekker's Fast2Sum; requires |a| >= |b| or a == 0.
template <class T>
DoubleWord<T> fast_two_sum(T a, T b) noexcept {
  const T s = a + b;
  if (!std::isfinite(s)) return {s, T(0)};
  const T z = s - a;
  return {s, b - z};
}

/// Smallest product magnitude whose fma residual is guaranteed exact.
template <class T>
constexpr T exact_product_threshold() noexcept {
  // 2^(emin - 1 + p): below this the low part of the product can underflow.
  return std::numeric_limits<T>::min() *
         static_cast<T>(1ULL << std::numeric_limits<T>::digits);
}

/// Exact product via the fma residual. When the exact product overflows or
/// falls in the range where the residual is not representable, lo is flushed
/// to zero and `residual_lost` is set.
template <class T>
DoubleWord<T> two_prod(T a, T b, bool& residual_lost) noexcept {
  residual_lost = false;
  const T p = a * b;
  if (a == T(0) || b == T(0)) return {p, T(0)};
  if (!std::isfinite(p) || std::fabs(p) < exact_product_threshold<T>()) {
    residual_lost = std::isfinite(a) && std::isfinite(b);
    return {p, T(0)};
  }
  return {p, std::fma(a, b, -p)};
}

template <class T>
DoubleWord<T> two_prod(T a, T b) noexcept {
  bool ignored = false;
  return two_prod(a, b, ignored);
}

/// Correctly rounded quotient plus the (rounded) quotient of the exact
/// remainder. The sign of lo is always the sign of the true rounding error.
template <class T>
DoubleWord<T> exact_div(T a, T b) noexcept {
  const T q = a / b;
  if (!std::isfinite(q) || q == T(0)) return {q, T(0)};
  const T r = std::fma(-q, b, a);
  return {q, r / b};
}

/// Correctly rounded square root plus a first-order correction carrying the
/// sign of the rounding error.
template <class T>
DoubleWord<T> exact_sqrt(T a) noexcept {
  const T s = std::sqrt(a);
  if (!(a > T(0)) || !std::isfinite(a)) return {s, T(0)};
  const T r = std::fma(-s, s, a);
  return {s, r / (T(2) * s)};
}

// Double-word arithmetic. Operands with lo == 0 take the exact path so that
// unperturbed inputs reproduce round-to-nearest exactly.

template <class T>
DoubleWord<T> dw_add(DoubleWord<T> x, DoubleWord<T> y) noexcept {
  if (x.lo == T(0) && y.lo == T(0)) return two_sum(x.hi, y.hi);
  const auto s = two_sum(x.hi, y.hi);
  if (!std::isfinite(s.hi)) return s;
  const auto t = two_sum(x.lo, y.lo);
  const auto v = fast_two_sum(s.hi, s.lo + t.hi);
  return fast_two_sum(v.hi, t.lo + v.lo);
}

template <class T>
DoubleWord<T> dw_neg(DoubleWord<T> x) noexcept {
  return {-x.hi, -x.lo};
}

template <class T>
DoubleWord<T> dw_sub(DoubleWord<T> x, DoubleWord<T> y) noexcept {
  return dw_add(x, dw_neg(y));
}

template <class T>
DoubleWord<T> dw_mul(DoubleWord<T> x, DoubleWord<T> y) noexcept {
  if (x.lo == T(0) && y.lo == T(0)) return two_prod(x.hi, y.hi);
  const auto c = two_prod(x.hi, y.hi);
  if (!std::isfinite(c.hi)) return c;
  const T tl0 = x.lo * y.lo;
  const T tl1 = std::fma(x.hi, y.lo, tl0);
  const T cl2 = std::fma(x.lo, y.hi, tl1);
  return fast_two_sum(c.hi, c.lo + cl2);
}

template <class T>
DoubleWord<T> dw_div(DoubleWord<T> x, DoubleWord<T> y) noexcept {
  if (x.lo == T(0) && y.lo == T(0)) return exact_div(x.hi, y.hi);
  const T q1 = x.hi / y.hi;
  if (!std::isfinite(q1) || q1 == T(0)) return {q1, T(0)};
  // r = x - q1 * y, carried in double-word.
  const auto p = dw_mul(y, DoubleWord<T>{q1, T(0)});
  const auto r = dw_sub(x, p);
  const T q2 = r.hi / y.hi;
  return fast_two_sum(q1, q2);
}

/// Square root with one Newton correction in double-word arithmetic.
template <class T>
DoubleWord<T> dw_sqrt(DoubleWord<T> x) noexcept {
  if (x.lo == T(0)) return exact_sqrt(x.hi);
  const T s = std::sqrt(x.hi);
  if (!(x.hi > T(0)) || !std::isfinite(x.hi)) return {s, T(0)};
  const T r = std::fma(-s, s, x.hi) + x.lo;
  return fast_two_sum(s, r / (T(2) * s));
}

}  // namespace verif
