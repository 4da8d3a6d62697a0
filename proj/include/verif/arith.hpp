#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <type_traits>

#include "verif/backend_config.hpp"
#include "verif/double_word.hpp"

namespace verif {

enum class ArithOp { add, sub, mul, div };
enum class Relation { lt, le, gt, ge, eq, ne };

template <class T>
constexpr T apply(ArithOp op, T a, T b) noexcept {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  return a;
}

template <class T>
constexpr bool holds(Relation rel, T a, T b) noexcept {
  switch (rel) {
    case Relation::lt: return a < b;
    case Relation::le: return a <= b;
    case Relation::gt: return a > b;
    case Relation::ge: return a >= b;
    case Relation::eq: return a == b;
    case Relation::ne: return a != b;
  }
  return false;
}

/// Exact result of a op b as a double-word (quotient: rounded remainder term).
template <class T>
DoubleWord<T> exact_op(ArithOp op, T a, T b, ExceptionCounters& counters) noexcept {
  switch (op) {
    case ArithOp::add: return two_sum(a, b);
    case ArithOp::sub: return two_sum(a, -b);
    case ArithOp::mul: {
      bool lost = false;
      const auto r = two_prod(a, b, lost);
      if (lost) ++counters.residual_lost;
      return r;
    }
    case ArithOp::div: return exact_div(a, b);
  }
  return {};
}

template <class T>
DoubleWord<T> dw_op(ArithOp op, DoubleWord<T> x, DoubleWord<T> y) noexcept {
  switch (op) {
    case ArithOp::add: return dw_add(x, y);
    case ArithOp::sub: return dw_sub(x, y);
    case ArithOp::mul: return dw_mul(x, y);
    case ArithOp::div: return dw_div(x, y);
  }
  return {};
}

/// Records IEEE exceptions raised by `result = a op b`.
template <class T>
void tally(ArithOp op, T a, T b, T result, ExceptionCounters& counters) noexcept {
  if (std::isfinite(result)) return;
  if (std::isnan(result)) {
    if (!std::isnan(a) && !std::isnan(b)) ++counters.nan_results;
    return;
  }
  if (!std::isfinite(a) || !std::isfinite(b)) return;
  if (op == ArithOp::div && b == T(0)) {
    ++counters.division_by_zero;
  } else {
    ++counters.overflows;
  }
}

/// Exponent e with 2^(e-1) <= |x| < 2^e, for finite nonzero x (subnormals
/// use their actual magnitude).
template <class T>
int magnitude_exponent(T x) noexcept {
  if constexpr (std::is_same_v<T, double>) {
    const int biased = static_cast<int>((std::bit_cast<std::uint64_t>(x) >> 52) & 0x7ff);
    if (biased != 0) return biased - 1022;
  } else if constexpr (std::is_same_v<T, float>) {
    const int biased = static_cast<int>((std::bit_cast<std::uint32_t>(x) >> 23) & 0xff);
    if (biased != 0) return biased - 126;
  }
  return std::ilogb(x) + 1;
}

/// x * 2^k with a single rounding.
inline double scale_pow2(double x, int k) noexcept {
  if (k >= -1022 && k <= 1023) {
    return x * std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
  }
  return std::ldexp(x, k);
}

}  // namespace verif
