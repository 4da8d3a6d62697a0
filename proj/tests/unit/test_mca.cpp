#include <doctest.h>

#include <cmath>
#include <gmpxx.h>
#include <limits>
#include <random>

#include "verif/mca.hpp"

using verif::ArithOp;
using verif::BackendKind;
using verif::DoubleWord;
using verif::ExceptionCounters;

namespace {

struct CountingNoise {
  double xi = 0.25;
  int draws = 0;
  double next_unit_centered() {
    ++draws;
    return xi;
  }
};

// Mean of (sample - center) over n RR trials, exactly, and the sample sigma.
struct Moments {
  mpq_class mean_offset;
  double sigma;
};

template <class F>
Moments sample_moments(F draw, double center, int n) {
  mpq_class sum = 0;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = draw() - center;
    sum += mpq_class(d);
    s += d;
    s2 += d * d;
  }
  const double m = s / n;
  return {sum / n, std::sqrt((s2 - n * m * m) / (n - 1))};
}

}  // namespace

TEST_CASE("ieee addition rounds to nearest") {
  ExceptionCounters c;
  verif::IeeeArithmetic<double> ieee(c);
  CHECK(ieee.binary(ArithOp::add, 0.1, 0.2) == 0.30000000000000004);
}

TEST_CASE("inexact leaves zero and specials alone") {
  CountingNoise noise;
  auto z = verif::inexact(DoubleWord<double>{0.0, 0.0}, 53, noise);
  CHECK(z.hi == 0.0);
  CHECK(noise.draws == 0);
  auto inf = verif::inexact(DoubleWord<double>{INFINITY, 0.0}, 53, noise);
  CHECK(std::isinf(inf.hi));
  auto nan = verif::inexact(DoubleWord<double>{NAN, 0.0}, 53, noise);
  CHECK(std::isnan(nan.hi));
  CHECK(noise.draws == 0);
}

TEST_CASE("inexact with xi = 0 returns its input") {
  verif::ZeroNoise zero;
  const DoubleWord<double> v{1.75, 0x1p-60};
  const auto r = verif::inexact(v, 24, zero);
  CHECK(r.hi == v.hi);
  CHECK(r.lo == v.lo);
}

TEST_CASE("inexact perturbation is bounded by 2^(e-t)/2") {
  verif::RngStream rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const auto r = verif::inexact(DoubleWord<double>{1.0, 0.0}, 24, rng);
    const double dev = std::fabs((r.hi - 1.0) + r.lo);
    REQUIRE(dev <= 0x1p-24);
  }
}

TEST_CASE("draw counts per mode") {
  for (auto [kind, expected] : {std::pair{BackendKind::mca_rr, 1}, {BackendKind::mca_pb, 2},
                                {BackendKind::mca_full, 3}}) {
    CountingNoise noise;
    ExceptionCounters c;
    verif::mca_binary(ArithOp::mul, 1.1, 2.3, kind, 53, noise, c);
    CHECK(noise.draws == expected);
  }
}

TEST_CASE("all modes degenerate to round-to-nearest when xi = 0") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  verif::ZeroNoise zero;
  ExceptionCounters c;
  for (int i = 0; i < 20000; ++i) {
    const double a = u(g), b = u(g);
    for (auto kind : {BackendKind::mca_rr, BackendKind::mca_pb, BackendKind::mca_full}) {
      REQUIRE(verif::mca_binary(ArithOp::add, a, b, kind, 53, zero, c) == a + b);
      REQUIRE(verif::mca_binary(ArithOp::sub, a, b, kind, 53, zero, c) == a - b);
      REQUIRE(verif::mca_binary(ArithOp::mul, a, b, kind, 53, zero, c) == a * b);
      REQUIRE(verif::mca_binary(ArithOp::div, a, b, kind, 53, zero, c) == a / b);
      REQUIRE(verif::mca_sqrt(std::fabs(a), kind, 53, zero, c) == std::sqrt(std::fabs(a)));
      const float fa = float(a), fb = float(b);
      REQUIRE(verif::mca_binary(ArithOp::add, fa, fb, kind, 24, zero, c) == fa + fb);
      REQUIRE(verif::mca_binary(ArithOp::mul, fa, fb, kind, 24, zero, c) == fa * fb);
      REQUIRE(verif::mca_binary(ArithOp::div, fa, fb, kind, 24, zero, c) == fa / fb);
    }
  }
}

TEST_CASE("random rounding of 0.1 + 0.2 is unbiased") {
  verif::RngStream rng(9, 0);
  ExceptionCounters c;
  const auto exact = verif::two_sum(0.1, 0.2);
  const int n = 100000;
  auto m = sample_moments(
      [&] { return verif::mca_binary(ArithOp::add, 0.1, 0.2, BackendKind::mca_rr, 53, rng, c); },
      exact.hi, n);
  const double bias = mpq_class(m.mean_offset - mpq_class(exact.lo)).get_d();
  CHECK(m.sigma > 0.0);
  CHECK(std::fabs(bias) <= 4.0 * m.sigma / std::sqrt(double(n)));
}

TEST_CASE("binary32 random rounding spread stays within 2^(e-24)") {
  verif::RngStream rng(10, 0);
  ExceptionCounters c;
  const float a = 1.0f, b = 3 * 0x1p-24f;  // sum needs 25 bits
  const float nearest = a + b;
  const int e = verif::magnitude_exponent(nearest);
  float lo = nearest, hi = nearest;
  for (int i = 0; i < 1000; ++i) {
    const float r = verif::mca_binary(ArithOp::add, a, b, BackendKind::mca_rr, 24, rng, c);
    REQUIRE(std::fabs(double(r) - double(nearest)) <= std::ldexp(1.0, e - 24));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo < hi);
}

TEST_CASE("mca_sqrt") {
  ExceptionCounters c;
  verif::IeeeArithmetic<double> ieee(c);
  CHECK(ieee.sqrt(4.0) == 2.0);

  verif::RngStream rng(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const double r = verif::mca_sqrt(2.0, BackendKind::mca_rr, 53, rng, c);
    REQUIRE(std::fabs(r - 1.41421356237309515) <= 0x1p-52);
  }

  for (auto kind : {BackendKind::mca_rr, BackendKind::mca_pb, BackendKind::mca_full}) {
    ExceptionCounters k;
    CHECK(std::isnan(verif::mca_sqrt(-1.0, kind, 53, rng, k)));
    CHECK(k.invalid_sqrt == 1);
  }
}

TEST_CASE("specials keep IEEE semantics and are counted") {
  verif::RngStream rng(4, 0);
  for (auto kind : {BackendKind::mca_rr, BackendKind::mca_pb, BackendKind::mca_full}) {
    ExceptionCounters c;
    CHECK(verif::mca_binary(ArithOp::div, 1.0, 0.0, kind, 53, rng, c) == INFINITY);
    CHECK(c.division_by_zero == 1);
    CHECK(std::isnan(verif::mca_binary(ArithOp::div, 0.0, 0.0, kind, 53, rng, c)));
    CHECK(c.nan_results == 1);
    const double big = std::numeric_limits<double>::max();
    CHECK(verif::mca_binary(ArithOp::mul, big, 2.0, kind, 53, rng, c) == INFINITY);
    CHECK(c.overflows == 1);
  }
}

TEST_CASE("identity data flow recovers t digits") {
  // x + 0 at precision t: s' >= t log10(2) - 1.
  for (int t : {24, 40, 53}) {
    verif::RngStream rng(t, 0);
    ExceptionCounters c;
    const double x = 0.7;
    double s = 0.0, s2 = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      const double r = verif::mca_binary(ArithOp::add, x, 0.0, BackendKind::mca_rr, t, rng, c);
      s += r - x;
      s2 += (r - x) * (r - x);
    }
    const double m = s / n;
    const double sigma = std::sqrt((s2 - n * m * m) / (n - 1));
    if (sigma == 0.0) continue;  // t = 53 on a representable x is exact
    CHECK(-std::log10(sigma / x) >= t * std::log10(2.0) - 1.0);
  }
}
