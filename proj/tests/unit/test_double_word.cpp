#include <doctest.h>

#include <cmath>
#include <gmpxx.h>
#include <limits>
#include <random>

#include "verif/double_word.hpp"

using verif::DoubleWord;

namespace {

mpq_class q(double x) { return mpq_class(x); }
mpq_class q(DoubleWord<double> d) { return mpq_class(d.hi) + mpq_class(d.lo); }
mpq_class q(DoubleWord<float> d) { return mpq_class(double(d.hi)) + mpq_class(double(d.lo)); }

double random_double(std::mt19937_64& g) {
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<int> ex(-40, 40);
  std::bernoulli_distribution sign(0.5);
  const double v = std::ldexp(mant(g), ex(g));
  return sign(g) ? -v : v;
}

// |approx - exact| <= 2^-k |exact|
bool close(const mpq_class& approx, const mpq_class& exact, int k) {
  mpq_class bound = abs(exact);
  mpz_class den = 1;
  den <<= k;
  bound /= den;
  return abs(approx - exact) <= bound;
}

}  // namespace

TEST_CASE("two_sum examples") {
  auto r = verif::two_sum(1.0, 0x1p-53);
  CHECK(r.hi == 1.0);
  CHECK(r.lo == 0x1p-53);

  r = verif::two_sum(3.25, 0.0);
  CHECK(r.hi == 3.25);
  CHECK(r.lo == 0.0);

  r = verif::two_sum(1e16, 1.0);
  CHECK(r.hi == 1e16);
  CHECK(r.lo == 1.0);
  CHECK(q(r) == q(1e16) + q(1.0));
}

TEST_CASE("two_sum overflow gives infinity and zero residual") {
  const double big = std::numeric_limits<double>::max();
  auto r = verif::two_sum(big, big);
  CHECK(std::isinf(r.hi));
  CHECK(r.lo == 0.0);
}

TEST_CASE("two_sum and two_prod are exact on random operands") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 20000; ++i) {
    const double a = random_double(g), b = random_double(g);
    const auto s = verif::two_sum(a, b);
    REQUIRE(q(s) == q(a) + q(b));
    REQUIRE(s.hi == a + b);
    const auto p = verif::two_prod(a, b);
    REQUIRE(q(p) == q(a) * q(b));
    REQUIRE(p.hi == a * b);
    const auto f = verif::fast_two_sum(std::fabs(a) >= std::fabs(b) ? a : b,
                                       std::fabs(a) >= std::fabs(b) ? b : a);
    REQUIRE(q(f) == q(a) + q(b));
  }
}

TEST_CASE("two_sum and two_prod are exact for binary32") {
  std::mt19937_64 g(12);
  for (int i = 0; i < 20000; ++i) {
    const float a = static_cast<float>(random_double(g));
    const float b = static_cast<float>(random_double(g));
    REQUIRE(q(verif::two_sum(a, b)) == q(double(a)) + q(double(b)));
    REQUIRE(q(verif::two_prod(a, b)) == q(double(a)) * q(double(b)));
  }
}

TEST_CASE("two_prod examples") {
  auto p = verif::two_prod(1.5, 2.0);
  CHECK(p.hi == 3.0);
  CHECK(p.lo == 0.0);

  const double x = 1.0 + 0x1p-52;
  p = verif::two_prod(x, x);
  CHECK(p.lo != 0.0);
  CHECK(q(p) == q(x) * q(x));

  p = verif::two_prod(0.0, 7.0);
  CHECK(p.hi == 0.0);
  CHECK(p.lo == 0.0);
}

TEST_CASE("two_prod flags a residual lost to underflow or overflow") {
  bool lost = false;
  auto p = verif::two_prod(0x1p-600, 0x1p-500 * (1.0 + 0x1p-30), lost);
  CHECK(lost);
  CHECK(p.lo == 0.0);

  p = verif::two_prod(0x1p600, 0x1p600, lost);
  CHECK(lost);
  CHECK(std::isinf(p.hi));

  p = verif::two_prod(3.0, 5.0, lost);
  CHECK_FALSE(lost);
}

TEST_CASE("exact_div residual carries the sign of the rounding error") {
  std::mt19937_64 g(13);
  for (int i = 0; i < 20000; ++i) {
    const double a = random_double(g), b = random_double(g);
    const auto d = verif::exact_div(a, b);
    REQUIRE(d.hi == a / b);
    const mpq_class err = q(a) / q(b) - q(d.hi);
    REQUIRE(sgn(err) == (d.lo > 0) - (d.lo < 0));
    REQUIRE(close(q(d), q(a) / q(b), 100));
  }
}

TEST_CASE("exact_sqrt residual carries the sign of the rounding error") {
  std::mt19937_64 g(14);
  for (int i = 0; i < 20000; ++i) {
    const double a = std::fabs(random_double(g));
    const auto s = verif::exact_sqrt(a);
    REQUIRE(s.hi == std::sqrt(a));
    // sign(sqrt(a) - hi) == sign(a - hi^2)
    const mpq_class err = q(a) - q(s.hi) * q(s.hi);
    REQUIRE(sgn(err) == (s.lo > 0) - (s.lo < 0));
  }
}

TEST_CASE("double-word arithmetic is accurate and normalized") {
  std::mt19937_64 g(15);
  for (int i = 0; i < 5000; ++i) {
    const auto x = verif::two_sum(random_double(g), random_double(g) * 0x1p-30);
    const auto y = verif::two_sum(random_double(g), random_double(g) * 0x1p-30);
    const auto s = verif::dw_add(x, y);
    const auto m = verif::dw_mul(x, y);
    const auto d = verif::dw_div(x, y);
    for (auto r : {s, m, d}) REQUIRE(r.hi + r.lo == r.hi);
    const mpq_class exact_sum = q(x) + q(y);
    if (exact_sum != 0) {
      // Sums may cancel; bound the error by the operands instead.
      REQUIRE(abs(q(s) - exact_sum) <= (abs(q(x)) + abs(q(y))) / mpq_class(mpz_class(1) << 100));
    }
    REQUIRE(close(q(m), q(x) * q(y), 100));
    REQUIRE(close(q(d), q(x) / q(y), 98));
    REQUIRE(q(verif::dw_sub(x, y)) == q(verif::dw_add(x, verif::dw_neg(y))));
  }
}

TEST_CASE("double-word sqrt") {
  std::mt19937_64 g(16);
  for (int i = 0; i < 5000; ++i) {
    const auto x = verif::two_sum(std::fabs(random_double(g)), 0.0);
    const auto y = verif::fast_two_sum(x.hi, x.hi * 0x1p-60);
    const auto r = verif::dw_sqrt(y);
    REQUIRE(r.hi + r.lo == r.hi);
    REQUIRE(close(q(r) * q(r), q(y), 98));
  }
}

TEST_CASE("operands with zero low parts reproduce round-to-nearest") {
  std::mt19937_64 g(17);
  for (int i = 0; i < 5000; ++i) {
    const double a = random_double(g), b = random_double(g);
    const DoubleWord<double> x{a, 0.0}, y{b, 0.0};
    REQUIRE(verif::dw_add(x, y).rounded() == a + b);
    REQUIRE(verif::dw_sub(x, y).rounded() == a - b);
    REQUIRE(verif::dw_mul(x, y).rounded() == a * b);
    REQUIRE(verif::dw_div(x, y).rounded() == a / b);
    REQUIRE(verif::dw_sqrt(DoubleWord<double>{std::fabs(a), 0.0}).rounded() ==
            std::sqrt(std::fabs(a)));
  }
}
