#include "verif/corpus.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <gmpxx.h>

#include "verif/rng.hpp"

namespace verif {
namespace {

/// Round-to-nearest-even conversion; mpq_get_d truncates.
double nearest_double(const mpq_class& q) {
  const double t = q.get_d();
  if (mpq_class(t) == q) return t;
  const double away = std::nextafter(t, q > 0 ? INFINITY : -INFINITY);
  const mpq_class dt = abs(q - mpq_class(t));
  const mpq_class da = abs(mpq_class(away) - q);
  if (dt < da) return t;
  if (da < dt) return away;
  return (std::bit_cast<std::uint64_t>(t) & 1u) == 0 ? t : away;
}

mpq_class decimal(const char* text) {
  // Parses [-]digits[.digits][e[-]digits] exactly.
  std::string s(text);
  bool neg = false;
  std::size_t pos = 0;
  if (s[pos] == '-') {
    neg = true;
    ++pos;
  }
  std::string digits;
  long exp10 = 0;
  bool frac = false;
  for (; pos < s.size() && s[pos] != 'e' && s[pos] != 'E'; ++pos) {
    if (s[pos] == '.') {
      frac = true;
      continue;
    }
    digits += s[pos];
    if (frac) --exp10;
  }
  if (pos < s.size()) exp10 += std::stol(s.substr(pos + 1));
  mpz_class num(digits.empty() ? "0" : digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  mpq_class q = exp10 >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
  q.canonicalize();
  return neg ? mpq_class(-q) : q;
}

std::string param(const std::map<std::string, std::string>& params, const std::string& key,
                  const std::string& fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

template <class Int>
Int int_param(const std::map<std::string, std::string>& params, const std::string& key,
              Int fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  Int v{};
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw CorpusError("parameter " + key + ": expected an integer, found '" + s + "'");
  }
  return v;
}

Check check(std::string output, std::string metric, std::optional<double> min,
            std::optional<double> max) {
  return Check{std::move(output), std::move(metric), min, max};
}

}  // namespace

std::string_view to_string(Scale s) noexcept { return s == Scale::paper ? "paper" : "desk"; }

Scale parse_scale(std::string_view text) {
  if (text == "paper") return Scale::paper;
  if (text == "desk") return Scale::desk;
  throw CorpusError("unknown scale '" + std::string(text) + "' (expected paper or desk)");
}

std::vector<double> kahan_inputs(std::int64_t n, std::uint64_t input_seed) {
  RngStream rng(input_seed, 0);
  std::vector<double> f(static_cast<std::size_t>(n));
  for (auto& x : f) x = static_cast<double>(rng.next_u64() >> 40) * 0x1p-24;
  return f;
}

CaseSpec kahan_sum_case(KahanVariant variant, std::int64_t n, std::uint64_t input_seed) {
  if (n < 1) throw CorpusError("kahan: n must be at least 1");
  const std::string len = std::to_string(n);
  const std::string last = std::to_string(n - 1);
  CaseSpec c;
  c.carrier = Carrier::binary32;
  c.input_seed = input_seed;
  if (variant == KahanVariant::compensated) {
    c.name = "kahan-compensated";
    c.source =
        "in real f[" + len + "];\n"
        "out sum;\n"
        "var real c;\nvar real y;\nvar real t;\nvar int i;\n"
        "sum = f[0];\n"
        "c = 0.0;\n"
        "for i = 1 to " + last + " {\n"
        "  y = f[i] - c;\n"
        "  t = sum + y;\n"
        "  c = (t - sum) - y;\n"
        "  sum = t;\n"
        "}\n"
        "return sum;\n";
    c.predicate = {check("sum", "s10", 6.8, 7.8)};
  } else {
    c.name = "kahan-naive";
    c.source =
        "in real f[" + len + "];\n"
        "out sum;\n"
        "var int i;\n"
        "sum = f[0];\n"
        "for i = 1 to " + last + " {\n"
        "  sum = sum + f[i];\n"
        "}\n"
        "return sum;\n";
    c.predicate = {check("sum", "s10", 5.3, 6.3)};
  }
  auto f = kahan_inputs(n, input_seed);
  mpq_class exact = 0;
  for (double x : f) exact += mpq_class(x);
  c.reference["sum"] = nearest_double(exact);
  c.inputs.real_arrays["f"] = std::move(f);
  return c;
}

CaseSpec linear_system_case(Carrier precision) {
  CaseSpec c;
  c.name = "linear-system";
  c.carrier = precision;
  // Row operations use the pivot row (p1 p2 | p3) to eliminate from (q1 q2 | q3).
  c.source = R"(out x1;
out x2;
var real a11; var real a12; var real a21; var real a22;
var real b1; var real b2;
var real p1; var real p2; var real p3;
var real q1; var real q2; var real q3;
var real m; var real u22; var real y2;
a11 = 0.2161; a12 = 0.1441; b1 = 0.1440;
a21 = 1.2969; a22 = 0.8648; b2 = 0.8642;
if (fabs(a21) > fabs(a11)) {
  p1 = a21; p2 = a22; p3 = b2;
  q1 = a11; q2 = a12; q3 = b1;
} else {
  p1 = a11; p2 = a12; p3 = b1;
  q1 = a21; q2 = a22; q3 = b2;
}
m = q1 / p1;
u22 = q2 - m * p2;
y2 = q3 - m * p3;
x2 = y2 / u22;
x1 = (p3 - p2 * x2) / p1;
)";
  const mpq_class a11 = decimal("0.2161"), a12 = decimal("0.1441"), b1 = decimal("0.1440");
  const mpq_class a21 = decimal("1.2969"), a22 = decimal("0.8648"), b2 = decimal("0.8642");
  const mpq_class det = a11 * a22 - a12 * a21;
  c.reference["x1"] = nearest_double((b1 * a22 - a12 * b2) / det);
  c.reference["x2"] = nearest_double((a11 * b2 - b1 * a21) / det);
  if (precision == Carrier::binary64) {
    c.predicate = {check("x1", "s10", 7.5, 9.0), check("x2", "s10", 7.5, 9.0)};
  } else {
    c.predicate = {check("x1", "s10", std::nullopt, 1.0), check("x2", "s10", std::nullopt, 1.0)};
  }
  return c;
}

CaseSpec unstable_branch_case() {
  CaseSpec c;
  c.name = "unstable-branch";
  c.source = R"(out c;
var real a;
var real b;
a = 2.0 * sqrt(3.0) / 3.0;
b = a * a - a * a;
if (b >= 0) {
  c = sqrt(b) + 10.0;
} else {
  c = sqrt(-b) + 10.0;
}
return c;
)";
  c.reference["c"] = 10.0;
  c.predicate = {check("c", "abs_error_vs_reference", std::nullopt, 1e-6),
                 check("c", "s10", 8.0, 11.0), check("c", "nan_count", std::nullopt, 0.0)};
  return c;
}

CaseSpec counter_case(Scale scale, std::int64_t trace_every) {
  CaseSpec c;
  c.name = "counter";
  c.scale = scale;
  const bool paper = scale == Scale::paper;
  const char* start = paper ? "-5e13" : "-5e11";
  const std::int64_t iterations = paper ? 100000000 : 1000000;
  std::string body =
      "  if (i % 2 == 0) {\n"
      "    c = c + 1.e6;\n"
      "  } else {\n"
      "    c = c - 1.e-6;\n"
      "  }\n";
  if (trace_every > 0) {
    body += "  if (i % " + std::to_string(trace_every) + " == " +
            std::to_string(trace_every - 1) + ") {\n    trace(\"c\", c);\n  }\n";
  }
  c.source = "out c;\nvar int i;\nc = " + std::string(start) + ";\nfor i = 0 to " +
             std::to_string(iterations - 1) + " {\n" + body + "}\nreturn c;\n";
  const mpq_class half(iterations / 2);
  const mpq_class exact = decimal(start) + half * decimal("1e6") - half * decimal("1e-6");
  c.reference["c"] = nearest_double(exact);
  c.predicate = {check("c", "cestac_digits_min", 0.5, std::nullopt),
                 check("c", "digits_vs_reference", std::nullopt, 0.0)};
  return c;
}

CaseSpec improbability_case() {
  CaseSpec c;
  c.name = "improbability";
  c.source = R"(in real x;
in real dx[300];
out kh;
var int i;
var real y;
var real cf;
var real rp;
for i = 0 to 299 {
  y = x + dx[i];
  cf = 4.0 - 3.0 * (y - 2.0) * ((y - 5.0) * (y - 5.0) + 4.0)
       / (y + (y - 2.0) * (y - 2.0) * ((y - 5.0) * (y - 5.0) + 3.0));
  rp = (622.0 - x * (751.0 - x * (324.0 - x * (59.0 - 4.0 * x))))
       / (112.0 - x * (151.0 - x * (72.0 - x * (14.0 - x))));
  kh = cf - rp;
  trace("kh", kh);
}
)";
  const double x = 1.60631924;
  std::vector<double> dx(300);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = static_cast<double>(i + 1) * 0x1p-53;

  const mpq_class qx(x);
  const mpq_class rp = (622 - qx * (751 - qx * (324 - qx * (59 - 4 * qx)))) /
                       (112 - qx * (151 - qx * (72 - qx * (14 - qx))));
  auto& ref = c.trace_reference["kh"];
  for (double d : dx) {
    const mpq_class y = qx + mpq_class(d);
    const mpq_class s = (y - 5) * (y - 5);
    const mpq_class cf = 4 - 3 * (y - 2) * (s + 4) / (y + (y - 2) * (y - 2) * (s + 3));
    ref.push_back(nearest_double(cf - rp));
  }
  c.reference["kh"] = ref.back();
  c.inputs.reals["x"] = x;
  c.inputs.real_arrays["dx"] = std::move(dx);
  return c;
}

CaseSpec make_case(std::string_view name, const std::map<std::string, std::string>& params) {
  auto reject_unknown = [&](std::initializer_list<const char*> known) {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (const char* kk : known) ok = ok || k == kk;
      if (!ok) {
        throw CorpusError("case '" + std::string(name) + "' has no parameter '" + k + "'");
      }
    }
  };
  if (name == "kahan-compensated" || name == "kahan-naive") {
    reject_unknown({"n", "input_seed"});
    const auto n = int_param<std::int64_t>(params, "n", 100000);
    const auto seed = int_param<std::uint64_t>(params, "input_seed", 1);
    return kahan_sum_case(
        name == "kahan-naive" ? KahanVariant::naive : KahanVariant::compensated, n, seed);
  }
  if (name == "linear-system") {
    reject_unknown({"precision"});
    return linear_system_case(parse_carrier(param(params, "precision", "binary64")));
  }
  if (name == "unstable-branch") {
    reject_unknown({});
    return unstable_branch_case();
  }
  if (name == "counter") {
    reject_unknown({"scale", "trace_every"});
    return counter_case(parse_scale(param(params, "scale", "desk")),
                        int_param<std::int64_t>(params, "trace_every", 0));
  }
  if (name == "improbability") {
    reject_unknown({});
    return improbability_case();
  }
  throw CorpusError("unknown corpus case '" + std::string(name) + "'");
}

std::vector<std::string> case_names() {
  return {"kahan-compensated", "kahan-naive", "linear-system", "unstable-branch", "counter",
          "improbability"};
}

}  // namespace verif
