#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "verif/cestac.hpp"
#include "verif/corpus.hpp"
#include "verif/dsl/checker.hpp"
#include "verif/dsl/interpreter.hpp"
#include "verif/dsl/parser.hpp"
#include "verif/mca.hpp"

using namespace verif;
using namespace verif::dsl;

namespace {

CheckedProgram compile(const std::string& src) { return check(parse(src)); }

template <class T = double>
EvalResult<T> run_ieee(const std::string& src, const Inputs& in = {}, bool trace = false) {
  ExceptionCounters c;
  IeeeArithmetic<T> arith(c);
  return evaluate(compile(src), arith, in, trace);
}

int count_kind(const Program& p, ExprKind k) {
  return static_cast<int>(
      std::count_if(p.exprs.begin(), p.exprs.end(), [&](const Expr& e) { return e.kind == k; }));
}

}  // namespace

TEST_CASE("parse: one binary add") {
  auto p = parse("out s; s = 1.0 + 2.0; return s;");
  CHECK(p.decls.size() == 1);
  CHECK(p.body.size() == 2);
  CHECK(count_kind(p, ExprKind::binary) == 1);
}

TEST_CASE("parse: unstable branch listing") {
  auto p = parse(unstable_branch_case().source);
  const auto ifs = std::count_if(p.stmts.begin(), p.stmts.end(),
                                 [](const Stmt& s) { return s.kind == StmtKind::if_else; });
  CHECK(ifs == 1);
  CHECK(count_kind(p, ExprKind::sqrt) == 3);  // one in a, one per branch
}

TEST_CASE("parse: syntax error at the offending token") {
  try {
    parse("var real x;\nx = ;");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.loc().line == 2);
    CHECK(e.loc().column == 5);
    CHECK(e.found().find(';') != std::string::npos);
    CHECK_FALSE(e.expected().empty());
    CHECK(std::string(e.what()).find("2:5") != std::string::npos);
  }
}

TEST_CASE("parse: other syntax errors") {
  CHECK_THROWS_AS(parse("out x x = 1.0;"), ParseError);
  CHECK_THROWS_AS(parse("for i = 0 to 3 { "), ParseError);
  CHECK_THROWS_AS(parse("trace(x, 1.0);"), ParseError);
  CHECK_THROWS_AS(parse("x = 1.0 @ 2.0;"), ParseError);
}

TEST_CASE("check: undeclared identifier is named") {
  try {
    compile("out x; x = y + 1.0;");
    FAIL("expected a check error");
  } catch (const CheckError& e) {
    CHECK(std::string(e.what()).find("'y'") != std::string::npos);
  }
}

TEST_CASE("check: type rules") {
  CHECK_THROWS_AS(compile("var real b; var int i; for i = 0 to b { }"), CheckError);
  CHECK_THROWS_AS(compile("var real x; var int i; x = i;"), CheckError);
  CHECK_THROWS_AS(compile("var real x; x = 1.5 % 2.0;"), CheckError);
  CHECK_THROWS_AS(compile("var real a[3]; a[3] = 1.0;"), CheckError);
  CHECK_THROWS_AS(compile("var int i; for i = 0 to 3 { i = 2; }"), CheckError);
  CHECK_THROWS_AS(compile("var int i; for i = 0 to 3 { for i = 0 to 1 { } }"), CheckError);
  CHECK_THROWS_AS(compile("var real x; var real x;"), CheckError);
  CHECK_THROWS_AS(compile("out int k;"), CheckError);
  CHECK_NOTHROW(compile("var real x; x = 2 * x - 1;"));
}

TEST_CASE("check: corpus programs compile") {
  for (const auto& name : case_names()) {
    CHECK_NOTHROW(compile(make_case(name).source));
  }
  CHECK_NOTHROW(compile(kahan_sum_case(KahanVariant::compensated, 1000, 1).source));
}

TEST_CASE("evaluate: returning a literal") {
  auto r = run_ieee("return 3.5;");
  REQUIRE(r.outputs.size() == 1);
  CHECK(r.outputs[0].first == "result");
  CHECK(r.outputs[0].second == 3.5);

  ExceptionCounters c;
  RngStream rng(1, 0);
  CestacArithmetic<double> ces(rng, c);
  auto t = evaluate(compile("return 3.5;"), ces, {});
  CHECK(t.outputs[0].second.v == std::array<double, 3>{3.5, 3.5, 3.5});
}

TEST_CASE("evaluate: unstable branch under ieee gives exactly 10") {
  auto r = run_ieee(unstable_branch_case().source);
  CHECK(r.outputs[0].first == "c");
  CHECK(r.outputs[0].second == 10.0);
}

TEST_CASE("evaluate: loops, ints, arrays and return halting") {
  const char* src = R"(
    in real f[4];
    in int n;
    out s;
    var int i;
    var int k;
    s = 0.0;
    k = 0;
    for i = 0 to n - 1 {
      s = s + f[i] * 2.0;
      k = k + i % 2;
    }
    if (k == 2) { return s; }
    s = -1.0;
  )";
  Inputs in;
  in.real_arrays["f"] = {1.0, 2.0, 3.0, 4.0};
  in.ints["n"] = 4;
  auto r = run_ieee(src, in);
  CHECK(r.outputs[0].second == 20.0);
}

TEST_CASE("evaluate: else-if chains and comparisons") {
  const char* src = R"(
    in real x;
    out y;
    if (x < 0) { y = -1.0; } else if (x == 0) { y = 0.0; } else { y = 1.0; }
  )";
  for (auto [x, expect] : {std::pair{-2.0, -1.0}, {0.0, 0.0}, {3.0, 1.0}}) {
    Inputs in;
    in.reals["x"] = x;
    CHECK(run_ieee(src, in).outputs[0].second == expect);
  }
}

TEST_CASE("evaluate: trace points carry the loop counter") {
  const char* src = R"(
    var int i;
    var real c;
    out c2;
    c = 1.0;
    for i = 3 to 5 { c = c * 2.0; trace("c", c); }
    c2 = c;
  )";
  auto r = run_ieee(src, {}, true);
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace[0].iteration == 3);
  CHECK(r.trace[2].iteration == 5);
  CHECK(r.trace[2].value == 8.0);
  CHECK(run_ieee(src).trace.empty());
}

TEST_CASE("evaluate: runtime errors") {
  CHECK_THROWS_AS(run_ieee("var real a[2]; var int i; i = 2; a[i] = 1.0;"), EvalError);
  CHECK_THROWS_AS(run_ieee("var int i; i = 9223372036854775807; i = i + 1;"), EvalError);
  CHECK_THROWS_AS(run_ieee("var int i; var int j; j = 0; i = 1 / j;"), EvalError);
  CHECK_THROWS_AS(run_ieee("in real x; out y; y = x;"), EvalError);
  Inputs extra;
  extra.reals["nope"] = 1.0;
  CHECK_THROWS_AS(run_ieee("out y; y = 1.0;", extra), EvalError);
  Inputs wrong_len;
  wrong_len.real_arrays["f"] = {1.0};
  CHECK_THROWS_AS(run_ieee("in real f[2]; out y; y = f[0];", wrong_len), EvalError);
}

TEST_CASE("evaluate: NaN and infinity are values, not errors") {
  ExceptionCounters c;
  IeeeArithmetic<double> arith(c);
  auto r = evaluate(compile("out y; out z; y = 1.0 / 0.0; z = sqrt(-1.0);"), arith, {});
  CHECK(std::isinf(r.outputs[0].second));
  CHECK(std::isnan(r.outputs[1].second));
  CHECK(c.division_by_zero == 1);
  CHECK(c.invalid_sqrt == 1);
}

TEST_CASE("evaluate: binary32 literals round directly to float") {
  auto r = run_ieee<float>("out y; y = 0.1;");
  CHECK(r.outputs[0].second == 0.1f);
}

TEST_CASE("evaluate: MCA comparisons follow each sample") {
  const char* src = R"(
    out y;
    var real a;
    a = 0.1 + 0.2;
    if (a < 0.30000000000000004) { y = 1.0; } else { y = 0.0; }
  )";
  const auto prog = compile(src);
  int ones = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    ExceptionCounters c;
    RngStream rng(1, k);
    McaArithmetic<double> arith(BackendKind::mca_rr, 53, rng, c);
    ones += evaluate(prog, arith, {}).outputs[0].second == 1.0;
  }
  CHECK(ones > 0);
  CHECK(ones < 200);
}
