#include <doctest.h>

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "verif/harness.hpp"

using namespace verif;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

ExperimentSpec spec_for(const std::string& program, BackendKind kind, std::uint64_t n,
                        unsigned jobs = 1) {
  ExperimentSpec s;
  s.program = program;
  s.backend.kind = kind;
  s.backend.carrier = Carrier::binary64;
  s.backend.t = 53;
  s.n_samples = n;
  s.root_seed = 7;
  s.jobs = jobs;
  return s;
}

}  // namespace

TEST_CASE("ieee samples are identical") {
  auto r = run_experiment(spec_for("unstable-branch", BackendKind::ieee, 5));
  const auto& c = r.output("c");
  REQUIRE(c.values.size() == 5);
  for (double v : c.values) CHECK(v == 10.0);
  CHECK(c.s10.valid);
  CHECK(c.s10.std == 0.0);
}

TEST_CASE("report does not depend on the worker count") {
  const auto a = report_json(run_experiment(spec_for("linear-system", BackendKind::mca_full, 64, 1)), false);
  const auto b = report_json(run_experiment(spec_for("linear-system", BackendKind::mca_full, 64, 16)), false);
  CHECK(a == b);
  const auto c = report_json(run_experiment(spec_for("linear-system", BackendKind::mca_full, 64, 3)), false);
  CHECK(a == c);
}

TEST_CASE("different seeds give different MCA samples") {
  auto s1 = spec_for("linear-system", BackendKind::mca_rr, 4);
  auto s2 = s1;
  s2.root_seed = 8;
  CHECK(run_experiment(s1).output("x1").values != run_experiment(s2).output("x1").values);
}

TEST_CASE("csv has one line per output and sample") {
  auto r = run_experiment(spec_for("linear-system", BackendKind::mca_rr, 3));
  const auto csv = report_csv(r);
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line == "output,sample,value");
  ++lines;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 7);
}

TEST_CASE("json values round-trip bit for bit") {
  auto r = run_experiment(spec_for("linear-system", BackendKind::mca_full, 10));
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["spec"]["backend"] == "mca-full");
  CHECK(j["spec"]["samples"] == 10);
  CHECK_FALSE(j["spec"].contains("jobs"));
  const auto& vals = j["outputs"][0]["values"];
  REQUIRE(vals.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(std::bit_cast<std::uint64_t>(vals[k].get<double>()) ==
          std::bit_cast<std::uint64_t>(r.outputs[0].values[k]));
  }
  CHECK(j["outputs"][0]["reference"].get<double>() == r.outputs[0].reference.value());
  CHECK(j["run"]["jobs"] == 1);
}

TEST_CASE("single sample reports s10 as null") {
  auto r = run_experiment(spec_for("unstable-branch", BackendKind::mca_rr, 1));
  CHECK_FALSE(r.output("c").s10.valid);
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["outputs"][0]["s10"].is_null());
}

TEST_CASE("cestac reports one triple per run") {
  auto s = spec_for("unstable-branch", BackendKind::cestac, 6);
  auto single = run_experiment(s);
  CHECK(single.runs == 1);
  CHECK(single.output("c").cestac.size() == 1);
  s.multi_seed = true;
  auto multi = run_experiment(s);
  CHECK(multi.runs == 6);
  CHECK(multi.output("c").cestac.size() == 6);
}

TEST_CASE("empty reports are refused") {
  Report r;
  auto path = (std::filesystem::temp_directory_path() / "verif_empty.json").string();
  CHECK_THROWS_AS(emit_report(r, ReportFormat::json, path), IoError);
}

TEST_CASE("unwritable report path is an I/O error") {
  auto r = run_experiment(spec_for("unstable-branch", BackendKind::ieee, 1));
  CHECK_THROWS_AS(emit_report(r, ReportFormat::json, "/nonexistent-dir/x/report.json"), IoError);
}

TEST_CASE("failing sample is named") {
  auto prog = temp_file("verif_bad.k", "in real f[3];\nin int k;\nout y;\ny = f[k];\n");
  auto inputs = temp_file("verif_bad.json", R"({"f": [1.0, 2.0, 3.0], "k": 5})");
  auto s = spec_for(prog.string(), BackendKind::mca_rr, 4, 2);
  s.inputs_path = inputs.string();
  try {
    run_experiment(s);
    FAIL("expected a sample error");
  } catch (const SampleError& e) {
    CHECK(e.sample() == 0);
    CHECK(std::string(e.what()).find("sample 0") != std::string::npos);
  }
}

TEST_CASE("file programs bind JSON inputs") {
  auto prog = temp_file("verif_ok.k", "in real f[3];\nin int k;\nout y;\ny = f[k] * 2.0;\n");
  auto inputs = temp_file("verif_ok.json", R"({"f": [1.0, 2.0, 3.0], "k": 2})");
  auto s = spec_for(prog.string(), BackendKind::ieee, 1);
  s.inputs_path = inputs.string();
  CHECK(run_experiment(s).output("y").values[0] == 6.0);

  auto bad = temp_file("verif_badin.json", R"({"f": [1.0, 2.0, 3.0], "k": 2.5})");
  s.inputs_path = bad.string();
  CHECK_THROWS_AS(run_experiment(s), Error);
}

TEST_CASE("spec validation") {
  auto s = spec_for("unstable-branch", BackendKind::mca_rr, 0);
  CHECK_THROWS_AS(run_experiment(s), UsageError);
  s = spec_for("unstable-branch", BackendKind::mca_rr, 2);
  s.backend.t = 60;
  CHECK_THROWS_AS(run_experiment(s), UsageError);
  s = spec_for("unstable-branch", BackendKind::mca_rr, 2, 0);
  CHECK_THROWS_AS(run_experiment(s), UsageError);
  s = spec_for("no-such-case", BackendKind::ieee, 1);
  CHECK_THROWS_AS(run_experiment(s), Error);
}

TEST_CASE("metric values") {
  auto r = run_experiment(spec_for("linear-system", BackendKind::ieee, 2));
  CHECK(metric_value(r, "x1", "value") == 2.000000002400302);
  CHECK(metric_value(r, "x1", "n") == 2.0);
  CHECK(metric_value(r, "x1", "digits_vs_reference") == doctest::Approx(8.92).epsilon(0.01));
  CHECK(metric_value(r, "", "exceptions.nan_results") == 0.0);
  CHECK_THROWS(metric_value(r, "x1", "nope"));
  CHECK_THROWS(metric_value(r, "x9", "mean"));
}

TEST_CASE("manifest checks") {
  auto entries = parse_manifest(R"({"cases": [
    {"id": "ok", "case": "unstable-branch", "backend": "ieee",
     "checks": [{"output": "c", "metric": "value", "min": 0}]},
    {"id": "bad", "case": "unstable-branch", "backend": "mca-rr", "samples": 4,
     "checks": [{"output": "c", "metric": "s10", "min": 99}]}
  ]})");
  REQUIRE(entries.size() == 2);
  auto out = run_manifest(entries);
  REQUIRE(out.checks.size() == 2);
  CHECK(out.checks[0].passed);
  CHECK_FALSE(out.checks[1].passed);
  CHECK_FALSE(out.all_passed());
  CHECK(run_manifest({entries[0]}).all_passed());
}

TEST_CASE("manifest defaults to the case predicate") {
  auto entries = parse_manifest(R"({"cases": [{"id": "lin", "case": "linear-system"}]})");
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].checks.size() == 2);
  CHECK(entries[0].spec.backend.t == 53);
}

TEST_CASE("malformed manifests are rejected") {
  CHECK_THROWS(parse_manifest("{"));
  CHECK_THROWS(parse_manifest(R"({"cases": [{"id": "x", "case": "no-such-case"}]})"));
  CHECK_THROWS(parse_manifest(R"({"cases": [{"id": "x", "case": "counter", "bogus": 1}]})"));
  CHECK_THROWS(parse_manifest(R"({"cases": [{"id": "x"}]})"));
  CHECK_THROWS(run_corpus("/nonexistent/manifest.json"));
}

TEST_CASE("json floats are shortest round-trip decimals") {
  auto r = run_experiment(spec_for("unstable-branch", BackendKind::ieee, 2));
  const auto text = report_json(r);
  CHECK(text.find("\"mean\": 10.0,") != std::string::npos);
  CHECK(text.find("\"std\": 0.0,") != std::string::npos);

  auto lin = run_experiment(spec_for("linear-system", BackendKind::ieee, 1));
  CHECK(report_json(lin).find("2.000000002400302\n") != std::string::npos);
}
