// verif: run DSL programs and corpus cases under IEEE, MCA and CESTAC arithmetic.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "verif/corpus.hpp"
#include "verif/harness.hpp"

namespace {

using namespace verif;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_summary(const Report& r, std::ostream& os) {
  os << r.program_name << " [" << to_string(r.spec.backend.kind) << ", t=" << r.spec.backend.t
     << ", " << to_string(r.spec.backend.carrier) << ", runs=" << r.runs << "] "
     << fmt(r.wall_time_s) << " s\n";
  for (const auto& o : r.outputs) {
    os << "  " << o.name << ": mean " << fmt(o.s10.mean);
    if (o.s10.valid) os << "  std " << fmt(o.s10.std) << "  s10 " << fmt(o.s10.s_prime);
    if (o.nan_count) os << "  nan " << o.nan_count;
    if (o.reference) os << "  exact " << fmt(*o.reference);
    for (const auto& c : o.cestac) {
      os << "\n    cestac (" << fmt(c.triple[0]) << ", " << fmt(c.triple[1]) << ", "
         << fmt(c.triple[2]) << ") digits " << fmt(c.digits.digits)
         << (c.digits.is_noise ? " noise" : "");
    }
    os << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification by Monte Carlo and stochastic arithmetic"};
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::string backend = "ieee";
  std::optional<int> precision;
  std::string carrier;
  std::string format = "json";
  std::vector<std::string> params;
  bool no_values = false;

  auto* run = app.add_subcommand("run", "Run one experiment and write a report");
  run->add_option("--program", spec.program, "DSL source file or corpus case name")->required();
  run->add_option("--param", params, "Corpus case parameter KEY=VALUE (repeatable)");
  run->add_option("--inputs", spec.inputs_path, "JSON file binding the program's inputs");
  run->add_option("--backend", backend, "ieee | mca-rr | mca-pb | mca-full | cestac");
  run->add_option("--precision", precision, "Virtual precision t in bits");
  run->add_option("--carrier", carrier, "binary32 | binary64 (default: case carrier or binary64)");
  run->add_option("--samples", spec.n_samples, "Number of samples")->check(CLI::PositiveNumber);
  run->add_option("--seed", spec.root_seed, "Root seed");
  run->add_option("--jobs", spec.jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--format", format, "json | csv");
  run->add_option("--out", spec.out_path, "Report path ('-' for stdout)")->required();
  run->add_flag("--trace", spec.trace, "Record trace() statements");
  run->add_flag("--multi-seed", spec.multi_seed, "cestac: one triple per sample");
  run->add_flag("--no-values", no_values, "Omit raw sample values from JSON");

  std::string manifest;
  std::string out_dir;
  auto* corpus = app.add_subcommand("corpus", "Run a manifest of corpus cases and check bounds");
  corpus->add_option("--manifest", manifest, "Manifest JSON")->required();
  corpus->add_option("--out-dir", out_dir, "Write one JSON report per case here");

  auto* list = app.add_subcommand("cases", "List corpus case names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      for (const auto& n : case_names()) std::cout << n << "\n";
      return 0;
    }
    if (*run) {
      for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("--param expects KEY=VALUE, got '" + p + "'");
        spec.case_params[p.substr(0, eq)] = p.substr(eq + 1);
      }
      spec.backend.kind = parse_backend_kind(backend);
      spec.format = parse_report_format(format);
      spec.include_values = !no_values;
      LoadedProgram loaded = load_program(spec);
      if (!carrier.empty()) {
        spec.backend.carrier = parse_carrier(carrier);
      } else if (loaded.corpus_case) {
        spec.backend.carrier = loaded.corpus_case->carrier;
      }
      spec.backend.t = precision.value_or(carrier_precision(spec.backend.carrier));
      Report r = run_experiment(spec, loaded);
      if (spec.out_path == "-") {
        if (r.outputs.empty()) throw IoError("refusing to write an empty report");
        std::cout << (spec.format == ReportFormat::json ? report_json(r) : report_csv(r));
      } else {
        emit_report(r, spec.format, spec.out_path);
        print_summary(r, std::cout);
      }
      return 0;
    }
    if (*corpus) {
      auto entries = parse_manifest([&] {
        std::ifstream in(manifest);
        if (!in) throw IoError("cannot read '" + manifest + "'");
        return std::string(std::istreambuf_iterator<char>(in), {});
      }());
      if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
      bool all = true;
      for (const auto& e : entries) {
        CorpusOutcome outcome = run_manifest({e});
        const Report& r = outcome.reports.front();
        if (!out_dir.empty()) {
          emit_report(r, ReportFormat::json, (std::filesystem::path(out_dir) / (e.id + ".json")).string());
        }
        for (const auto& c : outcome.checks) {
          std::cout << (c.passed ? "PASS " : "FAIL ") << c.case_id << " "
                    << (c.check.output.empty() ? "" : c.check.output + " ") << c.check.metric
                    << " = " << fmt(c.value) << " [" << (c.check.min ? fmt(*c.check.min) : "-inf")
                    << ", " << (c.check.max ? fmt(*c.check.max) : "+inf") << "]\n";
        }
        all = all && outcome.all_passed();
      }
      std::cout << (all ? "all checks passed\n" : "some checks failed\n");
      return all ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "verif: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "verif: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
