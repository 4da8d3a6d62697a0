#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verif/backend_config.hpp"
#include "verif/cestac.hpp"
#include "verif/corpus.hpp"
#include "verif/dsl/checker.hpp"
#include "verif/runner.hpp"
#include "verif/stats.hpp"

namespace verif {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised when a worker fails; names the sample index.
class SampleError : public Error {
 public:
  SampleError(std::uint64_t sample, const std::string& what);
  std::uint64_t sample() const noexcept { return sample_; }

 private:
  std::uint64_t sample_;
};

enum class ReportFormat { json, csv };
ReportFormat parse_report_format(std::string_view text);

struct ExperimentSpec {
  /// A corpus case name, or a path to a DSL source file.
  std::string program;
  std::map<std::string, std::string> case_params;  ///< corpus cases only
  std::string inputs_path;                         ///< JSON inputs for file programs
  BackendConfig backend;
  std::uint64_t n_samples = 1;
  std::uint64_t root_seed = 0;
  unsigned jobs = 1;
  bool trace = false;
  bool multi_seed = false;  ///< cestac: run n_samples seeds instead of one
  bool include_values = true;
  bool zero_noise = false;  ///< MCA with every xi forced to 0
  ReportFormat format = ReportFormat::json;
  std::string out_path;

  void validate() const;
};

/// A program ready to run: checked source, bound inputs and, for corpus
/// cases, exact references.
struct LoadedProgram {
  std::string name;
  dsl::CheckedProgram program;
  dsl::Inputs inputs;
  std::optional<CaseSpec> corpus_case;
};

LoadedProgram load_program(const ExperimentSpec& spec);
LoadedProgram load_case(const CaseSpec& c);

struct CestacRun {
  std::array<double, 3> triple{};
  double mean = 0.0;
  CestacDigits digits;
};

struct OutputReport {
  std::string name;
  std::vector<double> values;  ///< ordered by sample index
  SampleStats s2;              ///< valid == false when n < 2
  SampleStats s10;
  std::size_t nan_count = 0;
  std::optional<double> reference;
  std::vector<CestacRun> cestac;  ///< cestac backend only
};

struct TraceReport {
  std::string label;
  std::int64_t iteration = 0;
  std::vector<double> values;  ///< one per sample
  SampleStats s2;
  std::optional<double> reference;
};

struct Report {
  ExperimentSpec spec;
  std::string program_name;
  std::uint64_t runs = 0;  ///< evaluations performed
  std::vector<OutputReport> outputs;
  std::vector<TraceReport> traces;
  ExceptionCounters exceptions;
  double wall_time_s = 0.0;

  const OutputReport& output(std::string_view name) const;
};

Report run_experiment(const ExperimentSpec& spec);
Report run_experiment(const ExperimentSpec& spec, const LoadedProgram& loaded);

/// The report as text: JSON without the "run" member is a pure function of
/// the spec minus jobs.
std::string report_json(const Report& r, bool include_run = true);
std::string report_csv(const Report& r);
/// Writes the report in `format` to `path`. Empty reports are refused.
void emit_report(const Report& r, ReportFormat format, const std::string& path);

/// Value of `metric` for `output` (see README). Throws on unknown names.
double metric_value(const Report& r, const std::string& output, const std::string& metric);

struct CheckResult {
  std::string case_id;
  Check check;
  double value = 0.0;
  bool passed = false;
};

struct ManifestEntry {
  std::string id;
  ExperimentSpec spec;
  std::vector<Check> checks;
};

std::vector<ManifestEntry> parse_manifest(const std::string& json_text);

struct CorpusOutcome {
  std::vector<CheckResult> checks;
  std::vector<Report> reports;
  bool all_passed() const;
};

CorpusOutcome run_corpus(const std::string& manifest_path);
CorpusOutcome run_manifest(const std::vector<ManifestEntry>& entries);

}  // namespace verif
