#include "verif/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "verif/dsl/parser.hpp"

namespace verif {

using ojson = nlohmann::ordered_json;

SampleError::SampleError(std::uint64_t sample, const std::string& what)
    : Error("sample " + std::to_string(sample) + ": " + what), sample_(sample) {}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw UsageError("unknown report format '" + std::string(text) + "' (expected json or csv)");
}

void ExperimentSpec::validate() const {
  if (n_samples < 1) throw UsageError("n_samples must be at least 1");
  if (jobs < 1) throw UsageError("jobs must be at least 1");
  if (zero_noise && !backend.is_mca()) {
    throw UsageError("zero-noise runs need an MCA backend");
  }
  backend.validate();
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "': " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_case_name(const std::string& name) {
  const auto names = case_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

dsl::Inputs parse_inputs(const dsl::CheckedProgram& prog, const std::string& text,
                         const std::string& path) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(path + ": inputs must be a JSON object");
  dsl::Inputs in;
  for (const auto& [name, v] : j.items()) {
    const dsl::Symbol* s = prog.find(name);
    if (!s || s->storage != dsl::Storage::input) {
      throw UsageError(path + ": '" + name + "' is not an `in` declaration");
    }
    try {
      if (s->is_array()) {
        if (s->type == dsl::Type::real) {
          in.real_arrays[name] = v.get<std::vector<double>>();
        } else {
          in.int_arrays[name] = v.get<std::vector<std::int64_t>>();
        }
      } else if (s->type == dsl::Type::real) {
        in.reals[name] = v.get<double>();
      } else {
        if (!v.is_number_integer()) throw UsageError(path + ": '" + name + "' must be an integer");
        in.ints[name] = v.get<std::int64_t>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(path + ": '" + name + "': " + e.what());
    }
  }
  return in;
}

SampleStats single_value_stats(double v, int beta) {
  SampleStats s;
  s.n = 1;
  s.mean = v;
  s.std = kNaN;
  s.s_prime = kNaN;
  s.beta = beta;
  s.valid = false;
  s.nan_count = std::isnan(v) ? 1 : 0;
  return s;
}

// Digits are bounded by what the double-precision statistics can resolve,
// not by the carrier: binary32 results can legitimately show s' > 7.22.
constexpr int kStatsPrecision = 53;

void fill_stats(const std::string& name, const std::vector<double>& values, SampleStats& s2,
                SampleStats& s10) {
  if (values.size() < 2) {
    s2 = single_value_stats(values.empty() ? kNaN : values[0], 2);
    s10 = single_value_stats(values.empty() ? kNaN : values[0], 10);
    return;
  }
  SampleSet set;
  set.name = name;
  set.values = values;
  set.precision_bits = kStatsPrecision;
  s2 = summarize(set, 2);
  s10 = summarize(set, 10);
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void stats_fields(ojson& o, const SampleStats& s2, const SampleStats& s10) {
  o["n"] = s10.n;
  o["mean"] = number_or_null(s10.mean);
  o["std"] = s10.valid ? number_or_null(s10.std) : ojson(nullptr);
  o["s2"] = s2.valid ? number_or_null(s2.s_prime) : ojson(nullptr);
  o["s10"] = s10.valid ? number_or_null(s10.s_prime) : ojson(nullptr);
  o["exact"] = s10.valid && s10.exact;
  o["nan_count"] = s10.nan_count;
}

ojson values_array(const std::vector<double>& values) {
  ojson a = ojson::array();
  for (double v : values) a.push_back(number_or_null(v));
  return a;
}

ojson spec_json(const ExperimentSpec& s) {
  ojson j;
  j["program"] = s.program;
  if (!s.case_params.empty()) {
    ojson p = ojson::object();
    for (const auto& [k, v] : s.case_params) p[k] = v;
    j["case_params"] = p;
  }
  if (!s.inputs_path.empty()) j["inputs"] = s.inputs_path;
  j["backend"] = std::string(to_string(s.backend.kind));
  j["precision"] = s.backend.t;
  j["carrier"] = std::string(to_string(s.backend.carrier));
  j["samples"] = s.n_samples;
  j["seed"] = s.root_seed;
  j["trace"] = s.trace;
  if (s.backend.kind == BackendKind::cestac) j["multi_seed"] = s.multi_seed;
  if (s.zero_noise) j["zero_noise"] = true;
  return j;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Pretty-prints like dump(2) but writes floats as shortest round-trip
/// decimals, keeping a ".0" on integral values so they stay floats.
void write_json(const ojson& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + ojson(k).dump() + ": ";
      write_json(v, out, depth + 1);
    }
    out += "\n" + close_pad + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      write_json(j[i], out, depth + 1);
    }
    out += "\n" + close_pad + "]";
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out += "null";
      return;
    }
    std::string text = format_double(v);
    if (text.find_first_of(".e") == std::string::npos) text += ".0";
    out += text;
  } else {
    out += j.dump();
  }
}

double cestac_runs_matching(const OutputReport& o, bool want_noise, bool want_nan) {
  double count = 0;
  for (const auto& run : o.cestac) {
    const bool nan = std::isnan(run.triple[0]) || std::isnan(run.triple[1]) ||
                     std::isnan(run.triple[2]);
    if ((want_noise && run.digits.is_noise) || (want_nan && nan)) count += 1;
  }
  return count;
}

}  // namespace

const OutputReport& Report::output(std::string_view name) const {
  for (const auto& o : outputs) {
    if (o.name == name) return o;
  }
  throw Error("report has no output '" + std::string(name) + "'");
}

LoadedProgram load_case(const CaseSpec& c) {
  LoadedProgram lp;
  lp.name = c.name;
  lp.program = dsl::check(dsl::parse(c.source, c.name));
  lp.inputs = c.inputs;
  lp.corpus_case = c;
  return lp;
}

LoadedProgram load_program(const ExperimentSpec& spec) {
  if (is_case_name(spec.program)) {
    if (!spec.inputs_path.empty()) {
      throw UsageError("corpus case '" + spec.program + "' generates its own inputs");
    }
    return load_case(make_case(spec.program, spec.case_params));
  }
  if (!spec.case_params.empty()) {
    throw UsageError("case parameters apply to corpus cases only, not '" + spec.program + "'");
  }
  LoadedProgram lp;
  lp.name = spec.program;
  lp.program = dsl::check(dsl::parse(read_file(spec.program), spec.program));
  if (!spec.inputs_path.empty()) {
    lp.inputs = parse_inputs(lp.program, read_file(spec.inputs_path), spec.inputs_path);
  }
  return lp;
}

Report run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  return run_experiment(spec, load_program(spec));
}

Report run_experiment(const ExperimentSpec& spec, const LoadedProgram& loaded) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const bool one_triple = spec.backend.kind == BackendKind::cestac && !spec.multi_seed;
  const std::uint64_t runs = one_triple ? 1 : spec.n_samples;

  std::vector<RunRecord> records(runs);
  RunOptions options;
  options.trace = spec.trace;
  options.zero_noise = spec.zero_noise;

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::uint64_t error_sample = std::numeric_limits<std::uint64_t>::max();
  std::string error_text;

  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::uint64_t k = next.fetch_add(1);
      if (k >= runs) return;
      try {
        records[k] = run_once(loaded.program, spec.backend, loaded.inputs, spec.root_seed, k,
                              options);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (k < error_sample) {
          error_sample = k;
          error_text = e.what();
        }
        failed = true;
      }
    }
  };

  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(spec.jobs, runs));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failed) throw SampleError(error_sample, error_text);

  Report r;
  r.spec = spec;
  r.program_name = loaded.name;
  r.runs = runs;
  const auto names = loaded.program.output_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    OutputReport o;
    o.name = names[i];
    o.values.reserve(runs);
    for (const auto& rec : records) o.values.push_back(rec.values[i]);
    fill_stats(o.name, o.values, o.s2, o.s10);
    o.nan_count = static_cast<std::size_t>(
        std::count_if(o.values.begin(), o.values.end(), [](double v) { return std::isnan(v); }));
    if (loaded.corpus_case) {
      auto it = loaded.corpus_case->reference.find(o.name);
      if (it != loaded.corpus_case->reference.end()) o.reference = it->second;
    }
    if (spec.backend.kind == BackendKind::cestac) {
      for (const auto& rec : records) {
        o.cestac.push_back({rec.triples[i], rec.values[i], rec.digits[i]});
      }
    }
    r.outputs.push_back(std::move(o));
  }

  if (spec.trace && !records.empty()) {
    const auto& first = records.front().trace;
    for (const auto& rec : records) {
      bool same = rec.trace.size() == first.size();
      for (std::size_t j = 0; same && j < first.size(); ++j) {
        same = rec.trace[j].label == first[j].label &&
               rec.trace[j].iteration == first[j].iteration;
      }
      if (!same) throw StatsError("samples traced different iterations; cannot align traces");
    }
    std::vector<std::size_t> seen(loaded.program.labels.size(), 0);
    for (std::size_t j = 0; j < first.size(); ++j) {
      TraceReport t;
      t.label = loaded.program.labels[first[j].label];
      t.iteration = first[j].iteration;
      for (const auto& rec : records) t.values.push_back(rec.trace[j].value);
      SampleStats unused;
      fill_stats(t.label, t.values, t.s2, unused);
      const std::size_t pos = seen[first[j].label]++;
      if (loaded.corpus_case) {
        auto it = loaded.corpus_case->trace_reference.find(t.label);
        if (it != loaded.corpus_case->trace_reference.end() && pos < it->second.size()) {
          t.reference = it->second[pos];
        }
      }
      r.traces.push_back(std::move(t));
    }
  }

  for (const auto& rec : records) r.exceptions += rec.counters;
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string report_json(const Report& r, bool include_run) {
  ojson j;
  j["spec"] = spec_json(r.spec);
  ojson outputs = ojson::array();
  for (const auto& o : r.outputs) {
    ojson e;
    e["name"] = o.name;
    stats_fields(e, o.s2, o.s10);
    if (o.reference) {
      e["reference"] = *o.reference;
      const auto d = sig_digits_vs_reference(o.s10.mean, *o.reference, 10);
      e["digits_vs_reference"] = number_or_null(d.s);
    }
    if (r.spec.include_values) e["values"] = values_array(o.values);
    if (!o.cestac.empty()) {
      ojson runs = ojson::array();
      for (const auto& c : o.cestac) {
        ojson cr;
        cr["triple"] = values_array({c.triple.begin(), c.triple.end()});
        cr["mean"] = number_or_null(c.mean);
        cr["digits"] = number_or_null(c.digits.digits);
        cr["noise"] = c.digits.is_noise;
        runs.push_back(cr);
      }
      e["runs"] = runs;
    }
    outputs.push_back(e);
  }
  j["outputs"] = outputs;
  if (!r.traces.empty()) {
    ojson traces = ojson::array();
    for (const auto& t : r.traces) {
      ojson e;
      e["label"] = t.label;
      e["iteration"] = t.iteration;
      e["n"] = t.s2.n;
      e["mean"] = number_or_null(t.s2.mean);
      e["std"] = t.s2.valid ? number_or_null(t.s2.std) : ojson(nullptr);
      e["s2"] = t.s2.valid ? number_or_null(t.s2.s_prime) : ojson(nullptr);
      if (t.reference) e["reference"] = *t.reference;
      if (r.spec.include_values) e["values"] = values_array(t.values);
      traces.push_back(e);
    }
    j["traces"] = traces;
  }
  const auto& x = r.exceptions;
  j["exceptions"] = {{"invalid_sqrt", x.invalid_sqrt},
                     {"division_by_zero", x.division_by_zero},
                     {"nan_results", x.nan_results},
                     {"overflows", x.overflows},
                     {"residual_lost", x.residual_lost},
                     {"noisy_branches", x.noisy_branches},
                     {"nan_comparisons", x.nan_comparisons}};
  if (include_run) {
    j["run"] = {{"jobs", r.spec.jobs}, {"wall_time_s", r.wall_time_s}};
  }
  std::string text;
  write_json(j, text, 0);
  return text + "\n";
}

std::string report_csv(const Report& r) {
  std::string out = "output,sample,value\n";
  for (const auto& o : r.outputs) {
    for (std::size_t k = 0; k < o.values.size(); ++k) {
      out += o.name;
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += format_double(o.values[k]);
      out += '\n';
    }
  }
  return out;
}

void emit_report(const Report& r, ReportFormat format, const std::string& path) {
  const bool empty = r.outputs.empty() ||
                     std::all_of(r.outputs.begin(), r.outputs.end(),
                                 [](const OutputReport& o) { return o.values.empty(); });
  if (empty) throw IoError("refusing to write '" + path + "': the report has no samples");
  const std::string text = format == ReportFormat::json ? report_json(r) : report_csv(r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "': " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw IoError("error writing '" + path + "': " + std::strerror(errno));
}

double metric_value(const Report& r, const std::string& output, const std::string& metric) {
  if (metric.rfind("exceptions.", 0) == 0) {
    const std::string f = metric.substr(11);
    const auto& x = r.exceptions;
    if (f == "invalid_sqrt") return double(x.invalid_sqrt);
    if (f == "division_by_zero") return double(x.division_by_zero);
    if (f == "nan_results") return double(x.nan_results);
    if (f == "overflows") return double(x.overflows);
    if (f == "residual_lost") return double(x.residual_lost);
    if (f == "noisy_branches") return double(x.noisy_branches);
    if (f == "nan_comparisons") return double(x.nan_comparisons);
    throw Error("unknown exception counter '" + f + "'");
  }
  const OutputReport& o = r.output(output);
  auto need_reference = [&]() -> double {
    if (!o.reference) throw Error("output '" + output + "' has no exact reference");
    return *o.reference;
  };
  auto need_valid = [&](const SampleStats& s) {
    return s.valid ? s.s_prime : kNaN;
  };
  if (metric == "mean") return o.s10.mean;
  if (metric == "std") return o.s10.valid ? o.s10.std : kNaN;
  if (metric == "rel_std") return o.s10.valid ? o.s10.std / std::fabs(o.s10.mean) : kNaN;
  if (metric == "s10") return need_valid(o.s10);
  if (metric == "s2") return need_valid(o.s2);
  if (metric == "n") return double(o.values.size());
  if (metric == "nan_count") return double(o.nan_count);
  if (metric == "value") return o.values.empty() ? kNaN : o.values.front();
  if (metric == "digits_vs_reference") {
    return sig_digits_vs_reference(o.s10.mean, need_reference(), 10).s;
  }
  if (metric == "bits_vs_reference") {
    return sig_digits_vs_reference(o.s10.mean, need_reference(), 2).s;
  }
  if (metric == "abs_error_vs_reference") return std::fabs(o.s10.mean - need_reference());
  if (metric.rfind("cestac_", 0) == 0) {
    if (o.cestac.empty()) throw Error("metric '" + metric + "' needs the cestac backend");
    if (metric == "cestac_digits_min" || metric == "cestac_digits_max") {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& c : o.cestac) {
        lo = std::min(lo, c.digits.digits);
        hi = std::max(hi, c.digits.digits);
      }
      return metric == "cestac_digits_min" ? lo : hi;
    }
    if (metric == "cestac_noise_runs") return cestac_runs_matching(o, true, false);
    if (metric == "cestac_nan_runs") return cestac_runs_matching(o, false, true);
    if (metric == "cestac_noise_or_nan_runs") return cestac_runs_matching(o, true, true);
  }
  throw Error("unknown metric '" + metric + "'");
}

std::vector<ManifestEntry> parse_manifest(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed manifest: ") + e.what());
  }
  if (!j.is_object() || !j.contains("cases") || !j["cases"].is_array()) {
    throw UsageError("malformed manifest: expected an object with a \"cases\" array");
  }
  std::vector<ManifestEntry> entries;
  std::size_t index = 0;
  for (const auto& c : j["cases"]) {
    const std::string where = "manifest case " + std::to_string(index++);
    if (!c.is_object()) throw UsageError(where + ": expected an object");
    static const char* known[] = {"id",   "case",       "program", "params",  "inputs",
                                  "backend", "precision", "carrier", "samples", "seed",
                                  "jobs", "multi_seed", "trace",   "checks"};
    for (const auto& [k, v] : c.items()) {
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* n) { return k == n; }) == std::end(known)) {
        throw UsageError(where + ": unknown key '" + k + "'");
      }
    }
    try {
      ManifestEntry e;
      ExperimentSpec& s = e.spec;
      if (c.contains("case") == c.contains("program")) {
        throw UsageError(where + ": give exactly one of \"case\" or \"program\"");
      }
      std::optional<CaseSpec> cs;
      if (c.contains("case")) {
        s.program = c["case"].get<std::string>();
        if (!is_case_name(s.program)) {
          throw UsageError(where + ": unknown corpus case '" + s.program + "'");
        }
        if (c.contains("params")) {
          for (const auto& [k, v] : c["params"].items()) {
            s.case_params[k] = v.is_string() ? v.get<std::string>() : v.dump();
          }
        }
        cs = make_case(s.program, s.case_params);
      } else {
        s.program = c["program"].get<std::string>();
        if (c.contains("inputs")) s.inputs_path = c["inputs"].get<std::string>();
      }
      e.id = c.value("id", s.program);
      s.backend.kind = parse_backend_kind(c.value("backend", std::string("ieee")));
      s.backend.carrier = c.contains("carrier")
                              ? parse_carrier(c["carrier"].get<std::string>())
                              : (cs ? cs->carrier : Carrier::binary64);
      s.backend.t = c.value("precision", carrier_precision(s.backend.carrier));
      s.n_samples = c.value("samples", std::uint64_t{1});
      s.root_seed = c.value("seed", std::uint64_t{0});
      s.jobs = c.value("jobs", 1u);
      s.multi_seed = c.value("multi_seed", false);
      s.trace = c.value("trace", false);
      s.include_values = false;
      if (c.contains("checks")) {
        for (const auto& k : c["checks"]) {
          Check chk;
          chk.output = k.value("output", std::string());
          chk.metric = k.at("metric").get<std::string>();
          if (k.contains("min")) chk.min = k["min"].get<double>();
          if (k.contains("max")) chk.max = k["max"].get<double>();
          e.checks.push_back(std::move(chk));
        }
      } else if (cs) {
        e.checks = cs->predicate;
      }
      s.validate();
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw UsageError(where + ": " + ex.what());
    } catch (const UsageError& ex) {
      throw UsageError(std::string(ex.what()).rfind("manifest", 0) == 0
                           ? ex.what()
                           : where + ": " + ex.what());
    }
  }
  return entries;
}

bool CorpusOutcome::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CorpusOutcome run_manifest(const std::vector<ManifestEntry>& entries) {
  CorpusOutcome out;
  for (const auto& e : entries) {
    Report r = run_experiment(e.spec);
    for (const auto& chk : e.checks) {
      CheckResult cr;
      cr.case_id = e.id;
      cr.check = chk;
      cr.value = metric_value(r, chk.output, chk.metric);
      cr.passed = !std::isnan(cr.value) && (!chk.min || cr.value >= *chk.min) &&
                  (!chk.max || cr.value <= *chk.max);
      out.checks.push_back(std::move(cr));
    }
    out.reports.push_back(std::move(r));
  }
  return out;
}

CorpusOutcome run_corpus(const std::string& manifest_path) {
  return run_manifest(parse_manifest(read_file(manifest_path)));
}

}  // namespace verif
