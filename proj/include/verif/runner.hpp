#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "verif/backend_config.hpp"
#include "verif/cestac.hpp"
#include "verif/dsl/checker.hpp"
#include "verif/dsl/interpreter.hpp"

namespace verif {

/// Outcome of one evaluation, with values widened to double.
struct RunRecord {
  /// One entry per output, CheckedProgram::output_names order. CESTAC runs
  /// store the mean of the triple here.
  std::vector<double> values;
  std::vector<std::array<double, 3>> triples;  ///< CESTAC only
  std::vector<CestacDigits> digits;            ///< CESTAC only

  struct Trace {
    std::uint32_t label = 0;
    std::int64_t iteration = 0;
    double value = 0.0;
  };
  std::vector<Trace> trace;
  ExceptionCounters counters;
};

struct RunOptions {
  bool trace = false;
  /// MCA only: replace every xi draw by 0 (must reproduce the ieee backend).
  bool zero_noise = false;
};

/// Evaluates `program` once under `config`, drawing randomness from
/// RngStream(root_seed, stream_id).
RunRecord run_once(const dsl::CheckedProgram& program, const BackendConfig& config,
                   const dsl::Inputs& inputs, std::uint64_t root_seed,
                   std::uint64_t stream_id, const RunOptions& options = {});

}  // namespace verif
