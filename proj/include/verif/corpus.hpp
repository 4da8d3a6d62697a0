#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verif/backend_config.hpp"
#include "verif/dsl/interpreter.hpp"

namespace verif {

class CorpusError : public Error {
 public:
  using Error::Error;
};

enum class Scale { paper, desk };

std::string_view to_string(Scale s) noexcept;
Scale parse_scale(std::string_view text);

/// One bound on a report metric. See README for the metric names.
struct Check {
  std::string output;  ///< empty for experiment-wide metrics (exceptions.*)
  std::string metric;
  std::optional<double> min;
  std::optional<double> max;
};

struct CaseSpec {
  std::string name;
  std::string source;
  Carrier carrier = Carrier::binary64;
  std::uint64_t input_seed = 0;
  dsl::Inputs inputs;
  /// Exact value of each output, rounded to the nearest double.
  std::map<std::string, double> reference;
  /// Exact values of each trace label, in trace order.
  std::map<std::string, std::vector<double>> trace_reference;
  std::optional<Scale> scale;
  std::vector<Check> predicate;
};

enum class KahanVariant { compensated, naive };

CaseSpec kahan_sum_case(KahanVariant variant, std::int64_t n, std::uint64_t input_seed);
CaseSpec linear_system_case(Carrier precision);
CaseSpec unstable_branch_case();
/// `trace_every` > 0 adds a trace of c every that many iterations.
CaseSpec counter_case(Scale scale, std::int64_t trace_every = 0);
CaseSpec improbability_case();

/// The Kahan inputs: n binary32 values k * 2^-24 with k uniform in [0, 2^24),
/// drawn from RngStream(input_seed, 0).
std::vector<double> kahan_inputs(std::int64_t n, std::uint64_t input_seed);

/// Builds a case by registry name. Recognised parameters: n and input_seed
/// (kahan-*), precision (linear-system), scale and trace_every (counter).
CaseSpec make_case(std::string_view name, const std::map<std::string, std::string>& params = {});
std::vector<std::string> case_names();

}  // namespace verif
