#include "verif/runner.hpp"

#include "verif/mca.hpp"
#include "verif/rng.hpp"

namespace verif {
namespace {

template <class T, class Arith>
RunRecord collect_scalar(const dsl::CheckedProgram& program, Arith& arith,
                         const dsl::Inputs& inputs, bool trace) {
  auto result = dsl::evaluate(program, arith, inputs, trace);
  RunRecord rec;
  rec.values.reserve(result.outputs.size());
  for (const auto& [name, v] : result.outputs) rec.values.push_back(static_cast<double>(v));
  rec.trace.reserve(result.trace.size());
  for (const auto& tp : result.trace) {
    rec.trace.push_back({tp.label, tp.iteration, static_cast<double>(tp.value)});
  }
  return rec;
}

template <class T>
RunRecord run_typed(const dsl::CheckedProgram& program, const BackendConfig& config,
                    const dsl::Inputs& inputs, std::uint64_t root_seed,
                    std::uint64_t stream_id, const RunOptions& options) {
  ExceptionCounters counters;
  RunRecord rec;
  switch (config.kind) {
    case BackendKind::ieee: {
      IeeeArithmetic<T> arith(counters);
      rec = collect_scalar<T>(program, arith, inputs, options.trace);
      break;
    }
    case BackendKind::mca_rr:
    case BackendKind::mca_pb:
    case BackendKind::mca_full:
      if (options.zero_noise) {
        ZeroNoise noise;
        McaArithmetic<T, ZeroNoise> arith(config.kind, config.t, noise, counters);
        rec = collect_scalar<T>(program, arith, inputs, options.trace);
      } else {
        RngStream rng(root_seed, stream_id);
        McaArithmetic<T> arith(config.kind, config.t, rng, counters);
        rec = collect_scalar<T>(program, arith, inputs, options.trace);
      }
      break;
    case BackendKind::cestac: {
      RngStream rng(root_seed, stream_id);
      CestacArithmetic<T> arith(rng, counters);
      auto result = dsl::evaluate(program, arith, inputs, options.trace);
      for (const auto& [name, v] : result.outputs) {
        rec.values.push_back(v.mean());
        rec.triples.push_back({double(v.v[0]), double(v.v[1]), double(v.v[2])});
        rec.digits.push_back(cestac_digits(v));
      }
      for (const auto& tp : result.trace) {
        rec.trace.push_back({tp.label, tp.iteration, tp.value.mean()});
      }
      break;
    }
  }
  rec.counters = counters;
  return rec;
}

}  // namespace

RunRecord run_once(const dsl::CheckedProgram& program, const BackendConfig& config,
                   const dsl::Inputs& inputs, std::uint64_t root_seed,
                   std::uint64_t stream_id, const RunOptions& options) {
  config.validate();
  if (config.carrier == Carrier::binary32) {
    return run_typed<float>(program, config, inputs, root_seed, stream_id, options);
  }
  return run_typed<double>(program, config, inputs, root_seed, stream_id, options);
}

}  // namespace verif
