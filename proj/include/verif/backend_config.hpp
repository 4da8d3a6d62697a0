#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace verif {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or command-line usage.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class BackendKind { ieee, mca_rr, mca_pb, mca_full, cestac };
enum class Carrier { binary32, binary64 };

/// Which arithmetic a program runs under.
struct BackendConfig {
  BackendKind kind = BackendKind::ieee;
  int t = 53;     ///< virtual precision in bits
  int beta = 10;  ///< digit base used for headline reporting
  Carrier carrier = Carrier::binary64;

  /// Throws UsageError unless 1 <= t <= carrier precision and beta is 2 or 10.
  void validate() const;

  bool is_mca() const noexcept {
    return kind == BackendKind::mca_rr || kind == BackendKind::mca_pb ||
           kind == BackendKind::mca_full;
  }
};

constexpr int carrier_precision(Carrier c) noexcept {
  return c == Carrier::binary32 ? 24 : 53;
}

/// CLI spellings: ieee, mca-rr, mca-pb, mca-full, cestac.
std::string_view to_string(BackendKind kind) noexcept;
BackendKind parse_backend_kind(std::string_view text);

/// binary32 / binary64 (float / double accepted on input).
std::string_view to_string(Carrier carrier) noexcept;
Carrier parse_carrier(std::string_view text);

/// Floating-point exception tallies for one evaluation. Adding two counters
/// merges runs.
struct ExceptionCounters {
  std::uint64_t invalid_sqrt = 0;      ///< sqrt of a negative operand
  std::uint64_t division_by_zero = 0;  ///< finite / 0
  std::uint64_t nan_results = 0;       ///< operations returning NaN
  std::uint64_t overflows = 0;         ///< finite operands, infinite result
  std::uint64_t residual_lost = 0;     ///< product residual flushed (under/overflow)
  std::uint64_t noisy_branches = 0;    ///< CESTAC: comparison on numerical noise
  std::uint64_t nan_comparisons = 0;   ///< CESTAC: comparison with all-NaN operand

  ExceptionCounters& operator+=(const ExceptionCounters& o) noexcept {
    invalid_sqrt += o.invalid_sqrt;
    division_by_zero += o.division_by_zero;
    nan_results += o.nan_results;
    overflows += o.overflows;
    residual_lost += o.residual_lost;
    noisy_branches += o.noisy_branches;
    nan_comparisons += o.nan_comparisons;
    return *this;
  }
  friend bool operator==(const ExceptionCounters&, const ExceptionCounters&) = default;
};

}  // namespace verif
