#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verif/backend_config.hpp"
#include "verif/dsl/ast.hpp"

namespace verif::dsl {

/// Semantic error: undeclared name, type mismatch, bad loop bound, ...
class CheckError : public Error {
 public:
  CheckError(SourceLoc loc, const std::string& message);
  SourceLoc loc() const noexcept { return loc_; }

 private:
  SourceLoc loc_;
};

struct Symbol {
  std::string name;
  Storage storage = Storage::local;
  Type type = Type::real;
  std::optional<std::int64_t> length;
  std::int32_t slot = kNone;  ///< index into the pool matching (type, array-ness)
  SourceLoc loc;

  bool is_array() const noexcept { return length.has_value(); }
};

/// Name of the implicit output written by `return <expr>;`.
inline constexpr std::string_view kResultOutput = "result";

/// A program whose names are resolved to storage slots and whose expressions
/// all carry a type.
struct CheckedProgram {
  Program program;
  std::vector<Symbol> symbols;

  std::int32_t real_scalars = 0;
  std::int32_t int_scalars = 0;
  std::vector<std::int64_t> real_array_lengths;
  std::vector<std::int64_t> int_array_lengths;

  std::vector<double> literals_f64;  ///< real literal pool, binary64
  std::vector<float> literals_f32;   ///< same literals rounded directly to binary32
  std::vector<std::string> labels;   ///< trace labels; trace Stmt::slot indexes this

  std::vector<std::int32_t> outputs;  ///< symbol indices of `out` variables
  std::int32_t result_slot = kNone;   ///< real slot of the implicit result output

  const Symbol* find(std::string_view name) const noexcept;
  /// Output names in report order: declared outs, then `result` if present.
  std::vector<std::string> output_names() const;
};

CheckedProgram check(Program program);

}  // namespace verif::dsl
