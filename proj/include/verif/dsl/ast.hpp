#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "verif/arith.hpp"

namespace verif::dsl {

struct SourceLoc {
  int line = 1;
  int column = 1;
};

enum class Type { unknown, real, integer };

using ExprId = std::int32_t;
using StmtId = std::int32_t;
inline constexpr std::int32_t kNone = -1;

enum class ExprKind { real_literal, int_literal, variable, index, negate, binary, sqrt, fabs };
enum class BinOp { add, sub, mul, div, mod };

struct Expr {
  ExprKind kind = ExprKind::int_literal;
  SourceLoc loc;
  BinOp op = BinOp::add;
  std::string text;     ///< literal spelling or identifier
  ExprId lhs = kNone;   ///< operand; array subscript for `index`
  ExprId rhs = kNone;

  // Filled in by check().
  Type type = Type::unknown;
  std::int32_t slot = kNone;  ///< storage slot, or constant-pool index for literals
  std::int64_t int_value = 0;
  double real_value = 0.0;    ///< literal rounded to binary64
  float real_value_f = 0.0f;  ///< literal rounded to binary32
};

enum class StmtKind { assign, for_loop, if_else, trace, return_ };

struct Stmt {
  StmtKind kind = StmtKind::assign;
  SourceLoc loc;
  std::string name;       ///< assignment target, loop counter, or trace label
  ExprId index = kNone;   ///< subscript of an array assignment
  ExprId value = kNone;   ///< assigned/traced/returned value; loop start
  ExprId limit = kNone;   ///< inclusive loop end
  Relation rel = Relation::lt;
  ExprId cond_lhs = kNone;
  ExprId cond_rhs = kNone;
  std::vector<StmtId> body;
  std::vector<StmtId> else_body;

  // Filled in by check().
  std::int32_t slot = kNone;
  Type type = Type::unknown;
  bool target_is_array = false;
  bool returns_output = false;  ///< `return x;` naming an out variable
};

enum class Storage { input, output, local };

struct Decl {
  Storage storage = Storage::local;
  Type type = Type::real;
  std::string name;
  std::optional<std::int64_t> length;  ///< arrays only
  SourceLoc loc;
};

/// Parsed kernel program. Expressions and statements live in flat arenas and
/// refer to each other by index.
struct Program {
  std::string name;
  std::vector<Decl> decls;
  std::vector<Expr> exprs;
  std::vector<Stmt> stmts;
  std::vector<StmtId> body;
};

}  // namespace verif::dsl
