#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "verif/arith.hpp"
#include "verif/backend_config.hpp"
#include "verif/dsl/checker.hpp"

namespace verif::dsl {

/// Runtime failure that aborts an evaluation (bad input binding, index out of
/// bounds, integer overflow). NaN and infinities are not errors.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Values bound to the program's `in` declarations.
struct Inputs {
  std::map<std::string, double> reals;
  std::map<std::string, std::int64_t> ints;
  std::map<std::string, std::vector<double>> real_arrays;
  std::map<std::string, std::vector<std::int64_t>> int_arrays;
};

/// A `trace` statement's snapshot. `iteration` is the innermost enclosing loop
/// counter (0 outside loops); `label` indexes CheckedProgram::labels.
template <class V>
struct TracePoint {
  std::uint32_t label = 0;
  std::int64_t iteration = 0;
  V value{};
};

template <class V>
struct EvalResult {
  std::vector<std::pair<std::string, V>> outputs;  ///< CheckedProgram::output_names order
  std::vector<TracePoint<V>> trace;
};

/// Tree-walking interpreter. Every real operation and comparison is delegated
/// to the arithmetic policy `Arith`, which defines `Value`, `Carrier`,
/// `constant`, `binary`, `sqrt`, `neg`, `fabs` and `compare`.
template <class Arith>
class Interpreter {
 public:
  using V = typename Arith::Value;
  using T = typename Arith::Carrier;

  Interpreter(const CheckedProgram& program, Arith& arith, bool trace)
      : prog_(program),
        exprs_(program.program.exprs.data()),
        stmts_(program.program.stmts.data()),
        arith_(arith),
        tracing_(trace) {
    nodes_.reserve(program.program.exprs.size());
    for (const Expr& e : program.program.exprs) {
      nodes_.push_back({e.kind, e.op, e.lhs, e.rhs, e.slot, e.int_value});
    }
    constants_.reserve(program.literals_f64.size());
    for (std::size_t i = 0; i < program.literals_f64.size(); ++i) {
      if constexpr (std::is_same_v<T, float>) {
        constants_.push_back(arith_.constant(program.literals_f32[i]));
      } else {
        constants_.push_back(arith_.constant(static_cast<T>(program.literals_f64[i])));
      }
    }
  }

  EvalResult<V> run(const Inputs& inputs) {
    bind(inputs);
    exec_block(prog_.program.body);

    EvalResult<V> result;
    for (auto idx : prog_.outputs) {
      const Symbol& s = prog_.symbols[static_cast<std::size_t>(idx)];
      result.outputs.emplace_back(s.name, reals_[static_cast<std::size_t>(s.slot)]);
    }
    if (prog_.result_slot != kNone) {
      result.outputs.emplace_back(std::string(kResultOutput),
                                  reals_[static_cast<std::size_t>(prog_.result_slot)]);
    }
    result.trace = std::move(trace_);
    return result;
  }

 private:
  [[noreturn, gnu::cold, gnu::noinline]] static void fail(SourceLoc loc, const char* msg) {
    fail(loc, std::string(msg));
  }

  [[noreturn, gnu::cold, gnu::noinline]] static void fail(SourceLoc loc, const std::string& msg) {
    throw EvalError(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + msg);
  }

  void bind(const Inputs& in) {
    const V zero = arith_.constant(T(0));
    reals_.assign(static_cast<std::size_t>(prog_.real_scalars), zero);
    ints_.assign(static_cast<std::size_t>(prog_.int_scalars), 0);
    real_arrays_.clear();
    for (auto len : prog_.real_array_lengths) {
      real_arrays_.emplace_back(static_cast<std::size_t>(len), zero);
    }
    int_arrays_.clear();
    for (auto len : prog_.int_array_lengths) {
      int_arrays_.emplace_back(static_cast<std::size_t>(len), 0);
    }

    std::size_t bound = 0;
    for (const Symbol& s : prog_.symbols) {
      if (s.storage != Storage::input) continue;
      ++bound;
      const auto slot = static_cast<std::size_t>(s.slot);
      if (s.is_array()) {
        const auto expect_len = static_cast<std::size_t>(*s.length);
        if (s.type == Type::real) {
          auto it = in.real_arrays.find(s.name);
          if (it == in.real_arrays.end()) fail(s.loc, "missing real array input '" + s.name + "'");
          if (it->second.size() != expect_len) {
            fail(s.loc, "input '" + s.name + "' has " + std::to_string(it->second.size()) +
                            " values, expected " + std::to_string(expect_len));
          }
          for (std::size_t i = 0; i < expect_len; ++i) {
            real_arrays_[slot][i] = arith_.constant(static_cast<T>(it->second[i]));
          }
        } else {
          auto it = in.int_arrays.find(s.name);
          if (it == in.int_arrays.end()) fail(s.loc, "missing int array input '" + s.name + "'");
          if (it->second.size() != expect_len) {
            fail(s.loc, "input '" + s.name + "' has " + std::to_string(it->second.size()) +
                            " values, expected " + std::to_string(expect_len));
          }
          int_arrays_[slot] = it->second;
        }
      } else if (s.type == Type::real) {
        auto it = in.reals.find(s.name);
        if (it == in.reals.end()) fail(s.loc, "missing real input '" + s.name + "'");
        reals_[slot] = arith_.constant(static_cast<T>(it->second));
      } else {
        auto it = in.ints.find(s.name);
        if (it == in.ints.end()) fail(s.loc, "missing int input '" + s.name + "'");
        ints_[slot] = it->second;
      }
    }
    const std::size_t given =
        in.reals.size() + in.ints.size() + in.real_arrays.size() + in.int_arrays.size();
    if (given != bound) {
      auto unknown = [&](const auto& m) -> std::string {
        for (const auto& kv : m) {
          const Symbol* s = prog_.find(kv.first);
          if (!s || s->storage != Storage::input) return kv.first;
        }
        return {};
      };
      std::string name = unknown(in.reals);
      if (name.empty()) name = unknown(in.ints);
      if (name.empty()) name = unknown(in.real_arrays);
      if (name.empty()) name = unknown(in.int_arrays);
      throw EvalError("input '" + name + "' does not match any `in` declaration");
    }
  }

  [[noreturn, gnu::cold, gnu::noinline]] void index_error(std::int64_t i, std::size_t len,
                                                          ExprId id) const {
    const Expr& e = exprs_[id];
    fail(e.loc, "index " + std::to_string(i) + " out of bounds for '" + e.text + "[" +
                    std::to_string(len) + "]'");
  }

  std::size_t checked_index(std::int64_t i, std::size_t len, ExprId id) {
    if (i < 0 || static_cast<std::uint64_t>(i) >= len) index_error(i, len, id);
    return static_cast<std::size_t>(i);
  }

  // Leaves are fetched inline; only interior nodes recurse.
  [[gnu::always_inline]] V real_operand(ExprId id) {
    const Node& n = nodes_[id];
    if (n.kind == ExprKind::variable) return reals_[static_cast<std::size_t>(n.slot)];
    if (n.kind == ExprKind::real_literal) return constants_[static_cast<std::size_t>(n.slot)];
    return eval_real(id);
  }

  [[gnu::always_inline]] std::int64_t int_operand(ExprId id) {
    const Node& n = nodes_[id];
    if (n.kind == ExprKind::variable) return ints_[static_cast<std::size_t>(n.slot)];
    if (n.kind == ExprKind::int_literal) return n.int_value;
    return eval_int(id);
  }

  V eval_real(ExprId id) {
    const Node& e = nodes_[id];
    switch (e.kind) {
      case ExprKind::real_literal:
        return constants_[static_cast<std::size_t>(e.slot)];
      case ExprKind::variable:
        return reals_[static_cast<std::size_t>(e.slot)];
      case ExprKind::index: {
        auto& arr = real_arrays_[static_cast<std::size_t>(e.slot)];
        return arr[checked_index(int_operand(e.lhs), arr.size(), id)];
      }
      case ExprKind::negate:
        return arith_.neg(eval_real(e.lhs));
      case ExprKind::binary: {
        // Operands are evaluated left to right; the order fixes the draw
        // sequence of stochastic backends.
        const V a = real_operand(e.lhs);
        const V b = real_operand(e.rhs);
        return arith_.binary(to_arith(e.op), a, b);
      }
      case ExprKind::sqrt:
        return arith_.sqrt(eval_real(e.lhs));
      case ExprKind::fabs:
        return arith_.fabs(eval_real(e.lhs));
      case ExprKind::int_literal:
        break;
    }
    fail(exprs_[id].loc, "internal: int expression in real context");
  }

  static ArithOp to_arith(BinOp op) noexcept {
    switch (op) {
      case BinOp::add: return ArithOp::add;
      case BinOp::sub: return ArithOp::sub;
      case BinOp::mul: return ArithOp::mul;
      case BinOp::div: return ArithOp::div;
      case BinOp::mod: break;
    }
    return ArithOp::add;
  }

  std::int64_t eval_int(ExprId id) {
    const Node& e = nodes_[id];
    switch (e.kind) {
      case ExprKind::int_literal:
        return e.int_value;
      case ExprKind::variable:
        return ints_[static_cast<std::size_t>(e.slot)];
      case ExprKind::index: {
        auto& arr = int_arrays_[static_cast<std::size_t>(e.slot)];
        return arr[checked_index(int_operand(e.lhs), arr.size(), id)];
      }
      case ExprKind::negate: {
        const std::int64_t v = eval_int(e.lhs);
        if (v == std::numeric_limits<std::int64_t>::min()) fail(exprs_[id].loc, "integer overflow");
        return -v;
      }
      case ExprKind::binary: {
        const std::int64_t a = int_operand(e.lhs);
        const std::int64_t b = int_operand(e.rhs);
        std::int64_t r = 0;
        switch (e.op) {
          case BinOp::add:
            if (__builtin_add_overflow(a, b, &r)) fail(exprs_[id].loc, "integer overflow");
            return r;
          case BinOp::sub:
            if (__builtin_sub_overflow(a, b, &r)) fail(exprs_[id].loc, "integer overflow");
            return r;
          case BinOp::mul:
            if (__builtin_mul_overflow(a, b, &r)) fail(exprs_[id].loc, "integer overflow");
            return r;
          case BinOp::div:
          case BinOp::mod:
            if (b == 0) fail(exprs_[id].loc, "integer division by zero");
            if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
              fail(exprs_[id].loc, "integer overflow");
            }
            return e.op == BinOp::div ? a / b : a % b;
        }
        break;
      }
      case ExprKind::real_literal:
      case ExprKind::sqrt:
      case ExprKind::fabs:
        break;
    }
    fail(exprs_[id].loc, "internal: real expression in int context");
  }

  /// Returns false once a `return` has executed.
  bool exec_block(const std::vector<StmtId>& body) {
    for (StmtId id : body) {
      if (!exec(stmts_[id])) return false;
    }
    return true;
  }

  bool exec(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::assign: {
        const auto slot = static_cast<std::size_t>(s.slot);
        if (s.type == Type::real) {
          if (s.target_is_array) {
            auto& arr = real_arrays_[slot];
            const std::size_t i = checked_index(int_operand(s.index), arr.size(), s.index);
            arr[i] = real_operand(s.value);
          } else {
            reals_[slot] = real_operand(s.value);
          }
        } else {
          if (s.target_is_array) {
            auto& arr = int_arrays_[slot];
            const std::size_t i = checked_index(int_operand(s.index), arr.size(), s.index);
            arr[i] = eval_int(s.value);
          } else {
            ints_[slot] = int_operand(s.value);
          }
        }
        return true;
      }
      case StmtKind::for_loop: {
        const std::int64_t first = eval_int(s.value);
        const std::int64_t last = eval_int(s.limit);
        const auto slot = static_cast<std::size_t>(s.slot);
        const std::int64_t saved = iteration_;
        for (std::int64_t i = first; i <= last; ++i) {
          ints_[slot] = i;
          iteration_ = i;
          if (!exec_block(s.body)) return false;
          if (i == std::numeric_limits<std::int64_t>::max()) break;
        }
        iteration_ = saved;
        return true;
      }
      case StmtKind::if_else: {
        bool taken;
        if (s.type == Type::real) {
          const V a = real_operand(s.cond_lhs);
          const V b = real_operand(s.cond_rhs);
          taken = arith_.compare(a, s.rel, b);
        } else {
          const std::int64_t a = int_operand(s.cond_lhs);
          const std::int64_t b = int_operand(s.cond_rhs);
          taken = holds(s.rel, a, b);
        }
        return exec_block(taken ? s.body : s.else_body);
      }
      case StmtKind::trace: {
        const V v = eval_real(s.value);
        if (tracing_) {
          trace_.push_back({static_cast<std::uint32_t>(s.slot), iteration_, v});
        }
        return true;
      }
      case StmtKind::return_:
        if (s.value != kNone && !s.returns_output) {
          reals_[static_cast<std::size_t>(s.slot)] = eval_real(s.value);
        }
        return false;
    }
    return true;
  }

  struct Node {
    ExprKind kind;
    BinOp op;
    ExprId lhs;
    ExprId rhs;
    std::int32_t slot;
    std::int64_t int_value;
  };

  const CheckedProgram& prog_;
  std::vector<Node> nodes_;
  const Expr* exprs_;
  const Stmt* stmts_;
  Arith& arith_;
  bool tracing_;

  std::vector<V> constants_;
  std::vector<V> reals_;
  std::vector<std::int64_t> ints_;
  std::vector<std::vector<V>> real_arrays_;
  std::vector<std::vector<std::int64_t>> int_arrays_;
  std::vector<TracePoint<V>> trace_;
  std::int64_t iteration_ = 0;
};

/// Runs `program` once under `arith`.
template <class Arith>
EvalResult<typename Arith::Value> evaluate(const CheckedProgram& program, Arith& arith,
                                           const Inputs& inputs, bool trace = false) {
  return Interpreter<Arith>(program, arith, trace).run(inputs);
}

}  // namespace verif::dsl
