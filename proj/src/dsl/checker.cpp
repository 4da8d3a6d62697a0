#include "verif/dsl/checker.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <map>

namespace verif::dsl {

CheckError::CheckError(SourceLoc loc, const std::string& message)
    : Error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + message),
      loc_(loc) {}

const Symbol* CheckedProgram::find(std::string_view name) const noexcept {
  for (const auto& s : symbols) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::string> CheckedProgram::output_names() const {
  std::vector<std::string> names;
  for (auto idx : outputs) names.push_back(symbols[idx].name);
  if (result_slot != kNone) names.emplace_back(kResultOutput);
  return names;
}

namespace {

const char* type_name(Type t) {
  switch (t) {
    case Type::real: return "real";
    case Type::integer: return "int";
    case Type::unknown: break;
  }
  return "unknown";
}

class Checker {
 public:
  explicit Checker(Program p) { out_.program = std::move(p); }

  CheckedProgram run() {
    declare_all();
    for (StmtId s : prog().body) check_stmt(s);
    for (std::size_t i = 0; i < out_.symbols.size(); ++i) {
      if (out_.symbols[i].storage == Storage::output) {
        out_.outputs.push_back(static_cast<std::int32_t>(i));
      }
    }
    return std::move(out_);
  }

 private:
  Program& prog() { return out_.program; }
  Expr& expr(ExprId id) { return out_.program.exprs[static_cast<std::size_t>(id)]; }
  Stmt& stmt(StmtId id) { return out_.program.stmts[static_cast<std::size_t>(id)]; }

  void declare_all() {
    for (const auto& d : prog().decls) {
      if (by_name_.count(d.name)) {
        throw CheckError(d.loc, "duplicate declaration of '" + d.name + "'");
      }
      Symbol s;
      s.name = d.name;
      s.storage = d.storage;
      s.type = d.type;
      s.length = d.length;
      s.loc = d.loc;
      if (d.length && *d.length < 1) {
        throw CheckError(d.loc, "array '" + d.name + "' must have a positive length");
      }
      if (d.storage == Storage::output && (d.length || d.type != Type::real)) {
        throw CheckError(d.loc, "output '" + d.name + "' must be a real scalar");
      }
      if (d.length) {
        auto& lengths =
            d.type == Type::real ? out_.real_array_lengths : out_.int_array_lengths;
        s.slot = static_cast<std::int32_t>(lengths.size());
        lengths.push_back(*d.length);
      } else {
        s.slot = d.type == Type::real ? out_.real_scalars++ : out_.int_scalars++;
      }
      by_name_[d.name] = static_cast<std::int32_t>(out_.symbols.size());
      out_.symbols.push_back(std::move(s));
    }
  }

  const Symbol& lookup(const std::string& name, SourceLoc loc) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw CheckError(loc, "undeclared identifier '" + name + "'");
    return out_.symbols[static_cast<std::size_t>(it->second)];
  }

  void set_real_literal(Expr& e) {
    const char* text = e.text.c_str();
    char* end = nullptr;
    errno = 0;
    e.real_value = std::strtod(text, &end);
    e.real_value_f = std::strtof(text, nullptr);
    if (end == text) throw CheckError(e.loc, "malformed number '" + e.text + "'");
    e.kind = ExprKind::real_literal;
    e.type = Type::real;
    e.slot = static_cast<std::int32_t>(out_.literals_f64.size());
    out_.literals_f64.push_back(e.real_value);
    out_.literals_f32.push_back(e.real_value_f);
  }

  /// Int literals (possibly negated) may stand in for reals.
  bool coerce_to_real(ExprId id) {
    Expr& e = expr(id);
    if (e.kind == ExprKind::int_literal) {
      set_real_literal(e);
      return true;
    }
    if (e.kind == ExprKind::negate && coerce_to_real(e.lhs)) {
      expr(id).type = Type::real;
      return true;
    }
    return false;
  }

  void require_real(ExprId id, const char* what) {
    if (check_expr(id) == Type::real || coerce_to_real(id)) return;
    throw CheckError(expr(id).loc, std::string(what) + " must be real, found int");
  }

  void require_int(ExprId id, const char* what) {
    if (check_expr(id) == Type::integer) return;
    throw CheckError(expr(id).loc, std::string(what) + " must be int, found real");
  }

  /// Unifies the operand types of a binary operator or comparison.
  Type unify(ExprId lhs, ExprId rhs, SourceLoc loc) {
    const Type lt = check_expr(lhs);
    const Type rt = check_expr(rhs);
    if (lt == rt) return lt;
    if (lt == Type::real && coerce_to_real(rhs)) return Type::real;
    if (rt == Type::real && coerce_to_real(lhs)) return Type::real;
    throw CheckError(loc, std::string("type mismatch: ") + type_name(lt) + " and " +
                              type_name(rt));
  }

  std::optional<std::int64_t> constant_int(ExprId id) {
    const Expr& e = expr(id);
    if (e.kind == ExprKind::int_literal) return e.int_value;
    if (e.kind == ExprKind::negate && e.type == Type::integer) {
      if (auto v = constant_int(e.lhs)) return -*v;
    }
    return std::nullopt;
  }

  Type check_expr(ExprId id) {
    Expr& e = expr(id);
    if (e.type != Type::unknown) return e.type;
    switch (e.kind) {
      case ExprKind::int_literal: {
        errno = 0;
        char* end = nullptr;
        const long long v = std::strtoll(e.text.c_str(), &end, 10);
        if (errno == ERANGE) throw CheckError(e.loc, "integer literal out of range");
        e.int_value = v;
        e.type = Type::integer;
        break;
      }
      case ExprKind::real_literal:
        set_real_literal(e);
        break;
      case ExprKind::variable: {
        const Symbol& s = lookup(e.text, e.loc);
        if (s.is_array()) throw CheckError(e.loc, "array '" + s.name + "' used without index");
        e.slot = s.slot;
        e.type = s.type;
        break;
      }
      case ExprKind::index: {
        const Symbol& s = lookup(e.text, e.loc);
        if (!s.is_array()) throw CheckError(e.loc, "'" + s.name + "' is not an array");
        const std::int32_t slot = s.slot;
        const Type type = s.type;
        const std::int64_t length = *s.length;
        const std::string name = s.name;
        require_int(e.lhs, "array index");
        if (auto k = constant_int(e.lhs); k && (*k < 0 || *k >= length)) {
          throw CheckError(expr(id).loc, "index " + std::to_string(*k) + " out of bounds for '" +
                                             name + "[" + std::to_string(length) + "]'");
        }
        expr(id).slot = slot;
        expr(id).type = type;
        break;
      }
      case ExprKind::negate: {
        const Type t = check_expr(e.lhs);
        expr(id).type = t;
        break;
      }
      case ExprKind::binary: {
        const BinOp op = e.op;
        const SourceLoc loc = e.loc;
        const ExprId lhs = e.lhs;
        const ExprId rhs = e.rhs;
        Type t;
        if (op == BinOp::mod) {
          require_int(lhs, "operand of '%'");
          require_int(rhs, "operand of '%'");
          t = Type::integer;
        } else {
          t = unify(lhs, rhs, loc);
        }
        expr(id).type = t;
        break;
      }
      case ExprKind::sqrt:
      case ExprKind::fabs:
        require_real(e.lhs, e.kind == ExprKind::sqrt ? "argument of sqrt" : "argument of fabs");
        expr(id).type = Type::real;
        break;
    }
    return expr(id).type;
  }

  void check_block(const std::vector<StmtId>& body) {
    for (StmtId s : body) check_stmt(s);
  }

  void check_stmt(StmtId id) {
    Stmt& s = stmt(id);
    switch (s.kind) {
      case StmtKind::assign: {
        const Symbol& sym = lookup(s.name, s.loc);
        if (std::find(active_counters_.begin(), active_counters_.end(), sym.name) !=
            active_counters_.end()) {
          throw CheckError(s.loc, "loop counter '" + sym.name + "' modified inside its loop");
        }
        const bool is_array = sym.is_array();
        const Type type = sym.type;
        const std::int32_t slot = sym.slot;
        const std::int64_t length = sym.length.value_or(0);
        if (is_array && s.index == kNone) {
          throw CheckError(s.loc, "array '" + s.name + "' assigned without index");
        }
        if (!is_array && s.index != kNone) {
          throw CheckError(s.loc, "'" + s.name + "' is not an array");
        }
        if (is_array) {
          require_int(stmt(id).index, "array index");
          if (auto k = constant_int(stmt(id).index); k && (*k < 0 || *k >= length)) {
            const Stmt& st = stmt(id);
            throw CheckError(st.loc, "index " + std::to_string(*k) + " out of bounds for '" +
                                         st.name + "[" + std::to_string(length) + "]'");
          }
        }
        if (type == Type::real) {
          require_real(stmt(id).value, "assigned value");
        } else {
          require_int(stmt(id).value, "assigned value");
        }
        Stmt& st = stmt(id);
        st.slot = slot;
        st.type = type;
        st.target_is_array = is_array;
        break;
      }
      case StmtKind::for_loop: {
        const Symbol& sym = lookup(s.name, s.loc);
        if (sym.is_array() || sym.type != Type::integer) {
          throw CheckError(s.loc, "loop counter '" + sym.name + "' must be an int scalar");
        }
        const std::string name = sym.name;
        const std::int32_t slot = sym.slot;
        if (std::find(active_counters_.begin(), active_counters_.end(), name) !=
            active_counters_.end()) {
          throw CheckError(s.loc, "loop counter '" + name + "' reused by a nested loop");
        }
        require_int(s.value, "loop bound");
        require_int(stmt(id).limit, "loop bound");
        stmt(id).slot = slot;
        stmt(id).type = Type::integer;
        active_counters_.push_back(name);
        const auto body = stmt(id).body;
        check_block(body);
        active_counters_.pop_back();
        break;
      }
      case StmtKind::if_else: {
        const Type t = unify(s.cond_lhs, s.cond_rhs, s.loc);
        stmt(id).type = t;
        const auto body = stmt(id).body;
        const auto else_body = stmt(id).else_body;
        check_block(body);
        check_block(else_body);
        break;
      }
      case StmtKind::trace: {
        require_real(s.value, "traced value");
        Stmt& st = stmt(id);
        auto it = std::find(out_.labels.begin(), out_.labels.end(), st.name);
        st.slot = static_cast<std::int32_t>(it - out_.labels.begin());
        if (it == out_.labels.end()) out_.labels.push_back(st.name);
        st.type = Type::real;
        break;
      }
      case StmtKind::return_: {
        if (s.value == kNone) break;
        const Expr& v = expr(s.value);
        if (v.kind == ExprKind::variable) {
          const Symbol& sym = lookup(v.text, v.loc);
          if (sym.storage == Storage::output && !sym.is_array()) {
            check_expr(s.value);
            stmt(id).returns_output = true;
            break;
          }
        }
        require_real(s.value, "returned value");
        if (out_.result_slot == kNone) {
          if (by_name_.count(std::string(kResultOutput))) {
            throw CheckError(s.loc, "'result' is declared; return an out variable instead");
          }
          out_.result_slot = out_.real_scalars++;
        }
        stmt(id).slot = out_.result_slot;
        stmt(id).type = Type::real;
        break;
      }
    }
  }

  CheckedProgram out_;
  std::map<std::string, std::int32_t> by_name_;
  std::vector<std::string> active_counters_;
};

}  // namespace

CheckedProgram check(Program program) { return Checker(std::move(program)).run(); }

}  // namespace verif::dsl
