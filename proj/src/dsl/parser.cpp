#include "verif/dsl/parser.hpp"

#include <cctype>
#include <utility>

namespace verif::dsl {
namespace {

enum class Tok {
  end,
  ident,
  int_number,
  real_number,
  string,
  kw_in,
  kw_out,
  kw_var,
  kw_real,
  kw_int,
  kw_for,
  kw_to,
  kw_if,
  kw_else,
  kw_trace,
  kw_return,
  kw_sqrt,
  kw_fabs,
  semicolon,
  comma,
  lbracket,
  rbracket,
  lbrace,
  rbrace,
  lparen,
  rparen,
  assign,
  plus,
  minus,
  star,
  slash,
  percent,
  lt,
  le,
  gt,
  ge,
  eq,
  ne,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceLoc loc;
};

std::string describe(Tok t) {
  switch (t) {
    case Tok::end: return "end of input";
    case Tok::ident: return "identifier";
    case Tok::int_number: return "integer";
    case Tok::real_number: return "number";
    case Tok::string: return "string";
    case Tok::kw_in: return "'in'";
    case Tok::kw_out: return "'out'";
    case Tok::kw_var: return "'var'";
    case Tok::kw_real: return "'real'";
    case Tok::kw_int: return "'int'";
    case Tok::kw_for: return "'for'";
    case Tok::kw_to: return "'to'";
    case Tok::kw_if: return "'if'";
    case Tok::kw_else: return "'else'";
    case Tok::kw_trace: return "'trace'";
    case Tok::kw_return: return "'return'";
    case Tok::kw_sqrt: return "'sqrt'";
    case Tok::kw_fabs: return "'fabs'";
    case Tok::semicolon: return "';'";
    case Tok::comma: return "','";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::assign: return "'='";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::star: return "'*'";
    case Tok::slash: return "'/'";
    case Tok::percent: return "'%'";
    case Tok::lt: return "'<'";
    case Tok::le: return "'<='";
    case Tok::gt: return "'>'";
    case Tok::ge: return "'>='";
    case Tok::eq: return "'=='";
    case Tok::ne: return "'!='";
  }
  return "?";
}

Tok keyword_or_ident(std::string_view word) {
  static constexpr std::pair<std::string_view, Tok> kKeywords[] = {
      {"in", Tok::kw_in},         {"out", Tok::kw_out},     {"var", Tok::kw_var},
      {"real", Tok::kw_real},     {"int", Tok::kw_int},     {"for", Tok::kw_for},
      {"to", Tok::kw_to},         {"if", Tok::kw_if},       {"else", Tok::kw_else},
      {"trace", Tok::kw_trace},   {"return", Tok::kw_return}, {"sqrt", Tok::kw_sqrt},
      {"fabs", Tok::kw_fabs},
  };
  for (const auto& [kw, tok] : kKeywords) {
    if (kw == word) return tok;
  }
  return Tok::ident;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token tok;
      tok.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(tok);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        tok.text = std::string(src_.substr(start, pos_ - start));
        tok.kind = keyword_or_ident(tok.text);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(tok);
      } else if (c == '"') {
        lex_string(tok);
      } else {
        lex_punct(tok);
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  bool digit_at(std::size_t i) const {
    return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
  }

  void lex_number(Token& tok) {
    const std::size_t start = pos_;
    bool is_real = false;
    while (digit_at(pos_)) advance();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_real = true;
      advance();
      while (digit_at(pos_)) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (digit_at(look)) {
        is_real = true;
        while (pos_ < look) advance();
        while (digit_at(pos_)) advance();
      }
    }
    tok.text = std::string(src_.substr(start, pos_ - start));
    tok.kind = is_real ? Tok::real_number : Tok::int_number;
  }

  void lex_string(Token& tok) {
    const SourceLoc loc = tok.loc;
    advance();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
    if (pos_ >= src_.size() || src_[pos_] != '"') {
      throw ParseError(loc, {"closing '\"'"}, "unterminated string");
    }
    tok.text = std::string(src_.substr(start, pos_ - start));
    tok.kind = Tok::string;
    advance();
  }

  void lex_punct(Token& tok) {
    const char c = src_[pos_];
    const char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    auto one = [&](Tok k) {
      tok.kind = k;
      tok.text = std::string(1, c);
      advance();
    };
    auto two = [&](Tok k) {
      tok.kind = k;
      tok.text = std::string{c, next};
      advance();
      advance();
    };
    switch (c) {
      case ';': return one(Tok::semicolon);
      case ',': return one(Tok::comma);
      case '[': return one(Tok::lbracket);
      case ']': return one(Tok::rbracket);
      case '{': return one(Tok::lbrace);
      case '}': return one(Tok::rbrace);
      case '(': return one(Tok::lparen);
      case ')': return one(Tok::rparen);
      case '+': return one(Tok::plus);
      case '-': return one(Tok::minus);
      case '*': return one(Tok::star);
      case '/': return one(Tok::slash);
      case '%': return one(Tok::percent);
      case '<': return next == '=' ? two(Tok::le) : one(Tok::lt);
      case '>': return next == '=' ? two(Tok::ge) : one(Tok::gt);
      case '=': return next == '=' ? two(Tok::eq) : one(Tok::assign);
      case '!':
        if (next == '=') return two(Tok::ne);
        break;
      default: break;
    }
    throw ParseError(tok.loc, {}, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string name) : toks_(std::move(tokens)) {
    prog_.name = std::move(name);
  }

  Program run() {
    while (at(Tok::kw_in) || at(Tok::kw_out) || at(Tok::kw_var)) parse_decl();
    while (!at(Tok::end)) prog_.body.push_back(parse_stmt());
    return std::move(prog_);
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }

  [[noreturn]] void fail(std::vector<Tok> expected) const {
    std::vector<std::string> names;
    names.reserve(expected.size());
    for (Tok t : expected) names.push_back(describe(t));
    const Token& tok = peek();
    throw ParseError(tok.loc, std::move(names),
                     tok.kind == Tok::end ? describe(Tok::end) : "'" + tok.text + "'");
  }

  Token expect(Tok k) {
    if (!at(k)) fail({k});
    return toks_[pos_++];
  }

  ExprId add_expr(Expr e) {
    prog_.exprs.push_back(std::move(e));
    return static_cast<ExprId>(prog_.exprs.size() - 1);
  }
  StmtId add_stmt(Stmt s) {
    prog_.stmts.push_back(std::move(s));
    return static_cast<StmtId>(prog_.stmts.size() - 1);
  }

  void parse_decl() {
    Decl d;
    d.loc = peek().loc;
    const Tok storage = toks_[pos_++].kind;
    d.storage = storage == Tok::kw_in    ? Storage::input
                : storage == Tok::kw_out ? Storage::output
                                         : Storage::local;
    if (at(Tok::kw_real)) {
      ++pos_;
      d.type = Type::real;
    } else if (at(Tok::kw_int)) {
      ++pos_;
      d.type = Type::integer;
    } else if (!at(Tok::ident)) {
      fail({Tok::kw_real, Tok::kw_int, Tok::ident});
    }
    d.name = expect(Tok::ident).text;
    if (at(Tok::lbracket)) {
      ++pos_;
      const Token len = expect(Tok::int_number);
      try {
        d.length = std::stoll(len.text);
      } catch (const std::exception&) {
        throw ParseError(len.loc, {"array length"}, "'" + len.text + "'");
      }
      expect(Tok::rbracket);
    }
    expect(Tok::semicolon);
    prog_.decls.push_back(std::move(d));
  }

  std::vector<StmtId> parse_block() {
    expect(Tok::lbrace);
    std::vector<StmtId> body;
    while (!at(Tok::rbrace)) {
      if (at(Tok::end)) fail({Tok::rbrace});
      body.push_back(parse_stmt());
    }
    ++pos_;
    return body;
  }

  StmtId parse_stmt() {
    switch (peek().kind) {
      case Tok::ident: return parse_assign();
      case Tok::kw_for: return parse_for();
      case Tok::kw_if: return parse_if();
      case Tok::kw_trace: return parse_trace();
      case Tok::kw_return: return parse_return();
      default:
        fail({Tok::ident, Tok::kw_for, Tok::kw_if, Tok::kw_trace, Tok::kw_return});
    }
  }

  StmtId parse_assign() {
    Stmt s;
    s.kind = StmtKind::assign;
    s.loc = peek().loc;
    s.name = expect(Tok::ident).text;
    if (at(Tok::lbracket)) {
      ++pos_;
      s.index = parse_expr();
      expect(Tok::rbracket);
    }
    expect(Tok::assign);
    s.value = parse_expr();
    expect(Tok::semicolon);
    return add_stmt(std::move(s));
  }

  StmtId parse_for() {
    Stmt s;
    s.kind = StmtKind::for_loop;
    s.loc = expect(Tok::kw_for).loc;
    s.name = expect(Tok::ident).text;
    expect(Tok::assign);
    s.value = parse_expr();
    expect(Tok::kw_to);
    s.limit = parse_expr();
    s.body = parse_block();
    return add_stmt(std::move(s));
  }

  StmtId parse_if() {
    Stmt s;
    s.kind = StmtKind::if_else;
    s.loc = expect(Tok::kw_if).loc;
    expect(Tok::lparen);
    s.cond_lhs = parse_expr();
    switch (peek().kind) {
      case Tok::lt: s.rel = Relation::lt; break;
      case Tok::le: s.rel = Relation::le; break;
      case Tok::gt: s.rel = Relation::gt; break;
      case Tok::ge: s.rel = Relation::ge; break;
      case Tok::eq: s.rel = Relation::eq; break;
      case Tok::ne: s.rel = Relation::ne; break;
      default: fail({Tok::lt, Tok::le, Tok::gt, Tok::ge, Tok::eq, Tok::ne});
    }
    ++pos_;
    s.cond_rhs = parse_expr();
    expect(Tok::rparen);
    s.body = parse_block();
    if (at(Tok::kw_else)) {
      ++pos_;
      if (at(Tok::kw_if)) {
        s.else_body.push_back(parse_if());
      } else {
        s.else_body = parse_block();
      }
    }
    return add_stmt(std::move(s));
  }

  StmtId parse_trace() {
    Stmt s;
    s.kind = StmtKind::trace;
    s.loc = expect(Tok::kw_trace).loc;
    expect(Tok::lparen);
    s.name = expect(Tok::string).text;
    expect(Tok::comma);
    s.value = parse_expr();
    expect(Tok::rparen);
    expect(Tok::semicolon);
    return add_stmt(std::move(s));
  }

  StmtId parse_return() {
    Stmt s;
    s.kind = StmtKind::return_;
    s.loc = expect(Tok::kw_return).loc;
    if (!at(Tok::semicolon)) s.value = parse_expr();
    expect(Tok::semicolon);
    return add_stmt(std::move(s));
  }

  ExprId binary(BinOp op, SourceLoc loc, ExprId lhs, ExprId rhs) {
    Expr e;
    e.kind = ExprKind::binary;
    e.op = op;
    e.loc = loc;
    e.lhs = lhs;
    e.rhs = rhs;
    return add_expr(std::move(e));
  }

  ExprId parse_expr() {
    ExprId lhs = parse_term();
    while (at(Tok::plus) || at(Tok::minus)) {
      const Token op = toks_[pos_++];
      const ExprId rhs = parse_term();
      lhs = binary(op.kind == Tok::plus ? BinOp::add : BinOp::sub, op.loc, lhs, rhs);
    }
    return lhs;
  }

  ExprId parse_term() {
    ExprId lhs = parse_unary();
    while (at(Tok::star) || at(Tok::slash) || at(Tok::percent)) {
      const Token op = toks_[pos_++];
      const ExprId rhs = parse_unary();
      const BinOp bop = op.kind == Tok::star    ? BinOp::mul
                        : op.kind == Tok::slash ? BinOp::div
                                                : BinOp::mod;
      lhs = binary(bop, op.loc, lhs, rhs);
    }
    return lhs;
  }

  ExprId parse_unary() {
    const Token& tok = peek();
    Expr e;
    e.loc = tok.loc;
    switch (tok.kind) {
      case Tok::minus:
        ++pos_;
        e.kind = ExprKind::negate;
        e.lhs = parse_unary();
        return add_expr(std::move(e));
      case Tok::int_number:
      case Tok::real_number:
        e.kind = tok.kind == Tok::int_number ? ExprKind::int_literal : ExprKind::real_literal;
        e.text = tok.text;
        ++pos_;
        return add_expr(std::move(e));
      case Tok::ident:
        e.text = tok.text;
        ++pos_;
        if (at(Tok::lbracket)) {
          ++pos_;
          e.kind = ExprKind::index;
          e.lhs = parse_expr();
          expect(Tok::rbracket);
        } else {
          e.kind = ExprKind::variable;
        }
        return add_expr(std::move(e));
      case Tok::kw_sqrt:
      case Tok::kw_fabs:
        e.kind = tok.kind == Tok::kw_sqrt ? ExprKind::sqrt : ExprKind::fabs;
        ++pos_;
        expect(Tok::lparen);
        e.lhs = parse_expr();
        expect(Tok::rparen);
        return add_expr(std::move(e));
      case Tok::lparen: {
        ++pos_;
        const ExprId inner = parse_expr();
        expect(Tok::rparen);
        return inner;
      }
      default:
        fail({Tok::real_number, Tok::ident, Tok::minus, Tok::lparen, Tok::kw_sqrt,
              Tok::kw_fabs});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Program prog_;
};

std::string format_message(SourceLoc loc, const std::vector<std::string>& expected,
                           const std::string& found) {
  std::string msg = std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                    ": syntax error: ";
  if (expected.empty()) return msg + found;
  msg += "expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
    msg += expected[i];
  }
  return msg + ", found " + found;
}

}  // namespace

ParseError::ParseError(SourceLoc loc, std::vector<std::string> expected, std::string found)
    : Error(format_message(loc, expected, found)),
      loc_(loc),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

Program parse(std::string_view text, std::string name) {
  return Parser(Lexer(text).run(), std::move(name)).run();
}

}  // namespace verif::dsl
