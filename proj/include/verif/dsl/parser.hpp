#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "verif/backend_config.hpp"
#include "verif/dsl/ast.hpp"

namespace verif::dsl {

/// Syntax error with position and the set of tokens that would have been
/// accepted there.
class ParseError : public Error {
 public:
  ParseError(SourceLoc loc, std::vector<std::string> expected, std::string found);

  SourceLoc loc() const noexcept { return loc_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  SourceLoc loc_;
  std::vector<std::string> expected_;
  std::string found_;
};

/// Parses kernel source. Grammar (LL(1)):
///
///   program := decl* stmt*
///   decl    := ("in"|"out"|"var") ("real"|"int")? ident ("[" int "]")? ";"
///   stmt    := assign | for | if | trace | return
///   assign  := ident ("[" expr "]")? "=" expr ";"
///   for     := "for" ident "=" expr "to" expr block        (inclusive, step 1)
///   if      := "if" "(" expr relop expr ")" block ("else" (block | if))?
///   trace   := "trace" "(" string "," expr ")" ";"
///   return  := "return" expr? ";"
///   block   := "{" stmt* "}"
///   expr    := term (("+"|"-") term)*
///   term    := unary (("*"|"/"|"%") unary)*
///   unary   := "-" unary | number | ident ("[" expr "]")?
///            | ("sqrt"|"fabs") "(" expr ")" | "(" expr ")"
///
/// `//` starts a comment. A declaration without a type is real.
Program parse(std::string_view text, std::string name = "program");

}  // namespace verif::dsl
