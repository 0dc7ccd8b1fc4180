#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stagediff/expr.hpp"

namespace stagediff {

/// Syntax error in expression text. position() is a 0-based byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Parses infix text:
///   expr    := term (('+'|'-') term)*
///   term    := factor (('*'|'/') factor)*
///   factor  := '-' factor | primary
///   primary := NUMBER | 'x' DIGITS | FUNC '(' expr ')' | '(' expr ')'
/// Integer literals become IntConst, literals with '.' or an exponent RealConst.
Expr parse_expr(std::string_view text);

/// Infix text with minimal parentheses; parse_expr(format_expr(e)) == e for
/// trees built from parseable leaves. Folded constants print as their value.
std::string format_expr(const Expr& e);

/// Indented node-per-line dump, used by the CLI's `--emit tree`.
std::string format_tree(const Expr& e);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_double(double value);

}  // namespace stagediff
