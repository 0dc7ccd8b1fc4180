#include "stagediff/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

namespace stagediff {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("parse error at " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, factor());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    if (accept('-')) return Expr::neg(factor());
    return primary();
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    bool is_real = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_real = true;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        is_real = true;
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string_view lexeme = text_.substr(start, pos_ - start);
    if (lexeme == ".") {
      pos_ = start;
      fail("malformed number");
    }
    const char* first = lexeme.data();
    const char* last = first + lexeme.size();
    if (!is_real) {
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec == std::errc::result_out_of_range) {
        pos_ = start;
        fail("integer literal out of range");
      }
      if (ec != std::errc() || ptr != last) {
        pos_ = start;
        fail("malformed number");
      }
      return Expr::integer(value);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::real(value);
  }

  Expr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, Function> functions[] = {
        {"exp", Function::Exp}, {"log", Function::Log}, {"sin", Function::Sin},
        {"cos", Function::Cos}, {"tan", Function::Tan}, {"sqrt", Function::Sqrt}};
    for (const auto& [fname, fn] : functions) {
      if (word == fname) {
        if (!accept('(')) fail("expected '(' after " + std::string(fname));
        Expr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return Expr::func(fn, arg);
      }
    }

    if (word.size() >= 2 && word[0] == 'x') {
      const std::string_view digits = word.substr(1);
      bool all_digits = true;
      for (char d : digits) all_digits = all_digits && std::isdigit(static_cast<unsigned char>(d));
      if (all_digits) {
        std::uint32_t index = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
        if (ec != std::errc()) {
          pos_ = start;
          fail("variable index out of range");
        }
        return Expr::var(index);
      }
    }

    pos_ = start;
    skip_space();
    std::size_t after = start + word.size();
    while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
    if (after < text_.size() && text_[after] == '(') fail("unknown function '" + std::string(word) + "'");
    fail("invalid variable name '" + std::string(word) + "' (expected x<digits>)");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Binding strength used when deciding on parentheses.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Binary:
      return (e.binary_op() == BinaryOp::Add || e.binary_op() == BinaryOp::Sub) ? 1 : 2;
    case NodeKind::Neg:
      return 3;
    case NodeKind::IntConst:
      return e.int_value() < 0 ? 3 : 4;
    case NodeKind::RealConst:
    case NodeKind::Folded:
      return std::signbit(e.constant_value()) ? 3 : 4;
    default:
      return 4;
  }
}

void write(const Expr& e, std::string& out);

void write_operand(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  write(e, out);
  if (parens) out += ')';
}

void write(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Var:
      out += 'x';
      out += std::to_string(e.var_id().index);
      return;
    case NodeKind::IntConst:
      out += std::to_string(e.int_value());
      return;
    case NodeKind::RealConst: {
      std::string s = format_double(e.constant_value());
      if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    case NodeKind::Folded:
      out += format_double(e.constant_value());
      return;
    case NodeKind::Neg: {
      out += '-';
      const Expr& c = e.child();
      write_operand(c, precedence(c) < 4, out);
      return;
    }
    case NodeKind::Binary: {
      const int p = precedence(e);
      write_operand(e.left(), precedence(e.left()) < p, out);
      out += ' ';
      out += op_symbol(e.binary_op());
      out += ' ';
      write_operand(e.right(), precedence(e.right()) <= p, out);
      return;
    }
    case NodeKind::Func:
      out += to_string(e.function());
      out += '(';
      write(e.child(), out);
      out += ')';
      return;
  }
}

void write_tree(const Expr& e, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  switch (e.kind()) {
    case NodeKind::Var:
      out += "Var " + std::to_string(e.var_id().index);
      break;
    case NodeKind::IntConst:
      out += "Int " + std::to_string(e.int_value());
      break;
    case NodeKind::RealConst:
      out += "Real " + format_double(e.constant_value());
      break;
    case NodeKind::Folded:
      out += "Folded " + format_double(e.constant_value()) + " <- " + format_expr(e.provenance());
      break;
    case NodeKind::Neg:
      out += "Neg\n";
      write_tree(e.child(), depth + 1, out);
      return;
    case NodeKind::Binary:
      out += std::string(to_string(e.binary_op())) + "\n";
      write_tree(e.left(), depth + 1, out);
      write_tree(e.right(), depth + 1, out);
      return;
    case NodeKind::Func:
      out += std::string(to_string(e.function())) + "\n";
      write_tree(e.child(), depth + 1, out);
      return;
  }
  out += '\n';
}

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string format_expr(const Expr& e) {
  std::string out;
  write(e, out);
  return out;
}

std::string format_tree(const Expr& e) {
  std::string out;
  write_tree(e, 0, out);
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace stagediff
