#include "stagediff/expr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <string>

namespace stagediff {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  // boost::hash_combine
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::shared_ptr<detail::Node> make_node(NodeKind kind) {
  auto n = std::make_shared<detail::Node>();
  n->kind = kind;
  return n;
}

void finish_interior(detail::Node& n) {
  n.count = 1;
  n.arity = 0;
  n.hash = mix(static_cast<std::size_t>(n.kind) * 31 + n.op, n.children.size());
  for (const Expr& c : n.children) {
    n.count += c.node_count();
    n.arity = std::max(n.arity, c.required_arity());
    n.hash = mix(n.hash, c.hash());
  }
}

bool has_var_node(const Expr& e) { return e.required_arity() != 0; }

}  // namespace

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "add";
    case BinaryOp::Sub: return "sub";
    case BinaryOp::Mul: return "mul";
    case BinaryOp::Div: return "div";
  }
  return "?";
}

std::string_view to_string(Function fn) {
  switch (fn) {
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Tan: return "tan";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

char op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
  }
  return '?';
}

Expr Expr::var(VarId id) {
  auto n = make_node(NodeKind::Var);
  n->int_value = id.index;
  n->arity = id.index + 1;
  n->hash = mix(0x5151, id.index);
  return Expr(std::move(n));
}

Expr Expr::integer(std::int64_t value) {
  auto n = make_node(NodeKind::IntConst);
  n->int_value = value;
  n->real_value = static_cast<double>(value);
  n->hash = mix(0x1717, std::hash<std::int64_t>{}(value));
  return Expr(std::move(n));
}

Expr Expr::real(double value) {
  auto n = make_node(NodeKind::RealConst);
  n->real_value = value;
  n->hash = mix(0x2929, std::bit_cast<std::uint64_t>(value));
  return Expr(std::move(n));
}

Expr Expr::folded(double value, Expr provenance) {
  if (has_var_node(provenance)) {
    throw std::invalid_argument("folded constant provenance must not contain variables");
  }
  auto n = make_node(NodeKind::Folded);
  n->real_value = value;
  n->children.push_back(std::move(provenance));
  n->hash = mix(0x3b3b, std::bit_cast<std::uint64_t>(value));
  return Expr(std::move(n));
}

Expr Expr::neg(Expr child) {
  auto n = make_node(NodeKind::Neg);
  n->children.push_back(std::move(child));
  finish_interior(*n);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr left, Expr right) {
  auto n = make_node(NodeKind::Binary);
  n->op = static_cast<std::uint8_t>(op);
  n->children.reserve(2);
  n->children.push_back(std::move(left));
  n->children.push_back(std::move(right));
  finish_interior(*n);
  return Expr(std::move(n));
}

Expr Expr::func(Function fn, Expr child) {
  auto n = make_node(NodeKind::Func);
  n->op = static_cast<std::uint8_t>(fn);
  n->children.push_back(std::move(child));
  finish_interior(*n);
  return Expr(std::move(n));
}

NodeKind Expr::kind() const noexcept { return node().kind; }

bool Expr::is_constant() const noexcept {
  const NodeKind k = kind();
  return k == NodeKind::IntConst || k == NodeKind::RealConst || k == NodeKind::Folded;
}

bool Expr::is_leaf() const noexcept { return is_var() || is_constant(); }

bool Expr::is_binary(BinaryOp op) const noexcept {
  return kind() == NodeKind::Binary && node().op == static_cast<std::uint8_t>(op);
}

VarId Expr::var_id() const {
  if (kind() != NodeKind::Var) throw std::logic_error("var_id() on non-variable node");
  return VarId{static_cast<std::uint32_t>(node().int_value)};
}

std::int64_t Expr::int_value() const {
  if (kind() != NodeKind::IntConst) throw std::logic_error("int_value() on non-integer node");
  return node().int_value;
}

double Expr::constant_value() const {
  if (!is_constant()) throw std::logic_error("constant_value() on non-constant node");
  return node().real_value;
}

const Expr& Expr::provenance() const {
  if (kind() != NodeKind::Folded) throw std::logic_error("provenance() on non-folded node");
  return node().children[0];
}

BinaryOp Expr::binary_op() const {
  if (kind() != NodeKind::Binary) throw std::logic_error("binary_op() on non-binary node");
  return static_cast<BinaryOp>(node().op);
}

Function Expr::function() const {
  if (kind() != NodeKind::Func) throw std::logic_error("function() on non-function node");
  return static_cast<Function>(node().op);
}

const Expr& Expr::child() const {
  if (kind() != NodeKind::Neg && kind() != NodeKind::Func) {
    throw std::logic_error("child() on node without a single operand");
  }
  return node().children[0];
}

const Expr& Expr::left() const {
  if (kind() != NodeKind::Binary) throw std::logic_error("left() on non-binary node");
  return node().children[0];
}

const Expr& Expr::right() const {
  if (kind() != NodeKind::Binary) throw std::logic_error("right() on non-binary node");
  return node().children[1];
}

std::uint64_t Expr::node_count() const noexcept { return node().count; }
std::size_t Expr::hash() const noexcept { return node().hash; }
std::uint32_t Expr::required_arity() const noexcept {
  // Folded nodes keep their provenance as a child, which never has variables.
  return node().arity;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_.get() == b.node_.get()) return true;
  const detail::Node& x = a.node();
  const detail::Node& y = b.node();
  if (x.hash != y.hash || x.kind != y.kind || x.count != y.count) return false;
  switch (x.kind) {
    case NodeKind::Var:
    case NodeKind::IntConst:
      return x.int_value == y.int_value;
    case NodeKind::RealConst:
    case NodeKind::Folded:
      return std::bit_cast<std::uint64_t>(x.real_value) ==
             std::bit_cast<std::uint64_t>(y.real_value);
    case NodeKind::Neg:
      return x.children[0] == y.children[0];
    case NodeKind::Binary:
      return x.op == y.op && x.children[0] == y.children[0] && x.children[1] == y.children[1];
    case NodeKind::Func:
      return x.op == y.op && x.children[0] == y.children[0];
  }
  return false;
}

Expr zero() {
  static const Expr z = Expr::integer(0);
  return z;
}

Expr one() {
  static const Expr o = Expr::integer(1);
  return o;
}

bool is_zero(const Expr& e) noexcept { return e.is_constant() && e.constant_value() == 0.0; }
bool is_one(const Expr& e) noexcept { return e.is_constant() && e.constant_value() == 1.0; }

std::uint64_t operation_count(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Var:
    case NodeKind::IntConst:
    case NodeKind::RealConst:
    case NodeKind::Folded:
      return 0;
    case NodeKind::Neg:
    case NodeKind::Func:
      return 1 + operation_count(e.child());
    case NodeKind::Binary:
      return 1 + operation_count(e.left()) + operation_count(e.right());
  }
  return 0;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::neg(a); }
Expr exp(const Expr& a) { return Expr::func(Function::Exp, a); }
Expr log(const Expr& a) { return Expr::func(Function::Log, a); }
Expr sin(const Expr& a) { return Expr::func(Function::Sin, a); }
Expr cos(const Expr& a) { return Expr::func(Function::Cos, a); }
Expr tan(const Expr& a) { return Expr::func(Function::Tan, a); }
Expr sqrt(const Expr& a) { return Expr::func(Function::Sqrt, a); }

double apply(BinaryOp op, double a, double b) noexcept {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div: return a / b;
  }
  return 0.0;
}

double apply(Function fn, double a) noexcept {
  switch (fn) {
    case Function::Exp: return std::exp(a);
    case Function::Log: return std::log(a);
    case Function::Sin: return std::sin(a);
    case Function::Cos: return std::cos(a);
    case Function::Tan: return std::tan(a);
    case Function::Sqrt: return std::sqrt(a);
  }
  return 0.0;
}

namespace {

double eval_unchecked(const Expr& e, const double* x) {
  switch (e.kind()) {
    case NodeKind::Var: return x[e.var_id().index];
    case NodeKind::IntConst:
    case NodeKind::RealConst:
    case NodeKind::Folded: return e.constant_value();
    case NodeKind::Neg: return -eval_unchecked(e.child(), x);
    case NodeKind::Binary:
      return apply(e.binary_op(), eval_unchecked(e.left(), x), eval_unchecked(e.right(), x));
    case NodeKind::Func: return apply(e.function(), eval_unchecked(e.child(), x));
  }
  return 0.0;
}

}  // namespace

double eval_tree(const Expr& e, std::span<const double> point) {
  if (e.required_arity() > point.size()) {
    throw EvalError("point has " + std::to_string(point.size()) +
                    " coordinates but the expression uses x" +
                    std::to_string(e.required_arity() - 1));
  }
  return eval_unchecked(e, point.data());
}

}  // namespace stagediff
