#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace stagediff {

/// Position of an independent variable in the evaluation point.
struct VarId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(VarId, VarId) = default;
};

enum class NodeKind : std::uint8_t { Var, IntConst, RealConst, Folded, Neg, Binary, Func };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div };
enum class Function : std::uint8_t { Exp, Log, Sin, Cos, Tan, Sqrt };

std::string_view to_string(BinaryOp op);
std::string_view to_string(Function fn);
char op_symbol(BinaryOp op);

namespace detail {
struct Node;
}

/// Immutable expression syntax tree.
///
/// An Expr is a cheap handle to a shared, never-mutated node. Subtrees may be
/// shared between several parents; every observable property (equality,
/// node_count, evaluation) still follows tree semantics, so a shared subtree
/// is counted and evaluated once per occurrence.
///
/// Equality is structural: same shape, operators, variable ids and constant
/// values. IntConst(2) and RealConst(2.0) differ. Real constants compare by
/// bit pattern. A Folded node compares by its cached value only; its
/// provenance is bookkeeping and does not take part in identity.
class Expr {
 public:
  static Expr var(VarId id);
  static Expr var(std::uint32_t index) { return var(VarId{index}); }
  static Expr integer(std::int64_t value);
  static Expr real(double value);
  /// `provenance` must be variable-free; throws std::invalid_argument otherwise.
  static Expr folded(double value, Expr provenance);
  static Expr neg(Expr child);
  static Expr binary(BinaryOp op, Expr left, Expr right);
  static Expr func(Function fn, Expr child);

  NodeKind kind() const noexcept;
  bool is_constant() const noexcept;
  bool is_var() const noexcept { return kind() == NodeKind::Var; }
  bool is_leaf() const noexcept;
  bool is_binary(BinaryOp op) const noexcept;
  bool is_neg() const noexcept { return kind() == NodeKind::Neg; }

  VarId var_id() const;
  std::int64_t int_value() const;
  /// Value of any constant node (IntConst converted to double).
  double constant_value() const;
  const Expr& provenance() const;

  BinaryOp binary_op() const;
  Function function() const;
  /// Operand of a Neg or Func node.
  const Expr& child() const;
  const Expr& left() const;
  const Expr& right() const;

  std::uint64_t node_count() const noexcept;
  std::size_t hash() const noexcept;
  /// 1 + largest variable index, or 0 for a variable-free tree.
  std::uint32_t required_arity() const noexcept;
  bool has_vars() const noexcept { return required_arity() != 0; }

  /// Identity of the underlying node; equal handles may still be distinct nodes.
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  const detail::Node& node() const noexcept { return *node_; }

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  NodeKind kind;
  std::uint8_t op = 0;  // BinaryOp or Function
  std::int64_t int_value = 0;
  double real_value = 0.0;
  std::vector<Expr> children;  // 0, 1 or 2 operands; Folded keeps its provenance here
  std::uint64_t count = 1;
  std::size_t hash = 0;
  std::uint32_t arity = 0;
};
}  // namespace detail

Expr zero();
Expr one();
bool is_zero(const Expr& e) noexcept;
bool is_one(const Expr& e) noexcept;

/// Total number of nodes of the tree, each leaf and operator counting as one.
inline std::uint64_t node_count(const Expr& e) noexcept { return e.node_count(); }

/// Internal nodes (Neg, Binary, Func); what a straight-line lowering executes.
std::uint64_t operation_count(const Expr& e);

/// Construction helpers so tests and the corpus can write expressions naturally.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr sqrt(const Expr& a);

struct ExprHash {
  std::size_t operator()(const Expr& e) const noexcept { return e.hash(); }
};

/// Evaluation point: one double per variable index.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> values) : values_(values) {}
  explicit Point(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t arity() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

 private:
  std::vector<double> values_;
};

class EvalError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Reference tree-walking evaluator with IEEE-754 double semantics.
/// Throws EvalError when the point has fewer coordinates than the tree needs.
double eval_tree(const Expr& e, std::span<const double> point);
inline double eval_tree(const Expr& e, const Point& p) { return eval_tree(e, p.values()); }

/// The individual operations eval_tree applies; shared with code that must
/// reproduce its results bit for bit.
double apply(BinaryOp op, double a, double b) noexcept;
double apply(Function fn, double a) noexcept;

}  // namespace stagediff
