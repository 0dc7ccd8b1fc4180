#include "stagediff/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stagediff/derive.hpp"

namespace stagediff {

Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.deriv + b.deriv}; }
Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.deriv - b.deriv}; }
Dual operator*(Dual a, Dual b) { return {a.value * b.value, a.deriv * b.value + a.value * b.deriv}; }
Dual operator/(Dual a, Dual b) {
  return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
}
Dual operator-(Dual a) { return {-a.value, -a.deriv}; }

Dual apply(Function fn, Dual a) {
  switch (fn) {
    case Function::Exp: {
      const double v = std::exp(a.value);
      return {v, v * a.deriv};
    }
    case Function::Log:
      return {std::log(a.value), a.deriv / a.value};
    case Function::Sin:
      return {std::sin(a.value), std::cos(a.value) * a.deriv};
    case Function::Cos:
      return {std::cos(a.value), -std::sin(a.value) * a.deriv};
    case Function::Tan: {
      const double t = std::tan(a.value);
      return {t, (1.0 + t * t) * a.deriv};
    }
    case Function::Sqrt: {
      const double s = std::sqrt(a.value);
      return {s, a.deriv / (2.0 * s)};
    }
  }
  return {};
}

namespace {

Dual walk(const Expr& e, const double* x, std::uint32_t v) {
  switch (e.kind()) {
    case NodeKind::Var: {
      const std::uint32_t i = e.var_id().index;
      return {x[i], i == v ? 1.0 : 0.0};
    }
    case NodeKind::IntConst:
    case NodeKind::RealConst:
    case NodeKind::Folded:
      return {e.constant_value(), 0.0};
    case NodeKind::Neg:
      return -walk(e.child(), x, v);
    case NodeKind::Binary: {
      const Dual a = walk(e.left(), x, v);
      const Dual b = walk(e.right(), x, v);
      switch (e.binary_op()) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
      }
      break;
    }
    case NodeKind::Func:
      return apply(e.function(), walk(e.child(), x, v));
  }
  return {};
}

}  // namespace

Dual dual_eval(const Expr& e, std::span<const double> point, VarId v) {
  if (e.required_arity() > point.size()) {
    throw EvalError("point has " + std::to_string(point.size()) +
                    " coordinates but the expression uses x" +
                    std::to_string(e.required_arity() - 1));
  }
  return walk(e, point.data(), v.index);
}

double default_fd_step(double xv) { return 1e-6 * std::max(1.0, std::abs(xv)); }

double fd_derivative(const Expr& e, std::span<const double> point, VarId v, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  if (v.index >= point.size()) throw EvalError("differentiation variable outside the point");
  std::vector<double> x(point.begin(), point.end());
  const double xv = x[v.index];
  x[v.index] = xv + h;
  const double hi = eval_tree(e, x);
  x[v.index] = xv - h;
  const double lo = eval_tree(e, x);
  return (hi - lo) / (2.0 * h);
}

double fd_derivative(const Expr& e, std::span<const double> point, VarId v) {
  if (v.index >= point.size()) throw EvalError("differentiation variable outside the point");
  return fd_derivative(e, point, v, default_fd_step(point[v.index]));
}

Expr interpreted_derivative(const Expr& e, VarId v) { return differentiate_raw(e, v); }

}  // namespace stagediff
