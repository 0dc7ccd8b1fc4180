#pragma once

#include <span>

#include "stagediff/expr.hpp"

namespace stagediff {

/// Forward-mode dual number: a value and its derivative along one direction.
struct Dual {
  double value = 0.0;
  double deriv = 0.0;
};

Dual operator+(Dual a, Dual b);
Dual operator-(Dual a, Dual b);
Dual operator*(Dual a, Dual b);
Dual operator/(Dual a, Dual b);
Dual operator-(Dual a);
Dual apply(Function fn, Dual a);

/// One tree walk seeded with x_v -> (p[v], 1) and every other input (p[i], 0).
/// The value component is bit-identical to eval_tree.
Dual dual_eval(const Expr& e, std::span<const double> point, VarId v);
inline Dual dual_eval(const Expr& e, const Point& p, VarId v) { return dual_eval(e, p.values(), v); }

/// Default central-difference step, 1e-6 * max(1, |x_v|).
double default_fd_step(double xv);

/// Central difference (f(x + h e_v) - f(x - h e_v)) / (2h).
double fd_derivative(const Expr& e, std::span<const double> point, VarId v, double h);
double fd_derivative(const Expr& e, std::span<const double> point, VarId v);

/// The naive-tree baseline: the unsimplified derivative, meant to be run
/// through eval_tree.
Expr interpreted_derivative(const Expr& e, VarId v);

}  // namespace stagediff
