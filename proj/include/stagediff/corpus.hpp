#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stagediff/expr.hpp"

namespace stagediff {

/// 2*x2 + exp(x0*x1)
Expr fig1_expr();

/// sum_{j=1..n} exp(j*x0); the j = 1 term is written exp(x0).
Expr sum_exp(unsigned n);

/// exp(x0) + 2^N*exp(2*x0) + 3^N*exp(3*x0), the N-th derivative of sum_exp(3)
/// in simplifier normal form (coefficient 1 elided). Requires 3^N < 2^63.
Expr sum_exp3_nth_derivative(unsigned order);

/// x0*tan(x1*x2) / (tan(x1*x2) - x3)
Expr mv_f();
/// x0 + sqrt(sqrt(x1 + sqrt(x2 + x3)))
Expr mv_g();

/// Two-variable gradient test functions, written with x = x1 and y = x0 so the
/// benchmark's swept coordinate x0 never leaves the domain of log(x):
///   1: x^2 y^3 + y log(x)
///   2: 3 x^2 y - y^3
///   3: (1 - x)^2 + 100 (y - x^2)
Expr nehmeier(int which);

struct NamedExpr {
  std::string name;
  Expr expr;
  std::size_t arity;
};

/// Fixed verification corpus: fig1, sum_exp(1..25), mv_f, mv_g, nehmeier 1-3.
std::vector<NamedExpr> reference_corpus();

struct RandomTreeOptions {
  unsigned max_depth = 6;
  std::uint32_t arity = 4;
};

/// Random tree over x0..x{arity-1}, small positive constants, the four binary
/// operators, negation and the six functions.
Expr random_tree(std::mt19937_64& rng, const RandomTreeOptions& options = {});

/// Point with coordinates drawn uniformly from [lo, hi).
Point random_point(std::mt19937_64& rng, std::size_t arity, double lo = 0.25, double hi = 1.25);

/// $STAGEDIFF_SEED when set to an integer, otherwise 42.
std::uint64_t default_seed();

}  // namespace stagediff
