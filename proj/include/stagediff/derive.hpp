#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stagediff/expr.hpp"

namespace stagediff {

/// What to differentiate: `order` times with respect to `wrt`. Order 0 is the
/// identity (simplified when `interleave` is set).
struct DiffRequest {
  VarId wrt;
  unsigned order = 1;
  bool interleave = true;
};

struct DiffDiagnostics {
  /// Integer coefficient folds that overflowed int64 and were promoted to double.
  std::uint64_t integer_overflows = 0;
};

/// Structural differentiation without any simplification.
Expr differentiate_raw(const Expr& e, VarId v);

/// Differentiation with simplification interleaved: every sub-derivative and
/// every node built from them is brought to normal form as it is created.
/// The result equals simplify(differentiate_raw(simplify(e), v)).
Expr differentiate(const Expr& e, VarId v);

/// n-th derivative by repeated differentiation; n == 0 returns simplify(e).
Expr derivative_n(const Expr& e, VarId v, unsigned n, DiffDiagnostics* diagnostics = nullptr);

Expr derive(const Expr& e, const DiffRequest& request, DiffDiagnostics* diagnostics = nullptr);

/// All first partial derivatives, element i taken with respect to x_i.
std::vector<Expr> gradient(const Expr& e, std::size_t arity);

}  // namespace stagediff
