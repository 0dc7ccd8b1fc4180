#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stagediff/expr.hpp"

namespace stagediff {

/// Straight-line text for `e`: a header line naming the function, its arity
/// and inputs, then one single-assignment statement per internal node in
/// post-order, then `return`. No common subexpressions are merged.
///
///   function d_dx1 arity 3 inputs x[0..3)
///   t0 = exp(x[2]);
///   t1 = 2 * t0;
///   return t1;
std::string emit_source(const Expr& e, std::string_view name);

/// Only the statements of emit_source, joined by single spaces and without
/// the trailing semicolon: "t0 = exp(x[2]); t1 = 2 * t0; return t1".
std::string emit_body(const Expr& e);

/// C++ translation unit defining `extern "C" double <symbol>(const double* x)`
/// for each expression, with the same operations in the same order.
std::string emit_cpp(std::span<const Expr> exprs, std::span<const std::string> symbols);

/// Compiled evaluation artifact for one expression.
///
/// When staged, entry() points into a shared object built from emit_cpp and
/// executes exactly the lowered statements. If the toolchain is unavailable,
/// the function falls back to eval_tree, staged() is false and diagnostic()
/// says why.
class GeneratedFn {
 public:
  using Entry = double (*)(const double*);

  std::size_t arity() const noexcept { return arity_; }
  std::uint64_t flop_count() const noexcept { return flop_count_; }
  bool staged() const noexcept { return entry_ != nullptr; }
  /// Null for the interpreter fallback.
  Entry entry() const noexcept { return entry_; }
  const Expr& source() const noexcept { return source_; }
  const std::string& diagnostic() const noexcept { return diagnostic_; }

  /// Throws EvalError if `x` has fewer than arity() coordinates.
  double operator()(std::span<const double> x) const;

  static GeneratedFn interpreted(Expr e, std::string diagnostic);

 private:
  friend std::vector<GeneratedFn> stage_compile_all(std::span<const Expr> exprs);

  GeneratedFn(Expr e, Entry entry, std::shared_ptr<void> module, std::string diagnostic);

  Expr source_;
  std::size_t arity_ = 0;
  std::uint64_t flop_count_ = 0;
  Entry entry_ = nullptr;
  std::shared_ptr<void> module_;
  std::string diagnostic_;
};

/// Compiles one expression (expected to be in normal form).
GeneratedFn stage_compile(const Expr& e);

/// Compiles several expressions into one shared object; cheaper than calling
/// stage_compile repeatedly.
std::vector<GeneratedFn> stage_compile_all(std::span<const Expr> exprs);

/// Compiler command used for staging: $STAGEDIFF_CXX if set, otherwise the
/// compiler this library was built with.
std::string staging_compiler();

/// Flags passed to the staging compiler; also used for the hand-coded kernels.
std::string_view staging_flags();

}  // namespace stagediff
