#pragma once

#include <cstddef>
#include <cstdint>

#include "stagediff/expr.hpp"

namespace stagediff {

/// |value - reference| / max(1, |reference|). Infinite when either side is
/// not finite.
double relative_error(double value, double reference);

struct VerifyOptions {
  unsigned points = 100;
  std::uint64_t seed = 42;
  double dual_tolerance = 1e-12;
  double fd_tolerance = 1e-6;
  /// Points with |f| or |f'| above this are skipped.
  double magnitude_cap = 1e12;
  double lo = 0.25;
  double hi = 1.25;
};

/// Counts are per (point, variable) pair.
struct VerifyReport {
  std::size_t arity = 0;
  std::uint64_t checked = 0;
  std::uint64_t fd_checked = 0;
  std::uint64_t skipped_domain = 0;
  std::uint64_t skipped_magnitude = 0;
  /// Central differences with steps h and 2h disagree by more than the FD
  /// tolerance, so the difference quotient itself is not trustworthy there.
  std::uint64_t skipped_fd_conditioning = 0;
  double max_dual_error = 0.0;
  double max_raw_error = 0.0;
  double max_fd_error = 0.0;
  bool dual_ok = true;
  bool raw_ok = true;
  bool fd_ok = true;

  bool ok() const noexcept { return dual_ok && raw_ok && fd_ok; }
};

/// Cross-checks every first partial derivative of `e` (symbolic, evaluated
/// with eval_tree) against the dual-number walker, the unsimplified raw
/// derivative and central differences at seeded random points in [lo, hi).
/// Points where f or a derivative is not finite are skipped.
VerifyReport verify_derivatives(const Expr& e, const VerifyOptions& options = {});

}  // namespace stagediff
