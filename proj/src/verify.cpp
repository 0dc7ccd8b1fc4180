#include "stagediff/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "stagediff/baselines.hpp"
#include "stagediff/corpus.hpp"
#include "stagediff/derive.hpp"

namespace stagediff {

double relative_error(double value, double reference) {
  if (!std::isfinite(value) || !std::isfinite(reference)) return std::numeric_limits<double>::infinity();
  return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

VerifyReport verify_derivatives(const Expr& e, const VerifyOptions& options) {
  VerifyReport report;
  report.arity = std::max<std::size_t>(1, e.required_arity());

  std::vector<Expr> symbolic;
  std::vector<Expr> raw;
  for (std::size_t i = 0; i < report.arity; ++i) {
    const VarId v{static_cast<std::uint32_t>(i)};
    symbolic.push_back(differentiate(e, v));
    raw.push_back(differentiate_raw(e, v));
  }

  std::mt19937_64 rng(options.seed);
  for (unsigned k = 0; k < options.points; ++k) {
    const Point p = random_point(rng, report.arity, options.lo, options.hi);
    const double f = eval_tree(e, p);
    for (std::size_t i = 0; i < report.arity; ++i) {
      const VarId v{static_cast<std::uint32_t>(i)};
      const double s = eval_tree(symbolic[i], p);
      const double d = dual_eval(e, p, v).deriv;
      const double r = eval_tree(raw[i], p);
      if (!std::isfinite(f) || !std::isfinite(s) || !std::isfinite(d) || !std::isfinite(r)) {
        ++report.skipped_domain;
        continue;
      }
      if (std::abs(f) > options.magnitude_cap || std::abs(d) > options.magnitude_cap) {
        ++report.skipped_magnitude;
        continue;
      }
      ++report.checked;
      report.max_dual_error = std::max(report.max_dual_error, relative_error(s, d));
      report.max_raw_error = std::max(report.max_raw_error, relative_error(r, s));

      const double h = default_fd_step(p[i]);
      const double fd1 = fd_derivative(e, p.values(), v, h);
      const double fd2 = fd_derivative(e, p.values(), v, 2.0 * h);
      if (!std::isfinite(fd1) || !std::isfinite(fd2)) {
        ++report.skipped_domain;
        continue;
      }
      if (relative_error(fd2, fd1) > options.fd_tolerance) {
        ++report.skipped_fd_conditioning;
        continue;
      }
      ++report.fd_checked;
      report.max_fd_error = std::max(report.max_fd_error, relative_error(fd1, s));
    }
  }
  report.dual_ok = report.max_dual_error <= options.dual_tolerance;
  report.raw_ok = report.max_raw_error <= options.dual_tolerance;
  report.fd_ok = report.max_fd_error <= options.fd_tolerance;
  return report;
}

}  // namespace stagediff
