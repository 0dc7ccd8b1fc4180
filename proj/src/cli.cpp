#include "stagediff/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stagediff/bench.hpp"
#include "stagediff/codegen.hpp"
#include "stagediff/corpus.hpp"
#include "stagediff/derive.hpp"
#include "stagediff/simplify.hpp"
#include "stagediff/text.hpp"
#include "stagediff/verify.hpp"

namespace stagediff {

namespace {

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiffArgs {
  std::string expr;
  unsigned wrt = 0;
  unsigned order = 1;
  bool raw = false;
  std::string emit = "infix";
  bool explain = false;
};

struct VerifyArgs {
  std::string expr;
  unsigned points = 100;
  std::uint64_t seed = 42;
};

struct BenchArgs {
  std::string case_name;
  unsigned n = 3;
  unsigned order = 1;
  unsigned wrt = 0;
  std::uint64_t iters = 10'000'000;
  std::string impl = "all";
  unsigned repeats = 1;
  std::string out;
};

struct GenTimeArgs {
  std::string case_name = "sumexp_terms";
  std::vector<unsigned> n_list;
  unsigned repeats = 3;
};

Expr parse_or_usage(const std::string& text) {
  try {
    return parse_expr(text);
  } catch (const ParseError& e) {
    throw UsageError("cannot parse expression: " + std::string(e.what()));
  }
}

std::string function_name(unsigned wrt, unsigned order) {
  std::string name = "d";
  if (order != 1) name += std::to_string(order);
  return name + "_dx" + std::to_string(wrt);
}

int run_diff(const DiffArgs& a, std::ostream& out, std::ostream& err) {
  const Expr e = parse_or_usage(a.expr);
  const VarId v{a.wrt};

  Expr result = e;
  RewriteTrace trace;
  if (a.raw) {
    for (unsigned k = 0; k < a.order; ++k) result = differentiate_raw(result, v);
  } else if (a.explain) {
    // Same result as the interleaved engine, but with every rewrite logged.
    result = simplify(e, nullptr, &trace);
    for (unsigned k = 0; k < a.order; ++k) result = simplify(differentiate_raw(result, v), nullptr, &trace);
  } else {
    DiffDiagnostics diag;
    result = derivative_n(e, v, a.order, &diag);
    if (diag.integer_overflows > 0) {
      err << "warning: " << diag.integer_overflows
                << " integer coefficient(s) overflowed int64 and were folded as double\n";
    }
  }

  if (a.emit == "tree") {
    out << format_tree(result);
  } else if (a.emit == "code") {
    out << emit_source(result, function_name(a.wrt, a.order));
  } else {
    out << format_expr(result) << '\n';
  }
  if (a.explain) {
    if (a.raw) {
      out << "# no rewrites applied (--raw)\n";
    } else {
      for (const RewriteEvent& ev : trace) out << "# " << ev.rule << " @ " << ev.path << '\n';
    }
  }
  return 0;
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
  const Expr e = parse_or_usage(a.expr);
  VerifyOptions options;
  options.points = a.points;
  options.seed = a.seed;
  const VerifyReport r = verify_derivatives(e, options);
  out << "arity " << r.arity << ", points " << a.points << ", seed " << a.seed << '\n'
      << "checked " << r.checked << " (fd " << r.fd_checked << "), skipped: domain " << r.skipped_domain
      << ", magnitude " << r.skipped_magnitude << ", fd-conditioning " << r.skipped_fd_conditioning << '\n'
      << "max rel error symbolic vs dual: " << format_double(r.max_dual_error) << " (tol "
      << format_double(options.dual_tolerance) << ") " << (r.dual_ok ? "ok" : "FAIL") << '\n'
      << "max rel error raw vs simplified: " << format_double(r.max_raw_error) << " (tol "
      << format_double(options.dual_tolerance) << ") " << (r.raw_ok ? "ok" : "FAIL") << '\n'
      << "max rel error symbolic vs fd: " << format_double(r.max_fd_error) << " (tol "
      << format_double(options.fd_tolerance) << ") " << (r.fd_ok ? "ok" : "FAIL") << '\n';
  return r.ok() ? 0 : 1;
}

std::vector<Impl> parse_impls(const std::string& text) {
  if (text == "all") return {std::begin(kAllImpls), std::end(kAllImpls)};
  std::vector<Impl> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto impl = parse_impl(item);
    if (!impl) throw UsageError("unknown implementation '" + item + "'");
    out.push_back(*impl);
  }
  if (out.empty()) throw UsageError("no implementation given");
  return out;
}

int run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto kind = parse_case(a.case_name);
  if (!kind) throw UsageError("unknown case '" + a.case_name + "'");
  const std::vector<Impl> impls = parse_impls(a.impl);
  BenchCase c;
  c.kind = *kind;
  c.order = a.order;
  c.terms = a.n;
  c.wrt = a.wrt;
  c.iters = a.iters;
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  BenchRunner runner(c);
  const bool explicit_list = a.impl != "all";
  std::vector<BenchResult> rows;
  for (Impl impl : impls) {
    if (!runner.supports(impl)) {
      if (explicit_list) {
        err << "error: " << to_string(impl) << " does not support " << a.case_name << ' ' << params_string(c)
            << '\n';
        return kUsageError;
      }
      err << "skipping " << to_string(impl) << ": not supported for " << params_string(c) << '\n';
      continue;
    }
    BenchResult r = runner.run(impl, a.repeats);
    if (impl == Impl::Staged && !r.staged) {
      err << "warning: staging failed, timed the interpreter fallback instead\n";
    }
    out << to_csv_row(r) << '\n';
    rows.push_back(std::move(r));
  }

  const BenchResult* staged = nullptr;
  for (const BenchResult& r : rows) {
    if (r.impl == Impl::Staged) staged = &r;
  }
  if (staged != nullptr) {
    for (const BenchResult& r : rows) {
      if (&r == staged) continue;
      if (r.impl == Impl::Fd) {
        // Truncation and cancellation error of central differences; reported, not checked.
        err << "note: fd checksum differs from staged by relative "
            << format_double(std::abs(r.checksum - staged->checksum) / std::max(1.0, std::abs(staged->checksum)))
            << '\n';
        continue;
      }
      if (!checksums_agree(*staged, r)) {
        err << "warning: checksum of " << to_string(r.impl) << " (" << format_double(r.checksum)
            << ") disagrees with staged (" << format_double(staged->checksum) << ")\n";
      }
    }
  }
  append_csv(a.out, rows);
  return 0;
}

int run_gen_time(const GenTimeArgs& a, std::ostream& out) {
  if (a.case_name != "sumexp_terms") throw UsageError("gen-time only supports --case sumexp_terms");
  if (a.n_list.empty()) throw UsageError("--n-list must not be empty");
  for (unsigned n : a.n_list) {
    if (n < 1) throw UsageError("term counts must be at least 1");
  }
  out << "n,elapsed_ms,result_nodes\n";
  for (const GenTimeSample& s : measure_generation_time(a.n_list, a.repeats)) {
    out << s.terms << ',' << format_double(s.elapsed_ms) << ',' << s.result_nodes << '\n';
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Staged symbolic differentiation: derive, verify and benchmark derivatives"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  DiffArgs diff;
  auto* diff_cmd = app.add_subcommand("diff", "Differentiate an expression and print the result");
  diff_cmd->add_option("--expr", diff.expr, "Expression over x0, x1, ...")->required();
  diff_cmd->add_option("--wrt", diff.wrt, "Variable index to differentiate by")->capture_default_str();
  diff_cmd->add_option("--order", diff.order, "Derivative order")->capture_default_str();
  diff_cmd->add_flag("--raw", diff.raw, "Skip simplification entirely");
  diff_cmd->add_option("--emit", diff.emit, "Output form")
      ->check(CLI::IsMember({"tree", "infix", "code"}))
      ->capture_default_str();
  diff_cmd->add_flag("--explain", diff.explain, "List every rewrite as 'rule @ path'");

  VerifyArgs verify;
  verify.seed = default_seed();
  auto* verify_cmd =
      app.add_subcommand("verify", "Check the symbolic derivatives against dual numbers and finite differences");
  verify_cmd->add_option("--expr", verify.expr, "Expression over x0, x1, ...")->required();
  verify_cmd->add_option("--points", verify.points, "Random points in [0.25, 1.25)")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Random seed (default: $STAGEDIFF_SEED or 42)")
      ->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand(
      "bench",
      "Time x[0] = 0; for (i < iters) { x[0] -= 0.1; sum += f'(x); } and append CSV rows.\n"
      "Coordinates other than x[0] stay fixed at x1 = 0.7, x2 = 0.9, x3 = 0.3.");
  bench_cmd->add_option("--case", bench.case_name,
                        "sumexp_order | sumexp_terms | mv_f | mv_g | nehmeier1 | nehmeier2 | nehmeier3")
      ->required();
  bench_cmd->add_option("--n", bench.n, "Term count for sumexp_terms")->capture_default_str();
  bench_cmd->add_option("--order", bench.order, "Derivative order for sumexp_order")->capture_default_str();
  bench_cmd->add_option("--wrt", bench.wrt, "Partial derivative index for mv_f / mv_g")->capture_default_str();
  bench_cmd->add_option("--iters", bench.iters, "Loop trip count")->capture_default_str();
  bench_cmd->add_option("--impl", bench.impl, "all, or a comma list of staged,hand,interpreted,dual,fd")
      ->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats, "Report the fastest of this many runs")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "CSV file to append to")->required();

  GenTimeArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-time", "Time differentiate + simplify for sum_{j=1..n} exp(j x0)");
  gen_cmd->add_option("--case", gen.case_name, "Only sumexp_terms")->capture_default_str();
  gen_cmd->add_option("--n-list", gen.n_list, "Comma separated term counts")->delimiter(',')->required();
  gen_cmd->add_option("--repeats", gen.repeats, "Report the fastest of this many runs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*diff_cmd) return run_diff(diff, out, err);
    if (*verify_cmd) return run_verify(verify, out);
    if (*bench_cmd) return run_bench(bench, out, err);
    if (*gen_cmd) return run_gen_time(gen, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace stagediff
