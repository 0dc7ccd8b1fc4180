#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stagediff/expr.hpp"

namespace stagediff {

enum class CaseKind { SumExpOrder, SumExpTerms, MvF, MvG, Nehmeier1, Nehmeier2, Nehmeier3 };
enum class Impl { Staged, Hand, Interpreted, Dual, Fd };

std::string_view to_string(CaseKind kind);
std::string_view to_string(Impl impl);
std::optional<CaseKind> parse_case(std::string_view name);
std::optional<Impl> parse_impl(std::string_view name);
inline constexpr Impl kAllImpls[] = {Impl::Staged, Impl::Hand, Impl::Interpreted, Impl::Dual, Impl::Fd};

/// One benchmark configuration.
///   sumexp_order  N-th derivative of exp(x)+exp(2x)+exp(3x)      (order)
///   sumexp_terms  first derivative of sum_{j=1..n} exp(jx)         (terms)
///   mv_f, mv_g    one partial derivative of the 4-variable functions (wrt)
///   nehmeier1..3  full gradient of the 2-variable functions
struct BenchCase {
  CaseKind kind = CaseKind::SumExpOrder;
  unsigned order = 1;
  unsigned terms = 3;
  unsigned wrt = 0;
  std::uint64_t iters = 10'000'000;
};

/// "N=4", "n=20", "wrt=1" or "grad".
std::string params_string(const BenchCase& c);

/// Throws std::invalid_argument when a parameter is out of range.
void validate(const BenchCase& c);

struct BenchResult {
  std::string case_name;
  std::string params;
  Impl impl = Impl::Staged;
  std::uint64_t iters = 0;
  double elapsed_ms = 0.0;
  double checksum = 0.0;
  bool staged = false;
};

/// Thrown for case/implementation pairs that cannot be run (for example the
/// dual-number walker on a higher-order derivative).
class UnsupportedBenchmark : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Prepares a case once (derivatives, staged kernels, raw trees) so that
/// several implementations and repetitions can be timed without rebuilding.
class BenchRunner {
 public:
  explicit BenchRunner(BenchCase c);
  ~BenchRunner();
  BenchRunner(BenchRunner&&) noexcept;
  BenchRunner& operator=(BenchRunner&&) noexcept;

  const BenchCase& bench_case() const noexcept;
  /// The function being differentiated and the derivatives timed per call.
  const Expr& function() const noexcept;
  std::span<const Expr> derivatives() const noexcept;
  bool supports(Impl impl) const;

  /// Runs the loop
  ///   x[0] = 0; sum = 0;
  ///   for (i < iters) { x[0] -= 0.1; sum += f'(x); }
  /// `repeats` times and reports the fastest run with the empty-loop overhead
  /// subtracted. Non-swept coordinates are fixed at 0.7, 0.9, 0.3.
  BenchResult run(Impl impl, unsigned repeats = 1);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

BenchResult run_benchmark(const BenchCase& c, Impl impl, unsigned repeats = 1);

inline constexpr std::string_view kCsvHeader = "case,params,impl,iters,elapsed_ms,checksum,staged";
std::string to_csv_row(const BenchResult& r);
/// Appends rows, writing the header first when the file is new or empty.
void append_csv(const std::filesystem::path& path, std::span<const BenchResult> rows);

/// Staged and hand must agree bitwise; the other implementations within
/// `relative_tolerance` of the staged checksum.
bool checksums_agree(const BenchResult& staged, const BenchResult& other, double relative_tolerance = 1e-9);

struct GenTimeSample {
  unsigned terms = 0;
  double elapsed_ms = 0.0;
  std::uint64_t result_nodes = 0;
};

/// Wall time of differentiate(sum_exp(n), x0) (simplification included),
/// fastest of `repeats` runs, for each n.
std::vector<GenTimeSample> measure_generation_time(std::span<const unsigned> terms, unsigned repeats = 3);

}  // namespace stagediff
