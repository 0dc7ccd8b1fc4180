#include "stagediff/bench.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stagediff/baselines.hpp"
#include "stagediff/codegen.hpp"
#include "stagediff/corpus.hpp"
#include "stagediff/derive.hpp"
#include "stagediff/hand_coded.hpp"
#include "stagediff/text.hpp"

namespace stagediff {

namespace {

using Clock = std::chrono::steady_clock;

// Raw trees beyond this size are not worth interpreting 10^7 times.
constexpr std::uint64_t kMaxInterpretedNodes = 2'000'000;

constexpr std::array<double, 4> kFixedCoordinates = {0.0, 0.7, 0.9, 0.3};

inline void clobber_memory() { asm volatile("" : : : "memory"); }

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

template <class Body>
double timed_loop(std::uint64_t iters, Body&& body, double& checksum) {
  std::array<double, 4> x = kFixedCoordinates;
  double sum = 0.0;
  const auto start = Clock::now();
  for (std::uint64_t i = 0; i < iters; ++i) {
    x[0] -= 0.1;
    sum += body(x.data());
  }
  const auto stop = Clock::now();
  checksum = sum;
  return elapsed_ms(start, stop);
}

double empty_loop_ms(std::uint64_t iters) {
  std::array<double, 4> x = kFixedCoordinates;
  const auto start = Clock::now();
  for (std::uint64_t i = 0; i < iters; ++i) {
    x[0] -= 0.1;
    clobber_memory();
  }
  const auto stop = Clock::now();
  return elapsed_ms(start, stop);
}

struct HandKernel {
  hand::Kernel fn;
  std::vector<double> params;
};

std::int64_t ipow(std::int64_t b, unsigned e) {
  std::int64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(r, b, &r)) throw std::invalid_argument("order too large for exact coefficients");
  }
  return r;
}

std::vector<HandKernel> hand_kernels(const BenchCase& c) {
  static constexpr hand::Kernel f[] = {hand::mv_f_dx0, hand::mv_f_dx1, hand::mv_f_dx2, hand::mv_f_dx3};
  static constexpr hand::Kernel g[] = {hand::mv_g_dx0, hand::mv_g_dx1, hand::mv_g_dx2, hand::mv_g_dx3};
  switch (c.kind) {
    case CaseKind::SumExpOrder:
      return {{hand::sumexp_order,
               {static_cast<double>(ipow(2, c.order)), static_cast<double>(ipow(3, c.order))}}};
    case CaseKind::SumExpTerms:
      return {{hand::sumexp_terms, {static_cast<double>(c.terms)}}};
    case CaseKind::MvF:
      return {{f[c.wrt], {}}};
    case CaseKind::MvG:
      return {{g[c.wrt], {}}};
    case CaseKind::Nehmeier1:
      return {{hand::nehmeier1_dx0, {}}, {hand::nehmeier1_dx1, {}}};
    case CaseKind::Nehmeier2:
      return {{hand::nehmeier2_dx0, {}}, {hand::nehmeier2_dx1, {}}};
    case CaseKind::Nehmeier3:
      return {{hand::nehmeier3_dx0, {}}, {hand::nehmeier3_dx1, {}}};
  }
  return {};
}

bool is_gradient_case(CaseKind k) {
  return k == CaseKind::Nehmeier1 || k == CaseKind::Nehmeier2 || k == CaseKind::Nehmeier3;
}

}  // namespace

std::string_view to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::SumExpOrder: return "sumexp_order";
    case CaseKind::SumExpTerms: return "sumexp_terms";
    case CaseKind::MvF: return "mv_f";
    case CaseKind::MvG: return "mv_g";
    case CaseKind::Nehmeier1: return "nehmeier1";
    case CaseKind::Nehmeier2: return "nehmeier2";
    case CaseKind::Nehmeier3: return "nehmeier3";
  }
  return "?";
}

std::string_view to_string(Impl impl) {
  switch (impl) {
    case Impl::Staged: return "staged";
    case Impl::Hand: return "hand";
    case Impl::Interpreted: return "interpreted";
    case Impl::Dual: return "dual";
    case Impl::Fd: return "fd";
  }
  return "?";
}

std::optional<CaseKind> parse_case(std::string_view name) {
  for (CaseKind k : {CaseKind::SumExpOrder, CaseKind::SumExpTerms, CaseKind::MvF, CaseKind::MvG,
                     CaseKind::Nehmeier1, CaseKind::Nehmeier2, CaseKind::Nehmeier3}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<Impl> parse_impl(std::string_view name) {
  for (Impl i : kAllImpls) {
    if (to_string(i) == name) return i;
  }
  return std::nullopt;
}

std::string params_string(const BenchCase& c) {
  switch (c.kind) {
    case CaseKind::SumExpOrder: return "N=" + std::to_string(c.order);
    case CaseKind::SumExpTerms: return "n=" + std::to_string(c.terms);
    case CaseKind::MvF:
    case CaseKind::MvG: return "wrt=" + std::to_string(c.wrt);
    default: return "grad";
  }
}

void validate(const BenchCase& c) {
  if (c.iters < 1) throw std::invalid_argument("iters must be at least 1");
  if (c.kind == CaseKind::SumExpOrder && (c.order < 1 || c.order > 39)) {
    throw std::invalid_argument("order must be in 1..39 (3^N must fit in int64)");
  }
  if (c.kind == CaseKind::SumExpTerms && c.terms < 1) throw std::invalid_argument("n must be at least 1");
  if ((c.kind == CaseKind::MvF || c.kind == CaseKind::MvG) && c.wrt > 3) {
    throw std::invalid_argument("wrt must be in 0..3");
  }
}

struct BenchRunner::State {
  BenchCase bench;
  Expr function = zero();
  std::size_t arity = 1;
  std::vector<VarId> wrt;
  unsigned order = 1;
  std::vector<Expr> derivatives;
  std::optional<std::vector<GeneratedFn>> staged;
  std::optional<std::vector<Expr>> raw;
  bool raw_too_large = false;
  std::vector<HandKernel> hand;

  const std::vector<GeneratedFn>& staged_fns() {
    if (!staged) staged = stage_compile_all(derivatives);
    return *staged;
  }

  const std::vector<Expr>* raw_trees() {
    if (!raw && !raw_too_large) {
      std::vector<Expr> out;
      for (VarId v : wrt) {
        Expr r = function;
        for (unsigned k = 0; k < order; ++k) {
          r = interpreted_derivative(r, v);
          if (r.node_count() > kMaxInterpretedNodes) {
            raw_too_large = true;
            return nullptr;
          }
        }
        out.push_back(std::move(r));
      }
      raw = std::move(out);
    }
    return raw ? &*raw : nullptr;
  }
};

BenchRunner::BenchRunner(BenchCase c) : state_(std::make_unique<State>()) {
  validate(c);
  State& s = *state_;
  s.bench = c;
  switch (c.kind) {
    case CaseKind::SumExpOrder:
      s.function = sum_exp(3);
      s.order = c.order;
      break;
    case CaseKind::SumExpTerms:
      s.function = sum_exp(c.terms);
      break;
    case CaseKind::MvF:
      s.function = mv_f();
      s.arity = 4;
      break;
    case CaseKind::MvG:
      s.function = mv_g();
      s.arity = 4;
      break;
    case CaseKind::Nehmeier1: s.function = nehmeier(1); s.arity = 2; break;
    case CaseKind::Nehmeier2: s.function = nehmeier(2); s.arity = 2; break;
    case CaseKind::Nehmeier3: s.function = nehmeier(3); s.arity = 2; break;
  }
  if (is_gradient_case(c.kind)) {
    s.wrt = {VarId{0}, VarId{1}};
  } else {
    s.wrt = {VarId{c.kind == CaseKind::MvF || c.kind == CaseKind::MvG ? c.wrt : 0}};
  }
  for (VarId v : s.wrt) s.derivatives.push_back(derivative_n(s.function, v, s.order));
  s.hand = hand_kernels(c);
}

BenchRunner::~BenchRunner() = default;
BenchRunner::BenchRunner(BenchRunner&&) noexcept = default;
BenchRunner& BenchRunner::operator=(BenchRunner&&) noexcept = default;

const BenchCase& BenchRunner::bench_case() const noexcept { return state_->bench; }
const Expr& BenchRunner::function() const noexcept { return state_->function; }
std::span<const Expr> BenchRunner::derivatives() const noexcept { return state_->derivatives; }

bool BenchRunner::supports(Impl impl) const {
  switch (impl) {
    case Impl::Staged:
    case Impl::Hand:
      return true;
    case Impl::Interpreted:
      return state_->raw_trees() != nullptr;
    case Impl::Dual:
    case Impl::Fd:
      return state_->order == 1;
  }
  return false;
}

BenchResult BenchRunner::run(Impl impl, unsigned repeats) {
  State& s = *state_;
  if (!supports(impl)) {
    throw UnsupportedBenchmark(std::string(to_string(impl)) + " is not supported for " +
                               std::string(to_string(s.bench.kind)) + " " + params_string(s.bench));
  }
  repeats = std::max(1u, repeats);
  const std::uint64_t iters = s.bench.iters;
  const std::size_t arity = s.arity;

  BenchResult result;
  result.case_name = std::string(to_string(s.bench.kind));
  result.params = params_string(s.bench);
  result.impl = impl;
  result.iters = iters;
  result.elapsed_ms = std::numeric_limits<double>::infinity();

  auto measure = [&](auto&& body) {
    double loop = std::numeric_limits<double>::infinity();
    double overhead = loop;
    for (unsigned r = 0; r < repeats; ++r) {
      double checksum = 0.0;
      loop = std::min(loop, timed_loop(iters, body, checksum));
      result.checksum = checksum;
    }
    // The empty loop is cheap, so it is always sampled a few times; a single
    // slow sample would otherwise inflate the subtraction.
    for (unsigned r = 0; r < std::max(3u, repeats); ++r) overhead = std::min(overhead, empty_loop_ms(iters));
    result.elapsed_ms = std::max(0.0, loop - overhead);
  };

  switch (impl) {
    case Impl::Staged: {
      const std::vector<GeneratedFn>& fns = s.staged_fns();
      const bool all_staged = std::all_of(fns.begin(), fns.end(), [](const GeneratedFn& f) { return f.staged(); });
      result.staged = all_staged;
      if (all_staged && fns.size() == 1) {
        const GeneratedFn::Entry e = fns[0].entry();
        measure([e](const double* x) { return e(x); });
      } else if (all_staged) {
        std::vector<GeneratedFn::Entry> entries;
        for (const GeneratedFn& f : fns) entries.push_back(f.entry());
        measure([&entries](const double* x) {
          double v = entries[0](x);
          for (std::size_t i = 1; i < entries.size(); ++i) v += entries[i](x);
          return v;
        });
      } else {
        measure([&fns, arity](const double* x) {
          const std::span<const double> p(x, arity);
          double v = fns[0](p);
          for (std::size_t i = 1; i < fns.size(); ++i) v += fns[i](p);
          return v;
        });
      }
      break;
    }
    case Impl::Hand: {
      const std::vector<HandKernel>& k = s.hand;
      if (k.size() == 1) {
        const hand::Kernel fn = k[0].fn;
        const double* params = k[0].params.data();
        measure([fn, params](const double* x) { return fn(x, params); });
      } else {
        measure([&k](const double* x) {
          double v = k[0].fn(x, k[0].params.data());
          for (std::size_t i = 1; i < k.size(); ++i) v += k[i].fn(x, k[i].params.data());
          return v;
        });
      }
      break;
    }
    case Impl::Interpreted: {
      const std::vector<Expr>& raw = *s.raw_trees();
      measure([&raw, arity](const double* x) {
        const std::span<const double> p(x, arity);
        double v = eval_tree(raw[0], p);
        for (std::size_t i = 1; i < raw.size(); ++i) v += eval_tree(raw[i], p);
        return v;
      });
      break;
    }
    case Impl::Dual: {
      measure([&s, arity](const double* x) {
        const std::span<const double> p(x, arity);
        double v = dual_eval(s.function, p, s.wrt[0]).deriv;
        for (std::size_t i = 1; i < s.wrt.size(); ++i) v += dual_eval(s.function, p, s.wrt[i]).deriv;
        return v;
      });
      break;
    }
    case Impl::Fd: {
      measure([&s, arity](const double* x) {
        const std::span<const double> p(x, arity);
        double v = fd_derivative(s.function, p, s.wrt[0]);
        for (std::size_t i = 1; i < s.wrt.size(); ++i) v += fd_derivative(s.function, p, s.wrt[i]);
        return v;
      });
      break;
    }
  }
  return result;
}

BenchResult run_benchmark(const BenchCase& c, Impl impl, unsigned repeats) {
  return BenchRunner(c).run(impl, repeats);
}

std::string to_csv_row(const BenchResult& r) {
  std::ostringstream out;
  out << r.case_name << ',' << r.params << ',' << to_string(r.impl) << ',' << r.iters << ','
      << format_double(r.elapsed_ms) << ',' << format_double(r.checksum) << ','
      << (r.staged ? "true" : "false");
  return out.str();
}

void append_csv(const std::filesystem::path& path, std::span<const BenchResult> rows) {
  std::error_code ec;
  const bool need_header = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (need_header) out << kCsvHeader << '\n';
  for (const BenchResult& r : rows) out << to_csv_row(r) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

bool checksums_agree(const BenchResult& staged, const BenchResult& other, double relative_tolerance) {
  if (other.impl == Impl::Hand || other.impl == Impl::Staged) {
    return std::bit_cast<std::uint64_t>(staged.checksum) == std::bit_cast<std::uint64_t>(other.checksum);
  }
  const double scale = std::max(1.0, std::abs(staged.checksum));
  return std::abs(staged.checksum - other.checksum) <= relative_tolerance * scale;
}

std::vector<GenTimeSample> measure_generation_time(std::span<const unsigned> terms, unsigned repeats) {
  struct Slot {
    Expr f;
    unsigned inner = 1;
    GenTimeSample sample;
  };
  std::vector<Slot> slots;
  for (unsigned n : terms) {
    Slot s{sum_exp(n), 1, {n, std::numeric_limits<double>::infinity(), 0}};
    // Run enough differentiations per sample that clock resolution and
    // allocator noise do not dominate small n.
    for (;;) {
      const auto t0 = Clock::now();
      for (unsigned k = 0; k < s.inner; ++k) s.sample.result_nodes = differentiate(s.f, VarId{0}).node_count();
      if (elapsed_ms(t0, Clock::now()) >= 5.0 || s.inner >= (1u << 20)) break;
      s.inner *= 2;
    }
    slots.push_back(std::move(s));
  }
  // Round-robin so that slow drifts (frequency scaling, other load) are
  // spread over all sizes instead of biasing a few.
  for (unsigned r = 0; r < std::max(1u, repeats); ++r) {
    for (Slot& s : slots) {
      const auto t0 = Clock::now();
      for (unsigned k = 0; k < s.inner; ++k) s.sample.result_nodes = differentiate(s.f, VarId{0}).node_count();
      s.sample.elapsed_ms = std::min(s.sample.elapsed_ms, elapsed_ms(t0, Clock::now()) / s.inner);
    }
  }
  std::vector<GenTimeSample> out;
  for (const Slot& s : slots) out.push_back(s.sample);
  return out;
}

}  // namespace stagediff
