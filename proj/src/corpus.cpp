#include "stagediff/corpus.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace stagediff {

namespace {

Expr x(std::uint32_t i) { return Expr::var(i); }
Expr n(std::int64_t v) { return Expr::integer(v); }

std::int64_t ipow(std::int64_t base, unsigned e) {
  std::int64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) throw std::overflow_error("coefficient exceeds int64");
  }
  return r;
}

}  // namespace

Expr fig1_expr() { return n(2) * x(2) + exp(x(0) * x(1)); }

Expr sum_exp(unsigned terms) {
  if (terms == 0) throw std::invalid_argument("sum_exp needs at least one term");
  Expr sum = exp(x(0));
  for (unsigned j = 2; j <= terms; ++j) sum = sum + exp(n(j) * x(0));
  return sum;
}

Expr sum_exp3_nth_derivative(unsigned order) {
  return exp(x(0)) + n(ipow(2, order)) * exp(n(2) * x(0)) + n(ipow(3, order)) * exp(n(3) * x(0));
}

Expr mv_f() {
  const Expr t = tan(x(1) * x(2));
  return x(0) * t / (t - x(3));
}

Expr mv_g() { return x(0) + sqrt(sqrt(x(1) + sqrt(x(2) + x(3)))); }

Expr nehmeier(int which) {
  const Expr X = x(1);
  const Expr Y = x(0);
  switch (which) {
    case 1: return X * X * Y * Y * Y + Y * log(X);
    case 2: return n(3) * X * X * Y - Y * Y * Y;
    case 3: return (n(1) - X) * (n(1) - X) + n(100) * (Y - X * X);
    default: throw std::invalid_argument("nehmeier function index must be 1, 2 or 3");
  }
}

std::vector<NamedExpr> reference_corpus() {
  std::vector<NamedExpr> out;
  out.push_back({"fig1", fig1_expr(), 3});
  for (unsigned terms = 1; terms <= 25; ++terms) {
    out.push_back({"sum_exp_" + std::to_string(terms), sum_exp(terms), 1});
  }
  out.push_back({"mv_f", mv_f(), 4});
  out.push_back({"mv_g", mv_g(), 4});
  for (int i = 1; i <= 3; ++i) out.push_back({"nehmeier" + std::to_string(i), nehmeier(i), 2});
  return out;
}

Expr random_tree(std::mt19937_64& rng, const RandomTreeOptions& options) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> var_pick(0, options.arity - 1);
  std::uniform_int_distribution<int> int_pick(1, 5);
  static constexpr double reals[] = {0.5, 1.5, 2.3, 0.25, 3.75};
  std::uniform_int_distribution<std::size_t> real_pick(0, std::size(reals) - 1);
  std::uniform_int_distribution<int> op_pick(0, 10);

  auto leaf = [&]() -> Expr {
    const double r = coin(rng);
    if (r < 0.55) return Expr::var(var_pick(rng));
    if (r < 0.8) return Expr::integer(int_pick(rng));
    return Expr::real(reals[real_pick(rng)]);
  };

  auto build = [&](auto& self, unsigned depth) -> Expr {
    // Leaf probability grows with depth so trees stay varied in size.
    if (depth + 1 >= options.max_depth || coin(rng) < 0.15 + 0.1 * depth) return leaf();
    switch (op_pick(rng)) {
      case 0: return self(self, depth + 1) + self(self, depth + 1);
      case 1: return self(self, depth + 1) - self(self, depth + 1);
      case 2:
      case 3: return self(self, depth + 1) * self(self, depth + 1);
      case 4: return self(self, depth + 1) / self(self, depth + 1);
      case 5: return -self(self, depth + 1);
      case 6: return exp(self(self, depth + 1));
      case 7: return log(self(self, depth + 1));
      case 8: return coin(rng) < 0.5 ? sin(self(self, depth + 1)) : cos(self(self, depth + 1));
      case 9: return tan(self(self, depth + 1));
      default: return sqrt(self(self, depth + 1));
    }
  };
  return build(build, 0);
}

Point random_point(std::mt19937_64& rng, std::size_t arity, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(arity);
  for (double& c : v) c = dist(rng);
  return Point(std::move(v));
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("STAGEDIFF_SEED"); s != nullptr) {
    std::uint64_t seed = 0;
    const char* end = s + std::strlen(s);
    auto [ptr, ec] = std::from_chars(s, end, seed);
    if (ec == std::errc() && ptr == end) return seed;
  }
  return 42;
}

}  // namespace stagediff
