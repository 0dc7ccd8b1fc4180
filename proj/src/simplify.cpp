#include "stagediff/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace stagediff {

namespace {

thread_local std::uint64_t overflow_count = 0;

using Rewrite = std::optional<Expr>;

Expr mul(Expr a, Expr b) { return Expr::binary(BinaryOp::Mul, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return Expr::binary(BinaryOp::Sub, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return Expr::binary(BinaryOp::Div, std::move(a), std::move(b)); }

const Expr& provenance_of(const Expr& c) {
  return c.kind() == NodeKind::Folded ? c.provenance() : c;
}

std::optional<std::int64_t> exact_int(BinaryOp op, std::int64_t a, std::int64_t b, bool& overflow) {
  std::int64_t r = 0;
  switch (op) {
    case BinaryOp::Add: overflow = __builtin_add_overflow(a, b, &r); break;
    case BinaryOp::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
    case BinaryOp::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
    case BinaryOp::Div:
      if (b == 0) return std::nullopt;
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
        overflow = true;
        return std::nullopt;
      }
      if (a % b != 0) return std::nullopt;
      return a / b;
  }
  if (overflow) return std::nullopt;
  return r;
}

// --- folding rules --------------------------------------------------------

Rewrite fold_const_pair(const Expr& e) {
  if (e.kind() != NodeKind::Binary || !e.left().is_constant() || !e.right().is_constant()) {
    return std::nullopt;
  }
  return fold_binary(e.binary_op(), e.left(), e.right());
}

bool both_int(const Expr& a, const Expr& b) {
  return a.kind() == NodeKind::IntConst && b.kind() == NodeKind::IntConst;
}

// c1*(c2*x) with at least one non-integer coefficient.
Rewrite fold_nested_mul(const Expr& e) {
  if (!e.is_binary(BinaryOp::Mul) || !e.left().is_constant()) return std::nullopt;
  const Expr& inner = e.right();
  if (!inner.is_binary(BinaryOp::Mul) || !inner.left().is_constant()) return std::nullopt;
  if (both_int(e.left(), inner.left())) return std::nullopt;
  auto c = fold_binary(BinaryOp::Mul, e.left(), inner.left());
  if (!c) return std::nullopt;
  return mul(*c, inner.right());
}

Rewrite constant_to_left(const Expr& e) {
  if (!e.is_binary(BinaryOp::Mul) || e.left().is_constant() || !e.right().is_constant()) {
    return std::nullopt;
  }
  return mul(e.right(), e.left());
}

// --- algebraic rules ------------------------------------------------------

Rewrite add_sub_zero(const Expr& e) {
  if (e.is_binary(BinaryOp::Add)) {
    if (is_zero(e.right())) return e.left();
    if (is_zero(e.left())) return e.right();
  } else if (e.is_binary(BinaryOp::Sub) && is_zero(e.right())) {
    return e.left();
  }
  return std::nullopt;
}

Rewrite zero_minus(const Expr& e) {
  if (e.is_binary(BinaryOp::Sub) && is_zero(e.left())) return Expr::neg(e.right());
  return std::nullopt;
}

Rewrite mul_zero(const Expr& e) {
  if (e.is_binary(BinaryOp::Mul) && (is_zero(e.left()) || is_zero(e.right()))) return zero();
  return std::nullopt;
}

Rewrite mul_one(const Expr& e) {
  if (!e.is_binary(BinaryOp::Mul)) return std::nullopt;
  if (is_one(e.right())) return e.left();
  if (is_one(e.left())) return e.right();
  return std::nullopt;
}

Rewrite int_nested_mul(const Expr& e) {
  if (!e.is_binary(BinaryOp::Mul) || e.left().kind() != NodeKind::IntConst) return std::nullopt;
  const Expr& inner = e.right();
  if (!inner.is_binary(BinaryOp::Mul) || inner.left().kind() != NodeKind::IntConst) {
    return std::nullopt;
  }
  auto c = fold_binary(BinaryOp::Mul, e.left(), inner.left());
  if (!c) return std::nullopt;
  return mul(*c, inner.right());
}

Rewrite neg_of_sub(const Expr& e) {
  if (e.is_neg() && e.child().is_binary(BinaryOp::Sub)) {
    return sub(e.child().right(), e.child().left());
  }
  return std::nullopt;
}

Rewrite neg_neg(const Expr& e) {
  if (e.is_neg() && e.child().is_neg()) return e.child().child();
  return std::nullopt;
}

Rewrite add_neg(const Expr& e) {
  if (e.is_binary(BinaryOp::Add) && e.right().is_neg()) return sub(e.left(), e.right().child());
  return std::nullopt;
}

// (x*y)/(x*z) -> y/z, matching the shared factor on either side of each product.
Rewrite div_common_factor(const Expr& e) {
  if (!e.is_binary(BinaryOp::Div)) return std::nullopt;
  const Expr& n = e.left();
  const Expr& d = e.right();
  if (!n.is_binary(BinaryOp::Mul) || !d.is_binary(BinaryOp::Mul)) return std::nullopt;
  if (n.left() == d.left()) return div(n.right(), d.right());
  if (n.left() == d.right()) return div(n.right(), d.left());
  if (n.right() == d.left()) return div(n.left(), d.right());
  if (n.right() == d.right()) return div(n.left(), d.left());
  return std::nullopt;
}

Rewrite div_cancel_numerator(const Expr& e) {
  if (!e.is_binary(BinaryOp::Div) || !e.left().is_binary(BinaryOp::Mul)) return std::nullopt;
  const Expr& n = e.left();
  if (n.left() == e.right()) return n.right();
  if (n.right() == e.right()) return n.left();
  return std::nullopt;
}

Rewrite div_cancel_denominator(const Expr& e) {
  if (!e.is_binary(BinaryOp::Div) || !e.right().is_binary(BinaryOp::Mul)) return std::nullopt;
  const Expr& d = e.right();
  if (d.left() == e.left()) return div(one(), d.right());
  if (d.right() == e.left()) return div(one(), d.left());
  return std::nullopt;
}

Rewrite div_self(const Expr& e) {
  if (e.is_binary(BinaryOp::Div) && e.left() == e.right()) return one();
  return std::nullopt;
}

Rewrite zero_div(const Expr& e) {
  if (e.is_binary(BinaryOp::Div) && is_zero(e.left())) return zero();
  return std::nullopt;
}

Rewrite div_one(const Expr& e) {
  if (e.is_binary(BinaryOp::Div) && is_one(e.right())) return e.left();
  return std::nullopt;
}

Rewrite recip_of_div(const Expr& e) {
  if (e.is_binary(BinaryOp::Div) && is_one(e.left()) && e.right().is_binary(BinaryOp::Div)) {
    return div(e.right().right(), e.right().left());
  }
  return std::nullopt;
}

Rewrite mul_recip(const Expr& e) {
  if (!e.is_binary(BinaryOp::Mul)) return std::nullopt;
  const auto is_recip = [](const Expr& x) { return x.is_binary(BinaryOp::Div) && is_one(x.left()); };
  if (is_recip(e.right())) return div(e.left(), e.right().right());
  if (is_recip(e.left())) return div(e.right(), e.left().right());
  return std::nullopt;
}

constexpr RewriteRule kCatalog[] = {
    {"fold-constants", "c1 op c2 -> [c1 op c2]", fold_const_pair},
    {"fold-nested-mul", "c1*(c2*x) -> [c1*c2]*x", fold_nested_mul},
    {"constant-left", "x*c -> c*x", constant_to_left},
    {"add-zero", "x+0 -> x, 0+x -> x, x-0 -> x", add_sub_zero},
    {"zero-minus", "0-x -> -x", zero_minus},
    {"mul-zero", "x*0 -> 0, 0*x -> 0", mul_zero},
    {"mul-one", "x*1 -> x, 1*x -> x", mul_one},
    {"int-nested-mul", "n*(m*x) -> (nm)*x", int_nested_mul},
    {"neg-sub", "-(x-y) -> y-x", neg_of_sub},
    {"neg-neg", "-(-x) -> x", neg_neg},
    {"add-neg", "x+(-y) -> x-y", add_neg},
    {"div-common-factor", "(x*y)/(x*z) -> y/z", div_common_factor},
    {"div-cancel-numerator", "(x*y)/x -> y", div_cancel_numerator},
    {"div-cancel-denominator", "x/(x*y) -> 1/y", div_cancel_denominator},
    {"div-self", "x/x -> 1", div_self},
    {"zero-div", "0/x -> 0", zero_div},
    {"div-one", "x/1 -> x", div_one},
    {"recip-div", "1/(x/y) -> y/x", recip_of_div},
    {"mul-recip", "x*(1/y) -> x/y", mul_recip},
};

std::string child_path(std::string_view parent, int index) {
  std::string p(parent);
  if (p.empty() || p.back() != '/') p += '/';
  p += std::to_string(index);
  return p;
}

Expr with_children(const Expr& e, const Expr& a) {
  if (a.id() == e.child().id()) return e;
  return e.is_neg() ? Expr::neg(a) : Expr::func(e.function(), a);
}

Expr with_children(const Expr& e, const Expr& a, const Expr& b) {
  if (a.id() == e.left().id() && b.id() == e.right().id()) return e;
  return Expr::binary(e.binary_op(), a, b);
}

class Pass {
 public:
  explicit Pass(RewriteTrace* trace) : trace_(trace) {}

  void reserve(std::size_t n) { memo_.reserve(n); }

  Expr run(const Expr& e, const std::string& path) {
    if (e.is_leaf()) return e;
    if (!trace_) {
      if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    }
    Expr rebuilt = e;
    if (e.kind() == NodeKind::Binary) {
      Expr a = run(e.left(), trace_ ? child_path(path, 0) : path);
      Expr b = run(e.right(), trace_ ? child_path(path, 1) : path);
      rebuilt = with_children(e, a, b);
    } else {
      rebuilt = with_children(e, run(e.child(), trace_ ? child_path(path, 0) : path));
    }
    Expr out = normalize_node(rebuilt, trace_, path);
    if (!trace_) memo_.emplace(e.id(), out);
    return out;
  }

 private:
  RewriteTrace* trace_;
  std::unordered_map<const void*, Expr> memo_;
};

bool matches_any(const Expr& e) {
  for (const RewriteRule& rule : kCatalog) {
    if (rule.apply(e)) return true;
  }
  return false;
}

bool normal_everywhere(const Expr& e, std::unordered_map<const void*, bool>& seen) {
  if (e.is_leaf()) return true;
  if (auto it = seen.find(e.id()); it != seen.end()) return it->second;
  bool ok = !matches_any(e);
  if (ok) {
    if (e.kind() == NodeKind::Binary) {
      ok = normal_everywhere(e.left(), seen) && normal_everywhere(e.right(), seen);
    } else {
      ok = normal_everywhere(e.child(), seen);
    }
  }
  seen.emplace(e.id(), ok);
  return ok;
}

}  // namespace

std::span<const RewriteRule> rule_catalog() { return kCatalog; }

const RewriteRule* find_rule(std::string_view name) {
  for (const RewriteRule& rule : kCatalog) {
    if (rule.name == name) return &rule;
  }
  return nullptr;
}

std::uint64_t integer_overflow_count() noexcept { return overflow_count; }

std::optional<Expr> fold_binary(BinaryOp op, const Expr& a, const Expr& b) {
  if (!a.is_constant() || !b.is_constant()) return std::nullopt;
  if (both_int(a, b)) {
    bool overflow = false;
    if (auto r = exact_int(op, a.int_value(), b.int_value(), overflow)) return Expr::integer(*r);
    if (overflow) ++overflow_count;
  }
  const double v = apply(op, a.constant_value(), b.constant_value());
  if (!std::isfinite(v)) return std::nullopt;
  return Expr::folded(v, Expr::binary(op, provenance_of(a), provenance_of(b)));
}

Expr normalize_node(const Expr& e, RewriteTrace* trace, std::string_view path) {
  Expr cur = e;
  // Every rule either shrinks the tree or (constant-left) fires at most once
  // in a row, so this bound is never reached.
  const std::uint64_t cap = 2 * e.node_count() + 2;
  for (std::uint64_t step = 0;; ++step) {
    if (step > cap) throw std::logic_error("simplifier failed to reach a normal form");
    bool fired = false;
    for (const RewriteRule& rule : kCatalog) {
      if (auto r = rule.apply(cur)) {
        if (trace) trace->push_back({std::string(rule.name), std::string(path)});
        cur = std::move(*r);
        fired = true;
        break;
      }
    }
    if (!fired) return cur;
  }
}

Expr simplify_once(const Expr& e, RewriteTrace* trace) {
  Pass pass(trace);
  if (!trace) pass.reserve(std::min<std::uint64_t>(e.node_count(), 4096));
  return pass.run(e, "/");
}

Expr simplify(const Expr& e, SimplifyReport* report, RewriteTrace* trace) {
  const std::size_t cap = std::max<std::size_t>(2, 2 * e.node_count());
  Expr cur = e;
  std::size_t passes = 0;
  for (;;) {
    if (passes >= cap) throw std::logic_error("simplify exceeded its pass limit");
    Expr next = simplify_once(cur, trace);
    ++passes;
    if (next == cur) break;
    cur = std::move(next);
  }
  if (report) *report = {passes, cap};
  return cur;
}

bool is_normal_form(const Expr& e) {
  std::unordered_map<const void*, bool> seen;
  return normal_everywhere(e, seen);
}

Expr fold_constants(const Expr& e) {
  if (e.is_leaf()) return e;
  if (e.has_vars()) {
    if (e.kind() == NodeKind::Binary) {
      return with_children(e, fold_constants(e.left()), fold_constants(e.right()));
    }
    return with_children(e, fold_constants(e.child()));
  }
  // Variable-free interior node: fold bottom-up.
  if (e.kind() == NodeKind::Binary) {
    Expr a = fold_constants(e.left());
    Expr b = fold_constants(e.right());
    if (a.is_constant() && b.is_constant()) {
      if (auto r = fold_binary(e.binary_op(), a, b)) {
        if (r->kind() == NodeKind::Folded) return Expr::folded(r->constant_value(), e);
        return *r;
      }
    }
    return with_children(e, a, b);
  }
  Expr a = fold_constants(e.child());
  if (!a.is_constant()) return with_children(e, a);
  if (e.is_neg()) {
    if (a.kind() == NodeKind::IntConst && a.int_value() != std::numeric_limits<std::int64_t>::min()) {
      return Expr::integer(-a.int_value());
    }
    return Expr::folded(-a.constant_value(), e);
  }
  const double v = apply(e.function(), a.constant_value());
  if (!std::isfinite(v)) return with_children(e, a);
  return Expr::folded(v, e);
}

}  // namespace stagediff
