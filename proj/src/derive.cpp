#include "stagediff/derive.hpp"

#include <algorithm>
#include <unordered_map>

#include "stagediff/simplify.hpp"

namespace stagediff {

namespace {

// Applies the differentiation rules once over a tree. With `simplifying` set,
// every constructed node is normalized immediately; its operands are already
// normal, so this is the interleaved S(S(dL)*R + L*S(dR)) scheme without
// re-walking finished subtrees.
class Differentiator {
 public:
  Differentiator(VarId v, bool simplifying) : v_(v), simplifying_(simplifying) {}

  Expr operator()(const Expr& e) {
    if (memo_.empty()) memo_.reserve(std::min<std::uint64_t>(e.node_count(), 4096));
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr d = rule(e);
    memo_.emplace(e.id(), d);
    return d;
  }

 private:
  Expr make(Expr node) const { return simplifying_ ? normalize_node(node) : node; }
  Expr add(Expr a, Expr b) const { return make(Expr::binary(BinaryOp::Add, std::move(a), std::move(b))); }
  Expr sub(Expr a, Expr b) const { return make(Expr::binary(BinaryOp::Sub, std::move(a), std::move(b))); }
  Expr mul(Expr a, Expr b) const { return make(Expr::binary(BinaryOp::Mul, std::move(a), std::move(b))); }
  Expr div(Expr a, Expr b) const { return make(Expr::binary(BinaryOp::Div, std::move(a), std::move(b))); }
  Expr neg(Expr a) const { return make(Expr::neg(std::move(a))); }
  Expr call(Function fn, Expr a) const { return make(Expr::func(fn, std::move(a))); }

  Expr rule(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::IntConst:
      case NodeKind::RealConst:
      case NodeKind::Folded:
        return zero();
      case NodeKind::Var:
        return e.var_id() == v_ ? one() : zero();
      case NodeKind::Neg:
        return neg((*this)(e.child()));
      case NodeKind::Binary:
        return binary_rule(e);
      case NodeKind::Func:
        return function_rule(e);
    }
    return zero();
  }

  Expr binary_rule(const Expr& e) {
    const Expr& l = e.left();
    const Expr& r = e.right();
    Expr dl = (*this)(l);
    Expr dr = (*this)(r);
    switch (e.binary_op()) {
      case BinaryOp::Add:
        return add(dl, dr);
      case BinaryOp::Sub:
        return sub(dl, dr);
      case BinaryOp::Mul:
        return add(mul(dl, r), mul(l, dr));
      case BinaryOp::Div:
        return div(sub(mul(dl, r), mul(l, dr)), mul(r, r));
    }
    return zero();
  }

  Expr function_rule(const Expr& e) {
    const Expr& f = e.child();
    Expr df = (*this)(f);
    switch (e.function()) {
      case Function::Exp:
        return mul(e, df);
      case Function::Log:
        return div(df, f);
      case Function::Sin:
        return mul(call(Function::Cos, f), df);
      case Function::Cos:
        return neg(mul(call(Function::Sin, f), df));
      case Function::Tan:
        return mul(add(one(), mul(e, e)), df);
      case Function::Sqrt:
        return div(df, mul(Expr::integer(2), e));
    }
    return zero();
  }

  VarId v_;
  bool simplifying_;
  std::unordered_map<const void*, Expr> memo_;
};

}  // namespace

Expr differentiate_raw(const Expr& e, VarId v) { return Differentiator(v, false)(e); }

Expr differentiate(const Expr& e, VarId v) { return Differentiator(v, true)(simplify(e)); }

Expr derivative_n(const Expr& e, VarId v, unsigned n, DiffDiagnostics* diagnostics) {
  return derive(e, DiffRequest{v, n, true}, diagnostics);
}

Expr derive(const Expr& e, const DiffRequest& request, DiffDiagnostics* diagnostics) {
  const std::uint64_t overflows_before = integer_overflow_count();
  Expr cur = request.interleave ? simplify(e) : e;
  for (unsigned i = 0; i < request.order; ++i) {
    cur = request.interleave ? Differentiator(request.wrt, true)(cur)
                             : differentiate_raw(cur, request.wrt);
  }
  if (diagnostics) diagnostics->integer_overflows = integer_overflow_count() - overflows_before;
  return cur;
}

std::vector<Expr> gradient(const Expr& e, std::size_t arity) {
  const Expr s = simplify(e);
  std::vector<Expr> out;
  out.reserve(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    out.push_back(Differentiator(VarId{static_cast<std::uint32_t>(i)}, true)(s));
  }
  return out;
}

}  // namespace stagediff
