#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "stagediff/corpus.hpp"
#include "stagediff/expr.hpp"

using namespace stagediff;

namespace {

Expr x(std::uint32_t i) { return Expr::var(i); }
Expr c(std::int64_t v) { return Expr::integer(v); }

}  // namespace

TEST(Eval, ExpAtZero) { EXPECT_EQ(eval_tree(exp(x(0)), Point{0.0}), 1.0); }

TEST(Eval, FigureOneTree) {
  const double expected = 2.0 * 3.14 + std::exp(1.0 * 2.5);
  EXPECT_DOUBLE_EQ(eval_tree(fig1_expr(), Point{1.0, 2.5, 3.14}), expected);
  EXPECT_NEAR(eval_tree(fig1_expr(), Point{1.0, 2.5, 3.14}), 18.46249396, 1e-8);
}

TEST(Eval, ZeroIgnoresPoint) {
  EXPECT_EQ(eval_tree(zero(), Point{}), 0.0);
  EXPECT_EQ(eval_tree(zero(), Point{5.0, -3.0}), 0.0);
}

TEST(Eval, DomainErrorsPropagateAsIeee) {
  EXPECT_TRUE(std::isnan(eval_tree(log(x(0)), Point{-1.0})));
  EXPECT_TRUE(std::isinf(eval_tree(c(1) / x(0), Point{0.0})));
  EXPECT_TRUE(std::isnan(eval_tree(sqrt(x(0)), Point{-4.0})));
}

TEST(Eval, ArityViolationThrows) {
  EXPECT_THROW(eval_tree(x(2), Point{1.0, 2.0}), EvalError);
  EXPECT_NO_THROW(eval_tree(x(2), Point{1.0, 2.0, 3.0}));
}

TEST(Eval, FoldedUsesCachedValue) {
  // Provenance would evaluate to 6; the cached value must win.
  const Expr f = Expr::folded(7.5, c(2) * c(3));
  EXPECT_EQ(eval_tree(f, Point{}), 7.5);
}

TEST(Eval, Deterministic) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Expr e = random_tree(rng);
    const Point p = random_point(rng, 4);
    const double a = eval_tree(e, p);
    const double b = eval_tree(e, p);
    EXPECT_TRUE(std::memcmp(&a, &b, sizeof a) == 0);
  }
}

TEST(NodeCount, Examples) {
  EXPECT_EQ(node_count(c(2) * exp(x(2))), 4u);
  EXPECT_EQ(node_count(x(0)), 1u);
  EXPECT_EQ(node_count(fig1_expr()), 8u);
  EXPECT_EQ(node_count(Expr::folded(81, c(3) * c(27))), 1u);
}

TEST(NodeCount, StrictlyMonotoneUnderEmbedding) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Expr e = random_tree(rng);
    EXPECT_GE(node_count(e), 1u);
    EXPECT_GT(node_count(-e), node_count(e));
    EXPECT_GT(node_count(e + x(0)), node_count(e));
    EXPECT_GT(node_count(sin(e)), node_count(e));
  }
}

TEST(Expr, StructuralEquality) {
  EXPECT_EQ(x(0) + c(1), x(0) + c(1));
  EXPECT_NE(x(0) + c(1), c(1) + x(0));
  EXPECT_NE(c(1), Expr::real(1.0));
  EXPECT_NE(x(0), x(1));
  EXPECT_EQ((x(0) * x(1)).hash(), (x(0) * x(1)).hash());
}

TEST(Expr, RequiredArity) {
  EXPECT_EQ(c(3).required_arity(), 0u);
  EXPECT_EQ(x(0).required_arity(), 1u);
  EXPECT_EQ(mv_f().required_arity(), 4u);
}

TEST(Expr, FoldedRejectsVariableProvenance) {
  EXPECT_THROW(Expr::folded(1.0, x(0)), std::invalid_argument);
}

TEST(Expr, AccessorsCheckKind) {
  EXPECT_THROW(x(0).int_value(), std::logic_error);
  EXPECT_THROW(c(1).left(), std::logic_error);
  EXPECT_EQ((x(0) - x(1)).binary_op(), BinaryOp::Sub);
  EXPECT_EQ(tan(x(0)).function(), Function::Tan);
}

TEST(Expr, ZeroAndOneAreNumeric) {
  EXPECT_TRUE(is_zero(c(0)));
  EXPECT_TRUE(is_zero(Expr::real(0.0)));
  EXPECT_TRUE(is_one(Expr::folded(1.0, c(3) - c(2))));
  EXPECT_FALSE(is_one(x(0)));
}

TEST(Expr, OperationCountSkipsLeaves) {
  EXPECT_EQ(operation_count(c(2) * exp(x(2))), 2u);
  EXPECT_EQ(operation_count(x(0)), 0u);
  EXPECT_EQ(operation_count(Expr::folded(4, c(2) * c(2))), 0u);
}
