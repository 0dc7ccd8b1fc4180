#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stagediff/expr.hpp"

namespace stagediff {

/// One rewrite step of the simplifier. `apply` inspects a node and its
/// immediate children/grandchildren and returns the replacement, or nullopt
/// when the pattern does not match. Replacements never have more nodes than
/// the matched fragment.
struct RewriteRule {
  std::string_view name;
  std::string_view pattern;
  std::optional<Expr> (*apply)(const Expr& node);
};

/// Rules in the order they are tried: constant folding first, then the
/// algebraic identities.
std::span<const RewriteRule> rule_catalog();
const RewriteRule* find_rule(std::string_view name);

struct RewriteEvent {
  std::string rule;
  std::string path;  // "/" is the root, "/1/0" the left child of the right child
};
using RewriteTrace = std::vector<RewriteEvent>;

/// Folds `a op b` for two constant operands. Integer operands fold exactly
/// while representable and otherwise promote to a double Folded node (and bump
/// integer_overflow_count()). Returns nullopt when the result would not be finite.
std::optional<Expr> fold_binary(BinaryOp op, const Expr& a, const Expr& b);

/// Number of integer folds on this thread that overflowed int64 and were
/// promoted to double.
std::uint64_t integer_overflow_count() noexcept;

/// Rewrites the root of `e` until no rule applies, assuming both operands are
/// already in normal form.
Expr normalize_node(const Expr& e, RewriteTrace* trace = nullptr, std::string_view path = "/");

/// One bottom-up pass: operands first, then the root is normalized.
Expr simplify_once(const Expr& e, RewriteTrace* trace = nullptr);

struct SimplifyReport {
  std::size_t passes = 0;
  std::size_t pass_cap = 0;
};

/// Applies simplify_once until a pass changes nothing.
Expr simplify(const Expr& e, SimplifyReport* report = nullptr, RewriteTrace* trace = nullptr);

/// True when no catalog rule matches anywhere in the tree.
bool is_normal_form(const Expr& e);

/// Replaces every maximal variable-free subtree by a single constant: an exact
/// IntConst when the arithmetic is integral, otherwise Folded(value, subtree).
/// Subtrees whose value is not finite are left alone.
Expr fold_constants(const Expr& e);

}  // namespace stagediff
