#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "gpae/common.hpp"

namespace gpae {

// Primitive set: arithmetic ops are binary, trig ops unary. Division is
// protected: a divisor of exactly zero yields kDivByZeroResult.
enum class NodeKind : std::uint8_t {
  kConstant,
  kFeature,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kSin,
  kCos,
};

inline constexpr double kDivByZeroResult = 1.0e6;
// Non-finite intermediates (overflow to +/-inf) clamp to this magnitude,
// keeping evaluation total over finite inputs.
inline constexpr double kNonFiniteClamp = 1.0e6;

constexpr int arity(NodeKind k) {
  switch (k) {
    case NodeKind::kConstant:
    case NodeKind::kFeature:
      return 0;
    case NodeKind::kSin:
    case NodeKind::kCos:
      return 1;
    default:
      return 2;
  }
}

struct TreeNode {
  NodeKind kind = NodeKind::kConstant;
  std::int32_t feature = 0;  // local index into the visible-feature list
  double value = 0.0;        // constant payload

  static TreeNode constant(double v) { return {NodeKind::kConstant, 0, v}; }
  static TreeNode feature_ref(std::int32_t i) {
    return {NodeKind::kFeature, i, 0.0};
  }
  static TreeNode op(NodeKind k) { return {k, 0, 0.0}; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Visible-feature lists are shared between trees (all trees of one forest
// slot family read through the same list), so they are refcounted.
using Scope = std::shared_ptr<const std::vector<int>>;

Scope make_scope(std::vector<int> features);
Scope identity_scope(int n);

// Expression tree stored as a postorder node array. Immutable after
// construction; evaluation is read-only and thread-safe.
class ExprTree {
 public:
  ExprTree() = default;

  // Validates shape (each operator consumes exactly its arity) and that
  // every feature reference resolves inside `visible`. max_depth < 0 means
  // "whatever the nodes give"; otherwise the actual depth must not exceed it.
  ExprTree(std::vector<TreeNode> postorder, Scope visible, int max_depth = -1);

  // input[i] is the value of visible()[i]. Always returns a finite value.
  double eval(std::span<const double> input) const;

  int depth() const { return depth_; }
  int max_depth() const { return max_depth_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const Scope& visible() const { return visible_; }
  int n_visible() const { return static_cast<int>(visible_->size()); }

  ExprTree with_scope(Scope visible) const;  // same structure, rebound scope

  friend bool operator==(const ExprTree& a, const ExprTree& b) {
    return a.nodes_ == b.nodes_ && *a.visible_ == *b.visible_;
  }

 private:
  std::vector<TreeNode> nodes_;
  Scope visible_;
  int depth_ = 0;
  int max_depth_ = 0;
  int stack_need_ = 0;
};

double eval_tree(const ExprTree& tree, std::span<const double> input);
int tree_depth(const ExprTree& tree);

// Ramped half-and-half over target depths 1..max_depth (max_depth 0 forces
// a lone terminal). Terminals split evenly between feature refs and
// constants drawn uniformly from [0,1].
ExprTree random_tree(Scope visible, int max_depth, std::mt19937_64& rng);

}  // namespace gpae
