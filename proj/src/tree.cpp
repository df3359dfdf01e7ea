#include "gpae/tree.hpp"

#include <cmath>
#include <numeric>
#include <utility>

namespace gpae {

namespace {

constexpr int kFixedEvalStack = 64;

inline double finite_or_clamp(double v) {
  if (std::isfinite(v)) [[likely]]
    return v;
  return std::isnan(v) ? kNonFiniteClamp : std::copysign(kNonFiniteClamp, v);
}

}  // namespace

Scope make_scope(std::vector<int> features) {
  return std::make_shared<const std::vector<int>>(std::move(features));
}

Scope identity_scope(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return make_scope(std::move(v));
}

ExprTree::ExprTree(std::vector<TreeNode> postorder, Scope visible,
                   int max_depth)
    : nodes_(std::move(postorder)), visible_(std::move(visible)) {
  if (!visible_) throw std::invalid_argument("ExprTree: null scope");
  if (nodes_.empty()) throw std::invalid_argument("ExprTree: empty node list");

  // One simulation pass checks arity consistency and computes both the
  // root height and the evaluation stack requirement.
  std::vector<int> heights;
  heights.reserve(nodes_.size());
  std::size_t max_stack = 0;
  for (const TreeNode& n : nodes_) {
    const int a = arity(n.kind);
    if (static_cast<int>(heights.size()) < a)
      throw std::invalid_argument("ExprTree: operator missing operands");
    if (n.kind == NodeKind::kFeature &&
        (n.feature < 0 ||
         n.feature >= static_cast<std::int32_t>(visible_->size())))
      throw std::invalid_argument("ExprTree: feature index out of scope");
    if (n.kind == NodeKind::kConstant && !std::isfinite(n.value))
      throw std::invalid_argument("ExprTree: non-finite constant");
    int h = 0;
    for (int i = 0; i < a; ++i) {
      h = std::max(h, heights.back() + 1);
      heights.pop_back();
    }
    heights.push_back(h);
    max_stack = std::max(max_stack, heights.size());
  }
  if (heights.size() != 1)
    throw std::invalid_argument("ExprTree: nodes do not form a single tree");
  depth_ = heights.front();
  stack_need_ = static_cast<int>(max_stack);
  max_depth_ = max_depth < 0 ? depth_ : max_depth;
  if (depth_ > max_depth_)
    throw std::invalid_argument("ExprTree: depth exceeds bound");
}

ExprTree ExprTree::with_scope(Scope visible) const {
  return ExprTree(nodes_, std::move(visible), max_depth_);
}

double ExprTree::eval(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != n_visible())
    throw std::invalid_argument("eval: input length != visible features");

  double fixed[kFixedEvalStack];
  std::vector<double> heap;
  double* base = fixed;
  if (stack_need_ > kFixedEvalStack) {
    heap.resize(static_cast<std::size_t>(stack_need_));
    base = heap.data();
  }

  double* sp = base;
  for (const TreeNode& n : nodes_) {
    switch (n.kind) {
      case NodeKind::kConstant:
        *sp++ = n.value;
        break;
      case NodeKind::kFeature:
        *sp++ = input[static_cast<std::size_t>(n.feature)];
        break;
      case NodeKind::kSin:
        sp[-1] = std::sin(sp[-1]);
        break;
      case NodeKind::kCos:
        sp[-1] = std::cos(sp[-1]);
        break;
      case NodeKind::kAdd:
        sp[-2] = finite_or_clamp(sp[-2] + sp[-1]);
        --sp;
        break;
      case NodeKind::kSub:
        sp[-2] = finite_or_clamp(sp[-2] - sp[-1]);
        --sp;
        break;
      case NodeKind::kMul:
        sp[-2] = finite_or_clamp(sp[-2] * sp[-1]);
        --sp;
        break;
      case NodeKind::kDiv: {
        const double b = *--sp;
        sp[-1] = b == 0.0 ? kDivByZeroResult : finite_or_clamp(sp[-1] / b);
        break;
      }
    }
  }
  return base[0];
}

double eval_tree(const ExprTree& tree, std::span<const double> input) {
  return tree.eval(input);
}

int tree_depth(const ExprTree& tree) { return tree.depth(); }

namespace {

constexpr NodeKind kOps[] = {NodeKind::kAdd, NodeKind::kSub, NodeKind::kMul,
                             NodeKind::kDiv, NodeKind::kSin, NodeKind::kCos};

void emit_terminal(std::vector<TreeNode>& out, int n_visible,
                   std::mt19937_64& rng) {
  if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
    out.push_back(TreeNode::feature_ref(
        std::uniform_int_distribution<std::int32_t>(0, n_visible - 1)(rng)));
  } else {
    out.push_back(TreeNode::constant(
        std::uniform_real_distribution<double>(0.0, 1.0)(rng)));
  }
}

// Postorder emission: operator kind is drawn first, then children recurse.
void emit_subtree(std::vector<TreeNode>& out, int n_visible, int remaining,
                  bool full, std::mt19937_64& rng) {
  const bool terminal =
      remaining == 0 ||
      (!full && std::uniform_int_distribution<int>(0, 1)(rng) == 0);
  if (terminal) {
    emit_terminal(out, n_visible, rng);
    return;
  }
  const NodeKind op = kOps[std::uniform_int_distribution<int>(0, 5)(rng)];
  for (int i = 0; i < arity(op); ++i)
    emit_subtree(out, n_visible, remaining - 1, full, rng);
  out.push_back(TreeNode::op(op));
}

}  // namespace

ExprTree random_tree(Scope visible, int max_depth, std::mt19937_64& rng) {
  if (!visible || visible->empty())
    throw std::invalid_argument("random_tree: empty scope");
  if (max_depth < 0) throw std::invalid_argument("random_tree: negative depth");

  const int n_visible = static_cast<int>(visible->size());
  std::vector<TreeNode> nodes;
  if (max_depth == 0) {
    emit_terminal(nodes, n_visible, rng);
  } else {
    const int target =
        std::uniform_int_distribution<int>(1, max_depth)(rng);
    const bool full = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
    emit_subtree(nodes, n_visible, target, full, rng);
  }
  return ExprTree(std::move(nodes), std::move(visible), max_depth);
}

}  // namespace gpae
