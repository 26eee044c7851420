#pragma once

// Finite filtered probability space encoded as an event tree. The nodes at
// depth t are the atoms of F_t; the root atom is F_0.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace dynkin {

// Dense node index. Indices follow breadth-first order, so every parent has a
// smaller index than its children and a reverse sweep is a backward induction.
using NodeId = std::size_t;

// Identifier used in model files and reports.
using ExternalId = std::int64_t;

// Absolute tolerance for checks on user-supplied probabilities.
inline constexpr double kInputTol = 1e-9;

struct Node {
  NodeId id = 0;
  int time = 0;
  std::optional<NodeId> parent;
  double cond_prob = 1.0;
  std::vector<NodeId> children;
};

// Raw description as read from a model file, before validation.
struct RawNode {
  ExternalId id = 0;
  int time = 0;
  std::optional<ExternalId> parent;
  double cond_prob = 1.0;
};

struct TreeDescription {
  int horizon = 0;
  std::vector<RawNode> nodes;
};

class EventTree {
 public:
  int horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  NodeId root() const noexcept { return 0; }

  const Node& node(NodeId n) const;
  int time(NodeId n) const { return node(n).time; }
  std::span<const NodeId> children(NodeId n) const { return node(n).children; }
  bool is_leaf(NodeId n) const { return node(n).children.empty(); }

  // P(atom); product of the conditional probabilities from the root.
  double probability(NodeId n) const;

  // Nodes with time == t, in index order.
  std::span<const NodeId> level(int t) const;

  // Leaves in index order (all at time == horizon()).
  std::span<const NodeId> leaves() const { return level(horizon_); }

  // True when `ancestor` lies on the root path of `n` (n itself included).
  bool is_ancestor_or_self(NodeId ancestor, NodeId n) const;

  // Path root -> n, inclusive.
  std::vector<NodeId> path_to(NodeId n) const;

  // Leaves of the subtree rooted at n, in index order.
  std::vector<NodeId> leaves_below(NodeId n) const;

  ExternalId external_id(NodeId n) const;
  NodeId index_of(ExternalId id) const;

 private:
  friend EventTree build_tree(const TreeDescription& desc);

  int horizon_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> probability_;
  std::vector<ExternalId> external_ids_;
  std::unordered_map<ExternalId, NodeId> index_;
  std::vector<std::vector<NodeId>> levels_;
};

using TreePtr = std::shared_ptr<const EventTree>;

// Validates `desc` and renumbers its nodes breadth-first; children keep the
// order in which they appear in `desc`.
// Throws MalformedTree or BadProbabilities.
EventTree build_tree(const TreeDescription& desc);

// Convenience: build_tree() wrapped for sharing between families.
TreePtr make_tree(const TreeDescription& desc);

// Throws UnknownNode if n is not a node of the tree.
double node_probability(const EventTree& tree, NodeId n);

class Family;
class StoppingTime;

// E[X(at) | F] evaluated on the atom `from`:
//   sum over region nodes r below-or-at `from` of X(r) P(r) / P(from).
// Throws RegionMismatch when `at` does not stop on every path through `from`
// at or after `from`.
double conditional_expectation(const Family& x, NodeId from,
                               const StoppingTime& at);

}  // namespace dynkin
