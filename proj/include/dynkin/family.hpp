#pragma once

// Admissible families and stopping times on an event tree.
//
// A family indexed by stopping times is stored as one value per node: phi(θ)
// on the atom where θ stops at node n is values[n]. Measurability and
// consistency on {θ = θ'} then hold by construction.

#include <functional>
#include <span>
#include <vector>

#include "dynkin/event_tree.hpp"

namespace dynkin {

class Family {
 public:
  Family() = default;

  // Throws BadFamily if the size does not match the tree or a value is not
  // finite.
  Family(TreePtr tree, std::vector<double> values);

  static Family constant(TreePtr tree, double c);

  const EventTree& tree() const { return *tree_; }
  const TreePtr& tree_ptr() const noexcept { return tree_; }

  double operator[](NodeId n) const { return values_[n]; }
  double at(NodeId n) const;
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  // Σ_children cond_prob · f(child) at an internal node.
  double one_step_mean(NodeId n) const;

  Family operator+(const Family& rhs) const;
  Family operator-(const Family& rhs) const;
  Family operator-() const;
  Family operator*(double s) const;

 private:
  TreePtr tree_;
  std::vector<double> values_;
};

// max_n |a(n) - b(n)|. Throws BadFamily when trees differ.
double sup_distance(const Family& a, const Family& b);

// a(n) <= b(n) + tol at every node.
bool dominated_by(const Family& a, const Family& b, double tol);

// Stopping time on the subtree of `origin`: an antichain of nodes that every
// path from `origin` down to a leaf meets exactly once. A stopping time of the
// whole tree has origin == root; the restricted classes T_θ of the atom θ use
// origin == θ.
class StoppingTime {
 public:
  StoppingTime() = default;

  // Throws RegionMismatch when `region` is not an antichain covering the
  // subtree of `origin`, or UnknownNode.
  StoppingTime(TreePtr tree, NodeId origin, std::vector<NodeId> region);

  // Whole-tree stopping time.
  StoppingTime(TreePtr tree, std::vector<NodeId> region);

  // Stops immediately at `origin`.
  static StoppingTime immediate(TreePtr tree, NodeId origin);

  // Stops at the horizon on every path below `origin`.
  static StoppingTime terminal(TreePtr tree, NodeId origin);

  // Constant-date stopping time t >= time(origin).
  static StoppingTime at_time(TreePtr tree, NodeId origin, int t);

  const EventTree& tree() const { return *tree_; }
  const TreePtr& tree_ptr() const noexcept { return tree_; }
  NodeId origin() const noexcept { return origin_; }

  // Sorted by node index.
  std::span<const NodeId> region() const noexcept { return region_; }
  bool contains(NodeId n) const { return member_[n] != 0; }

  // Region node on the path through n: the ancestor-or-self of n in the region,
  // or nothing if the path reaches n before stopping (or n is outside the
  // subtree of origin).
  std::optional<NodeId> stopped_at_or_before(NodeId n) const;

  // Region node met by the path origin -> leaf.
  NodeId stop_node_for_leaf(NodeId leaf) const;

  bool operator==(const StoppingTime& other) const;

 private:
  TreePtr tree_;
  NodeId origin_ = 0;
  std::vector<NodeId> region_;
  std::vector<char> member_;
};

// S <= S' pathwise. Both must share the same origin, else RegionMismatch.
bool precedes(const StoppingTime& s, const StoppingTime& s_prime);

// Throws RegionMismatch unless `st` is an element of T_n restricted to the
// subtree of n: n lies in the subtree of st.origin() and st does not stop
// strictly before n.
void require_starts_at_or_after(const StoppingTime& st, NodeId n);

// Per path from each node of `from`, the first node (at or after `from`) where
// `stop` holds. If a path reaches a leaf without a hit, stops at the leaf.
StoppingTime first_hitting(const StoppingTime& from,
                           const std::function<bool(NodeId)>& stop);

}  // namespace dynkin
