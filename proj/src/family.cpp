#include "dynkin/family.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynkin/error.hpp"

namespace dynkin {

namespace {

void require_same_tree(const Family& a, const Family& b) {
  if (a.tree_ptr() != b.tree_ptr()) throw BadFamily("families on different trees");
}

}  // namespace

Family::Family(TreePtr tree, std::vector<double> values)
    : tree_(std::move(tree)), values_(std::move(values)) {
  if (!tree_) throw BadFamily("null tree");
  if (values_.size() != tree_->size()) {
    throw BadFamily("family has " + std::to_string(values_.size()) +
                    " values for " + std::to_string(tree_->size()) + " nodes");
  }
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (!std::isfinite(values_[n])) {
      throw BadFamily("non-finite value at node " +
                      std::to_string(tree_->external_id(n)));
    }
  }
}

Family Family::constant(TreePtr tree, double c) {
  const std::size_t n = tree->size();
  return Family(std::move(tree), std::vector<double>(n, c));
}

double Family::at(NodeId n) const {
  tree().node(n);
  return values_[n];
}

double Family::one_step_mean(NodeId n) const {
  double mean = 0.0;
  for (NodeId c : tree_->children(n)) mean += tree_->node(c).cond_prob * values_[c];
  return mean;
}

Family Family::operator+(const Family& rhs) const {
  require_same_tree(*this, rhs);
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] + rhs.values_[i];
  return Family(tree_, std::move(out));
}

Family Family::operator-(const Family& rhs) const {
  require_same_tree(*this, rhs);
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] - rhs.values_[i];
  return Family(tree_, std::move(out));
}

Family Family::operator-() const { return *this * -1.0; }

Family Family::operator*(double s) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= s;
  return Family(tree_, std::move(out));
}

double sup_distance(const Family& a, const Family& b) {
  require_same_tree(a, b);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

bool dominated_by(const Family& a, const Family& b, double tol) {
  require_same_tree(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + tol) return false;
  }
  return true;
}

StoppingTime::StoppingTime(TreePtr tree, NodeId origin, std::vector<NodeId> region)
    : tree_(std::move(tree)), origin_(origin), region_(std::move(region)) {
  if (!tree_) throw RegionMismatch("null tree");
  const EventTree& t = *tree_;
  t.node(origin_);
  std::sort(region_.begin(), region_.end());
  region_.erase(std::unique(region_.begin(), region_.end()), region_.end());
  member_.assign(t.size(), 0);
  for (NodeId n : region_) {
    t.node(n);
    member_[n] = 1;
  }

  // Every path origin -> leaf must meet the region exactly once; anything
  // outside the subtree of origin is never visited.
  std::size_t visited_members = 0;
  struct Frame {
    NodeId node;
    bool stopped;
  };
  std::vector<Frame> stack{{origin_, false}};
  while (!stack.empty()) {
    const auto [n, stopped_above] = stack.back();
    stack.pop_back();
    const bool here = member_[n] != 0;
    if (here) {
      if (stopped_above) {
        throw RegionMismatch("region is not an antichain: node " +
                             std::to_string(t.external_id(n)) +
                             " lies below another region node");
      }
      ++visited_members;
    }
    const bool stopped = stopped_above || here;
    if (t.is_leaf(n)) {
      if (!stopped) {
        throw RegionMismatch("path to leaf " + std::to_string(t.external_id(n)) +
                             " never stops");
      }
      continue;
    }
    for (NodeId c : t.children(n)) stack.push_back({c, stopped});
  }
  if (visited_members != region_.size()) {
    throw RegionMismatch("region has nodes outside the subtree of node " +
                         std::to_string(t.external_id(origin_)));
  }
}

StoppingTime::StoppingTime(TreePtr tree, std::vector<NodeId> region)
    : StoppingTime(tree, tree ? tree->root() : 0, std::move(region)) {}

StoppingTime StoppingTime::immediate(TreePtr tree, NodeId origin) {
  return StoppingTime(std::move(tree), origin, {origin});
}

StoppingTime StoppingTime::terminal(TreePtr tree, NodeId origin) {
  auto leaves = tree->leaves_below(origin);
  return StoppingTime(std::move(tree), origin, std::move(leaves));
}

StoppingTime StoppingTime::at_time(TreePtr tree, NodeId origin, int t) {
  std::vector<NodeId> region;
  for (NodeId n : tree->level(t)) {
    if (tree->time(origin) <= t && tree->is_ancestor_or_self(origin, n)) {
      region.push_back(n);
    }
  }
  return StoppingTime(std::move(tree), origin, std::move(region));
}

std::optional<NodeId> StoppingTime::stopped_at_or_before(NodeId n) const {
  const EventTree& t = *tree_;
  const int t0 = t.time(origin_);
  if (t.time(n) < t0) return std::nullopt;
  NodeId cur = n;
  std::optional<NodeId> hit;
  while (true) {
    if (member_[cur]) hit = cur;
    if (t.time(cur) == t0) break;
    cur = *t.node(cur).parent;
  }
  if (cur != origin_) return std::nullopt;
  return hit;
}

NodeId StoppingTime::stop_node_for_leaf(NodeId leaf) const {
  auto hit = stopped_at_or_before(leaf);
  if (!hit) {
    throw RegionMismatch("leaf " + std::to_string(tree_->external_id(leaf)) +
                         " outside the subtree of the stopping time");
  }
  return *hit;
}

bool StoppingTime::operator==(const StoppingTime& other) const {
  return tree_ == other.tree_ && origin_ == other.origin_ && region_ == other.region_;
}

bool precedes(const StoppingTime& s, const StoppingTime& s_prime) {
  if (s.tree_ptr() != s_prime.tree_ptr() || s.origin() != s_prime.origin()) {
    throw RegionMismatch("stopping times compared on different subtrees");
  }
  for (NodeId n : s_prime.region()) {
    if (!s.stopped_at_or_before(n)) return false;
  }
  return true;
}

void require_starts_at_or_after(const StoppingTime& st, NodeId n) {
  const EventTree& t = st.tree();
  t.node(n);
  if (!t.is_ancestor_or_self(st.origin(), n)) {
    throw RegionMismatch("node " + std::to_string(t.external_id(n)) +
                         " is outside the subtree of the stopping time origin " +
                         std::to_string(t.external_id(st.origin())));
  }
  auto hit = st.stopped_at_or_before(n);
  if (hit && *hit != n) {
    throw RegionMismatch("stopping time stops at node " +
                         std::to_string(t.external_id(*hit)) + " before node " +
                         std::to_string(t.external_id(n)));
  }
}

StoppingTime first_hitting(const StoppingTime& from,
                           const std::function<bool(NodeId)>& stop) {
  const EventTree& t = from.tree();
  std::vector<NodeId> region;
  std::vector<NodeId> stack(from.region().begin(), from.region().end());
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (t.is_leaf(n) || stop(n)) {
      region.push_back(n);
      continue;
    }
    for (NodeId c : t.children(n)) stack.push_back(c);
  }
  return StoppingTime(from.tree_ptr(), from.origin(), std::move(region));
}

}  // namespace dynkin
