#include "dynkin/event_tree.hpp"

#include <cmath>
#include <deque>
#include <sstream>
#include <string>

#include "dynkin/error.hpp"
#include "dynkin/family.hpp"

namespace dynkin {

namespace {

std::string describe(ExternalId id) { return "node " + std::to_string(id); }

}  // namespace

const Node& EventTree::node(NodeId n) const {
  if (n >= nodes_.size()) {
    throw UnknownNode("index " + std::to_string(n) + " outside tree of " +
                      std::to_string(nodes_.size()) + " nodes");
  }
  return nodes_[n];
}

double EventTree::probability(NodeId n) const {
  node(n);
  return probability_[n];
}

std::span<const NodeId> EventTree::level(int t) const {
  if (t < 0 || t > horizon_) {
    throw UnknownNode("time " + std::to_string(t) + " outside [0, " +
                      std::to_string(horizon_) + "]");
  }
  return levels_[static_cast<std::size_t>(t)];
}

bool EventTree::is_ancestor_or_self(NodeId ancestor, NodeId n) const {
  const int ta = time(ancestor);
  NodeId cur = n;
  while (time(cur) > ta) cur = *nodes_[cur].parent;
  return cur == ancestor;
}

std::vector<NodeId> EventTree::path_to(NodeId n) const {
  std::vector<NodeId> path(static_cast<std::size_t>(time(n)) + 1);
  NodeId cur = n;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    *it = cur;
    if (nodes_[cur].parent) cur = *nodes_[cur].parent;
  }
  return path;
}

std::vector<NodeId> EventTree::leaves_below(NodeId n) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{n};
  node(n);
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    const auto& kids = nodes_[cur].children;
    if (kids.empty()) {
      out.push_back(cur);
      continue;
    }
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

ExternalId EventTree::external_id(NodeId n) const {
  node(n);
  return external_ids_[n];
}

NodeId EventTree::index_of(ExternalId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownNode(describe(id) + " not in tree");
  return it->second;
}

EventTree build_tree(const TreeDescription& desc) {
  if (desc.horizon < 1) {
    throw MalformedTree("horizon must be >= 1, got " +
                        std::to_string(desc.horizon));
  }
  if (desc.nodes.empty()) throw MalformedTree("no nodes");

  std::unordered_map<ExternalId, std::size_t> pos;
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < desc.nodes.size(); ++i) {
    const RawNode& raw = desc.nodes[i];
    if (!pos.emplace(raw.id, i).second) {
      throw MalformedTree("duplicate " + describe(raw.id));
    }
    if (!raw.parent) {
      if (root) {
        throw MalformedTree("two roots: " + describe(desc.nodes[*root].id) +
                            " and " + describe(raw.id));
      }
      root = i;
    }
  }
  if (!root) throw MalformedTree("missing root (no node without parent)");

  // Children lists in input order.
  std::vector<std::vector<std::size_t>> kids(desc.nodes.size());
  for (std::size_t i = 0; i < desc.nodes.size(); ++i) {
    const RawNode& raw = desc.nodes[i];
    if (!raw.parent) continue;
    auto it = pos.find(*raw.parent);
    if (it == pos.end()) {
      throw MalformedTree(describe(raw.id) + " has unknown parent " +
                          std::to_string(*raw.parent));
    }
    if (it->second == i) throw MalformedTree(describe(raw.id) + " is its own parent");
    kids[it->second].push_back(i);
  }

  EventTree tree;
  tree.horizon_ = desc.horizon;
  tree.levels_.resize(static_cast<std::size_t>(desc.horizon) + 1);

  const RawNode& raw_root = desc.nodes[*root];
  if (raw_root.time != 0) {
    throw MalformedTree("root " + describe(raw_root.id) + " has time " +
                        std::to_string(raw_root.time));
  }
  if (std::abs(raw_root.cond_prob - 1.0) > kInputTol) {
    throw BadProbabilities("root " + describe(raw_root.id) +
                           " must have cond_prob 1");
  }

  // Breadth-first renumbering; nodes never reached sit on a cycle.
  std::vector<std::optional<NodeId>> dense(desc.nodes.size());
  std::deque<std::size_t> queue{*root};
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const RawNode& raw = desc.nodes[i];

    Node node;
    node.id = tree.nodes_.size();
    node.time = raw.time;
    node.cond_prob = raw.parent ? raw.cond_prob : 1.0;
    if (raw.parent) node.parent = *dense[pos.at(*raw.parent)];
    dense[i] = node.id;

    if (raw.time > desc.horizon) {
      throw MalformedTree(describe(raw.id) + " has time " +
                          std::to_string(raw.time) + " beyond horizon " +
                          std::to_string(desc.horizon));
    }
    if (raw.parent) {
      const int parent_time = tree.nodes_[*node.parent].time;
      if (raw.time != parent_time + 1) {
        throw MalformedTree(describe(raw.id) + " has time " +
                            std::to_string(raw.time) + ", parent has time " +
                            std::to_string(parent_time));
      }
      if (!(raw.cond_prob > 0.0) || raw.cond_prob > 1.0 + kInputTol) {
        std::ostringstream os;
        os << describe(raw.id) << " has cond_prob " << raw.cond_prob
           << " outside (0, 1]";
        throw BadProbabilities(os.str());
      }
    }
    if (kids[i].empty() && raw.time != desc.horizon) {
      throw MalformedTree("leaf " + describe(raw.id) + " at time " +
                          std::to_string(raw.time) + " above horizon " +
                          std::to_string(desc.horizon));
    }
    if (!kids[i].empty()) {
      double total = 0.0;
      for (std::size_t k : kids[i]) total += desc.nodes[k].cond_prob;
      if (std::abs(total - 1.0) > kInputTol) {
        std::ostringstream os;
        os.precision(17);
        os << "children of " << describe(raw.id) << " have cond_prob sum "
           << total;
        throw BadProbabilities(os.str());
      }
    }

    tree.external_ids_.push_back(raw.id);
    tree.index_.emplace(raw.id, node.id);
    tree.levels_[static_cast<std::size_t>(raw.time)].push_back(node.id);
    tree.probability_.push_back(
        raw.parent ? tree.probability_[*node.parent] * node.cond_prob : 1.0);
    if (node.parent) tree.nodes_[*node.parent].children.push_back(node.id);
    tree.nodes_.push_back(std::move(node));
    for (std::size_t k : kids[i]) queue.push_back(k);
  }

  if (tree.nodes_.size() != desc.nodes.size()) {
    for (std::size_t i = 0; i < desc.nodes.size(); ++i) {
      if (!dense[i]) {
        throw MalformedTree(describe(desc.nodes[i].id) +
                            " is not reachable from the root (cycle)");
      }
    }
  }
  return tree;
}

TreePtr make_tree(const TreeDescription& desc) {
  return std::make_shared<const EventTree>(build_tree(desc));
}

double node_probability(const EventTree& tree, NodeId n) {
  return tree.probability(n);
}

double conditional_expectation(const Family& x, NodeId from,
                               const StoppingTime& at) {
  const EventTree& tree = x.tree();
  if (&tree != &at.tree()) throw RegionMismatch("family and stopping time on different trees");
  require_starts_at_or_after(at, from);

  const double p_from = tree.probability(from);
  double sum = 0.0;
  std::vector<NodeId> stack{from};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (at.contains(n)) {
      sum += x[n] * tree.probability(n);
      continue;
    }
    for (NodeId c : tree.children(n)) stack.push_back(c);
  }
  return sum / p_from;
}

}  // namespace dynkin
