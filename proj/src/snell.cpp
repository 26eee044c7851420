#include "dynkin/snell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynkin/error.hpp"

namespace dynkin {

namespace {

void require_same_tree(const Family& a, const Family& b) {
  if (a.tree_ptr() != b.tree_ptr()) throw BadFamily("families on different trees");
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "lambda must lie in (0, 1), got " << lambda;
    throw BadLambda(os.str());
  }
}

}  // namespace

bool is_supermartingale(const Family& f) {
  const EventTree& t = f.tree();
  for (NodeId n = 0; n < t.size(); ++n) {
    if (t.is_leaf(n)) continue;
    if (f.one_step_mean(n) > f[n] + kIdentityTol) return false;
  }
  return true;
}

bool is_martingale_on(const Family& f, const StoppingTime& from,
                      const StoppingTime& to) {
  if (f.tree_ptr() != from.tree_ptr()) {
    throw RegionMismatch("family and stopping times on different trees");
  }
  if (!precedes(from, to)) throw RegionMismatch("S <= S' fails on some path");
  const EventTree& t = f.tree();
  std::vector<NodeId> stack(from.region().begin(), from.region().end());
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (to.contains(n)) continue;
    if (std::abs(f[n] - f.one_step_mean(n)) > kFamilyTol) return false;
    for (NodeId c : t.children(n)) stack.push_back(c);
  }
  return true;
}

SnellResult snell_envelope(const Family& reward) {
  const EventTree& t = reward.tree();
  std::vector<double> v(reward.values().begin(), reward.values().end());
  // Breadth-first numbering: children always carry larger indices.
  for (NodeId n = t.size(); n-- > 0;) {
    if (t.is_leaf(n)) continue;
    double cont = 0.0;
    for (NodeId c : t.children(n)) cont += t.node(c).cond_prob * v[c];
    v[n] = std::max(reward[n], cont);
  }
  return SnellResult{Family(reward.tree_ptr(), std::move(v)), reward};
}

Family snell(const Family& reward) { return snell_envelope(reward).envelope; }

StoppingTime lambda_hitting(const Family& v, const Family& reward, double lambda,
                            const StoppingTime& from) {
  require_lambda(lambda);
  require_same_tree(v, reward);
  return first_hitting(from, [&](NodeId n) {
    return lambda * v[n] <= reward[n] + kIdentityTol;
  });
}

StoppingTime minimal_optimal(const Family& v, const Family& reward,
                             const StoppingTime& from) {
  require_same_tree(v, reward);
  return first_hitting(from, [&](NodeId n) {
    return std::abs(v[n] - reward[n]) <= kFamilyTol;
  });
}

bool check_optimality_criterion(const Family& v, const Family& reward,
                                const StoppingTime& from,
                                const StoppingTime& theta) {
  require_same_tree(v, reward);
  if (!precedes(from, theta)) throw RegionMismatch("S <= θ fails on some path");
  for (NodeId n : theta.region()) {
    if (std::abs(v[n] - reward[n]) > kFamilyTol) return false;
  }
  return is_martingale_on(v, from, theta);
}

}  // namespace dynkin
