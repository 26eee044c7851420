#include "dynkin/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace dynkin::oracle {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t count_rec(const EventTree& tree, NodeId n) {
  if (tree.is_leaf(n)) return 1;
  std::uint64_t prod = 1;
  for (NodeId c : tree.children(n)) prod = saturating_mul(prod, count_rec(tree, c));
  return prod == kSaturated ? kSaturated : prod + 1;
}

using Region = std::vector<NodeId>;

std::vector<Region> regions_rec(const EventTree& tree, NodeId n) {
  std::vector<Region> out{{n}};
  if (tree.is_leaf(n)) return out;

  std::vector<Region> partial{{}};
  for (NodeId c : tree.children(n)) {
    const std::vector<Region> child = regions_rec(tree, c);
    std::vector<Region> next;
    next.reserve(partial.size() * child.size());
    for (const Region& head : partial) {
      for (const Region& tail : child) {
        Region r = head;
        r.insert(r.end(), tail.begin(), tail.end());
        next.push_back(std::move(r));
      }
    }
    partial = std::move(next);
  }
  for (Region& r : partial) out.push_back(std::move(r));
  return out;
}

void check_cap(const EventTree& tree, NodeId from, std::uint64_t cap) {
  const std::uint64_t count = count_stopping_times(tree, from);
  if (count > cap) {
    throw TooManyStrategies(
        (count == kSaturated ? std::string("more than 2^64") : std::to_string(count)) +
        " stopping times from node " + std::to_string(tree.external_id(from)) +
        " exceed the cap " + std::to_string(cap));
  }
}

}  // namespace

std::uint64_t count_stopping_times(const EventTree& tree, NodeId from) {
  tree.node(from);
  return count_rec(tree, from);
}

std::vector<StoppingTime> enumerate_stopping_times(const TreePtr& tree, NodeId from,
                                                   std::uint64_t cap) {
  check_cap(*tree, from, cap);
  std::vector<Region> regions = regions_rec(*tree, from);
  std::vector<StoppingTime> out;
  out.reserve(regions.size());
  for (Region& r : regions) out.emplace_back(tree, from, std::move(r));
  return out;
}

CriterionTable::CriterionTable(const GameSpec& game, NodeId theta)
    : game_(&game), theta_(theta), leaves_(game.tree->leaves_below(theta)) {
  const double p_theta = game.tree->probability(theta);
  weights_.reserve(leaves_.size());
  for (NodeId leaf : leaves_) weights_.push_back(game.tree->probability(leaf) / p_theta);
}

CriterionTable::Profile CriterionTable::profile(const StoppingTime& st) const {
  require_starts_at_or_after(st, theta_);
  Profile p;
  p.stop.reserve(leaves_.size());
  for (NodeId leaf : leaves_) p.stop.push_back(st.stop_node_for_leaf(leaf));
  return p;
}

double CriterionTable::evaluate(const Profile& tau, const Profile& sigma) const {
  const EventTree& t = *game_->tree;
  double sum = 0.0;
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    const NodeId a = tau.stop[i];
    const NodeId b = sigma.stop[i];
    sum += weights_[i] * (t.time(a) <= t.time(b) ? game_->xi[a] : game_->zeta[b]);
  }
  return sum;
}

OracleReport brute_force_values(const GameSpec& game, NodeId theta, std::uint64_t cap) {
  const auto strategies = enumerate_stopping_times(game.tree, theta, cap);
  const CriterionTable table(game, theta);
  std::vector<CriterionTable::Profile> profiles;
  profiles.reserve(strategies.size());
  for (const auto& st : strategies) profiles.push_back(table.profile(st));

  const std::size_t m = profiles.size();
  OracleReport report;
  report.strategy_count = m;
  report.pair_table.assign(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      report.pair_table[i][j] = table.evaluate(profiles[i], profiles[j]);
    }
  }

  report.lower = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    report.lower = std::max(report.lower, *std::min_element(report.pair_table[i].begin(),
                                                            report.pair_table[i].end()));
  }
  report.upper = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    double col_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) col_max = std::max(col_max, report.pair_table[i][j]);
    report.upper = std::min(report.upper, col_max);
  }
  return report;
}

Family backward_induction_value(const GameSpec& game) {
  const EventTree& t = *game.tree;
  for (NodeId n = 0; n < t.size(); ++n) {
    if (game.xi[n] > game.zeta[n] + kIdentityTol) {
      throw NotSandwiched("ξ > ζ at node " + std::to_string(t.external_id(n)));
    }
  }
  std::vector<double> y(t.size(), 0.0);
  for (NodeId n = t.size(); n-- > 0;) {
    if (t.is_leaf(n)) continue;
    double cont = 0.0;
    for (NodeId c : t.children(n)) cont += t.node(c).cond_prob * y[c];
    y[n] = std::min(game.zeta[n], std::max(game.xi[n], cont));
  }
  return Family(game.tree, std::move(y));
}

bool verify_saddle(const GameSpec& game, NodeId theta, const StoppingTime& tau_hat,
                   const StoppingTime& sigma_hat, std::uint64_t cap) {
  const auto strategies = enumerate_stopping_times(game.tree, theta, cap);
  const CriterionTable table(game, theta);
  const auto tau_p = table.profile(tau_hat);
  const auto sigma_p = table.profile(sigma_hat);
  const double at_saddle = table.evaluate(tau_p, sigma_p);
  for (const auto& st : strategies) {
    const auto p = table.profile(st);
    if (table.evaluate(p, sigma_p) > at_saddle + kFamilyTol) return false;
    if (at_saddle > table.evaluate(tau_p, p) + kFamilyTol) return false;
  }
  return true;
}

bool verify_epsilon_bounds(const GameSpec& game, NodeId theta, const EpsilonSaddle& eps,
                           double y_theta, std::uint64_t cap) {
  const auto strategies = enumerate_stopping_times(game.tree, theta, cap);
  const CriterionTable table(game, theta);
  const auto tau_p = table.profile(eps.tau_lambda);
  const auto sigma_p = table.profile(eps.sigma_lambda);
  for (const auto& st : strategies) {
    const auto p = table.profile(st);
    if (table.evaluate(p, sigma_p) - eps.lower_slack > y_theta + kFamilyTol) return false;
    if (y_theta > table.evaluate(tau_p, p) + eps.upper_slack + kFamilyTol) return false;
  }
  return true;
}

}  // namespace dynkin::oracle
