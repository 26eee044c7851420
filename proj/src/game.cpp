#include "dynkin/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynkin {

namespace {

std::string node_name(const EventTree& t, NodeId n) {
  return "node " + std::to_string(t.external_id(n));
}

void require_solved(const DynkinSolution& sol) {
  if (!sol.mokobodski.holds) {
    throw NotSolved("Mokobodski condition fails; J and J' are infinite");
  }
  if (!sol.converged || !sol.y) throw NotSolved("iteration has not converged");
}

}  // namespace

GameSpec::GameSpec(TreePtr tree_in, Family xi_in, Family zeta_in)
    : tree(std::move(tree_in)), xi(std::move(xi_in)), zeta(std::move(zeta_in)) {
  if (!tree || xi.tree_ptr() != tree || zeta.tree_ptr() != tree) {
    throw BadFamily("ξ and ζ must live on the game tree");
  }
  for (NodeId leaf : tree->leaves()) {
    if (std::abs(xi[leaf]) > kFamilyTol || std::abs(zeta[leaf]) > kFamilyTol) {
      throw TerminalMismatch("terminal values at " + node_name(*tree, leaf) +
                             " are not 0; normalize first");
    }
  }
}

bool has_zero_terminal(const Family& xi, const Family& zeta) {
  for (NodeId leaf : xi.tree().leaves()) {
    if (std::abs(xi[leaf]) > kFamilyTol || std::abs(zeta[leaf]) > kFamilyTol) {
      return false;
    }
  }
  return true;
}

NormalizedTerminal normalize_terminal(const Family& xi_raw, const Family& zeta_raw) {
  if (xi_raw.tree_ptr() != zeta_raw.tree_ptr()) {
    throw BadFamily("ξ and ζ on different trees");
  }
  const EventTree& t = xi_raw.tree();
  for (NodeId leaf : t.leaves()) {
    if (std::abs(xi_raw[leaf] - zeta_raw[leaf]) > kFamilyTol) {
      std::ostringstream os;
      os << "ξ(T) = " << xi_raw[leaf] << " but ζ(T) = " << zeta_raw[leaf] << " at "
         << node_name(t, leaf);
      throw TerminalMismatch(os.str());
    }
  }

  // offset(n) = E[ξ(T) | F_n]
  std::vector<double> offset(t.size(), 0.0);
  for (NodeId n = t.size(); n-- > 0;) {
    if (t.is_leaf(n)) {
      offset[n] = xi_raw[n];
      continue;
    }
    double m = 0.0;
    for (NodeId c : t.children(n)) m += t.node(c).cond_prob * offset[c];
    offset[n] = m;
  }

  std::vector<double> xi(t.size()), zeta(t.size());
  for (NodeId n = 0; n < t.size(); ++n) {
    if (t.is_leaf(n)) {
      xi[n] = 0.0;
      zeta[n] = 0.0;
    } else {
      xi[n] = xi_raw[n] - offset[n];
      zeta[n] = zeta_raw[n] - offset[n];
    }
  }
  const TreePtr& tp = xi_raw.tree_ptr();
  return NormalizedTerminal{Family(tp, std::move(xi)), Family(tp, std::move(zeta)),
                            Family(tp, std::move(offset))};
}

double criterion(const GameSpec& game, const StoppingTime& tau,
                 const StoppingTime& sigma, NodeId theta) {
  if (tau.tree_ptr() != game.tree || sigma.tree_ptr() != game.tree) {
    throw RegionMismatch("stopping times on another tree");
  }
  require_starts_at_or_after(tau, theta);
  require_starts_at_or_after(sigma, theta);

  const EventTree& t = *game.tree;
  double sum = 0.0;
  std::vector<NodeId> stack{theta};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (tau.contains(n)) {
      sum += game.xi[n] * t.probability(n);  // τ <= σ, ties pay ξ
    } else if (sigma.contains(n)) {
      sum += game.zeta[n] * t.probability(n);
    } else {
      for (NodeId c : t.children(n)) stack.push_back(c);
    }
  }
  return sum / t.probability(theta);
}

Mokobodski mokobodski_verdict(const GameSpec& game, double tol) {
  Mokobodski verdict;
  for (NodeId n = 0; n < game.tree->size(); ++n) {
    if (game.xi[n] > game.zeta[n] + tol) verdict.fails_at.push_back(n);
  }
  verdict.holds = verdict.fails_at.empty();
  return verdict;
}

DynkinSolution iterate(const GameSpec& game, const IterateOptions& options) {
  const int max_iter =
      options.max_iter > 0 ? options.max_iter : 10 * game.tree->horizon() + 10;

  DynkinSolution sol;
  sol.xi = game.xi;
  sol.zeta = game.zeta;
  sol.mokobodski = mokobodski_verdict(game, options.tol);
  sol.j = Family::constant(game.tree, 0.0);
  sol.jp = Family::constant(game.tree, 0.0);
  if (options.record_history) sol.history.push_back({sol.j, sol.jp});

  for (int k = 1; k <= max_iter; ++k) {
    Family j_next = snell(sol.jp + game.xi);
    Family jp_next = options.sweep == Sweep::alternating ? snell(j_next - game.zeta)
                                                         : snell(sol.j - game.zeta);
    const double change =
        std::max(sup_distance(j_next, sol.j), sup_distance(jp_next, sol.jp));
    sol.j = std::move(j_next);
    sol.jp = std::move(jp_next);
    sol.iterations = k;
    if (options.record_history) sol.history.push_back({sol.j, sol.jp});
    if (change <= options.tol) {
      sol.converged = true;
      break;
    }
  }

  if (!sol.mokobodski.holds) return sol;
  if (!sol.converged) {
    std::ostringstream os;
    os << "no stall within " << max_iter << " iterations although ξ <= ζ holds";
    throw Diverged(os.str(), std::move(sol));
  }

  sol.y = sol.j - sol.jp;
  auto root_saddle = saddle(sol, game.tree->root());
  sol.tau_star = std::move(root_saddle.tau);
  sol.sigma_star = std::move(root_saddle.sigma);
  return sol;
}

double value(const DynkinSolution& sol, NodeId theta) {
  require_solved(sol);
  return sol.y->at(theta);
}

SaddlePoint saddle(const DynkinSolution& sol, NodeId theta) {
  require_solved(sol);
  const Family& j = sol.j;
  const Family& jp = sol.jp;
  const Family& xi = sol.xi;
  const Family& zeta = sol.zeta;
  auto from = StoppingTime::immediate(j.tree_ptr(), theta);
  auto tau = first_hitting(from, [&](NodeId n) {
    return std::abs(j[n] - jp[n] - xi[n]) <= kFamilyTol;
  });
  auto sigma = first_hitting(from, [&](NodeId n) {
    return std::abs(jp[n] - j[n] + zeta[n]) <= kFamilyTol;
  });
  return SaddlePoint{std::move(tau), std::move(sigma)};
}

EpsilonSaddle epsilon_saddle(const DynkinSolution& sol, double lambda, NodeId theta) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "lambda must lie in (0, 1), got " << lambda;
    throw BadLambda(os.str());
  }
  require_solved(sol);
  const Family& j = sol.j;
  const Family& jp = sol.jp;
  const Family& xi = sol.xi;
  const Family& zeta = sol.zeta;
  auto from = StoppingTime::immediate(j.tree_ptr(), theta);

  EpsilonSaddle out;
  out.lambda = lambda;
  out.tau_lambda = first_hitting(from, [&](NodeId n) {
    return lambda * j[n] <= jp[n] + xi[n] + kIdentityTol;
  });
  out.sigma_lambda = first_hitting(from, [&](NodeId n) {
    return lambda * jp[n] <= j[n] - zeta[n] + kIdentityTol;
  });
  out.lower_slack = (1.0 - lambda) * jp[theta];
  out.upper_slack = (1.0 - lambda) * j[theta];
  return out;
}

bool check_mokobodski_witness(const GameSpec& game, const Family& h, const Family& hp,
                              const DynkinSolution* solved) {
  if (h.tree_ptr() != game.tree || hp.tree_ptr() != game.tree) {
    throw BadFamily("witness families on another tree");
  }
  const EventTree& t = *game.tree;
  for (NodeId n = 0; n < t.size(); ++n) {
    if (h[n] < -kFamilyTol || hp[n] < -kFamilyTol) return false;
    if (h[n] < hp[n] + game.xi[n] - kFamilyTol) return false;
    if (hp[n] < h[n] - game.zeta[n] - kFamilyTol) return false;
  }
  if (!is_supermartingale(h) || !is_supermartingale(hp)) return false;

  if (solved != nullptr && solved->solved()) {
    if (!dominated_by(solved->j, h, kFamilyTol) ||
        !dominated_by(solved->jp, hp, kFamilyTol)) {
      throw InvariantViolation("valid witness does not dominate (J, J')");
    }
  }
  return true;
}

std::optional<ShortcutSaddle> supermartingale_shortcut(const GameSpec& game,
                                                       NodeId theta) {
  if (!is_supermartingale(game.xi)) return std::nullopt;
  return ShortcutSaddle{StoppingTime::immediate(game.tree, theta),
                        StoppingTime::terminal(game.tree, theta),
                        game.xi.at(theta)};
}

}  // namespace dynkin
