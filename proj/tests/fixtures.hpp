#pragma once

// Shared fixtures and test-only brute-force helpers.

#include <algorithm>
#include <limits>
#include <vector>

#include "dynkin/game.hpp"
#include "dynkin/generator.hpp"
#include "dynkin/oracle.hpp"

namespace fixtures {

using namespace dynkin;

// t0 -> t1 -> t2, every branch with probability 1. Node ids 0, 1, 2.
inline TreePtr chain3() {
  TreeDescription d;
  d.horizon = 2;
  d.nodes = {{0, 0, std::nullopt, 1.0}, {1, 1, 0, 1.0}, {2, 2, 1, 1.0}};
  return make_tree(d);
}

// Symmetric binomial tree, T = 2. Ids: root 0, u 1, d 2, uu 3, ud 4, du 5, dd 6.
inline TreePtr binomial2() {
  TreeDescription d;
  d.horizon = 2;
  d.nodes = {{0, 0, std::nullopt, 1.0}, {1, 1, 0, 0.5}, {2, 1, 0, 0.5},
             {3, 2, 1, 0.5},            {4, 2, 1, 0.5}, {5, 2, 2, 0.5},
             {6, 2, 2, 0.5}};
  return make_tree(d);
}

inline Family fam(const TreePtr& t, std::vector<double> v) { return Family(t, std::move(v)); }

// Chain fixture: ξ = (0, 1, 0), ζ = (2, 2, 0).
inline GameSpec chain_game() {
  auto t = chain3();
  return GameSpec(t, fam(t, {0, 1, 0}), fam(t, {2, 2, 0}));
}

// Binomial fixture: ξ(root, u, d) = (0, 1, 0), ζ = (3, 2, 1), leaves 0.
inline GameSpec binomial_game() {
  auto t = binomial2();
  return GameSpec(t, fam(t, {0, 1, 0, 0, 0, 0, 0}), fam(t, {3, 2, 1, 0, 0, 0, 0}));
}

inline StoppingTime st(const TreePtr& t, std::vector<NodeId> region) {
  return StoppingTime(t, std::move(region));
}

// Random instance with horizon 1..4 and branching 1..3, as used by the
// acceptance corpus.
inline GameModel corpus_model(std::uint64_t seed, std::uint64_t max_strategies = 2000) {
  GenShape shape;
  shape.horizon = 1 + static_cast<int>(seed % 4);
  shape.min_branching = 1;
  shape.max_branching = 3;
  shape.max_strategies = max_strategies;
  return generate(seed, shape);
}

inline GameSpec as_game(const GameModel& m) { return GameSpec(m.tree, m.xi, m.zeta); }

// esssup over the enumerated stopping times θ >= n of E[φ(θ) | F_n].
inline double brute_force_esssup(const Family& phi, NodeId n) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& theta : oracle::enumerate_stopping_times(phi.tree_ptr(), n)) {
    best = std::max(best, conditional_expectation(phi, n, theta));
  }
  return best;
}

// Shift to a nonnegative reward with a martingale: X(n) = E[max of φ^- over
// the whole root-to-leaf path | F_n], φ̄ = φ + X. Then snell(φ̄) = snell(φ) + X.
inline Family nonnegative_shift(const Family& phi) {
  const EventTree& t = phi.tree();
  std::vector<double> x(t.size(), 0.0);
  for (NodeId leaf : t.leaves()) {
    double worst = 0.0;
    for (NodeId m : t.path_to(leaf)) worst = std::max(worst, -phi[m]);
    for (NodeId m : t.path_to(leaf)) x[m] += t.probability(leaf) / t.probability(m) * worst;
  }
  return Family(phi.tree_ptr(), x);
}

}  // namespace fixtures
