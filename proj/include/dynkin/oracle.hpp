#pragma once

// Brute-force ground truth for small trees: every stopping time of T_θ is
// enumerated and the game values are read off the full criterion table.

#include <cstdint>
#include <vector>

#include "dynkin/game.hpp"

namespace dynkin::oracle {

inline constexpr std::uint64_t kDefaultCap = 100000;

// |T_n|: count(leaf) = 1, count(n) = 1 + Π_children count(child).
// Saturates at UINT64_MAX.
std::uint64_t count_stopping_times(const EventTree& tree, NodeId from);

// All stopping times of the subtree of `from`, in a fixed order: "stop at n"
// first, then the cross product of the children's choices with the last child
// varying fastest. Throws TooManyStrategies when the count exceeds `cap`
// (checked before any enumeration).
std::vector<StoppingTime> enumerate_stopping_times(const TreePtr& tree,
                                                   NodeId from,
                                                   std::uint64_t cap = kDefaultCap);

struct OracleReport {
  double lower = 0.0;  // sup_τ inf_σ I_θ(τ, σ)
  double upper = 0.0;  // inf_σ sup_τ I_θ(τ, σ)
  // pair_table[i][j] = I_θ(τ_i, σ_j) over the enumeration order.
  std::vector<std::vector<double>> pair_table;
  std::uint64_t strategy_count = 0;
};

// Evaluates the criterion for all pairs of pure stopping times of T_θ.
OracleReport brute_force_values(const GameSpec& game, NodeId theta,
                                std::uint64_t cap = kDefaultCap);

// Y(leaf) = 0, Y(n) = min(ζ(n), max(ξ(n), E[Y(child)])). Ties pay ξ.
// Throws NotSandwiched if ξ > ζ at some node.
Family backward_induction_value(const GameSpec& game);

// I_θ(τ, σ̂) <= I_θ(τ̂, σ̂) <= I_θ(τ̂, σ) for every enumerated τ, σ (tol 1e-9).
bool verify_saddle(const GameSpec& game, NodeId theta, const StoppingTime& tau_hat,
                   const StoppingTime& sigma_hat,
                   std::uint64_t cap = kDefaultCap);

// Checks I_θ(τ, σ^λ) - lower_slack <= Y(θ) <= I_θ(τ^λ, σ) + upper_slack for
// every enumerated τ, σ (tol 1e-9).
bool verify_epsilon_bounds(const GameSpec& game, NodeId theta,
                           const EpsilonSaddle& eps, double y_theta,
                           std::uint64_t cap = kDefaultCap);

// Precomputed criterion evaluator for many pairs over one θ. Each stopping time
// is reduced to its stop node per leaf of the subtree.
class CriterionTable {
 public:
  CriterionTable(const GameSpec& game, NodeId theta);

  struct Profile {
    std::vector<NodeId> stop;  // per leaf of the subtree
  };

  Profile profile(const StoppingTime& st) const;
  double evaluate(const Profile& tau, const Profile& sigma) const;

 private:
  const GameSpec* game_;
  NodeId theta_;
  std::vector<NodeId> leaves_;
  std::vector<double> weights_;  // P(leaf) / P(θ)
};

}  // namespace dynkin::oracle
