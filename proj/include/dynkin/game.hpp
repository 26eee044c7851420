#pragma once

// Zero-sum Dynkin game on an event tree.
//
// The first player stops at τ and receives ξ(τ) on {τ <= σ}; the second player
// stops at σ and pays ζ(σ) on {σ < τ}. The solver builds the minimal pair of
// nonnegative supermartingale families
//
//   J  = R(J' + ξ),   J' = R(J - ζ)
//
// as the increasing limit of J_0 = J'_0 = 0 under repeated Snell envelopes.
// J is finite iff ξ <= ζ at every node; then Y = J - J' is the common value.

#include <optional>
#include <vector>

#include "dynkin/error.hpp"
#include "dynkin/snell.hpp"

namespace dynkin {

struct GameSpec {
  TreePtr tree;
  Family xi;    // payoff when the first player stops first (ties included)
  Family zeta;  // payoff when the second player stops strictly first

  // Throws BadFamily if the families live on another tree, TerminalMismatch
  // unless ξ = ζ = 0 at every leaf (within 1e-9).
  GameSpec(TreePtr tree, Family xi, Family zeta);
};

struct NormalizedTerminal {
  Family xi;
  Family zeta;
  Family offset;  // E[ξ(T) | F_n]; raw criterion = normalized criterion + offset
};

// ξ' = ξ - E[ξ(T)|F], ζ' = ζ - E[ξ(T)|F]; leaves are set to exactly 0.
// Throws TerminalMismatch unless ξ(leaf) = ζ(leaf) within 1e-9.
NormalizedTerminal normalize_terminal(const Family& xi_raw,
                                      const Family& zeta_raw);

// True when every leaf of ξ and ζ is already 0 (within 1e-9).
bool has_zero_terminal(const Family& xi, const Family& zeta);

// I_θ(τ, σ) = E[ξ(τ)1{τ<=σ} + ζ(σ)1{σ<τ} | F_θ]. Throws RegionMismatch unless
// τ, σ ∈ T_θ on the subtree of θ.
double criterion(const GameSpec& game, const StoppingTime& tau,
                 const StoppingTime& sigma, NodeId theta);

enum class Sweep {
  // J_{n+1} = R(J'_n + ξ), J'_{n+1} = R(J_{n+1} - ζ). The iterates are the
  // odd/even subsequences of the simultaneous recursion.
  alternating,
  // J_{n+1} = R(J'_n + ξ), J'_{n+1} = R(J_n - ζ).
  simultaneous,
};

struct IterateOptions {
  int max_iter = 0;  // 0 selects 10·T + 10
  double tol = 1e-12;
  Sweep sweep = Sweep::alternating;
  bool record_history = false;
};

struct Mokobodski {
  bool holds = true;
  std::vector<NodeId> fails_at;  // nodes with ξ > ζ + tol
};

struct IterateRecord {
  Family j;
  Family jp;
};

struct DynkinSolution {
  Family xi;
  Family zeta;
  Family j;
  Family jp;
  std::optional<Family> y;  // J - J', present iff mokobodski.holds && converged
  int iterations = 0;
  bool converged = false;
  Mokobodski mokobodski;
  std::optional<StoppingTime> tau_star;    // at the root
  std::optional<StoppingTime> sigma_star;  // at the root
  std::vector<IterateRecord> history;      // J_0.. when record_history

  const EventTree& tree() const { return xi.tree(); }
  bool solved() const { return mokobodski.holds && converged; }
};

// Raised when ξ <= ζ holds nodewise but the iteration has not stalled within
// max_iter. Carries the raw iterates.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, DynkinSolution partial)
      : Error("Diverged", what), partial_(std::move(partial)) {}
  const DynkinSolution& partial() const noexcept { return partial_; }

 private:
  DynkinSolution partial_;
};

// Nodewise Mokobodski verdict ξ <= ζ + tol.
Mokobodski mokobodski_verdict(const GameSpec& game, double tol);

// Runs the J/J' recursion. When ξ > ζ somewhere, the iterates grow without
// bound: the loop runs to max_iter and the verdict is reported, no error.
DynkinSolution iterate(const GameSpec& game, const IterateOptions& options = {});

// Y(θ). Throws NotSolved unless the solution converged with Mokobodski holding.
double value(const DynkinSolution& sol, NodeId theta);

struct SaddlePoint {
  StoppingTime tau;
  StoppingTime sigma;
};

// τ*(θ) = first hit of {Y = ξ}, σ*(θ) = first hit of {Y = ζ} (tol 1e-9).
SaddlePoint saddle(const DynkinSolution& sol, NodeId theta);

struct EpsilonSaddle {
  double lambda = 0.0;
  StoppingTime tau_lambda;
  StoppingTime sigma_lambda;
  double lower_slack = 0.0;  // (1-λ) J'(θ)
  double upper_slack = 0.0;  // (1-λ) J(θ)
};

// τ^λ = first hit of {λJ <= J' + ξ}, σ^λ = first hit of {λJ' <= J - ζ}.
// For every τ, σ ∈ T_θ:
//   I_θ(τ, σ^λ) - lower_slack <= Y(θ) <= I_θ(τ^λ, σ) + upper_slack.
EpsilonSaddle epsilon_saddle(const DynkinSolution& sol, double lambda,
                             NodeId theta);

// True iff H, H' >= 0, both are supermartingales, H >= H' + ξ and
// H' >= H - ζ (tol 1e-9). When `solved` is given and the witness is valid,
// also checks J <= H and J' <= H' and throws InvariantViolation otherwise.
bool check_mokobodski_witness(const GameSpec& game, const Family& h,
                              const Family& hp,
                              const DynkinSolution* solved = nullptr);

struct ShortcutSaddle {
  StoppingTime tau;    // stop at θ
  StoppingTime sigma;  // stop at T
  double value = 0.0;  // ξ(θ)
};

// When ξ is a supermartingale, (θ, T) is a θ-saddle point with value ξ(θ),
// whatever ζ is. Returns nothing otherwise.
std::optional<ShortcutSaddle> supermartingale_shortcut(const GameSpec& game,
                                                       NodeId theta);

}  // namespace dynkin
