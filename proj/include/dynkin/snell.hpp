#pragma once

// Supermartingale predicates, the Snell envelope operator R and the stopping
// times built from a value function: λ-hitting times θ^λ(S) and the minimal
// optimal time θ*(S).

#include "dynkin/family.hpp"

namespace dynkin {

// Tolerance of the one-step supermartingale test and of {λv <= φ}.
inline constexpr double kIdentityTol = 1e-12;
// Tolerance of {v = φ} and of cross-family identities.
inline constexpr double kFamilyTol = 1e-9;

struct SnellResult {
  Family envelope;  // v = R(φ)
  Family reward;    // φ
};

// Σ_children p·f(child) <= f(n) + 1e-12 at every internal node. On a finite
// tree this is equivalent to E[f(θ) | F_θ'] <= f(θ') for all θ' <= θ.
bool is_supermartingale(const Family& f);

// f(n) equals its one-step mean (within 1e-9) at every node n with
// S <= n < S' on its path. Throws RegionMismatch unless S <= S'.
bool is_martingale_on(const Family& f, const StoppingTime& from,
                      const StoppingTime& to);

// Backward induction v(leaf) = φ(leaf), v(n) = max(φ(n), E[v(child)]).
// Signed rewards need no translation here.
SnellResult snell_envelope(const Family& reward);

// Convenience for R(φ).envelope.
Family snell(const Family& reward);

// θ^λ(S): per path, the first node at or after S with λ·v <= φ + 1e-12.
// Ties stop. For v >= 0 the result is (1-λ)-optimal and pathwise nondecreasing
// in λ. Throws BadLambda unless 0 < λ < 1.
StoppingTime lambda_hitting(const Family& v, const Family& reward,
                            double lambda, const StoppingTime& from);

// θ*(S): per path, the first node at or after S with |v - φ| <= 1e-9.
StoppingTime minimal_optimal(const Family& v, const Family& reward,
                             const StoppingTime& from);

// v = φ on θ's region and v is a martingale on [S, θ]. Throws RegionMismatch
// unless S <= θ.
bool check_optimality_criterion(const Family& v, const Family& reward,
                                const StoppingTime& from,
                                const StoppingTime& theta);

}  // namespace dynkin
