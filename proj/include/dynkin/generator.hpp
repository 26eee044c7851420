#pragma once

// Seeded random game instances for property campaigns.

#include <cstdint>

#include "dynkin/model_io.hpp"

namespace dynkin {

struct GenShape {
  int horizon = 2;
  int min_branching = 0;  // 0: equal to max_branching (full tree)
  int max_branching = 2;
  double lo = -5.0;
  double hi = 5.0;
  bool force_sandwich = true;    // swap ξ and ζ where ξ > ζ
  bool inject_violation = false;  // at least one interior node with ξ > ζ
  bool supermartingale_xi = false;  // ξ(n) = E[ξ(child)] + drift, drift >= 0
  // Reject topologies whose root has more stopping times; 0 disables.
  std::uint64_t max_strategies = 0;
};

// Deterministic for a given (seed, shape). Terminal values are 0.
// Throws std::invalid_argument for an unusable shape.
GameModel generate(std::uint64_t seed, const GenShape& shape);

}  // namespace dynkin
