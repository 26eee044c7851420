#include "dynkin/generator.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace dynkin {

namespace {

constexpr int kMaxAttempts = 10000;

struct Topology {
  std::vector<std::optional<std::size_t>> parent;
  std::vector<int> time;
  std::vector<double> cond_prob;
  std::vector<std::vector<std::size_t>> children;
};

Topology random_topology(std::mt19937_64& rng, const GenShape& shape) {
  const int lo_b = shape.min_branching > 0 ? shape.min_branching : shape.max_branching;
  std::uniform_int_distribution<int> branching(lo_b, shape.max_branching);
  std::uniform_real_distribution<double> weight(0.1, 1.0);

  Topology topo;
  topo.parent.push_back(std::nullopt);
  topo.time.push_back(0);
  topo.cond_prob.push_back(1.0);
  topo.children.emplace_back();
  for (std::size_t i = 0; i < topo.time.size(); ++i) {
    if (topo.time[i] == shape.horizon) continue;
    const int b = branching(rng);
    std::vector<double> w(static_cast<std::size_t>(b));
    double total = 0.0;
    for (double& x : w) total += (x = weight(rng));
    for (int k = 0; k < b; ++k) {
      const std::size_t child = topo.time.size();
      topo.parent.push_back(i);
      topo.time.push_back(topo.time[i] + 1);
      topo.cond_prob.push_back(w[static_cast<std::size_t>(k)] / total);
      topo.children.emplace_back();
      topo.children[i].push_back(child);
    }
  }
  return topo;
}

std::uint64_t count_strategies(const Topology& topo, std::size_t n, std::uint64_t limit) {
  if (topo.children[n].empty()) return 1;
  std::uint64_t prod = 1;
  for (std::size_t c : topo.children[n]) {
    prod *= count_strategies(topo, c, limit);
    if (prod > limit) return limit + 1;
  }
  return prod + 1;
}

}  // namespace

GameModel generate(std::uint64_t seed, const GenShape& shape) {
  if (shape.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (shape.max_branching < 1 || shape.min_branching > shape.max_branching ||
      shape.min_branching < 0) {
    throw std::invalid_argument("branching range is empty");
  }
  if (!(shape.lo < shape.hi)) throw std::invalid_argument("value range is empty");

  std::mt19937_64 rng(seed);
  Topology topo = random_topology(rng, shape);
  for (int attempt = 1; shape.max_strategies > 0 &&
                        count_strategies(topo, 0, shape.max_strategies) > shape.max_strategies;
       ++attempt) {
    if (attempt == kMaxAttempts) {
      throw std::invalid_argument("no topology within max_strategies for this shape");
    }
    topo = random_topology(rng, shape);
  }

  const std::size_t size = topo.time.size();
  std::uniform_real_distribution<double> value(shape.lo, shape.hi);
  std::vector<double> xi(size, 0.0), zeta(size, 0.0);
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < size; ++i) {
    if (topo.time[i] == shape.horizon) continue;
    interior.push_back(i);
    xi[i] = value(rng);
    zeta[i] = value(rng);
    if (shape.force_sandwich || shape.inject_violation) {
      if (xi[i] > zeta[i]) std::swap(xi[i], zeta[i]);
    }
  }

  if (shape.inject_violation) {
    std::shuffle(interior.begin(), interior.end(), rng);
    std::uniform_int_distribution<std::size_t> how_many(
        1, std::min<std::size_t>(3, interior.size()));
    const double max_gap = std::min(2.0, (shape.hi - shape.lo) / 2.0);
    std::uniform_real_distribution<double> gap(max_gap / 4.0, max_gap);
    const std::size_t k = how_many(rng);
    for (std::size_t idx = 0; idx < k; ++idx) {
      const std::size_t i = interior[idx];
      const double g = gap(rng);
      zeta[i] = std::uniform_real_distribution<double>(shape.lo, shape.hi - g)(rng);
      xi[i] = zeta[i] + g;
    }
  }

  if (shape.supermartingale_xi) {
    std::uniform_real_distribution<double> drift(0.0, (shape.hi - shape.lo) / 8.0);
    for (std::size_t i = size; i-- > 0;) {
      if (topo.children[i].empty()) {
        xi[i] = 0.0;
        continue;
      }
      double mean = 0.0;
      for (std::size_t c : topo.children[i]) mean += topo.cond_prob[c] * xi[c];
      xi[i] = mean + drift(rng);
    }
  }

  TreeDescription desc;
  desc.horizon = shape.horizon;
  for (std::size_t i = 0; i < size; ++i) {
    RawNode raw;
    raw.id = static_cast<ExternalId>(i);
    raw.time = topo.time[i];
    if (topo.parent[i]) raw.parent = static_cast<ExternalId>(*topo.parent[i]);
    raw.cond_prob = topo.cond_prob[i];
    desc.nodes.push_back(raw);
  }

  GameModel model;
  model.tree = make_tree(desc);
  // Generation order is already breadth-first, so dense ids match.
  model.xi = Family(model.tree, std::move(xi));
  model.zeta = Family(model.tree, std::move(zeta));
  return model;
}

}  // namespace dynkin
