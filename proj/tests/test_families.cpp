#include <cmath>
#include <random>

#include "doctest.h"
#include "dynkin/snell.hpp"
#include "fixtures.hpp"

using namespace dynkin;
using namespace fixtures;

namespace {

Family random_family(const TreePtr& t, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(t->size());
  for (double& x : v) x = u(rng);
  return Family(t, v);
}

// Random supermartingale h >= φ: h(n) >= max(φ(n), E[h | children]).
Family random_dominating_supermartingale(const Family& phi, std::mt19937_64& rng) {
  const EventTree& t = phi.tree();
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  std::vector<double> h(t.size());
  for (NodeId n = t.size(); n-- > 0;) {
    double cont = -std::numeric_limits<double>::infinity();
    if (!t.is_leaf(n)) {
      cont = 0.0;
      for (NodeId c : t.children(n)) cont += t.node(c).cond_prob * h[c];
    }
    h[n] = std::max(phi[n], cont) + (slack(rng) < 0.3 ? 0.0 : slack(rng));
  }
  return Family(phi.tree_ptr(), h);
}

StoppingTime random_stopping_time(const TreePtr& t, std::mt19937_64& rng) {
  std::bernoulli_distribution stop(0.35);
  return first_hitting(StoppingTime::immediate(t, t->root()),
                       [&](NodeId) { return stop(rng); });
}

}  // namespace

TEST_CASE("is_supermartingale examples") {
  auto c = chain3();
  CHECK(is_supermartingale(Family::constant(c, 0.0)));
  CHECK(is_supermartingale(fam(c, {1, 1, 0})));
  CHECK_FALSE(is_supermartingale(fam(c, {0, 1, 0})));
}

TEST_CASE("is_martingale_on examples") {
  auto c = chain3();
  auto f = fam(c, {1, 1, 0});
  CHECK(is_martingale_on(f, st(c, {1}), st(c, {1})));
  CHECK(is_martingale_on(f, st(c, {0}), st(c, {1})));
  CHECK_FALSE(is_martingale_on(f, st(c, {0}), st(c, {2})));
  CHECK_THROWS_AS(is_martingale_on(f, st(c, {2}), st(c, {0})), RegionMismatch);
}

TEST_CASE("StoppingTime validation") {
  auto b = binomial2();
  CHECK_NOTHROW(st(b, {1, 5, 6}));
  CHECK_THROWS_AS(st(b, {1, 3, 5, 6}), RegionMismatch);  // 3 lies below 1
  CHECK_THROWS_AS(st(b, {1, 5}), RegionMismatch);        // path to 6 never stops
  CHECK_THROWS_AS(StoppingTime(b, 1, {3, 4, 5}), RegionMismatch);  // 5 outside subtree
  CHECK(precedes(st(b, {0}), st(b, {1, 5, 6})));
  CHECK_FALSE(precedes(st(b, {1, 5, 6}), st(b, {0})));
}

TEST_CASE("snell_envelope examples with brute-force esssup") {
  auto c = chain3();
  CHECK(snell(Family::constant(c, 0.0)).values()[0] == 0.0);

  // Frozen from brute force over the 3 stopping times of each date.
  auto phi = fam(c, {0, 1, 0});
  const std::vector<double> expected_chain{1, 1, 0};
  auto v = snell(phi);
  for (NodeId n = 0; n < 3; ++n) {
    CHECK(brute_force_esssup(phi, n) == expected_chain[n]);
    CHECK(v[n] == expected_chain[n]);
  }

  auto b = binomial2();
  auto phib = fam(b, {0, 1, 0, 0, 0, 0, 0});
  const std::vector<double> expected_binomial{0.5, 1, 0, 0, 0, 0, 0};
  auto vb = snell(phib);
  CHECK(oracle::count_stopping_times(*b, 0) == 5);
  for (NodeId n = 0; n < 7; ++n) {
    CHECK(brute_force_esssup(phib, n) == doctest::Approx(expected_binomial[n]));
    CHECK(vb[n] == doctest::Approx(expected_binomial[n]));
  }
}

TEST_CASE("lambda_hitting examples") {
  auto c = chain3();
  auto zero = Family::constant(c, 0.0);
  CHECK(lambda_hitting(snell(zero), zero, 0.3, st(c, {0})) == st(c, {0}));
  CHECK(lambda_hitting(snell(zero), zero, 0.3, st(c, {1})) == st(c, {1}));

  auto phi = fam(c, {0, 1, 0});
  CHECK(lambda_hitting(snell(phi), phi, 0.9, st(c, {0})) == st(c, {1}));

  auto b = binomial2();
  auto phib = fam(b, {0, 1, 0, 0, 0, 0, 0});
  CHECK(lambda_hitting(snell(phib), phib, 0.5, st(b, {0})) == st(b, {1, 2}));

  CHECK_THROWS_AS(lambda_hitting(snell(phi), phi, 1.0, st(c, {0})), BadLambda);
  CHECK_THROWS_AS(lambda_hitting(snell(phi), phi, 0.0, st(c, {0})), BadLambda);
  CHECK_THROWS_AS(lambda_hitting(snell(phi), phi, 1.5, st(c, {0})), BadLambda);
}

TEST_CASE("minimal_optimal examples") {
  auto c = chain3();
  auto zero = Family::constant(c, 0.0);
  CHECK(minimal_optimal(zero, zero, st(c, {0})) == st(c, {0}));
  auto phi = fam(c, {0, 1, 0});
  CHECK(minimal_optimal(snell(phi), phi, st(c, {0})) == st(c, {1}));

  auto b = binomial2();
  auto phib = fam(b, {0, 1, 0, 0, 0, 0, 0});
  CHECK(minimal_optimal(snell(phib), phib, st(b, {0})) == st(b, {1, 2}));
}

TEST_CASE("check_optimality_criterion examples") {
  auto c = chain3();
  auto phi = fam(c, {0, 1, 0});
  auto v = snell(phi);
  auto s = st(c, {0});
  CHECK(check_optimality_criterion(v, phi, s, minimal_optimal(v, phi, s)));
  CHECK_FALSE(check_optimality_criterion(v, phi, s, st(c, {2})));
  // A reward that is already a supermartingale is its own envelope.
  auto sup = fam(c, {1, 1, 0});
  CHECK(check_optimality_criterion(snell(sup), sup, s, s));
  CHECK_THROWS_AS(check_optimality_criterion(v, phi, st(c, {2}), s), RegionMismatch);
}

TEST_CASE("θ* is the limit of θ^λ as λ increases to 1 on fixtures") {
  auto c = chain3();
  auto phi = fam(c, {0, 1, 0});
  auto v = snell(phi);
  CHECK(lambda_hitting(v, phi, 1.0 - 1e-6, st(c, {0})) == minimal_optimal(v, phi, st(c, {0})));

  auto b = binomial2();
  auto phib = fam(b, {0.2, 1, 0, 0, 0, 0, 0});
  auto vb = snell(phib);
  CHECK(lambda_hitting(vb, phib, 1.0 - 1e-6, st(b, {0})) ==
        minimal_optimal(vb, phib, st(b, {0})));
  // Here v(root) = 0.5 > 0.2, so small λ stops at the root already.
  CHECK(lambda_hitting(vb, phib, 0.3, st(b, {0})) == st(b, {0}));
}

TEST_CASE("Snell envelope is the smallest dominating supermartingale") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto m = corpus_model(seed, 0);
    auto phi = random_family(m.tree, rng, -5, 5);
    auto res = snell_envelope(phi);
    CHECK(dominated_by(phi, res.envelope, 0.0));
    CHECK(is_supermartingale(res.envelope));
    for (int k = 0; k < 20; ++k) {
      auto h = random_dominating_supermartingale(phi, rng);
      REQUIRE(is_supermartingale(h));
      CHECK(dominated_by(res.envelope, h, 1e-9));
    }
  }
}

TEST_CASE("Snell envelope equals the enumerated esssup") {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto m = corpus_model(seed, 50);
    auto phi = random_family(m.tree, rng, -5, 5);
    auto v = snell(phi);
    for (NodeId n = 0; n < m.tree->size(); ++n) {
      CHECK(std::abs(v[n] - brute_force_esssup(phi, n)) <= 1e-12);
    }
    ++checked;
  }
  CHECK(checked == 120);
}

TEST_CASE("one-step supermartingale test agrees with the stopping-time definition") {
  std::mt19937_64 rng(13);
  int positives = 0, negatives = 0;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    auto m = corpus_model(seed, 30);
    const auto& t = m.tree;
    // Half of the samples are envelopes (supermartingales), half arbitrary.
    auto raw = random_family(t, rng, -3, 3);
    Family f = seed % 2 == 0 ? snell(raw) : raw;

    bool by_definition = true;
    auto all = oracle::enumerate_stopping_times(t, t->root());
    for (const auto& early : all) {
      for (const auto& late : all) {
        if (!precedes(early, late)) continue;
        for (NodeId n : early.region()) {
          if (conditional_expectation(f, n, late) > f[n] + 1e-9) by_definition = false;
        }
      }
    }
    CHECK(is_supermartingale(f) == by_definition);
    (by_definition ? positives : negatives)++;
  }
  CHECK(positives > 0);
  CHECK(negatives > 0);
}

TEST_CASE("the nonnegative shift translates the envelope") {
  std::mt19937_64 rng(15);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto m = corpus_model(seed, 0);
    auto phi = random_family(m.tree, rng, -5, 5);
    auto x = nonnegative_shift(phi);
    auto bar = phi + x;
    CHECK(dominated_by(Family::constant(m.tree, 0.0), bar, 1e-12));
    CHECK(sup_distance(snell(bar), snell(phi) + x) <= 1e-9);
  }
}

TEST_CASE("θ^λ is (1-λ)-optimal and monotone in λ") {
  std::mt19937_64 rng(14);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto m = corpus_model(seed, 0);
    auto raw = random_family(m.tree, rng, -5, 5);
    auto phi = raw + nonnegative_shift(raw);
    auto v = snell(phi);
    for (int k = 0; k < 5; ++k) {
      auto s = random_stopping_time(m.tree, rng);
      auto theta_star = minimal_optimal(v, phi, s);
      CHECK(check_optimality_criterion(v, phi, s, theta_star));
      std::optional<StoppingTime> previous;
      for (double lambda : {0.5, 0.9, 0.99}) {
        auto hit = lambda_hitting(v, phi, lambda, s);
        for (NodeId n : hit.region()) CHECK(lambda * v[n] <= phi[n] + 1e-12);
        CHECK(is_martingale_on(v, s, hit));
        for (NodeId n : s.region()) {
          CHECK(lambda * v[n] <= conditional_expectation(phi, n, hit) + 1e-9);
          CHECK(std::abs(v[n] - conditional_expectation(v, n, hit)) <= 1e-9);
        }
        if (previous) CHECK(precedes(*previous, hit));
        CHECK(precedes(hit, theta_star));
        previous = hit;
      }
    }
  }
}

TEST_CASE("(1-λ)-optimality needs a nonnegative envelope") {
  TreeDescription d;
  d.horizon = 1;
  d.nodes = {{0, 0, std::nullopt, 1.0}, {1, 1, 0, 1.0}};
  auto t = make_tree(d);
  auto phi = fam(t, {-1, -2});
  auto v = snell(phi);
  CHECK(v[0] == -1.0);
  // λ v(0) = -0.5 > φ(0), so θ^λ waits and collects -2 < λ v(0).
  auto hit = lambda_hitting(v, phi, 0.5, st(t, {0}));
  CHECK(hit == st(t, {1}));
  CHECK(conditional_expectation(phi, 0, hit) < 0.5 * v[0]);

  auto bar = phi + nonnegative_shift(phi);
  auto vbar = snell(bar);
  auto hit_bar = lambda_hitting(vbar, bar, 0.5, st(t, {0}));
  CHECK(conditional_expectation(bar, 0, hit_bar) >= 0.5 * vbar[0]);
}
