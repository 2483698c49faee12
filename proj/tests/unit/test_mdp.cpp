#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace klearn;
using namespace testutil;

TEST_CASE("layout indexing") {
  Layout lay({2, 3, 1}, 2);
  CHECK(lay.state_count() == 6);
  CHECK(lay.pair_count() == 12);
  CHECK(lay.layer_of(4) == 1);
  CHECK(lay.local_index(4) == 2);
  CHECK(lay.global(2, 0) == 5);
  CHECK(lay.successor_count(0) == 3);
  CHECK(lay.successor_count(4) == 1);
  CHECK(lay.successor_count(5) == 0);
  CHECK(lay.transition_size() == 2 * 2 * 3 + 3 * 2 * 1);
  CHECK(lay.steps_to_go(0) == 2);
  CHECK(lay.steps_to_go(5) == 0);
}

TEST_CASE("LayeredMdp validation") {
  Layout lay({1, 2}, 1);
  CHECK_NOTHROW(LayeredMdp(lay, {0.5, 0.5}, {0, 0, 0}, 1.0, {1.0}));
  CHECK_THROWS_AS(LayeredMdp(lay, {0.5, 0.6}, {0, 0, 0}, 1.0, {1.0}), ValidationError);
  CHECK_THROWS_AS(LayeredMdp(lay, {1.5, -0.5}, {0, 0, 0}, 1.0, {1.0}), ValidationError);
  CHECK_THROWS_AS(LayeredMdp(lay, {0.5, 0.5}, {0, 0, 0}, 1.0, {0.9}), ValidationError);
  CHECK_THROWS_AS(LayeredMdp(lay, {0.5, 0.5}, {0, 0, 2.0}, 1.0, {1.0}, true), ValidationError);
  CHECK_NOTHROW(LayeredMdp(lay, {0.5, 0.5}, {0, 0, 1.0}, 1.0, {1.0}, true));
}

TEST_CASE("solve_optimal small examples") {
  LayeredMdp one(Layout({1}, 2), {}, {0.2, 0.7}, 0.0, {1.0});
  const ValueTables vt = solve_optimal(one);
  CHECK(vt.q[0] == 0.2);
  CHECK(vt.q[1] == 0.7);
  CHECK(vt.v[0] == 0.7);

  // deterministic 2-layer chain; only action 1 of the first state reaches the rewarding state
  Layout lay({1, 2}, 2);
  std::vector<double> t{1, 0, 0, 1};
  std::vector<double> mu{0, 0, 0, 0, 1, 0};
  LayeredMdp chain(lay, t, mu, 0.0, {1.0});
  CHECK(solve_optimal(chain).v[0] == 1.0);
}

TEST_CASE("solve_optimal equals brute force enumeration") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const LayeredMdp mdp = random_mdp(rng, 3, 3, 2);
    const ValueTables vt = solve_optimal(mdp);
    double v = 0.0;
    for (std::size_t i = 0; i < mdp.rho().size(); ++i) v += mdp.rho()[i] * vt.v[i];
    CHECK(v == doctest::Approx(brute_force_optimal(mdp)).epsilon(1e-10));
    const Policy g = greedy_policy(mdp.layout(), vt.q);
    const ValueTables ev = evaluate_policy(mdp, g);
    for (std::size_t s = 0; s < vt.v.size(); ++s) {
      CHECK(std::abs(ev.v[s] - vt.v[s]) <= 1e-10);
      double m = -INFINITY;
      for (std::size_t a = 0; a < 2; ++a) m = std::max(m, vt.q[s * 2 + a]);
      CHECK(vt.v[s] == m);
    }
  }
}

TEST_CASE("greedy policy breaks ties to the lowest index") {
  Layout lay({1}, 3);
  const Policy p = greedy_policy(lay, std::vector<double>{1.0, 2.0, 2.0});
  CHECK(p(0, 1) == 1.0);
}

TEST_CASE("evaluate_policy and performance") {
  LayeredMdp one(Layout({1}, 2), {}, {0.0, 1.0}, 0.0, {1.0});
  CHECK(evaluate_policy(one, Policy::uniform(1, 2)).v[0] == 0.5);

  LayeredMdp two(Layout({2}, 1), {}, {0.0, 1.0}, 0.0, {0.5, 0.5});
  CHECK(performance(two, Policy::uniform(2, 1)) == 0.5);

  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const LayeredMdp mdp = random_mdp(rng);
    const Policy pi = random_policy(mdp.layout(), rng);
    const ValueTables vt = evaluate_policy(mdp, pi);
    for (std::size_t s = 0; s < mdp.state_count(); ++s) {
      double acc = 0.0;
      for (std::size_t a = 0; a < 2; ++a) acc += pi(s, a) * vt.q[s * 2 + a];
      CHECK(std::abs(acc - vt.v[s]) <= 1e-12);
    }
    const MeanSe mc = rollout(mdp, pi, 100000, rng);
    CHECK(std::abs(performance(mdp, pi) - mc.mean) <= 3.0 * mc.se);
  }
}

TEST_CASE("policy validation") {
  Layout lay({1}, 2);
  Policy bad(1, 2);
  bad.probs = {0.7, 0.7};
  CHECK_THROWS_AS(validate_policy(lay, bad), ValidationError);
  Policy wrong(2, 2);
  wrong.probs = {1, 0, 1, 0};
  CHECK_THROWS_AS(validate_policy(lay, wrong), ValidationError);
}

TEST_CASE("occupancy measure") {
  LayeredMdp one(Layout({2}, 2), {}, {0, 0, 0, 0}, 0.0, {0.25, 0.75});
  Policy pi(2, 2);
  pi.probs = {0.5, 0.5, 0.1, 0.9};
  const auto occ = occupancy(one, pi);
  CHECK(occ.lambda[0] == 0.125);
  CHECK(occ.lambda[3] == doctest::Approx(0.675));

  // deterministic chain with a deterministic policy is an indicator path
  Layout lay({1, 2, 2}, 2);
  std::vector<double> t(lay.transition_size(), 0.0);
  t[lay.row_offset(0, 0) + 0] = 1;
  t[lay.row_offset(0, 1) + 1] = 1;
  for (std::size_t s = 1; s <= 2; ++s)
    for (std::size_t a = 0; a < 2; ++a) t[lay.row_offset(s, a) + a] = 1;
  LayeredMdp chain(lay, t, std::vector<double>(lay.pair_count(), 0.0), 0.0, {1.0});
  Policy det(lay.state_count(), 2);
  for (std::size_t s = 0; s < lay.state_count(); ++s) det.probs[s * 2 + 1] = 1.0;
  const auto path = occupancy(chain, det);
  std::vector<double> expect(lay.pair_count(), 0.0);
  expect[lay.pair(0, 1)] = expect[lay.pair(2, 1)] = expect[lay.pair(4, 1)] = 1.0;
  CHECK(path.lambda == expect);

  Rng rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    const LayeredMdp mdp = random_mdp(rng);
    const Layout& L = mdp.layout();
    const Policy p = random_policy(L, rng);
    const auto o = occupancy(mdp, p);
    for (std::size_t l = 0; l < L.horizon(); ++l) {
      double total = 0.0;
      for (std::size_t s = L.layer_begin(l); s < L.layer_end(l); ++s)
        for (std::size_t a = 0; a < 2; ++a) total += o.lambda[L.pair(s, a)];
      CHECK(std::abs(total - 1.0) <= 1e-10);
      if (l + 1 == L.horizon()) continue;
      for (std::size_t j = 0; j < L.layer_size(l + 1); ++j) {
        const std::size_t sn = L.global(l + 1, j);
        double inflow = 0.0;
        for (std::size_t s = L.layer_begin(l); s < L.layer_end(l); ++s)
          for (std::size_t a = 0; a < 2; ++a) inflow += mdp.next(s, a)[j] * o.lambda[L.pair(s, a)];
        CHECK(std::abs(inflow - (o.lambda[L.pair(sn, 0)] + o.lambda[L.pair(sn, 1)])) <= 1e-10);
      }
    }
  }
}

TEST_CASE("unroll") {
  StationaryMdp m;
  m.states = 2;
  m.actions = 1;
  m.transition = {1, 0, 0, 1};
  m.mean_reward = {0.0, 1.0};
  m.rho = {0.5, 0.5};
  const LayeredMdp u = unroll(m, 3);
  CHECK(u.state_count() == 6);
  CHECK(u.horizon() == 3);
  CHECK(performance(u, Policy::uniform(6, 1)) == doctest::Approx(1.5));

  const LayeredMdp one = unroll(m, 1);
  CHECK(one.state_count() == 2);
  CHECK(one.mean_reward(1, 0) == 1.0);

  m.transition = {0.5, 0.6, 0, 1};
  CHECK_THROWS_AS(unroll(m, 2), ValidationError);

  // 3-state chain, L=2: second-layer visitation equals one-step transition mass
  StationaryMdp c;
  c.states = 3;
  c.actions = 1;
  c.transition = {0.2, 0.8, 0.0, 0.0, 0.1, 0.9, 0.5, 0.0, 0.5};
  c.mean_reward = {0, 0, 0};
  c.rho = {0.3, 0.3, 0.4};
  const auto occ = occupancy(unroll(c, 2), Policy::uniform(6, 1));
  const double expect[3] = {0.3 * 0.2 + 0.4 * 0.5, 0.3 * 0.8 + 0.3 * 0.1, 0.3 * 0.9 + 0.4 * 0.5};
  for (int j = 0; j < 3; ++j) CHECK(occ.lambda[3 + j] == doctest::Approx(expect[j]).epsilon(1e-12));
}

TEST_CASE("unroll preserves finite-horizon optimal value") {
  Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    StationaryMdp m;
    m.states = 3;
    m.actions = 2;
    for (std::size_t i = 0; i < 6; ++i) {
      const auto row = random_simplex(3, rng);
      m.transition.insert(m.transition.end(), row.begin(), row.end());
      m.mean_reward.push_back(u(rng));
    }
    m.rho = random_simplex(3, rng);
    const std::size_t L = 4;
    // direct finite-horizon value iteration on the stationary model
    std::vector<double> v(3, 0.0);
    for (std::size_t step = 0; step < L; ++step) {
      std::vector<double> nv(3);
      for (std::size_t s = 0; s < 3; ++s) {
        double best = -INFINITY;
        for (std::size_t a = 0; a < 2; ++a) {
          double q = m.mean_reward[s * 2 + a];
          for (std::size_t j = 0; j < 3; ++j) q += m.transition[(s * 2 + a) * 3 + j] * v[j];
          best = std::max(best, q);
        }
        nv[s] = best;
      }
      v = nv;
    }
    const LayeredMdp un = unroll(m, L);
    const ValueTables vt = solve_optimal(un);
    for (std::size_t s = 0; s < 3; ++s) CHECK(std::abs(vt.v[s] - v[s]) <= 1e-10);
  }
}
