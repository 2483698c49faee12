#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace klearn;
using namespace testutil;

namespace {

BeliefState bandit_belief(std::size_t arms, double var = 1.0, double noise = 1.0) {
  return BeliefState(MdpPrior::bandit(std::vector<double>(arms, 0.0),
                                      std::vector<double>(arms, var), noise));
}

// Posterior mean and variance of a Gaussian mean by quadrature on a fine grid.
std::pair<double, double> grid_posterior(double m0, double v0, double sigma,
                                         const std::vector<double>& obs) {
  const double lo = m0 - 12.0 * std::sqrt(v0), hi = m0 + 12.0 * std::sqrt(v0);
  const int n = 200001;
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    double logp = -0.5 * (x - m0) * (x - m0) / v0;
    for (double r : obs) logp -= 0.5 * (r - x) * (r - x) / (sigma * sigma);
    const double w = std::exp(logp);
    z += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  const double mean = m1 / z;
  return {mean, m2 / z - mean * mean};
}

}  // namespace

TEST_CASE("conjugate reward update matches grid posterior") {
  BeliefState b = bandit_belief(2);
  b.update_reward(0, 0, 1.0);
  CHECK(b.posterior_mean(0, 0) == doctest::Approx(0.5));
  CHECK(b.posterior_var(0, 0) == doctest::Approx(0.5));
  const auto [gm, gv] = grid_posterior(0.0, 1.0, 1.0, {1.0});
  CHECK(b.posterior_mean(0, 0) == doctest::Approx(gm).epsilon(1e-6));
  CHECK(b.posterior_var(0, 0) == doctest::Approx(gv).epsilon(1e-6));

  // non-default prior and several observations
  BeliefState c(MdpPrior::bandit({0.3, 0.0}, {0.5, 1.0}, 2.0));
  const std::vector<double> obs{1.2, -0.4, 2.5};
  for (double r : obs) c.update_reward(0, 0, r);
  const auto [cm, cv] = grid_posterior(0.3, 0.5, 2.0, obs);
  CHECK(c.posterior_mean(0, 0) == doctest::Approx(cm).epsilon(1e-6));
  CHECK(c.posterior_var(0, 0) == doctest::Approx(cv).epsilon(1e-6));
}

TEST_CASE("default prior gives variance sigma^2/(n+1)") {
  BeliefState b = bandit_belief(2, 4.0, 2.0);
  CHECK(b.posterior_var(0, 1) == 4.0);
  double prev = b.posterior_var(0, 0);
  for (int n = 1; n <= 50; ++n) {
    b.update_reward(0, 0, 0.0);
    CHECK(b.posterior_var(0, 0) == doctest::Approx(4.0 / (n + 1)).epsilon(1e-15));
    CHECK(b.posterior_mean(0, 0) == 0.0);
    CHECK(b.posterior_var(0, 0) <= prev);
    prev = b.posterior_var(0, 0);
  }
}

TEST_CASE("reward updates commute") {
  BeliefState a = bandit_belief(2), b = bandit_belief(2);
  a.update_reward(0, 1, 0.7);
  a.update_reward(0, 1, -1.9);
  b.update_reward(0, 1, -1.9);
  b.update_reward(0, 1, 0.7);
  CHECK(std::abs(a.posterior_mean(0, 1) - b.posterior_mean(0, 1)) <= 1e-12);
  CHECK(a.posterior_var(0, 1) == b.posterior_var(0, 1));
}

TEST_CASE("prior validation") {
  CHECK_THROWS_AS(BeliefState(MdpPrior::bandit({0, 0}, {2.0, 1.0}, 1.0)), ValidationError);
  BeliefState ok(MdpPrior::bandit({0, 0}, {0.5, 1.0}, 1.0));
  CHECK(ok.posterior_var(0, 0) == 0.5);
  Layout lay({1, 2}, 1);
  CHECK_THROWS_AS(BeliefState(MdpPrior::uniform(lay, {1.0}, 0, 1, 1, 0.4)), ValidationError);
  CHECK_NOTHROW(BeliefState(MdpPrior::uniform(lay, {1.0}, 0, 1, 1, 0.5)));
  BeliefState b = bandit_belief(2);
  CHECK_THROWS(b.update_reward(0, 0, NAN));
}

TEST_CASE("cgf evaluation") {
  BeliefState b = bandit_belief(1 + 1);
  CHECK(b.reward_cgf(0, 0, 1.0) == 0.5);
  CHECK(b.reward_cgf(0, 0, 0.0) == 0.0);
  // final layer: inflated equals plain
  CHECK(b.inflated_cgf(0, 0, 0.8) == b.reward_cgf(0, 0, 0.8));
  CHECK_THROWS(b.inflated_cgf(0, 0, -1.0));

  Layout lay({1, 1, 1}, 1);
  BeliefState m(MdpPrior::uniform(lay, {1.0}, 0, 1, 1));
  // n = 0, L - l = 2, beta = 1: bonus 2
  CHECK(m.inflated_cgf(0, 0, 1.0) == doctest::Approx(m.reward_cgf(0, 0, 1.0) + 2.0));
  const double b0 = m.inflated_cgf(0, 0, 1.0) - m.reward_cgf(0, 0, 1.0);
  m.update_reward(0, 0, 0.0);
  m.update_transition(0, 0, 0);
  const double b1 = m.inflated_cgf(0, 0, 1.0) - m.reward_cgf(0, 0, 1.0);
  CHECK(b1 == doctest::Approx(b0 / 2.0));

  Rng rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng);
    CHECK(m.reward_cgf(0, 0, 0.5 * (x + y)) <=
          0.5 * (m.reward_cgf(0, 0, x) + m.reward_cgf(0, 0, y)) + 1e-9);
  }
}

TEST_CASE("assumption bound holds with equality under the default prior") {
  BeliefState b = bandit_belief(2);
  for (int i = 0; i < 7; ++i) b.update_reward(0, 0, 0.3 * i);
  const double n = 7.0;
  for (double tau = 1e-3; tau < 1e3; tau *= 1.7) {
    const double lhs = tau * b.reward_cgf(0, 0, 1.0 / tau);
    const double rhs = b.posterior_mean(0, 0) + 1.0 / (2.0 * tau * (n + 1.0));
    CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("transition posterior") {
  Layout lay({1, 2}, 1);
  BeliefState b(MdpPrior::uniform(lay, {1.0}, 0, 1, 1));
  CHECK(b.expected_transition(0, 0) == std::vector<double>{0.5, 0.5});
  b.update_reward(0, 0, 0.0);
  b.update_transition(0, 0, 0);
  CHECK(b.alpha(0, 0)[0] == 2.0);
  CHECK(b.expected_transition(0, 0)[0] == doctest::Approx(2.0 / 3.0));
  for (int k = 2; k <= 10; ++k) {
    b.update_reward(0, 0, 0.0);
    b.update_transition(0, 0, 0);
    CHECK(b.expected_transition(0, 0)[0] == doctest::Approx((1.0 + k) / (2.0 + k)));
  }
  CHECK_THROWS_AS(b.update_transition(0, 0, 2), ValidationError);
  CHECK_THROWS_AS(b.update_transition(1, 0, 0), ValidationError);

  MdpPrior p = MdpPrior::uniform(lay, {1.0}, 0, 1, 1);
  p.alpha = {3.0, 1.0};
  BeliefState c(p);
  CHECK(c.expected_transition(0, 0) == std::vector<double>{0.75, 0.25});
}

TEST_CASE("expected transition converges to the sampling categorical") {
  Layout lay({1, 3}, 1);
  BeliefState b(MdpPrior::uniform(lay, {1.0}, 0, 1, 1));
  const std::vector<double> truth{0.2, 0.5, 0.3};
  Rng rng(17);
  std::discrete_distribution<std::size_t> d(truth.begin(), truth.end());
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    b.update_reward(0, 0, 0.0);
    b.update_transition(0, 0, d(rng));
  }
  const auto p = b.expected_transition(0, 0);
  for (std::size_t j = 0; j < 3; ++j) {
    const double se = std::sqrt(truth[j] * (1 - truth[j]) / n);
    CHECK(std::abs(p[j] - truth[j]) <= 3.0 * se + 3.0 / n);
  }
}

TEST_CASE("posterior sampling") {
  Layout lay({1, 3}, 2);
  MdpPrior p = MdpPrior::uniform(lay, {1.0}, 0.4, 0.09, 0.5);
  p.alpha = {3, 1, 2, 0.5, 0.5, 1};
  BeliefState b(p);
  Rng rng(23);
  const int n = 10000;
  std::vector<double> mu, p0;
  for (int i = 0; i < n; ++i) {
    const LayeredMdp m = b.sample_mdp(rng);
    mu.push_back(m.mean_reward(0, 0));
    p0.push_back(m.next(0, 0)[0]);
    for (std::size_t a = 0; a < 2; ++a) {
      double total = 0.0;
      for (double x : m.next(0, a)) total += x;
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
  const MeanSe ms = mean_se(mu);
  CHECK(std::abs(ms.mean - 0.4) <= 3.0 * ms.se);
  const MeanSe ps = mean_se(p0);
  CHECK(std::abs(ps.mean - 0.5) <= 3.0 * ps.se);
  CHECK(b.expected_transition(0, 1)[2] == doctest::Approx(0.5));

  // degenerate posterior reproduces the posterior-mean MDP
  BeliefState d(MdpPrior::uniform(lay, {1.0}, 0.0, 1.0, 1.0));
  std::vector<std::size_t> counts(lay.pair_count(), 0);
  std::vector<double> sums(lay.pair_count(), 0.0);
  std::vector<double> alpha(lay.transition_size(), 1.0);
  const double big = 1e14;
  counts[0] = static_cast<std::size_t>(big);
  sums[0] = 0.25 * big;
  alpha[0] += big;
  d.restore(1, counts, sums, alpha);
  const LayeredMdp s = d.sample_mdp(rng);
  CHECK(s.mean_reward(0, 0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(s.next(0, 0)[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("restore rejects inconsistent statistics") {
  Layout lay({1, 2}, 1);
  BeliefState b(MdpPrior::uniform(lay, {1.0}, 0, 1, 1));
  CHECK_THROWS_AS(b.restore(1, {3, 0, 0}, {0, 0, 0}, {2, 1}), ValidationError);
  CHECK_THROWS_AS(b.restore(0, {1, 0, 0}, {0, 0, 0}, {2, 1}), ValidationError);
  CHECK_NOTHROW(b.restore(4, {1, 0, 0}, {0.5, 0, 0}, {2, 1}));
  CHECK(b.episode() == 4);
}
