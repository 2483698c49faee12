#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "klearn/harness.hpp"

namespace testutil {

using namespace klearn;

inline Layout random_layout(Rng& rng, std::size_t max_layer = 3, std::size_t max_horizon = 3,
                            std::size_t actions = 2) {
  std::uniform_int_distribution<std::size_t> h(1, max_horizon), w(1, max_layer);
  std::vector<std::size_t> sizes(h(rng));
  for (auto& s : sizes) s = w(rng);
  return Layout(sizes, actions);
}

inline std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) total += (x = e(rng));
  for (auto& x : p) x /= total;
  return p;
}

inline std::vector<double> random_transition(const Layout& lay, Rng& rng) {
  std::vector<double> t(lay.transition_size());
  for (std::size_t s = 0; s < lay.state_count(); ++s)
    for (std::size_t a = 0; a < lay.actions(); ++a) {
      const auto row = random_simplex(lay.successor_count(s), rng);
      std::copy(row.begin(), row.end(), t.begin() + static_cast<std::ptrdiff_t>(lay.row_offset(s, a)));
    }
  return t;
}

inline LayeredMdp random_mdp(Rng& rng, std::size_t max_layer = 3, std::size_t max_horizon = 3,
                             std::size_t actions = 2) {
  Layout lay = random_layout(rng, max_layer, max_horizon, actions);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> mu(lay.pair_count());
  for (auto& m : mu) m = u(rng);
  auto t = random_transition(lay, rng);
  auto rho = random_simplex(lay.layer_size(0), rng);
  return LayeredMdp(lay, std::move(t), std::move(mu), 0.5, std::move(rho));
}

inline Policy random_policy(const Layout& lay, Rng& rng) {
  Policy pi(lay.state_count(), lay.actions());
  for (std::size_t s = 0; s < lay.state_count(); ++s) {
    const auto row = random_simplex(lay.actions(), rng);
    std::copy(row.begin(), row.end(), pi.row(s).begin());
  }
  return pi;
}

// Optimal start value by enumerating every deterministic policy.
inline double brute_force_optimal(const LayeredMdp& mdp) {
  const Layout& lay = mdp.layout();
  const std::size_t S = lay.state_count(), A = lay.actions();
  std::vector<std::size_t> choice(S, 0);
  double best = -INFINITY;
  while (true) {
    Policy pi(S, A);
    for (std::size_t s = 0; s < S; ++s) pi.probs[s * A + choice[s]] = 1.0;
    best = std::max(best, performance(mdp, pi));
    std::size_t i = 0;
    while (i < S && ++choice[i] == A) choice[i++] = 0;
    if (i == S) break;
  }
  return best;
}

// Belief after `episodes` uniform-policy episodes on a random truth with rewards in [0,1].
inline BeliefState random_belief(Rng& rng, std::size_t episodes, std::size_t max_layer = 3,
                                 std::size_t max_horizon = 3, std::size_t actions = 2) {
  const LayeredMdp truth = random_mdp(rng, max_layer, max_horizon, actions);
  const Layout& lay = truth.layout();
  MdpPrior prior = MdpPrior::uniform(lay, std::vector<double>(truth.rho().begin(), truth.rho().end()),
                                     0.0, 0.25, 0.5, 1.0);
  BeliefState b(prior);
  const Policy pi = Policy::uniform(lay.state_count(), lay.actions());
  for (std::size_t e = 0; e < episodes; ++e) simulate_episode(truth, pi, b, rng);
  return b;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& x) {
  MeanSe r;
  for (double v : x) r.mean += v;
  r.mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  return r;
}

// Monte-Carlo return of `policy` from rho, sampling rewards with the MDP's noise.
inline MeanSe rollout(const LayeredMdp& mdp, const Policy& pi, std::size_t episodes, Rng& rng) {
  const Layout& lay = mdp.layout();
  std::normal_distribution<double> z(0.0, 1.0);
  auto draw = [&](std::span<const double> p) {
    std::discrete_distribution<std::size_t> d(p.begin(), p.end());
    return d(rng);
  };
  std::vector<double> ret(episodes);
  for (auto& g : ret) {
    std::size_t s = draw(mdp.rho());
    for (std::size_t l = 0; l < lay.horizon(); ++l) {
      const std::size_t a = draw(pi.row(s));
      g += mdp.mean_reward(s, a) + mdp.reward_noise_std() * z(rng);
      if (l + 1 < lay.horizon()) s = lay.global(l + 1, draw(mdp.next(s, a)));
    }
  }
  return mean_se(ret);
}

}  // namespace testutil
