#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "klearn/mdp.hpp"

namespace klearn {

using Rng = std::mt19937_64;

// Generative model over layered MDPs with a known layout and initial distribution:
// mu[s,a] ~ N(reward_mean, reward_var) independently, P[., s, a] ~ Dirichlet(alpha),
// observed rewards are mu[s,a] plus N(0, noise_std^2).
struct MdpPrior {
  Layout layout;
  std::vector<double> rho;
  std::vector<double> reward_mean;  // per (s, a)
  std::vector<double> reward_var;   // per (s, a)
  double noise_std = 1.0;
  std::vector<double> alpha;  // flat, laid out like a transition table

  // Same prior on every (s, a); Dirichlet(alpha0) over every next-layer state.
  static MdpPrior uniform(Layout layout, std::vector<double> rho, double mean, double var,
                          double noise_std, double alpha0 = 1.0);
  // Single-state one-step MDP with one arm per entry of mean/var.
  static MdpPrior bandit(std::vector<double> mean, std::vector<double> var, double noise_std);

  void validate() const;
};

// Draws one MDP from the prior.
LayeredMdp sample_mdp(const MdpPrior& prior, Rng& rng);

// Conjugate posterior over an MDP: Gaussian (known noise variance) per mean reward and
// Dirichlet per transition row, plus the visit counts n[s,a].
//
// The reward posterior after n observations with sum S is
//   v = sigma^2 / (sigma^2 / v0 + n),   m = v * (m0 / v0 + S / sigma^2),
// which is exactly sigma^2 / (n + 1) under the default prior v0 = sigma^2.
class BeliefState {
 public:
  // Rejects priors with v0 > sigma^2: the posterior must concentrate at least as fast
  // as sigma^2 / (n + 1) for the K-learning bonus to be valid.
  explicit BeliefState(MdpPrior prior);

  const Layout& layout() const { return prior_.layout; }
  const MdpPrior& prior() const { return prior_; }
  std::span<const double> rho() const { return prior_.rho; }
  std::size_t horizon() const { return layout().horizon(); }
  std::size_t actions() const { return layout().actions(); }
  std::size_t state_count() const { return layout().state_count(); }
  bool is_bandit() const { return horizon() == 1 && layout().layer_size(0) == 1; }

  double noise_std() const { return prior_.noise_std; }
  double noise_var() const { return prior_.noise_std * prior_.noise_std; }

  // Episode counter t >= 1; observations from episode t only count from t + 1 onwards.
  std::size_t episode() const { return episode_; }
  void advance_episode() { ++episode_; }

  void update_reward(std::size_t s, std::size_t a, double reward);
  // s_next is the index of the successor within the next layer.
  void update_transition(std::size_t s, std::size_t a, std::size_t s_next);

  std::size_t count(std::size_t s, std::size_t a) const { return counts_[layout().pair(s, a)]; }
  double reward_sum(std::size_t s, std::size_t a) const { return reward_sum_[layout().pair(s, a)]; }
  double posterior_mean(std::size_t s, std::size_t a) const;
  double posterior_var(std::size_t s, std::size_t a) const;
  // Sample mean of the observed rewards (0 when unvisited); ignores the prior.
  double empirical_mean(std::size_t s, std::size_t a) const;

  // log E exp(beta mu[s,a]) under the posterior: m beta + v beta^2 / 2.
  double reward_cgf(std::size_t s, std::size_t a, double beta) const;
  // Reward CGF plus the transition-uncertainty bonus (L - l)^2 beta^2 / (2 (n + 1)),
  // where l is the 1-based layer of s. Requires beta >= 0.
  double inflated_cgf(std::size_t s, std::size_t a, double beta) const;
  // Coefficient c with inflated_cgf = m beta + c beta^2 / 2.
  double inflated_curvature(std::size_t s, std::size_t a) const;

  std::span<const double> alpha(std::size_t s, std::size_t a) const;
  std::vector<double> expected_transition(std::size_t s, std::size_t a) const;
  // Flat table of E[P] in transition layout.
  std::vector<double> expected_transitions() const;

  LayeredMdp sample_mdp(Rng& rng) const;
  // MDP with posterior-mean rewards and expected transitions.
  LayeredMdp mean_mdp() const;

  // Restores sufficient statistics (used by snapshot loading and tests).
  void restore(std::size_t episode, std::vector<std::size_t> counts,
               std::vector<double> reward_sum, std::vector<double> alpha);
  const std::vector<std::size_t>& counts() const { return counts_; }
  const std::vector<double>& reward_sums() const { return reward_sum_; }
  const std::vector<double>& alphas() const { return alpha_; }

 private:
  void check_invariants() const;

  MdpPrior prior_;
  std::size_t episode_ = 1;
  std::vector<std::size_t> counts_;
  std::vector<double> reward_sum_;
  std::vector<double> alpha_;
  std::vector<double> alpha_total_;  // per (s, a)
};

}  // namespace klearn
