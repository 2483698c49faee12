#pragma once

#include <cstddef>
#include <vector>

#include "klearn/belief.hpp"
#include "klearn/mdp.hpp"

namespace klearn {

// L x L grid: layer l is row l, the state index within a layer is the column.
// Action 0 is "left", action 1 is "right".
struct DeepSeaSpec {
  std::size_t size = 10;
  double slip = 0.05;           // probability that "right" moves left instead
  double right_penalty = 0.01;  // mean reward of "right" is -right_penalty
  double noise_std = 1.0;
};

inline constexpr std::size_t kLeft = 0;
inline constexpr std::size_t kRight = 1;

// Rewards: left has mean 0, right has mean -right_penalty, and the transition into the
// bottom-right cell (from the second-to-last row) adds +1 weighted by its probability.
// Throws ValidationError if "right" is not DP-optimal along the diagonal from the start.
LayeredMdp build_deepsea(const DeepSeaSpec& spec);

// Agent prior used for DeepSea: N(0,1) means, known noise, Dirichlet(1) over each next row.
MdpPrior deepsea_agent_prior(const DeepSeaSpec& spec);

struct BanditSpec {
  std::vector<double> prior_mean;
  std::vector<double> prior_var;
  double noise_std = 1.0;

  static BanditSpec gaussian(std::size_t arms, double mean, double var, double noise_std);
  void validate() const;
  MdpPrior prior() const;
};

// One-step single-state MDP with the given arm means.
LayeredMdp build_bandit(const BanditSpec& spec, std::vector<double> arm_means);

// Draws a ground-truth MDP from a prior (the generative model for Bayesian regret).
LayeredMdp sample_env_from_prior(const MdpPrior& prior, Rng& rng);

}  // namespace klearn
