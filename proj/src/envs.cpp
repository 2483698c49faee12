#include "klearn/envs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace klearn {

LayeredMdp build_deepsea(const DeepSeaSpec& spec) {
  const std::size_t L = spec.size;
  if (L < 2) throw ValidationError("deepsea: size must be at least 2");
  if (!(spec.slip >= 0.0 && spec.slip < 0.5)) throw ValidationError("deepsea: slip must be in [0, 0.5)");
  if (!(spec.right_penalty > 0.0)) throw ValidationError("deepsea: right_penalty must be positive");
  if (!(spec.noise_std > 0.0)) throw ValidationError("deepsea: noise_std must be positive");

  Layout layout(std::vector<std::size_t>(L, L), 2);
  std::vector<double> transition(layout.transition_size(), 0.0);
  std::vector<double> reward(layout.pair_count(), 0.0);
  const std::size_t corner = L - 1;
  for (std::size_t r = 0; r < L; ++r) {
    for (std::size_t c = 0; c < L; ++c) {
      const std::size_t s = layout.global(r, c);
      reward[layout.pair(s, kLeft)] = 0.0;
      reward[layout.pair(s, kRight)] = -spec.right_penalty;
      if (r + 1 == L) continue;
      const std::size_t left_col = c == 0 ? 0 : c - 1;
      const std::size_t right_col = std::min(c + 1, L - 1);
      double* left_row = transition.data() + layout.row_offset(s, kLeft);
      double* right_row = transition.data() + layout.row_offset(s, kRight);
      left_row[left_col] = 1.0;
      right_row[right_col] += 1.0 - spec.slip;
      right_row[left_col] += spec.slip;
      if (r + 2 == L) {
        reward[layout.pair(s, kLeft)] += left_row[corner];
        reward[layout.pair(s, kRight)] += right_row[corner];
      }
    }
  }
  std::vector<double> rho(L, 0.0);
  rho[0] = 1.0;
  LayeredMdp mdp(std::move(layout), std::move(transition), std::move(reward), spec.noise_std,
                 std::move(rho));

  const ValueTables vt = solve_optimal(mdp);
  for (std::size_t r = 0; r + 1 < L; ++r) {
    const std::size_t s = mdp.layout().global(r, r);
    if (!(vt.q[mdp.layout().pair(s, kRight)] > vt.q[mdp.layout().pair(s, kLeft)])) {
      std::ostringstream os;
      os << "deepsea: moving right is not optimal at row " << r
         << " of the diagonal; use a smaller right_penalty or slip";
      throw ValidationError(os.str());
    }
  }
  return mdp;
}

MdpPrior deepsea_agent_prior(const DeepSeaSpec& spec) {
  std::vector<double> rho(spec.size, 0.0);
  rho.at(0) = 1.0;
  return MdpPrior::uniform(Layout(std::vector<std::size_t>(spec.size, spec.size), 2),
                           std::move(rho), 0.0, 1.0, spec.noise_std, 1.0);
}

BanditSpec BanditSpec::gaussian(std::size_t arms, double mean, double var, double noise_std) {
  BanditSpec b{std::vector<double>(arms, mean), std::vector<double>(arms, var), noise_std};
  b.validate();
  return b;
}

void BanditSpec::validate() const {
  if (prior_mean.size() < 2) throw ValidationError("bandit: need at least two arms");
  if (prior_var.size() != prior_mean.size())
    throw ValidationError("bandit: prior_mean and prior_var lengths differ");
  for (double v : prior_var)
    if (!(v > 0.0)) throw ValidationError("bandit: prior variances must be positive");
  if (!(noise_std > 0.0)) throw ValidationError("bandit: noise_std must be positive");
}

MdpPrior BanditSpec::prior() const {
  validate();
  return MdpPrior::bandit(prior_mean, prior_var, noise_std);
}

LayeredMdp build_bandit(const BanditSpec& spec, std::vector<double> arm_means) {
  if (arm_means.size() != spec.prior_mean.size())
    throw ValidationError("bandit: arm mean count does not match the prior");
  const std::size_t A = arm_means.size();
  return LayeredMdp(Layout({1}, A), {}, std::move(arm_means), spec.noise_std, {1.0});
}

LayeredMdp sample_env_from_prior(const MdpPrior& prior, Rng& rng) {
  return sample_mdp(prior, rng);
}

}  // namespace klearn
