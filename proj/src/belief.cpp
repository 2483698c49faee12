#include "klearn/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace klearn {

namespace {

std::vector<double> draw_dirichlet(std::span<const double> alpha, Rng& rng) {
  std::vector<double> out(alpha.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    std::gamma_distribution<double> g(alpha[i], 1.0);
    out[i] = g(rng);
    sum += out[i];
  }
  if (!(sum > 0.0)) {
    // All gamma draws underflowed (tiny alphas): fall back to the largest alpha.
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t best = 0;
    for (std::size_t i = 1; i < alpha.size(); ++i)
      if (alpha[i] > alpha[best]) best = i;
    out[best] = 1.0;
    return out;
  }
  for (double& x : out) x /= sum;
  // Fold rounding error into the largest entry so the row sums to 1 within 1e-12.
  double total = 0.0;
  std::size_t big = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    total += out[i];
    if (out[i] > out[big]) big = i;
  }
  out[big] += 1.0 - total;
  if (out[big] < 0.0) out[big] = 0.0;
  return out;
}

LayeredMdp draw_mdp(const Layout& layout, std::span<const double> rho,
                    std::span<const double> mean, std::span<const double> var,
                    std::span<const double> alpha, double noise_std, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> reward(layout.pair_count());
  for (std::size_t i = 0; i < reward.size(); ++i) reward[i] = mean[i] + std::sqrt(var[i]) * z(rng);
  std::vector<double> transition(layout.transition_size());
  for (std::size_t s = 0; s < layout.state_count(); ++s) {
    const std::size_t n = layout.successor_count(s);
    if (n == 0) continue;
    for (std::size_t a = 0; a < layout.actions(); ++a) {
      const std::size_t off = layout.row_offset(s, a);
      auto row = draw_dirichlet(alpha.subspan(off, n), rng);
      std::copy(row.begin(), row.end(), transition.begin() + static_cast<std::ptrdiff_t>(off));
    }
  }
  return LayeredMdp(layout, std::move(transition), std::move(reward), noise_std,
                    std::vector<double>(rho.begin(), rho.end()));
}

}  // namespace

MdpPrior MdpPrior::uniform(Layout layout, std::vector<double> rho, double mean, double var,
                           double noise_std, double alpha0) {
  MdpPrior p;
  p.reward_mean.assign(layout.pair_count(), mean);
  p.reward_var.assign(layout.pair_count(), var);
  p.alpha.assign(layout.transition_size(), alpha0);
  p.noise_std = noise_std;
  p.rho = std::move(rho);
  p.layout = std::move(layout);
  p.validate();
  return p;
}

MdpPrior MdpPrior::bandit(std::vector<double> mean, std::vector<double> var, double noise_std) {
  if (mean.size() != var.size()) throw ValidationError("bandit prior: mean/var length mismatch");
  MdpPrior p;
  p.layout = Layout({1}, mean.size());
  p.rho = {1.0};
  p.reward_mean = std::move(mean);
  p.reward_var = std::move(var);
  p.noise_std = noise_std;
  p.validate();
  return p;
}

void MdpPrior::validate() const {
  if (layout.horizon() == 0) throw ValidationError("prior: empty layout");
  if (rho.size() != layout.layer_size(0)) throw ValidationError("prior: rho size");
  double total = 0.0;
  for (double r : rho) {
    if (!(r >= 0.0)) throw ValidationError("prior: negative rho entry");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("prior: rho does not sum to 1");
  if (reward_mean.size() != layout.pair_count() || reward_var.size() != layout.pair_count())
    throw ValidationError("prior: reward tables have wrong size");
  for (std::size_t i = 0; i < reward_mean.size(); ++i) {
    if (!std::isfinite(reward_mean[i])) throw ValidationError("prior: non-finite reward mean");
    if (!(reward_var[i] >= 0.0) || !std::isfinite(reward_var[i]))
      throw ValidationError("prior: reward variance must be finite and nonnegative");
  }
  if (!(noise_std > 0.0) || !std::isfinite(noise_std))
    throw ValidationError("prior: noise std must be positive");
  if (alpha.size() != layout.transition_size()) throw ValidationError("prior: alpha size");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("prior: alpha must be positive");
}

LayeredMdp sample_mdp(const MdpPrior& prior, Rng& rng) {
  return draw_mdp(prior.layout, prior.rho, prior.reward_mean, prior.reward_var, prior.alpha,
                  prior.noise_std, rng);
}

BeliefState::BeliefState(MdpPrior prior) : prior_(std::move(prior)) {
  prior_.validate();
  const double s2 = noise_var();
  for (std::size_t i = 0; i < prior_.reward_var.size(); ++i) {
    if (!(prior_.reward_var[i] > 0.0))
      throw ValidationError("belief: prior reward variance must be positive");
    if (prior_.reward_var[i] > s2 * (1.0 + 1e-12))
      throw ValidationError(
          "belief: prior reward variance exceeds the noise variance; the posterior would not "
          "concentrate as sigma^2/(n+1)");
  }
  for (std::size_t s = 0; s < state_count(); ++s) {
    const std::size_t n = layout().successor_count(s);
    for (std::size_t a = 0; n > 0 && a < actions(); ++a) {
      auto row = std::span<const double>(prior_.alpha).subspan(layout().row_offset(s, a), n);
      if (std::accumulate(row.begin(), row.end(), 0.0) < 1.0)
        throw ValidationError("belief: Dirichlet prior needs a total pseudo-count of at least 1");
    }
  }
  counts_.assign(layout().pair_count(), 0);
  reward_sum_.assign(layout().pair_count(), 0.0);
  alpha_ = prior_.alpha;
  alpha_total_.assign(layout().pair_count(), 0.0);
  for (std::size_t s = 0; s < state_count(); ++s) {
    const std::size_t n = layout().successor_count(s);
    for (std::size_t a = 0; n > 0 && a < actions(); ++a) {
      auto row = std::span<const double>(alpha_).subspan(layout().row_offset(s, a), n);
      alpha_total_[layout().pair(s, a)] = std::accumulate(row.begin(), row.end(), 0.0);
    }
  }
}

void BeliefState::update_reward(std::size_t s, std::size_t a, double reward) {
  if (!std::isfinite(reward)) throw std::invalid_argument("update_reward: non-finite reward");
  const std::size_t i = layout().pair(s, a);
  counts_.at(i) += 1;
  reward_sum_[i] += reward;
}

void BeliefState::update_transition(std::size_t s, std::size_t a, std::size_t s_next) {
  const std::size_t n = layout().successor_count(s);
  if (n == 0) throw ValidationError("update_transition: final-layer state has no successors");
  if (s_next >= n) throw ValidationError("update_transition: successor not in the next layer");
  alpha_[layout().row_offset(s, a) + s_next] += 1.0;
  alpha_total_[layout().pair(s, a)] += 1.0;
}

double BeliefState::posterior_var(std::size_t s, std::size_t a) const {
  const std::size_t i = layout().pair(s, a);
  const double s2 = noise_var();
  return s2 / (s2 / prior_.reward_var[i] + static_cast<double>(counts_[i]));
}

double BeliefState::posterior_mean(std::size_t s, std::size_t a) const {
  const std::size_t i = layout().pair(s, a);
  const double v = posterior_var(s, a);
  return v * (prior_.reward_mean[i] / prior_.reward_var[i] + reward_sum_[i] / noise_var());
}

double BeliefState::empirical_mean(std::size_t s, std::size_t a) const {
  const std::size_t i = layout().pair(s, a);
  return counts_[i] == 0 ? 0.0 : reward_sum_[i] / static_cast<double>(counts_[i]);
}

double BeliefState::reward_cgf(std::size_t s, std::size_t a, double beta) const {
  return posterior_mean(s, a) * beta + 0.5 * posterior_var(s, a) * beta * beta;
}

double BeliefState::inflated_curvature(std::size_t s, std::size_t a) const {
  const double span = static_cast<double>(layout().steps_to_go(s));
  return posterior_var(s, a) + span * span / (static_cast<double>(count(s, a)) + 1.0);
}

double BeliefState::inflated_cgf(std::size_t s, std::size_t a, double beta) const {
  if (beta < 0.0) throw std::invalid_argument("inflated_cgf: beta must be nonnegative");
  const double span = static_cast<double>(layout().steps_to_go(s));
  return reward_cgf(s, a, beta) +
         span * span * beta * beta / (2.0 * (static_cast<double>(count(s, a)) + 1.0));
}

std::span<const double> BeliefState::alpha(std::size_t s, std::size_t a) const {
  return std::span<const double>(alpha_).subspan(layout().row_offset(s, a),
                                                 layout().successor_count(s));
}

std::vector<double> BeliefState::expected_transition(std::size_t s, std::size_t a) const {
  auto al = alpha(s, a);
  std::vector<double> p(al.begin(), al.end());
  const double total = alpha_total_[layout().pair(s, a)];
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> BeliefState::expected_transitions() const {
  std::vector<double> p(alpha_.size());
  for (std::size_t s = 0; s < state_count(); ++s) {
    const std::size_t n = layout().successor_count(s);
    for (std::size_t a = 0; n > 0 && a < actions(); ++a) {
      const std::size_t off = layout().row_offset(s, a);
      const double total = alpha_total_[layout().pair(s, a)];
      for (std::size_t j = 0; j < n; ++j) p[off + j] = alpha_[off + j] / total;
    }
  }
  return p;
}

LayeredMdp BeliefState::sample_mdp(Rng& rng) const {
  std::vector<double> mean(layout().pair_count()), var(layout().pair_count());
  for (std::size_t s = 0; s < state_count(); ++s)
    for (std::size_t a = 0; a < actions(); ++a) {
      mean[layout().pair(s, a)] = posterior_mean(s, a);
      var[layout().pair(s, a)] = posterior_var(s, a);
    }
  return draw_mdp(layout(), prior_.rho, mean, var, alpha_, prior_.noise_std, rng);
}

LayeredMdp BeliefState::mean_mdp() const {
  std::vector<double> mean(layout().pair_count());
  for (std::size_t s = 0; s < state_count(); ++s)
    for (std::size_t a = 0; a < actions(); ++a) mean[layout().pair(s, a)] = posterior_mean(s, a);
  return LayeredMdp(layout(), expected_transitions(), std::move(mean), prior_.noise_std,
                    prior_.rho);
}

void BeliefState::restore(std::size_t episode, std::vector<std::size_t> counts,
                          std::vector<double> reward_sum, std::vector<double> alpha) {
  if (episode < 1) throw ValidationError("belief: episode counter must be >= 1");
  if (counts.size() != layout().pair_count() || reward_sum.size() != layout().pair_count() ||
      alpha.size() != layout().transition_size())
    throw ValidationError("belief: sufficient statistics have wrong sizes");
  episode_ = episode;
  counts_ = std::move(counts);
  reward_sum_ = std::move(reward_sum);
  alpha_ = std::move(alpha);
  for (std::size_t s = 0; s < state_count(); ++s) {
    const std::size_t n = layout().successor_count(s);
    for (std::size_t a = 0; n > 0 && a < actions(); ++a) {
      auto row = this->alpha(s, a);
      alpha_total_[layout().pair(s, a)] = std::accumulate(row.begin(), row.end(), 0.0);
    }
  }
  check_invariants();
}

void BeliefState::check_invariants() const {
  for (std::size_t i = 0; i < reward_sum_.size(); ++i)
    if (!std::isfinite(reward_sum_[i])) throw ValidationError("belief: non-finite reward sum");
  for (double a : alpha_)
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("belief: alpha must be positive");
  for (std::size_t s = 0; s < state_count(); ++s) {
    const std::size_t n = layout().successor_count(s);
    for (std::size_t a = 0; n > 0 && a < actions(); ++a) {
      auto row = alpha(s, a);
      auto prior_row =
          std::span<const double>(prior_.alpha).subspan(layout().row_offset(s, a), n);
      double observed = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = row[j] - prior_row[j];
        if (d < -1e-9) throw ValidationError("belief: alpha below its prior value");
        observed += d;
      }
      const double c = static_cast<double>(count(s, a));
      if (std::abs(observed - c) > 1e-9 * std::max(1.0, c))
        throw ValidationError("belief: transition counts disagree with visit counts");
    }
  }
}

}  // namespace klearn
