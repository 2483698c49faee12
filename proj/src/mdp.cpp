#include "klearn/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace klearn {

namespace {

constexpr double kStochasticTol = 1e-12;

std::string pair_name(std::size_t s, std::size_t a) {
  std::ostringstream os;
  os << "(s=" << s << ", a=" << a << ")";
  return os.str();
}

void check_distribution(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(what + ": entry outside [0,1]");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": sums to " << sum << ", not 1";
    throw ValidationError(os.str());
  }
}

}  // namespace

Layout::Layout(std::vector<std::size_t> layer_sizes, std::size_t actions)
    : sizes_(std::move(layer_sizes)), actions_(actions) {
  if (sizes_.empty()) throw ValidationError("layout: horizon must be at least 1");
  if (actions_ == 0) throw ValidationError("layout: need at least one action");
  begin_.reserve(sizes_.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < sizes_.size(); ++l) {
    if (sizes_[l] == 0) throw ValidationError("layout: empty layer " + std::to_string(l));
    begin_.push_back(offset);
    for (std::size_t i = 0; i < sizes_[l]; ++i) layer_of_.push_back(l);
    offset += sizes_[l];
  }
  row_begin_.resize(offset);
  std::size_t t = 0;
  for (std::size_t s = 0; s < offset; ++s) {
    row_begin_[s] = t;
    t += actions_ * successor_count(s);
  }
  transition_size_ = t;
}

LayeredMdp::LayeredMdp(Layout layout, std::vector<double> transition,
                       std::vector<double> mean_reward, double reward_noise_std,
                       std::vector<double> rho, bool bounded_rewards)
    : layout_(std::move(layout)),
      transition_(std::move(transition)),
      reward_(std::move(mean_reward)),
      noise_std_(reward_noise_std),
      rho_(std::move(rho)),
      bounded_(bounded_rewards) {
  if (transition_.size() != layout_.transition_size())
    throw ValidationError("mdp: transition table has wrong size");
  if (reward_.size() != layout_.pair_count())
    throw ValidationError("mdp: mean reward table has wrong size");
  if (rho_.size() != layout_.layer_size(0))
    throw ValidationError("mdp: initial distribution must cover the first layer");
  if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_))
    throw ValidationError("mdp: reward noise std must be finite and nonnegative");
  validate_transition(layout_, transition_);
  check_distribution(rho_, "mdp: initial distribution");
  for (std::size_t i = 0; i < reward_.size(); ++i) {
    const double r = reward_[i];
    if (!std::isfinite(r)) throw ValidationError("mdp: non-finite mean reward");
    if (bounded_ && (r < 0.0 || r > 1.0))
      throw ValidationError("mdp: mean reward outside [0,1] at " +
                            pair_name(i / layout_.actions(), i % layout_.actions()));
  }
}

Policy Policy::uniform(std::size_t state_count, std::size_t action_count) {
  Policy p(state_count, action_count);
  std::fill(p.probs.begin(), p.probs.end(), 1.0 / static_cast<double>(action_count));
  return p;
}

void validate_transition(const Layout& layout, std::span<const double> transition) {
  if (transition.size() != layout.transition_size())
    throw ValidationError("transition table has wrong size");
  for (std::size_t s = 0; s < layout.state_count(); ++s) {
    const std::size_t n = layout.successor_count(s);
    if (n == 0) continue;
    for (std::size_t a = 0; a < layout.actions(); ++a)
      check_distribution(transition.subspan(layout.row_offset(s, a), n),
                         "transition row " + pair_name(s, a));
  }
}

void validate_policy(const Layout& layout, const Policy& policy) {
  if (policy.actions != layout.actions() || policy.probs.size() != layout.pair_count())
    throw ValidationError("policy does not match the MDP's state-action space");
  for (std::size_t s = 0; s < layout.state_count(); ++s)
    check_distribution(policy.row(s), "policy row s=" + std::to_string(s));
}

LayeredMdp unroll(const StationaryMdp& mdp, std::size_t horizon) {
  const std::size_t S = mdp.states, A = mdp.actions;
  if (horizon == 0) throw ValidationError("unroll: horizon must be at least 1");
  if (S == 0 || A == 0) throw ValidationError("unroll: empty state or action set");
  if (mdp.transition.size() != S * A * S) throw ValidationError("unroll: transition size");
  if (mdp.mean_reward.size() != S * A) throw ValidationError("unroll: reward size");
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a)
      check_distribution(std::span<const double>(mdp.transition).subspan((s * A + a) * S, S),
                         "unroll: transition row " + pair_name(s, a));

  Layout layout(std::vector<std::size_t>(horizon, S), A);
  std::vector<double> transition;
  transition.reserve(layout.transition_size());
  std::vector<double> reward;
  reward.reserve(layout.pair_count());
  for (std::size_t l = 0; l < horizon; ++l) {
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        reward.push_back(mdp.mean_reward[s * A + a]);
        if (l + 1 < horizon) {
          auto row = mdp.transition.begin() + static_cast<std::ptrdiff_t>((s * A + a) * S);
          transition.insert(transition.end(), row, row + static_cast<std::ptrdiff_t>(S));
        }
      }
    }
  }
  return LayeredMdp(std::move(layout), std::move(transition), std::move(reward),
                    mdp.reward_noise_std, mdp.rho);
}

ValueTables solve_optimal(const LayeredMdp& mdp) {
  const Layout& lay = mdp.layout();
  const std::size_t A = lay.actions();
  ValueTables out{std::vector<double>(lay.pair_count()), std::vector<double>(lay.state_count())};
  for (std::size_t l = lay.horizon(); l-- > 0;) {
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s) {
      double best = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        double q = mdp.mean_reward(s, a);
        if (l + 1 < lay.horizon()) {
          auto p = mdp.next(s, a);
          const std::size_t base = lay.layer_begin(l + 1);
          for (std::size_t j = 0; j < p.size(); ++j) q += p[j] * out.v[base + j];
        }
        out.q[lay.pair(s, a)] = q;
        if (a == 0 || q > best) best = q;
      }
      out.v[s] = best;
    }
  }
  return out;
}

ValueTables evaluate_policy(const LayeredMdp& mdp, const Policy& policy) {
  const Layout& lay = mdp.layout();
  validate_policy(lay, policy);
  const std::size_t A = lay.actions();
  ValueTables out{std::vector<double>(lay.pair_count()), std::vector<double>(lay.state_count())};
  for (std::size_t l = lay.horizon(); l-- > 0;) {
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s) {
      double v = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        double q = mdp.mean_reward(s, a);
        if (l + 1 < lay.horizon()) {
          auto p = mdp.next(s, a);
          const std::size_t base = lay.layer_begin(l + 1);
          for (std::size_t j = 0; j < p.size(); ++j) q += p[j] * out.v[base + j];
        }
        out.q[lay.pair(s, a)] = q;
        v += policy(s, a) * q;
      }
      out.v[s] = v;
    }
  }
  return out;
}

double performance(const LayeredMdp& mdp, const Policy& policy) {
  const ValueTables vt = evaluate_policy(mdp, policy);
  double j = 0.0;
  auto rho = mdp.rho();
  for (std::size_t i = 0; i < rho.size(); ++i) j += rho[i] * vt.v[i];
  return j;
}

OccupancyMeasure occupancy(const Layout& layout, std::span<const double> transition,
                           std::span<const double> rho, const Policy& policy) {
  if (rho.size() != layout.layer_size(0))
    throw ValidationError("occupancy: initial distribution must cover the first layer");
  if (transition.size() != layout.transition_size())
    throw ValidationError("occupancy: transition table has wrong size");
  if (policy.actions != layout.actions() || policy.probs.size() != layout.pair_count())
    throw ValidationError("occupancy: policy does not match layout");
  const std::size_t A = layout.actions();
  OccupancyMeasure occ{std::vector<double>(layout.pair_count(), 0.0)};
  std::vector<double> state_mass(layout.state_count(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) state_mass[i] = rho[i];
  for (std::size_t l = 0; l < layout.horizon(); ++l) {
    for (std::size_t s = layout.layer_begin(l); s < layout.layer_end(l); ++s) {
      const double mass = state_mass[s];
      for (std::size_t a = 0; a < A; ++a) {
        const double lam = policy(s, a) * mass;
        occ.lambda[layout.pair(s, a)] = lam;
        if (l + 1 < layout.horizon() && lam != 0.0) {
          auto p = transition.subspan(layout.row_offset(s, a), layout.successor_count(s));
          const std::size_t base = layout.layer_begin(l + 1);
          for (std::size_t j = 0; j < p.size(); ++j) state_mass[base + j] += p[j] * lam;
        }
      }
    }
  }
  return occ;
}

OccupancyMeasure occupancy(const LayeredMdp& mdp, const Policy& policy) {
  return occupancy(mdp.layout(), mdp.transition(), mdp.rho(), policy);
}

Policy greedy_policy(const Layout& layout, std::span<const double> q) {
  const std::size_t A = layout.actions();
  Policy pi(layout.state_count(), A);
  for (std::size_t s = 0; s < layout.state_count(); ++s) {
    auto row = q.subspan(s * A, A);
    const auto best = static_cast<std::size_t>(
        std::distance(row.begin(), std::max_element(row.begin(), row.end())));
    pi.probs[s * A + best] = 1.0;
  }
  return pi;
}

}  // namespace klearn
