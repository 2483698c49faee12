#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace klearn {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape of a finite-horizon layered MDP: L layers of states, A actions everywhere.
// States carry a flat global index, layer-major. Transitions only go from layer l to l+1,
// so a row P[., s, a] has |S_{l+1}| entries and rows of final-layer states are empty.
class Layout {
 public:
  Layout() = default;
  Layout(std::vector<std::size_t> layer_sizes, std::size_t actions);

  std::size_t horizon() const { return sizes_.size(); }
  std::size_t actions() const { return actions_; }
  std::size_t state_count() const { return layer_of_.size(); }
  std::size_t pair_count() const { return state_count() * actions_; }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }

  std::size_t layer_size(std::size_t l) const { return sizes_[l]; }
  std::size_t layer_begin(std::size_t l) const { return begin_[l]; }
  std::size_t layer_end(std::size_t l) const { return begin_[l] + sizes_[l]; }
  std::size_t layer_of(std::size_t s) const { return layer_of_[s]; }
  std::size_t local_index(std::size_t s) const { return s - begin_[layer_of_[s]]; }
  std::size_t global(std::size_t layer, std::size_t local) const { return begin_[layer] + local; }

  std::size_t pair(std::size_t s, std::size_t a) const { return s * actions_ + a; }
  // Number of successor states of s (0 on the final layer).
  std::size_t successor_count(std::size_t s) const {
    const std::size_t l = layer_of_[s];
    return l + 1 < sizes_.size() ? sizes_[l + 1] : 0;
  }
  // Offset of row P[., s, a] inside a flat transition buffer.
  std::size_t row_offset(std::size_t s, std::size_t a) const {
    return row_begin_[s] + a * successor_count(s);
  }
  std::size_t transition_size() const { return transition_size_; }

  // Steps remaining after acting in layer l (0-based), i.e. L - l in 1-based layer numbering.
  std::size_t steps_to_go(std::size_t s) const { return sizes_.size() - 1 - layer_of_[s]; }

  bool operator==(const Layout& other) const {
    return sizes_ == other.sizes_ && actions_ == other.actions_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::size_t actions_ = 0;
  std::vector<std::size_t> begin_;
  std::vector<std::size_t> layer_of_;
  std::vector<std::size_t> row_begin_;
  std::size_t transition_size_ = 0;
};

// Ground-truth finite-horizon MDP on a layered DAG. Immutable after construction.
class LayeredMdp {
 public:
  LayeredMdp(Layout layout, std::vector<double> transition, std::vector<double> mean_reward,
             double reward_noise_std, std::vector<double> rho, bool bounded_rewards = false);

  const Layout& layout() const { return layout_; }
  std::size_t horizon() const { return layout_.horizon(); }
  std::size_t actions() const { return layout_.actions(); }
  std::size_t state_count() const { return layout_.state_count(); }

  std::span<const double> next(std::size_t s, std::size_t a) const {
    return {transition_.data() + layout_.row_offset(s, a), layout_.successor_count(s)};
  }
  double mean_reward(std::size_t s, std::size_t a) const { return reward_[layout_.pair(s, a)]; }
  double reward_noise_std() const { return noise_std_; }
  std::span<const double> rho() const { return rho_; }
  bool bounded_rewards() const { return bounded_; }

  const std::vector<double>& transition() const { return transition_; }
  const std::vector<double>& mean_rewards() const { return reward_; }

 private:
  Layout layout_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double noise_std_;
  std::vector<double> rho_;
  bool bounded_;
};

// A time-homogeneous MDP over S states, used as input to unroll().
struct StationaryMdp {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<double> transition;   // P[s, a, s'] at index (s * A + a) * S + s'
  std::vector<double> mean_reward;  // mu[s, a] at index s * A + a
  double reward_noise_std = 0.0;
  std::vector<double> rho;  // over S
};

struct Policy {
  std::size_t actions = 0;
  std::vector<double> probs;  // pi[s, a] at index s * A + a

  Policy() = default;
  Policy(std::size_t state_count, std::size_t action_count)
      : actions(action_count), probs(state_count * action_count, 0.0) {}

  std::size_t state_count() const { return actions == 0 ? 0 : probs.size() / actions; }
  std::span<const double> row(std::size_t s) const { return {probs.data() + s * actions, actions}; }
  std::span<double> row(std::size_t s) { return {probs.data() + s * actions, actions}; }
  double operator()(std::size_t s, std::size_t a) const { return probs[s * actions + a]; }

  static Policy uniform(std::size_t state_count, std::size_t action_count);
};

struct ValueTables {
  std::vector<double> q;  // Q[s, a] at index s * A + a
  std::vector<double> v;  // V[s]
};

struct OccupancyMeasure {
  std::vector<double> lambda;  // lambda[s, a] at index s * A + a
};

// Checks that every row of a flat transition buffer is a distribution (1e-12).
void validate_transition(const Layout& layout, std::span<const double> transition);
void validate_policy(const Layout& layout, const Policy& policy);

LayeredMdp unroll(const StationaryMdp& mdp, std::size_t horizon);

ValueTables solve_optimal(const LayeredMdp& mdp);
ValueTables evaluate_policy(const LayeredMdp& mdp, const Policy& policy);
double performance(const LayeredMdp& mdp, const Policy& policy);

// Forward occupancy recursion under (expected) dynamics.
OccupancyMeasure occupancy(const Layout& layout, std::span<const double> transition,
                           std::span<const double> rho, const Policy& policy);
OccupancyMeasure occupancy(const LayeredMdp& mdp, const Policy& policy);

// Deterministic greedy policy; ties go to the lowest action index.
Policy greedy_policy(const Layout& layout, std::span<const double> q);

}  // namespace klearn
