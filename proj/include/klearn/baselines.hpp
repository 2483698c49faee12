#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "klearn/belief.hpp"
#include "klearn/mdp.hpp"

namespace klearn {

enum class AgentTag {
  klearning_scheduled,
  klearning_optimal,
  thompson,
  ucb,
  psrl,
  ucbvi,
  epsilon_greedy,
  // Harness diagnostics, not learning agents.
  oracle,
  uniform,
};

struct AgentKind {
  AgentTag tag = AgentTag::klearning_scheduled;
  std::optional<double> epsilon;      // epsilon_greedy only
  std::optional<double> bonus_scale;  // ucbvi only

  // Fills in defaults (epsilon 0.05, bonus scale 1) and checks parameters are present
  // exactly when the tag needs them.
  static AgentKind make(AgentTag tag, std::optional<double> epsilon = std::nullopt,
                        std::optional<double> bonus_scale = std::nullopt);
  void validate() const;
  std::string name() const;
};

std::string_view tag_name(AgentTag tag);
AgentTag parse_agent_tag(std::string_view name);

// Index of a maximal entry; ties broken uniformly at random.
std::size_t argmax_random_tie(std::span<const double> x, Rng& rng);
// Deterministic greedy policy on q with ties broken uniformly at random per state.
Policy greedy_policy_random_tie(const Layout& layout, std::span<const double> q, Rng& rng);
Policy one_hot_policy(std::size_t actions, std::size_t action);

std::size_t thompson_bandit_step(const BeliefState& belief, Rng& rng);
// argmax of empirical mean + sigma sqrt(2 log t / n); unpulled arms go first.
std::size_t ucb_bandit_step(const BeliefState& belief, std::size_t t, Rng& rng);

Policy psrl_episode(const BeliefState& belief, Rng& rng);

// Optimistic DP with bonus bonus_scale * L * sqrt(log(1 + t |X| A) / (n + 1)), values clipped
// to [0, L]. Optional outputs expose the unclipped optimistic values and the bonuses.
struct UcbviTables {
  std::vector<double> bonus;
  std::vector<double> q_unclipped;
  std::vector<double> q;
};
Policy ucbvi_episode(const BeliefState& belief, std::size_t t, double bonus_scale, Rng& rng,
                     UcbviTables* tables = nullptr);

Policy epsilon_greedy_episode(const BeliefState& belief, double epsilon, Rng& rng);

}  // namespace klearn
