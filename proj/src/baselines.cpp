#include "klearn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace klearn {

namespace {

bool needs_epsilon(AgentTag t) { return t == AgentTag::epsilon_greedy; }
bool needs_bonus(AgentTag t) { return t == AgentTag::ucbvi; }

void require_bandit(const BeliefState& belief, const char* who) {
  if (!belief.is_bandit())
    throw std::invalid_argument(std::string(who) + ": needs a single-state one-step belief");
}

}  // namespace

AgentKind AgentKind::make(AgentTag tag, std::optional<double> epsilon,
                          std::optional<double> bonus_scale) {
  AgentKind k;
  k.tag = tag;
  if (needs_epsilon(tag)) k.epsilon = epsilon.value_or(0.05);
  else k.epsilon = epsilon;
  if (needs_bonus(tag)) k.bonus_scale = bonus_scale.value_or(1.0);
  else k.bonus_scale = bonus_scale;
  k.validate();
  return k;
}

void AgentKind::validate() const {
  if (needs_epsilon(tag) != epsilon.has_value())
    throw std::invalid_argument("agent " + std::string(tag_name(tag)) +
                                (epsilon ? ": unexpected epsilon" : ": epsilon required"));
  if (needs_bonus(tag) != bonus_scale.has_value())
    throw std::invalid_argument("agent " + std::string(tag_name(tag)) +
                                (bonus_scale ? ": unexpected bonus_scale" : ": bonus_scale required"));
  if (epsilon && !(*epsilon >= 0.0 && *epsilon <= 1.0))
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (bonus_scale && !(*bonus_scale >= 0.0))
    throw std::invalid_argument("bonus_scale must be nonnegative");
}

std::string AgentKind::name() const { return std::string(tag_name(tag)); }

std::string_view tag_name(AgentTag tag) {
  switch (tag) {
    case AgentTag::klearning_scheduled: return "klearning_scheduled";
    case AgentTag::klearning_optimal: return "klearning_optimal";
    case AgentTag::thompson: return "thompson";
    case AgentTag::ucb: return "ucb";
    case AgentTag::psrl: return "psrl";
    case AgentTag::ucbvi: return "ucbvi";
    case AgentTag::epsilon_greedy: return "epsilon_greedy";
    case AgentTag::oracle: return "oracle";
    case AgentTag::uniform: return "uniform";
  }
  return "unknown";
}

AgentTag parse_agent_tag(std::string_view name) {
  for (AgentTag t : {AgentTag::klearning_scheduled, AgentTag::klearning_optimal,
                     AgentTag::thompson, AgentTag::ucb, AgentTag::psrl, AgentTag::ucbvi,
                     AgentTag::epsilon_greedy, AgentTag::oracle, AgentTag::uniform})
    if (tag_name(t) == name) return t;
  throw std::invalid_argument("unknown agent kind '" + std::string(name) + "'");
}

std::size_t argmax_random_tie(std::span<const double> x, Rng& rng) {
  if (x.empty()) throw std::invalid_argument("argmax of an empty range");
  const double best = *std::max_element(x.begin(), x.end());
  std::size_t ties = 0;
  for (double v : x) ties += (v == best);
  if (ties == 1)
    return static_cast<std::size_t>(std::distance(x.begin(), std::max_element(x.begin(), x.end())));
  std::uniform_int_distribution<std::size_t> pick(0, ties - 1);
  std::size_t k = pick(rng);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] == best && k-- == 0) return i;
  return 0;  // unreachable
}

Policy one_hot_policy(std::size_t actions, std::size_t action) {
  Policy p(1, actions);
  p.probs.at(action) = 1.0;
  return p;
}

Policy greedy_policy_random_tie(const Layout& layout, std::span<const double> q, Rng& rng) {
  const std::size_t A = layout.actions();
  Policy pi(layout.state_count(), A);
  for (std::size_t s = 0; s < layout.state_count(); ++s)
    pi.probs[s * A + argmax_random_tie(q.subspan(s * A, A), rng)] = 1.0;
  return pi;
}

std::size_t thompson_bandit_step(const BeliefState& belief, Rng& rng) {
  require_bandit(belief, "thompson_bandit_step");
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> draw(belief.actions());
  for (std::size_t a = 0; a < draw.size(); ++a)
    draw[a] = belief.posterior_mean(0, a) + std::sqrt(belief.posterior_var(0, a)) * z(rng);
  return argmax_random_tie(draw, rng);
}

std::size_t ucb_bandit_step(const BeliefState& belief, std::size_t t, Rng& rng) {
  require_bandit(belief, "ucb_bandit_step");
  const std::size_t A = belief.actions();
  std::vector<double> index(A);
  const double log_t = std::log(static_cast<double>(std::max<std::size_t>(t, 1)));
  for (std::size_t a = 0; a < A; ++a) {
    const std::size_t n = belief.count(0, a);
    index[a] = n == 0 ? std::numeric_limits<double>::infinity()
                      : belief.empirical_mean(0, a) +
                            belief.noise_std() * std::sqrt(2.0 * log_t / static_cast<double>(n));
  }
  return argmax_random_tie(index, rng);
}

Policy psrl_episode(const BeliefState& belief, Rng& rng) {
  const LayeredMdp sample = belief.sample_mdp(rng);
  const ValueTables vt = solve_optimal(sample);
  return greedy_policy_random_tie(belief.layout(), vt.q, rng);
}

Policy ucbvi_episode(const BeliefState& belief, std::size_t t, double bonus_scale, Rng& rng,
                     UcbviTables* tables) {
  const Layout& lay = belief.layout();
  const std::size_t A = lay.actions();
  const double L = static_cast<double>(lay.horizon());
  const double log_term =
      std::log(1.0 + static_cast<double>(t) * static_cast<double>(lay.state_count() * A));
  const auto P = belief.expected_transitions();
  std::vector<double> bonus(lay.pair_count()), q_raw(lay.pair_count()), q(lay.pair_count());
  std::vector<double> v(lay.state_count(), 0.0);
  for (std::size_t l = lay.horizon(); l-- > 0;) {
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        const std::size_t i = lay.pair(s, a);
        bonus[i] = bonus_scale * L *
                   std::sqrt(log_term / (static_cast<double>(belief.count(s, a)) + 1.0));
        double next = 0.0;
        const std::size_t n = lay.successor_count(s);
        if (n > 0) {
          const std::size_t off = lay.row_offset(s, a);
          const std::size_t base = lay.layer_begin(l + 1);
          for (std::size_t j = 0; j < n; ++j) next += P[off + j] * v[base + j];
        }
        q_raw[i] = belief.posterior_mean(s, a) + bonus[i] + next;
        q[i] = std::clamp(q_raw[i], 0.0, L);
        best = std::max(best, q[i]);
      }
      v[s] = best;
    }
  }
  if (tables) *tables = UcbviTables{bonus, q_raw, q};
  return greedy_policy_random_tie(lay, q, rng);
}

Policy epsilon_greedy_episode(const BeliefState& belief, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon_greedy_episode: epsilon must lie in [0, 1]");
  const ValueTables vt = solve_optimal(belief.mean_mdp());
  Policy pi = greedy_policy_random_tie(belief.layout(), vt.q, rng);
  const double u = epsilon / static_cast<double>(belief.actions());
  for (double& p : pi.probs) p = (1.0 - epsilon) * p + u;
  return pi;
}

}  // namespace klearn
