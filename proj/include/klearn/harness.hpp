#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "klearn/baselines.hpp"
#include "klearn/belief.hpp"
#include "klearn/envs.hpp"
#include "klearn/io.hpp"
#include "klearn/klearning.hpp"

namespace klearn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EnvKind { bandit, deepsea, random_mdp };

struct EnvConfig {
  EnvKind kind = EnvKind::bandit;
  BanditSpec bandit;            // kind == bandit: the true prior over arm means and true noise
  DeepSeaSpec deepsea;          // kind == deepsea
  std::optional<MdpPrior> mdp;  // kind == random_mdp

  std::size_t horizon() const;
};

struct LogCadence {
  enum class Kind { geometric, every } kind = Kind::geometric;
  double ratio = 1.25;        // geometric
  std::size_t interval = 1;  // every
};

// Episode indices (1-based) at which a run is logged; always ends with `episodes`.
std::vector<std::size_t> log_points(std::size_t episodes, const LogCadence& cadence);

struct AgentConfig {
  AgentKind kind;
  std::string label;  // CSV key; defaults to the tag name
};

struct ExperimentConfig {
  EnvConfig env;
  std::vector<AgentConfig> agents;
  std::size_t episodes = 0;  // N; timesteps T = N * L
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  LogCadence cadence;
  std::string output = "out";
  std::optional<MdpPrior> agent_prior;  // overrides the environment prior for every agent
  bool record_wall_time = false;
  std::size_t parallel = 1;
  LineSearchOptions tau_search;

  void validate() const;
  // Prior each agent's belief starts from.
  MdpPrior initial_agent_prior() const;
};

ExperimentConfig config_from_json(const Json& doc);
Json config_to_json(const ExperimentConfig& config);

// 64-bit mix of (base seed, stream name, run) used to seed every RNG stream.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t run);

// The ground-truth environment for a run (sampled from the env prior unless fixed).
LayeredMdp make_environment(const ExperimentConfig& config, std::size_t run);

struct LogRow {
  std::size_t episode = 0;
  double cum_regret = 0.0;
  std::optional<double> cum_bound;
  std::optional<double> tau;
  std::optional<double> wall_ms;
};

struct RunRecord {
  std::string agent;
  std::size_t run = 0;
  std::vector<LogRow> rows;
};

// What an agent decided for one episode.
struct EpisodePlan {
  Policy policy;
  std::optional<double> tau;
  std::optional<double> bound;  // Phi^t for K-learning agents
};

EpisodePlan plan_episode(const AgentKind& kind, const BeliefState& belief, Rng& rng,
                         const LayeredMdp& truth, const LineSearchOptions& tau_search = {});

// Samples one trajectory under `policy` and feeds every observation to `belief`.
void simulate_episode(const LayeredMdp& truth, const Policy& policy, BeliefState& belief,
                      Rng& rng);

RunRecord run_agent(const ExperimentConfig& config, std::size_t agent_index, std::size_t run);

// All (agent, run) records in (agent order, run) order. Throws NumericError on
// non-finite values.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

struct SummaryRow {
  std::string agent;
  std::size_t episode = 0;
  std::size_t runs = 0;
  double mean_regret = 0.0;
  double se_regret = 0.0;
  std::optional<double> mean_bound;
  std::optional<double> se_bound;
};

struct FinalRow {
  std::string agent;
  std::size_t episode = 0;
  double mean_regret = 0.0;
  double se_regret = 0.0;
  double ratio = 0.0;  // mean regret / lowest mean regret among agents
};

struct Summary {
  std::vector<SummaryRow> rows;  // sorted by (agent, episode)
  std::vector<FinalRow> finals;  // one per agent at its last logged episode
};

Summary aggregate(const std::vector<RunRecord>& records);

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

// Header: agent,run,episode,cum_regret,cum_bound,tau,wall_ms
void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);
void emit_summary_csv(const Summary& summary, const std::filesystem::path& path);
std::string format_summary_table(const Summary& summary);

}  // namespace klearn
