#include "klearn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace klearn {

// ---------------------------------------------------------------------------
// Configuration

std::size_t EnvConfig::horizon() const {
  switch (kind) {
    case EnvKind::bandit: return 1;
    case EnvKind::deepsea: return deepsea.size;
    case EnvKind::random_mdp: return mdp ? mdp->layout.horizon() : 0;
  }
  return 0;
}

std::vector<std::size_t> log_points(std::size_t episodes, const LogCadence& cadence) {
  std::vector<std::size_t> pts;
  if (episodes == 0) return pts;
  if (cadence.kind == LogCadence::Kind::every) {
    const std::size_t step = std::max<std::size_t>(cadence.interval, 1);
    for (std::size_t t = step; t < episodes; t += step) pts.push_back(t);
  } else {
    double p = 1.0;
    while (static_cast<std::size_t>(p) < episodes) {
      const auto t = static_cast<std::size_t>(p);
      pts.push_back(t);
      p = std::max(static_cast<double>(t + 1), std::ceil(p * cadence.ratio));
    }
  }
  pts.push_back(episodes);
  return pts;
}

namespace {

std::vector<double> scalar_or_array(const Json& doc, const char* key, std::size_t n,
                                    double fallback) {
  if (!doc.contains(key)) return std::vector<double>(n, fallback);
  const Json& v = doc.at(key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  auto out = v.get<std::vector<double>>();
  if (out.size() != n)
    throw ConfigError(std::string(key) + ": expected " + std::to_string(n) + " entries");
  return out;
}

BanditSpec parse_bandit(const Json& env) {
  std::size_t arms = 0;
  if (env.contains("arms")) arms = env.at("arms").get<std::size_t>();
  else if (env.contains("prior_mean") && env.at("prior_mean").is_array())
    arms = env.at("prior_mean").size();
  else throw ConfigError("bandit env: give 'arms' or an array 'prior_mean'");
  BanditSpec b;
  b.prior_mean = scalar_or_array(env, "prior_mean", arms, 0.0);
  b.prior_var = scalar_or_array(env, "prior_var", arms, 1.0);
  b.noise_std = env.value("noise_std", 1.0);
  b.validate();
  return b;
}

MdpPrior parse_mdp_prior(const Json& env) {
  if (env.contains("prior")) return prior_from_json(env.at("prior"));
  Layout lay(env.at("layer_sizes").get<std::vector<std::size_t>>(),
             env.at("actions").get<std::size_t>());
  std::vector<double> rho;
  if (env.contains("rho")) rho = env.at("rho").get<std::vector<double>>();
  else rho.assign(lay.layer_size(0), 1.0 / static_cast<double>(lay.layer_size(0)));
  return MdpPrior::uniform(std::move(lay), std::move(rho), env.value("prior_mean", 0.0),
                           env.value("prior_var", 1.0), env.value("noise_std", 1.0),
                           env.value("dirichlet_alpha", 1.0));
}

EnvConfig parse_env(const Json& env) {
  EnvConfig cfg;
  const auto kind = env.at("kind").get<std::string>();
  if (kind == "bandit") {
    cfg.kind = EnvKind::bandit;
    cfg.bandit = parse_bandit(env);
  } else if (kind == "deepsea") {
    cfg.kind = EnvKind::deepsea;
    cfg.deepsea.size = env.value("size", cfg.deepsea.size);
    cfg.deepsea.slip = env.value("slip", cfg.deepsea.slip);
    cfg.deepsea.right_penalty = env.value("right_penalty", cfg.deepsea.right_penalty);
    cfg.deepsea.noise_std = env.value("noise_std", cfg.deepsea.noise_std);
  } else if (kind == "random_mdp") {
    cfg.kind = EnvKind::random_mdp;
    cfg.mdp = parse_mdp_prior(env);
  } else {
    throw ConfigError("unknown env kind '" + kind + "'");
  }
  return cfg;
}

MdpPrior default_agent_prior(const EnvConfig& env) {
  switch (env.kind) {
    case EnvKind::bandit: return env.bandit.prior();
    case EnvKind::deepsea: return deepsea_agent_prior(env.deepsea);
    case EnvKind::random_mdp: return *env.mdp;
  }
  throw ConfigError("unknown env kind");
}

// Shorthand override: any of prior_mean / prior_var (scalar or per-(s,a) array),
// noise_std, dirichlet_alpha; unspecified fields keep the environment's defaults.
MdpPrior parse_agent_prior(const Json& doc, const EnvConfig& env) {
  if (doc.contains("prior")) return prior_from_json(doc.at("prior"));
  MdpPrior p = default_agent_prior(env);
  const std::size_t n = p.layout.pair_count();
  p.reward_mean = scalar_or_array(doc, "prior_mean", n, 0.0);
  if (!doc.contains("prior_mean")) p.reward_mean = default_agent_prior(env).reward_mean;
  if (doc.contains("prior_var")) p.reward_var = scalar_or_array(doc, "prior_var", n, 1.0);
  p.noise_std = doc.value("noise_std", p.noise_std);
  if (doc.contains("dirichlet_alpha"))
    std::fill(p.alpha.begin(), p.alpha.end(), doc.at("dirichlet_alpha").get<double>());
  p.validate();
  return p;
}

Json env_to_json(const EnvConfig& env) {
  Json doc;
  switch (env.kind) {
    case EnvKind::bandit:
      doc["kind"] = "bandit";
      doc["arms"] = env.bandit.prior_mean.size();
      doc["prior_mean"] = env.bandit.prior_mean;
      doc["prior_var"] = env.bandit.prior_var;
      doc["noise_std"] = env.bandit.noise_std;
      break;
    case EnvKind::deepsea:
      doc["kind"] = "deepsea";
      doc["size"] = env.deepsea.size;
      doc["slip"] = env.deepsea.slip;
      doc["right_penalty"] = env.deepsea.right_penalty;
      doc["noise_std"] = env.deepsea.noise_std;
      break;
    case EnvKind::random_mdp:
      doc["kind"] = "random_mdp";
      doc["prior"] = prior_to_json(*env.mdp);
      break;
  }
  return doc;
}

bool is_klearning(AgentTag t) {
  return t == AgentTag::klearning_scheduled || t == AgentTag::klearning_optimal;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (agents.empty()) throw ConfigError("config: at least one agent is required");
  if (episodes == 0) throw ConfigError("config: episodes must be positive");
  if (runs == 0) throw ConfigError("config: runs must be at least 1");
  if (parallel == 0) throw ConfigError("config: parallel must be at least 1");
  if (cadence.kind == LogCadence::Kind::geometric && !(cadence.ratio > 1.0))
    throw ConfigError("config: geometric log cadence needs ratio > 1");
  std::set<std::string> labels;
  for (const auto& a : agents) {
    a.kind.validate();
    if (a.label.empty() || a.label.find_first_of(",\n\r\"") != std::string::npos)
      throw ConfigError("config: agent labels must be non-empty and free of commas/quotes");
    if (!labels.insert(a.label).second) throw ConfigError("config: duplicate agent label " + a.label);
    const bool bandit_only = a.kind.tag == AgentTag::thompson || a.kind.tag == AgentTag::ucb;
    if (bandit_only && env.kind != EnvKind::bandit)
      throw ConfigError("config: agent " + a.label + " only runs on bandit environments");
  }
  if (env.kind == EnvKind::random_mdp && !env.mdp) throw ConfigError("config: missing MDP prior");
  const MdpPrior p = initial_agent_prior();
  if (env.kind == EnvKind::deepsea) {
    if (!(p.layout == Layout(std::vector<std::size_t>(env.deepsea.size, env.deepsea.size), 2)))
      throw ConfigError("config: agent prior layout does not match the environment");
  }
  try {
    BeliefState check(p);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config: agent prior rejected: ") + e.what());
  }
}

MdpPrior ExperimentConfig::initial_agent_prior() const {
  return agent_prior ? *agent_prior : default_agent_prior(env);
}

ExperimentConfig config_from_json(const Json& doc) {
  try {
    ExperimentConfig cfg;
    cfg.env = parse_env(doc.at("env"));
    for (const Json& a : doc.at("agents")) {
      const AgentTag tag = parse_agent_tag(a.at("kind").get<std::string>());
      std::optional<double> eps, bonus;
      if (a.contains("epsilon")) eps = a.at("epsilon").get<double>();
      if (a.contains("bonus_scale")) bonus = a.at("bonus_scale").get<double>();
      AgentConfig ac{AgentKind::make(tag, eps, bonus), a.value("label", std::string(tag_name(tag)))};
      cfg.agents.push_back(std::move(ac));
    }
    const std::size_t L = cfg.env.horizon();
    const bool has_n = doc.contains("episodes"), has_t = doc.contains("timesteps");
    if (!has_n && !has_t) throw ConfigError("config: give 'episodes' or 'timesteps'");
    if (has_n) cfg.episodes = doc.at("episodes").get<std::size_t>();
    if (has_t) {
      const auto T = doc.at("timesteps").get<std::size_t>();
      if (has_n && cfg.episodes * L != T)
        throw ConfigError("config: episodes * horizon must equal timesteps");
      if (!has_n) {
        if (T % L != 0) throw ConfigError("config: timesteps must be a multiple of the horizon");
        cfg.episodes = T / L;
      }
    }
    cfg.runs = doc.value("runs", std::size_t{1});
    cfg.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("log_cadence")) {
      const Json& c = doc.at("log_cadence");
      const auto kind = c.value("kind", std::string("geometric"));
      if (kind == "geometric") {
        cfg.cadence.kind = LogCadence::Kind::geometric;
        cfg.cadence.ratio = c.value("ratio", 1.25);
      } else if (kind == "every") {
        cfg.cadence.kind = LogCadence::Kind::every;
        cfg.cadence.interval = c.value("interval", std::size_t{1});
      } else {
        throw ConfigError("config: unknown log cadence '" + kind + "'");
      }
    }
    cfg.output = doc.value("output", cfg.output);
    if (doc.contains("agent_prior")) cfg.agent_prior = parse_agent_prior(doc.at("agent_prior"), cfg.env);
    cfg.record_wall_time = doc.value("record_wall_time", false);
    cfg.parallel = doc.value("parallel", std::size_t{1});
    if (doc.contains("tau_search")) {
      const Json& s = doc.at("tau_search");
      cfg.tau_search.lower = s.value("lower", cfg.tau_search.lower);
      cfg.tau_search.upper = s.value("upper", cfg.tau_search.upper);
      cfg.tau_search.tolerance = s.value("tolerance", cfg.tau_search.tolerance);
      cfg.tau_search.max_iterations = s.value("max_iterations", cfg.tau_search.max_iterations);
    }
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json doc;
  doc["env"] = env_to_json(cfg.env);
  Json agents = Json::array();
  for (const auto& a : cfg.agents) {
    Json j;
    j["kind"] = std::string(tag_name(a.kind.tag));
    j["label"] = a.label;
    if (a.kind.epsilon) j["epsilon"] = *a.kind.epsilon;
    if (a.kind.bonus_scale) j["bonus_scale"] = *a.kind.bonus_scale;
    agents.push_back(std::move(j));
  }
  doc["agents"] = std::move(agents);
  doc["episodes"] = cfg.episodes;
  doc["timesteps"] = cfg.episodes * cfg.env.horizon();
  doc["runs"] = cfg.runs;
  doc["seed"] = cfg.seed;
  if (cfg.cadence.kind == LogCadence::Kind::geometric)
    doc["log_cadence"] = {{"kind", "geometric"}, {"ratio", cfg.cadence.ratio}};
  else
    doc["log_cadence"] = {{"kind", "every"}, {"interval", cfg.cadence.interval}};
  doc["output"] = cfg.output;
  if (cfg.agent_prior) doc["agent_prior"] = {{"prior", prior_to_json(*cfg.agent_prior)}};
  doc["record_wall_time"] = cfg.record_wall_time;
  doc["parallel"] = cfg.parallel;
  doc["tau_search"] = {{"lower", cfg.tau_search.lower},
                       {"upper", cfg.tau_search.upper},
                       {"tolerance", cfg.tau_search.tolerance},
                       {"max_iterations", cfg.tau_search.max_iterations}};
  return doc;
}

// ---------------------------------------------------------------------------
// Running

std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t run) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix(mix(mix(base) ^ h) ^ run);
}

LayeredMdp make_environment(const ExperimentConfig& config, std::size_t run) {
  Rng rng(derive_seed(config.seed, "env", run));
  switch (config.env.kind) {
    case EnvKind::bandit: return sample_env_from_prior(config.env.bandit.prior(), rng);
    case EnvKind::deepsea: return build_deepsea(config.env.deepsea);
    case EnvKind::random_mdp: return sample_env_from_prior(*config.env.mdp, rng);
  }
  throw ConfigError("unknown env kind");
}

EpisodePlan plan_episode(const AgentKind& kind, const BeliefState& belief, Rng& rng,
                         const LayeredMdp& truth, const LineSearchOptions& tau_search) {
  EpisodePlan plan;
  switch (kind.tag) {
    case AgentTag::klearning_scheduled:
    case AgentTag::klearning_optimal: {
      const TauMode mode =
          kind.tag == AgentTag::klearning_optimal ? TauMode::optimal : TauMode::scheduled;
      KSolution sol = klearning_episode(belief, mode, ScheduleKind::automatic, tau_search);
      plan.tau = sol.tau.value();
      plan.bound = sol.certificate.phi;
      plan.policy = std::move(sol.policy);
      break;
    }
    case AgentTag::thompson:
      plan.policy = one_hot_policy(belief.actions(), thompson_bandit_step(belief, rng));
      break;
    case AgentTag::ucb:
      plan.policy = one_hot_policy(belief.actions(), ucb_bandit_step(belief, belief.episode(), rng));
      break;
    case AgentTag::psrl: plan.policy = psrl_episode(belief, rng); break;
    case AgentTag::ucbvi:
      plan.policy = ucbvi_episode(belief, belief.episode(), kind.bonus_scale.value(), rng);
      break;
    case AgentTag::epsilon_greedy:
      plan.policy = epsilon_greedy_episode(belief, kind.epsilon.value(), rng);
      break;
    case AgentTag::oracle:
      plan.policy = greedy_policy(truth.layout(), solve_optimal(truth).q);
      break;
    case AgentTag::uniform:
      plan.policy = Policy::uniform(belief.state_count(), belief.actions());
      break;
  }
  return plan;
}

namespace {

std::size_t draw_index(std::span<const double> p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (x < acc) return i;
  }
  // Rounding left x above the total: take the last entry with positive mass.
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) return i;
  return 0;
}

}  // namespace

void simulate_episode(const LayeredMdp& truth, const Policy& policy, BeliefState& belief,
                      Rng& rng) {
  const Layout& lay = truth.layout();
  std::normal_distribution<double> z(0.0, 1.0);
  std::size_t s = draw_index(truth.rho(), rng);
  for (std::size_t l = 0; l < lay.horizon(); ++l) {
    const std::size_t a = draw_index(policy.row(s), rng);
    const double r = truth.mean_reward(s, a) + truth.reward_noise_std() * z(rng);
    belief.update_reward(s, a, r);
    if (l + 1 < lay.horizon()) {
      const std::size_t next = draw_index(truth.next(s, a), rng);
      belief.update_transition(s, a, next);
      s = lay.global(l + 1, next);
    }
  }
  belief.advance_episode();
}

RunRecord run_agent(const ExperimentConfig& config, std::size_t agent_index, std::size_t run) {
  const AgentConfig& agent = config.agents.at(agent_index);
  const LayeredMdp truth = make_environment(config, run);
  BeliefState belief(config.initial_agent_prior());
  if (!(belief.layout() == truth.layout()))
    throw ConfigError("agent prior layout does not match the environment");
  Rng rng(derive_seed(config.seed, agent.label, run));

  const ValueTables star = solve_optimal(truth);
  double v_star = 0.0;
  for (std::size_t i = 0; i < truth.rho().size(); ++i) v_star += truth.rho()[i] * star.v[i];

  const auto points = log_points(config.episodes, config.cadence);
  std::size_t next_point = 0;
  RunRecord rec{agent.label, run, {}};
  rec.rows.reserve(points.size());
  double cum_regret = 0.0, cum_bound = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 1; t <= config.episodes; ++t) {
    EpisodePlan plan = plan_episode(agent.kind, belief, rng, truth, config.tau_search);
    const double regret = v_star - performance(truth, plan.policy);
    if (!std::isfinite(regret) || (plan.bound && !std::isfinite(*plan.bound)))
      throw NumericError("non-finite regret or bound for agent " + agent.label + ", run " +
                         std::to_string(run) + ", episode " + std::to_string(t));
    cum_regret += regret;
    if (plan.bound) cum_bound += *plan.bound;
    simulate_episode(truth, plan.policy, belief, rng);
    if (next_point < points.size() && points[next_point] == t) {
      LogRow row;
      row.episode = t;
      row.cum_regret = cum_regret;
      if (is_klearning(agent.kind.tag)) row.cum_bound = cum_bound;
      row.tau = plan.tau;
      if (config.record_wall_time)
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      rec.rows.push_back(row);
      ++next_point;
    }
  }
  return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_agents = config.agents.size();
  const std::size_t total = n_agents * config.runs;
  std::vector<RunRecord> out(total);
  // Task i is (agent i / runs, run i % runs); each writes only its own slot.
  auto task = [&](std::size_t i) { out[i] = run_agent(config, i / config.runs, i % config.runs); };
  const std::size_t workers = std::min(config.parallel, total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < total; i = next++) task(i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = total;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.agent != b.agent ? a.agent < b.agent : a.run < b.run;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation and CSV

namespace {

struct Moments {
  double mean = 0.0, se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  if (x.empty()) return m;
  double sum = 0.0;
  for (double v : x) sum += v;
  m.mean = sum / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(x.size() - 1)) /
           std::sqrt(static_cast<double>(x.size()));
  }
  return m;
}

}  // namespace

Summary aggregate(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, std::size_t>, std::pair<std::vector<double>, std::vector<double>>>
      cells;
  for (const auto& rec : records)
    for (const auto& row : rec.rows) {
      auto& cell = cells[{rec.agent, row.episode}];
      cell.first.push_back(row.cum_regret);
      if (row.cum_bound) cell.second.push_back(*row.cum_bound);
    }
  Summary sum;
  for (const auto& [key, cell] : cells) {
    SummaryRow row;
    row.agent = key.first;
    row.episode = key.second;
    row.runs = cell.first.size();
    const Moments r = moments(cell.first);
    row.mean_regret = r.mean;
    row.se_regret = r.se;
    if (!cell.second.empty()) {
      const Moments b = moments(cell.second);
      row.mean_bound = b.mean;
      row.se_bound = b.se;
    }
    sum.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < sum.rows.size(); ++i) {
    const bool last = i + 1 == sum.rows.size() || sum.rows[i + 1].agent != sum.rows[i].agent;
    if (last)
      sum.finals.push_back(
          {sum.rows[i].agent, sum.rows[i].episode, sum.rows[i].mean_regret, sum.rows[i].se_regret, 0.0});
  }
  double best = std::numeric_limits<double>::infinity();
  // zero-regret agents (oracle) are skipped as the reference
  for (const auto& f : sum.finals)
    if (f.mean_regret > 0.0) best = std::min(best, f.mean_regret);
  for (auto& f : sum.finals)
    f.ratio = std::isfinite(best) ? f.mean_regret / best : std::numeric_limits<double>::quiet_NaN();
  return sum;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt_cell(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("csv: cannot parse number '" + s + "'");
  return x;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
    return a->agent != b->agent ? a->agent < b->agent : a->run < b->run;
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "agent,run,episode,cum_regret,cum_bound,tau,wall_ms\n";
  for (const RunRecord* rec : sorted) {
    std::vector<LogRow> rows = rec->rows;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const LogRow& a, const LogRow& b) { return a.episode < b.episode; });
    for (const auto& row : rows)
      out << rec->agent << ',' << rec->run << ',' << row.episode << ','
          << format_double(row.cum_regret) << ',' << opt_cell(row.cum_bound) << ','
          << opt_cell(row.tau) << ',' << opt_cell(row.wall_ms) << '\n';
  }
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "agent,run,episode,cum_regret,cum_bound,tau,wall_ms")
    throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<RunRecord> out;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) throw std::runtime_error(path.string() + ": malformed row: " + line);
    const std::size_t run = std::stoull(cells[1]);
    auto [it, inserted] = index.try_emplace({cells[0], run}, out.size());
    if (inserted) out.push_back({cells[0], run, {}});
    LogRow row;
    row.episode = std::stoull(cells[2]);
    row.cum_regret = parse_double(cells[3]);
    row.cum_bound = parse_opt(cells[4]);
    row.tau = parse_opt(cells[5]);
    row.wall_ms = parse_opt(cells[6]);
    out[it->second].rows.push_back(row);
  }
  return out;
}

void emit_summary_csv(const Summary& summary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "agent,episode,runs,mean_cum_regret,se_cum_regret,mean_cum_bound,se_cum_bound\n";
  for (const auto& r : summary.rows)
    out << r.agent << ',' << r.episode << ',' << r.runs << ',' << format_double(r.mean_regret)
        << ',' << format_double(r.se_regret) << ',' << opt_cell(r.mean_bound) << ','
        << opt_cell(r.se_bound) << '\n';
}

std::string format_summary_table(const Summary& summary) {
  std::ostringstream os;
  os << "# regret = expected (pseudo-)regret sum_t E_s1[V*(s1) - V^pi_t(s1)] on the true MDP\n";
  os << std::left << std::setw(24) << "agent" << std::right << std::setw(10) << "episode"
     << std::setw(16) << "mean_regret" << std::setw(12) << "se" << std::setw(10) << "ratio"
     << '\n';
  os << std::fixed;
  for (const auto& f : summary.finals) {
    os << std::left << std::setw(24) << f.agent << std::right << std::setw(10) << f.episode
       << std::setw(16) << std::setprecision(3) << f.mean_regret << std::setw(12)
       << std::setprecision(3) << f.se_regret << std::setw(10);
    if (std::isnan(f.ratio)) os << '-';
    else os << std::setprecision(2) << f.ratio;
    os << '\n';
  }
  return os.str();
}

}  // namespace klearn
