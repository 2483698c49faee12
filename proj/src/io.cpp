#include "klearn/io.hpp"

#include <cmath>
#include <fstream>

namespace klearn {

namespace {

// Nested [l][s][a] view of a per-(s,a) table.
Json pair_table(const Layout& lay, const std::vector<double>& flat) {
  Json layers = Json::array();
  for (std::size_t l = 0; l < lay.horizon(); ++l) {
    Json states = Json::array();
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s) {
      Json row = Json::array();
      for (std::size_t a = 0; a < lay.actions(); ++a) row.push_back(flat[lay.pair(s, a)]);
      states.push_back(std::move(row));
    }
    layers.push_back(std::move(states));
  }
  return layers;
}

std::vector<double> read_pair_table(const Layout& lay, const Json& doc, const char* what) {
  std::vector<double> flat(lay.pair_count());
  if (!doc.is_array() || doc.size() != lay.horizon())
    throw ValidationError(std::string(what) + ": expected one entry per layer");
  for (std::size_t l = 0; l < lay.horizon(); ++l) {
    const Json& states = doc[l];
    if (!states.is_array() || states.size() != lay.layer_size(l))
      throw ValidationError(std::string(what) + ": wrong number of states in layer " +
                            std::to_string(l));
    for (std::size_t i = 0; i < states.size(); ++i) {
      const Json& row = states[i];
      if (!row.is_array() || row.size() != lay.actions())
        throw ValidationError(std::string(what) + ": wrong number of actions");
      for (std::size_t a = 0; a < lay.actions(); ++a)
        flat[lay.pair(lay.global(l, i), a)] = row[a].get<double>();
    }
  }
  return flat;
}

// Nested [l][s][a][s'] view of a transition-layout table (layers 0..L-2).
Json transition_table(const Layout& lay, const std::vector<double>& flat) {
  Json layers = Json::array();
  for (std::size_t l = 0; l + 1 < lay.horizon(); ++l) {
    Json states = Json::array();
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s) {
      Json actions = Json::array();
      for (std::size_t a = 0; a < lay.actions(); ++a) {
        const std::size_t off = lay.row_offset(s, a);
        actions.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(off),
                                              flat.begin() + static_cast<std::ptrdiff_t>(
                                                                 off + lay.successor_count(s))));
      }
      states.push_back(std::move(actions));
    }
    layers.push_back(std::move(states));
  }
  return layers;
}

std::vector<double> read_transition_table(const Layout& lay, const Json& doc, const char* what) {
  std::vector<double> flat(lay.transition_size());
  if (!doc.is_array() || doc.size() + 1 != lay.horizon())
    throw ValidationError(std::string(what) + ": expected L-1 layers");
  for (std::size_t l = 0; l + 1 < lay.horizon(); ++l) {
    const Json& states = doc[l];
    if (!states.is_array() || states.size() != lay.layer_size(l))
      throw ValidationError(std::string(what) + ": wrong number of states in layer " +
                            std::to_string(l));
    for (std::size_t i = 0; i < states.size(); ++i) {
      const std::size_t s = lay.global(l, i);
      const Json& acts = states[i];
      if (!acts.is_array() || acts.size() != lay.actions())
        throw ValidationError(std::string(what) + ": wrong number of actions");
      for (std::size_t a = 0; a < lay.actions(); ++a) {
        const Json& row = acts[a];
        if (!row.is_array() || row.size() != lay.successor_count(s))
          throw ValidationError(std::string(what) + ": row length must equal the next layer size");
        const std::size_t off = lay.row_offset(s, a);
        for (std::size_t j = 0; j < row.size(); ++j) flat[off + j] = row[j].get<double>();
      }
    }
  }
  return flat;
}

Layout read_layout(const Json& doc) {
  const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
  if (doc.contains("L") && doc.at("L").get<std::size_t>() != sizes.size())
    throw ValidationError("L does not match the number of layer sizes");
  return Layout(sizes, doc.at("A").get<std::size_t>());
}

}  // namespace

Json mdp_to_json(const LayeredMdp& mdp) {
  const Layout& lay = mdp.layout();
  Json doc;
  doc["L"] = lay.horizon();
  doc["layer_sizes"] = lay.layer_sizes();
  doc["A"] = lay.actions();
  doc["transition"] = transition_table(lay, mdp.transition());
  doc["mean_reward"] = pair_table(lay, mdp.mean_rewards());
  doc["reward_noise_std"] = mdp.reward_noise_std();
  doc["rho"] = std::vector<double>(mdp.rho().begin(), mdp.rho().end());
  if (mdp.bounded_rewards()) doc["bounded_rewards"] = true;
  return doc;
}

LayeredMdp mdp_from_json(const Json& doc) {
  try {
    Layout lay = read_layout(doc);
    auto transition = read_transition_table(lay, doc.at("transition"), "transition");
    auto reward = read_pair_table(lay, doc.at("mean_reward"), "mean_reward");
    return LayeredMdp(std::move(lay), std::move(transition), std::move(reward),
                      doc.at("reward_noise_std").get<double>(),
                      doc.at("rho").get<std::vector<double>>(),
                      doc.value("bounded_rewards", false));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("mdp document: ") + e.what());
  }
}

Json prior_to_json(const MdpPrior& prior) {
  const Layout& lay = prior.layout;
  Json doc;
  doc["L"] = lay.horizon();
  doc["layer_sizes"] = lay.layer_sizes();
  doc["A"] = lay.actions();
  doc["rho"] = prior.rho;
  doc["reward_mean"] = pair_table(lay, prior.reward_mean);
  doc["reward_var"] = pair_table(lay, prior.reward_var);
  doc["noise_std"] = prior.noise_std;
  doc["alpha"] = transition_table(lay, prior.alpha);
  return doc;
}

MdpPrior prior_from_json(const Json& doc) {
  try {
    MdpPrior p;
    p.layout = read_layout(doc);
    p.rho = doc.at("rho").get<std::vector<double>>();
    p.reward_mean = read_pair_table(p.layout, doc.at("reward_mean"), "reward_mean");
    p.reward_var = read_pair_table(p.layout, doc.at("reward_var"), "reward_var");
    p.noise_std = doc.at("noise_std").get<double>();
    p.alpha = read_transition_table(p.layout, doc.at("alpha"), "alpha");
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("prior document: ") + e.what());
  }
}

Json belief_to_json(const BeliefState& belief) {
  Json doc;
  doc["prior"] = prior_to_json(belief.prior());
  doc["episode"] = belief.episode();
  Json counts = Json::array();
  const Layout& lay = belief.layout();
  for (std::size_t l = 0; l < lay.horizon(); ++l) {
    Json states = Json::array();
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s) {
      Json row = Json::array();
      for (std::size_t a = 0; a < lay.actions(); ++a) row.push_back(belief.count(s, a));
      states.push_back(std::move(row));
    }
    counts.push_back(std::move(states));
  }
  doc["counts"] = std::move(counts);
  doc["reward_sum"] = pair_table(lay, belief.reward_sums());
  doc["alpha"] = transition_table(lay, belief.alphas());
  return doc;
}

BeliefState belief_from_json(const Json& doc) {
  try {
    BeliefState belief(prior_from_json(doc.at("prior")));
    const Layout& lay = belief.layout();
    const auto counts_d = read_pair_table(lay, doc.at("counts"), "counts");
    std::vector<std::size_t> counts(counts_d.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts_d[i] < 0.0 || counts_d[i] != std::floor(counts_d[i]))
        throw ValidationError("belief document: counts must be nonnegative integers");
      counts[i] = static_cast<std::size_t>(counts_d[i]);
    }
    belief.restore(doc.at("episode").get<std::size_t>(), std::move(counts),
                   read_pair_table(lay, doc.at("reward_sum"), "reward_sum"),
                   read_transition_table(lay, doc.at("alpha"), "alpha"));
    return belief;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("belief document: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace klearn
