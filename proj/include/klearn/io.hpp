#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "klearn/belief.hpp"
#include "klearn/mdp.hpp"

namespace klearn {

using Json = nlohmann::json;

// Document fields: L, layer_sizes, A, transition[l][s][a][s'] for l < L-1,
// mean_reward[l][s][a], reward_noise_std, rho. Doubles are written shortest-round-trip.
Json mdp_to_json(const LayeredMdp& mdp);
LayeredMdp mdp_from_json(const Json& doc);

Json prior_to_json(const MdpPrior& prior);
MdpPrior prior_from_json(const Json& doc);

// Prior plus sufficient statistics; enough to resume a run.
Json belief_to_json(const BeliefState& belief);
BeliefState belief_from_json(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace klearn
