#pragma once

#include <string>

#include <json.hpp>

#include "lookahead/cr_solver.hpp"
#include "lookahead/env_zoo.hpp"
#include "lookahead/mdp.hpp"
#include "lookahead/reach.hpp"
#include "lookahead/sim.hpp"

namespace lookahead {

using Json = nlohmann::json;

Json to_json(const TabularMDP& mdp);
TabularMDP mdp_from_json(const Json& j);

Json to_json(const RewardSpec& rewards);
RewardSpec rewards_from_json(const Json& j);

Json to_json(const MarkovPolicy& policy);
MarkovPolicy policy_from_json(const Json& j);

Json to_json(const ReachTable& reach);
Json to_json(const CRReport& report);
Json to_json(const MCEstimate& estimate);
Json to_json(const EpisodeTrace& trace);
Json to_json(const EnvDescriptor& descriptor);

/// {"mdp": ..., "rewards": ... or null, "descriptor": ...}
Json to_json(const Environment& env);
/// Accepts an environment document or a bare MDP document.
Environment environment_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace lookahead
