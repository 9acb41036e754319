#pragma once

#include <json.hpp>

#include "dts/game.hpp"

namespace dts {

using Json = nlohmann::json;

// Structures, teams, and related values move through JSON with elements
// written as their labels, so files stay readable and independent of the
// internal index order.

Json to_json(const Structure& a);
Structure structure_from_json(const Json& j);

Json to_json(const Structure& a, const Team& team);
Team team_from_json(const Json& j, const Structure& a);

Json to_json(const Structure& a, const DoubleTeam& dt);
DoubleTeam double_team_from_json(const Json& j, const Structure& a);

Json to_json(const ExtensionalDef& def);
ExtensionalDef extensional_from_json(const Json& j);

// A quantifier file holds {"quantifiers": [definition, ...]}.
std::vector<ExtensionalDef> quantifier_file_from_json(const Json& j);

Json to_json(const Structure& a, const Strategy& strategy);
Json to_json(const Structure& a, const FinalTeams& teams);

// File loading with IO failures reported as IoError.
Json load_json_file(const std::string& path);

}  // namespace dts
