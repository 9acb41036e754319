#include "dts/json_io.hpp"

#include <algorithm>
#include <fstream>

namespace dts {

namespace {

const Json& expect(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw IoError(std::string(what) + " JSON needs a \"" + key + "\" field");
  }
  return j.at(key);
}

std::string expect_string(const Json& j, const char* what) {
  if (!j.is_string()) throw IoError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

Tuple tuple_from_json(const Json& j, const Structure& a) {
  if (!j.is_array()) throw IoError("a relation tuple must be an array of labels");
  Tuple t;
  for (const Json& label : j) {
    t.push_back(a.elem_or_throw(expect_string(label, "an element label")));
  }
  return t;
}

Json tuple_to_json(const Structure& a, const Tuple& t) {
  Json out = Json::array();
  for (Elem e : t) out.push_back(a.label(e));
  return out;
}

Assignment assignment_from_json(const Json& j, const Structure& a) {
  if (!j.is_object()) throw IoError("an assignment must map variables to labels");
  Assignment s;
  for (const auto& [var, label] : j.items()) {
    s.binds.emplace_back(var, a.elem_or_throw(expect_string(label, "an element label")));
  }
  std::sort(s.binds.begin(), s.binds.end());
  return s;
}

Json assignment_to_json(const Structure& a, const Assignment& s) {
  Json out = Json::object();
  for (const auto& [var, val] : s.binds) out[var] = a.label(val);
  return out;
}

}  // namespace

Json to_json(const Structure& a) {
  Json relations = Json::object();
  for (const auto& [name, rel] : a.relations()) {
    Json tuples = Json::array();
    for (const Tuple& t : rel.tuples) tuples.push_back(tuple_to_json(a, t));
    relations[name] = Json{{"arity", rel.arity}, {"tuples", std::move(tuples)}};
  }
  return Json{{"domain", a.labels()}, {"relations", std::move(relations)}};
}

Structure structure_from_json(const Json& j) {
  const Json& domain = expect(j, "domain", "structure");
  if (!domain.is_array() || domain.empty()) {
    throw IoError("structure \"domain\" must be a nonempty array of labels");
  }
  std::vector<std::string> labels;
  for (const Json& label : domain) labels.push_back(expect_string(label, "an element label"));

  std::map<std::string, Relation> relations;
  if (j.contains("relations")) {
    const Json& rels = j.at("relations");
    if (!rels.is_object()) throw IoError("structure \"relations\" must be an object");
    // Tuples refer to labels, so build a lookup before Structure validation.
    std::map<std::string, Elem> index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      index[labels[i]] = static_cast<Elem>(i);
    }
    for (const auto& [name, rel] : rels.items()) {
      const Json& arity = expect(rel, "arity", "relation");
      if (!arity.is_number_integer()) throw IoError("relation \"arity\" must be an integer");
      TupleSet tuples;
      for (const Json& jt : expect(rel, "tuples", "relation")) {
        if (!jt.is_array()) throw IoError("a relation tuple must be an array of labels");
        Tuple t;
        for (const Json& label : jt) {
          auto it = index.find(expect_string(label, "an element label"));
          if (it == index.end()) {
            throw IoError("relation '" + name + "' mentions an unknown element label");
          }
          t.push_back(it->second);
        }
        tuples.insert(std::move(t));
      }
      relations[name] = Relation{arity.get<int>(), std::move(tuples)};
    }
  }
  return Structure(std::move(labels), std::move(relations));
}

Json to_json(const Structure& a, const Team& team) {
  Json assignments = Json::array();
  for (const Assignment& s : team.members()) {
    assignments.push_back(assignment_to_json(a, s));
  }
  return Json{{"vars", team.vars()}, {"assignments", std::move(assignments)}};
}

Team team_from_json(const Json& j, const Structure& a) {
  const Json& vars = expect(j, "vars", "team");
  if (!vars.is_array()) throw IoError("team \"vars\" must be an array of variable names");
  std::vector<std::string> names;
  for (const Json& v : vars) names.push_back(expect_string(v, "a variable name"));
  std::sort(names.begin(), names.end());

  std::set<Assignment> members;
  for (const Json& js : expect(j, "assignments", "team")) {
    members.insert(assignment_from_json(js, a));
  }
  return Team(std::move(names), std::move(members));
}

Json to_json(const Structure& a, const DoubleTeam& dt) {
  return Json{{"U", to_json(a, dt.U)}, {"V", to_json(a, dt.V)}};
}

DoubleTeam double_team_from_json(const Json& j, const Structure& a) {
  return DoubleTeam(team_from_json(expect(j, "U", "double team"), a),
                    team_from_json(expect(j, "V", "double team"), a));
}

Json to_json(const ExtensionalDef& def) {
  Json tables = Json::object();
  Structure biggest = canonical_structure(
      def.tables.empty() ? 1 : def.tables.rbegin()->first);
  for (const auto& [size, members] : def.tables) {
    Json jmembers = Json::array();
    for (const auto& rels : members) {
      Json jrels = Json::array();
      for (const TupleSet& ts : rels) {
        Json jts = Json::array();
        for (const Tuple& t : ts) jts.push_back(tuple_to_json(biggest, t));
        jrels.push_back(std::move(jts));
      }
      jmembers.push_back(std::move(jrels));
    }
    tables[std::to_string(size)] = std::move(jmembers);
  }
  return Json{{"name", def.name}, {"type", def.type_sig}, {"tables", std::move(tables)}};
}

ExtensionalDef extensional_from_json(const Json& j) {
  ExtensionalDef def;
  def.name = expect_string(expect(j, "name", "quantifier"), "quantifier \"name\"");
  const Json& type = expect(j, "type", "quantifier");
  if (!type.is_array() || type.empty()) {
    throw IoError("quantifier \"type\" must be a nonempty array of arities");
  }
  for (const Json& arity : type) {
    if (!arity.is_number_integer()) throw IoError("quantifier arities must be integers");
    def.type_sig.push_back(arity.get<int>());
  }
  if (j.contains("tables")) {
    const Json& tables = j.at("tables");
    if (!tables.is_object()) {
      throw IoError("quantifier \"tables\" must map domain sizes to member lists");
    }
    for (const auto& [key, jmembers] : tables.items()) {
      int size = 0;
      try {
        size = std::stoi(key);
      } catch (const std::exception&) {
        throw IoError("table keys must be domain sizes, got \"" + key + "\"");
      }
      if (size < 1) throw IoError("table domain sizes must be positive");
      Structure canon = canonical_structure(size);
      std::set<std::vector<TupleSet>> members;
      if (!jmembers.is_array()) throw IoError("a member table must be an array");
      for (const Json& jrels : jmembers) {
        if (!jrels.is_array()) throw IoError("a table member must be an array of relations");
        std::vector<TupleSet> rels;
        for (const Json& jts : jrels) {
          if (!jts.is_array()) throw IoError("a table relation must be an array of tuples");
          TupleSet ts;
          for (const Json& jt : jts) ts.insert(tuple_from_json(jt, canon));
          rels.push_back(std::move(ts));
        }
        members.insert(std::move(rels));
      }
      def.tables[size] = std::move(members);
    }
  }
  return def;
}

std::vector<ExtensionalDef> quantifier_file_from_json(const Json& j) {
  const Json& defs = expect(j, "quantifiers", "quantifier file");
  if (!defs.is_array()) throw IoError("\"quantifiers\" must be an array of definitions");
  std::vector<ExtensionalDef> out;
  for (const Json& def : defs) out.push_back(extensional_from_json(def));
  return out;
}

Json to_json(const Structure& a, const Strategy& strategy) {
  Json moves = Json::array();
  for (const auto& [pos, choice] : strategy.moves) {
    Json entry{{"node", pos.node},
               {"sign", pos.sign == Sign::Plus ? "+" : "-"},
               {"assignment", assignment_to_json(a, pos.t)}};
    if (choice.kind == AgentChoice::Kind::Or) {
      Json sides = Json::array();
      if (choice.or_left) sides.push_back("left");
      if (choice.or_right) sides.push_back("right");
      entry["choice"] = Json{{"or", std::move(sides)}};
    } else {
      Json labels = Json::array();
      for (Elem e : choice.witness) labels.push_back(a.label(e));
      entry["choice"] = Json{{"set", std::move(labels)}};
    }
    moves.push_back(std::move(entry));
  }
  return moves;
}

Json to_json(const Structure& a, const FinalTeams& teams) {
  Json out = Json::array();
  for (const auto& [node, pair] : teams.teams) {
    out.push_back(Json{{"node", node},
                       {"support", to_json(a, pair.first)},
                       {"refute", to_json(a, pair.second)}});
  }
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace dts
