#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dts/json_io.hpp"
#include "dts/semantics.hpp"

using namespace dts;

namespace {

Structure two_elem() {
  return Structure({"a", "b"},
                   {{"P", Relation{1, {{0}}}}, {"R", Relation{2, {{0, 1}, {1, 1}}}}});
}

}  // namespace

TEST_CASE("structure round trip") {
  Structure a = two_elem();
  Json j = to_json(a);
  CHECK(j["domain"] == Json::array({"a", "b"}));
  CHECK(j["relations"]["P"]["arity"] == 1);
  CHECK(j["relations"]["P"]["tuples"] == Json::array({Json::array({"a"})}));
  CHECK(j["relations"]["R"]["tuples"][0] == Json::array({"a", "b"}));

  Structure back = structure_from_json(j);
  CHECK(back.labels() == a.labels());
  CHECK(back.relation("P").tuples == a.relation("P").tuples);
  CHECK(back.relation("R").arity == 2);
  CHECK(back.relation("R").tuples == a.relation("R").tuples);
}

TEST_CASE("structure without relations") {
  Structure back = structure_from_json(Json{{"domain", {"0", "1", "2"}}});
  CHECK(back.size() == 3);
  CHECK(back.relations().empty());
}

TEST_CASE("structure shape errors") {
  CHECK_THROWS_AS(structure_from_json(Json::array()), IoError);
  CHECK_THROWS_AS(structure_from_json(Json::object()), IoError);
  CHECK_THROWS_AS(structure_from_json(Json{{"domain", Json::array()}}), IoError);
  CHECK_THROWS_AS(structure_from_json(Json{{"domain", {"a", 3}}}), IoError);
  CHECK_THROWS_AS(
      structure_from_json(Json{{"domain", {"a"}}, {"relations", Json::array()}}),
      IoError);
  CHECK_THROWS_AS(
      structure_from_json(
          Json{{"domain", {"a"}}, {"relations", {{"P", {{"tuples", Json::array()}}}}}}),
      IoError);
  CHECK_THROWS_AS(
      structure_from_json(Json{{"domain", {"a"}},
                               {"relations",
                                {{"P", {{"arity", 1}, {"tuples", {{"zz"}}}}}}}}),
      IoError);
  // Arity mismatches surface from structure validation itself.
  CHECK_THROWS_AS(
      structure_from_json(Json{{"domain", {"a"}},
                               {"relations",
                                {{"P", {{"arity", 2}, {"tuples", {{"a"}}}}}}}}),
      ValueError);
}

TEST_CASE("team round trip") {
  Structure a = two_elem();
  Team u({"x", "y"}, {Assignment::of({{"x", 0}, {"y", 1}}),
                      Assignment::of({{"x", 1}, {"y", 1}})});
  Json j = to_json(a, u);
  CHECK(j["vars"] == Json::array({"x", "y"}));
  CHECK(j["assignments"].size() == 2);
  CHECK(j["assignments"][0] == Json{{"x", "a"}, {"y", "b"}});

  Team back = team_from_json(j, a);
  CHECK(back == u);
}

TEST_CASE("empty team keeps its variable domain") {
  Structure a = two_elem();
  Team u({"x"}, {});
  Team back = team_from_json(to_json(a, u), a);
  CHECK(back.vars() == std::vector<std::string>{"x"});
  CHECK(back.empty());
}

TEST_CASE("team vars may arrive unsorted") {
  Structure a = two_elem();
  Json j{{"vars", {"y", "x"}}, {"assignments", {{{"x", "a"}, {"y", "a"}}}}};
  Team back = team_from_json(j, a);
  CHECK(back.vars() == std::vector<std::string>{"x", "y"});
}

TEST_CASE("team shape errors") {
  Structure a = two_elem();
  CHECK_THROWS_AS(team_from_json(Json{{"assignments", Json::array()}}, a), IoError);
  CHECK_THROWS_AS(team_from_json(Json{{"vars", {"x"}}}, a), IoError);
  CHECK_THROWS_AS(
      team_from_json(Json{{"vars", {"x"}}, {"assignments", {{{"x", "zz"}}}}}, a),
      ValueError);
  // Member over the wrong variables fails Team validation.
  CHECK_THROWS_AS(
      team_from_json(Json{{"vars", {"x"}}, {"assignments", {{{"y", "a"}}}}}, a),
      ValueError);
}

TEST_CASE("double team round trip") {
  Structure a = two_elem();
  DoubleTeam dt(Team({"x"}, {Assignment::of({{"x", 0}})}), Team({"x"}, {}));
  Json j = to_json(a, dt);
  DoubleTeam back = double_team_from_json(j, a);
  CHECK(back.U == dt.U);
  CHECK(back.V == dt.V);
  CHECK_THROWS_AS(double_team_from_json(Json{{"U", j["U"]}}, a), IoError);
}

TEST_CASE("extensional definition round trip") {
  ExtensionalDef def;
  def.name = "pick0";
  def.type_sig = {1};
  def.tables[1] = {{TupleSet{{0}}}};
  def.tables[2] = {{TupleSet{{0}}}, {TupleSet{{0}, {1}}}};
  Json j = to_json(def);
  CHECK(j["name"] == "pick0");
  CHECK(j["type"] == Json::array({1}));
  CHECK(j["tables"]["2"].size() == 2);

  ExtensionalDef back = extensional_from_json(j);
  CHECK(back.name == def.name);
  CHECK(back.type_sig == def.type_sig);
  CHECK(back.tables == def.tables);
}

TEST_CASE("quantifier file parsing") {
  Json file{{"quantifiers",
             {{{"name", "q1"}, {"type", {1}}, {"tables", Json::object()}},
              {{"name", "q2"}, {"type", {2, 1}}}}}};
  auto defs = quantifier_file_from_json(file);
  REQUIRE(defs.size() == 2);
  CHECK(defs[0].name == "q1");
  CHECK(defs[1].type_sig == std::vector<int>{2, 1});

  CHECK_THROWS_AS(quantifier_file_from_json(Json::object()), IoError);
  CHECK_THROWS_AS(quantifier_file_from_json(Json{{"quantifiers", "no"}}), IoError);
}

TEST_CASE("extensional shape errors") {
  CHECK_THROWS_AS(extensional_from_json(Json{{"type", {1}}}), IoError);
  CHECK_THROWS_AS(extensional_from_json(Json{{"name", "q"}}), IoError);
  CHECK_THROWS_AS(extensional_from_json(Json{{"name", "q"}, {"type", Json::array()}}),
                  IoError);
  CHECK_THROWS_AS(
      extensional_from_json(Json{{"name", "q"}, {"type", {1}}, {"tables", {{"zero", 1}}}}),
      IoError);
  CHECK_THROWS_AS(
      extensional_from_json(Json{{"name", "q"}, {"type", {1}}, {"tables", {{"0", 1}}}}),
      IoError);
}

TEST_CASE("strategy serialization") {
  Structure a = two_elem();
  Registry reg;
  Formula f = parse("Q<exists> x . (P(x))", reg);
  auto strategy = find_uniform_survival_strategy(a, Team::singleton_empty(), Team(), f);
  REQUIRE(strategy.has_value());
  Json j = to_json(a, *strategy);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["node"] == 0);
  CHECK(j[0]["sign"] == "+");
  CHECK(j[0]["assignment"] == Json::object());
  CHECK(j[0]["choice"] == Json{{"set", {"a"}}});
}

TEST_CASE("or choice serialization") {
  Structure a = two_elem();
  Strategy s;
  s.moves[Position{0, Sign::Plus, Assignment{}}] = AgentChoice::or_pick(true, false);
  s.moves[Position{0, Sign::Plus, Assignment::of({{"x", 1}})}] =
      AgentChoice::or_pick(true, true);
  Json j = to_json(a, s);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["choice"] == Json{{"or", {"left"}}});
  CHECK(j[1]["choice"] == Json{{"or", {"left", "right"}}});
  CHECK(j[1]["assignment"] == Json{{"x", "b"}});
}

TEST_CASE("final teams serialization") {
  Structure a = two_elem();
  Registry reg;
  Formula f = parse("@<double>(x ; x)", reg);
  Team u({"x"}, {});
  auto strategy = find_uniform_survival_strategy(a, u, u, f);
  REQUIRE(strategy.has_value());
  auto plays = enumerate_plays(a, u, u, f, *strategy);
  Json j = to_json(a, plays.final_teams);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["node"] == 0);
  CHECK(j[0]["support"]["assignments"] == Json::array());
  CHECK(j[0]["refute"]["vars"] == Json::array({"x"}));
}

TEST_CASE("load_json_file") {
  const char* path = "test_json_scratch.json";
  {
    std::ofstream out(path);
    out << "{\"domain\": [\"a\"], \"relations\": {}}";
  }
  Json j = load_json_file(path);
  CHECK(structure_from_json(j).size() == 1);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_json_file(path), IoError);
  std::remove(path);
  CHECK_THROWS_AS(load_json_file(path), IoError);
}
