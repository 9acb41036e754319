#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "dts/cli.hpp"
#include "dts/json_io.hpp"

using namespace dts;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
  Json json;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  int code = run_cli(args, out);
  RunResult result{code, out.str(), Json()};
  if (!result.output.empty() && (result.output[0] == '{' || result.output[0] == '[')) {
    result.json = Json::parse(result.output);
  }
  return result;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

struct Fixture {
  Fixture() {
    write_file("cli_model.json",
               R"({"domain": ["0", "1"],
                   "relations": {"P": {"arity": 1, "tuples": [["0"]]}}})");
    write_file("cli_teams.json",
               R"({"U": {"vars": ["x"], "assignments": [{"x": "0"}]},
                   "V": {"vars": ["x"], "assignments": [{"x": "1"}]}})");
    write_file("cli_cex_teams.json",
               R"({"U": {"vars": [], "assignments": []},
                   "V": {"vars": [], "assignments": [{}]}})");
  }
};

}  // namespace

TEST_CASE("eval verdicts and exit codes") {
  Fixture fx;
  auto t = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                "--formula", "P(x)"});
  CHECK(t.exit_code == 0);
  CHECK(t.json["verdict"] == true);
  CHECK(t.json["engine"] == "double-team");
  CHECK(t.json["stats"].contains("nodesVisited"));

  auto f = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                "--formula", "~P(x)"});
  CHECK(f.exit_code == 1);
  CHECK(f.json["verdict"] == false);
}

TEST_CASE("engine selector") {
  Fixture fx;
  auto fo = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                 "--formula", "P(x)", "--engine", "fo"});
  CHECK(fo.exit_code == 0);
  CHECK(fo.json["engine"] == "classical-fo");

  auto game = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                   "--formula", "P(x)", "--engine", "game"});
  CHECK(game.exit_code == 0);
  CHECK(game.json["engine"] == "game");

  auto bad = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                  "--formula", "P(x)", "--engine", "quantum"});
  CHECK(bad.exit_code == 2);
  CHECK(bad.json["error"]["kind"] == "usage");
}

TEST_CASE("sentence mode") {
  Fixture fx;
  auto t = run({"eval", "--model", "cli_model.json", "--sentence", "--formula",
                "Q<exists> x . (P(x))"});
  CHECK(t.exit_code == 0);

  auto cex = run({"eval", "--model", "cli_model.json", "--sentence", "--formula",
                  "Q<dual(empty)> x . (@<none>(x ; x))"});
  CHECK(cex.exit_code == 1);
  CHECK(cex.json["verdict"] == false);

  auto open = run({"eval", "--model", "cli_model.json", "--sentence", "--formula", "P(x)"});
  CHECK(open.exit_code == 2);
  CHECK(open.json["error"]["kind"] == "eval");
}

TEST_CASE("counterexample instance agrees across engines") {
  Fixture fx;
  const std::string phi = "Q<dual(empty)> x . (@<none>(x ; x))";
  auto ev = run({"eval", "--model", "cli_model.json", "--teams", "cli_cex_teams.json",
                 "--formula", phi});
  CHECK(ev.exit_code == 1);

  auto game = run({"game", "--model", "cli_model.json", "--teams", "cli_cex_teams.json",
                   "--formula", phi});
  CHECK(game.exit_code == 1);
  CHECK(game.json["strategy"].is_null());
  CHECK(game.json["exhausted"] == true);
}

TEST_CASE("game witness output") {
  Fixture fx;
  auto found = run({"game", "--model", "cli_model.json", "--sentence", "--formula",
                    "Q<exists> x . (P(x))"});
  CHECK(found.exit_code == 0);
  CHECK(found.json["verdict"] == true);
  REQUIRE(found.json["strategy"].is_array());
  REQUIRE(found.json["strategy"].size() == 1);
  CHECK(found.json["strategy"][0]["choice"]["set"] == Json::array({"0"}));
  CHECK(found.json["finalTeams"].is_array());

  auto missing = run({"game", "--model", "cli_model.json", "--teams",
                      "cli_no_such_teams.json", "--formula", "P(x)"});
  CHECK(missing.exit_code == 2);
  CHECK(missing.json["error"]["kind"] == "io");

  write_file("cli_empty_teams.json",
             R"({"U": {"vars": ["x"], "assignments": []},
                 "V": {"vars": ["x"], "assignments": []}})");
  auto empty_teams = run({"game", "--model", "cli_model.json", "--teams",
                          "cli_empty_teams.json", "--formula", "P(x)"});
  CHECK(empty_teams.exit_code == 0);
  CHECK(empty_teams.json["strategy"] == Json::array());
}

TEST_CASE("game rejects quantifiers beyond type (1)") {
  Fixture fx;
  write_file("cli_pairq.json", R"({"quantifiers": [{"name": "pairq",
                                                    "type": [1, 1],
                                                    "tables": {}}]})");
  auto r = run({"game", "--model", "cli_model.json", "--sentence", "--quantifiers",
                "cli_pairq.json", "--formula", "Q<pairq> x, y . (P(x), P(y))"});
  CHECK(r.exit_code == 2);
  CHECK(r.json["error"]["kind"] == "game");

  auto ev = run({"eval", "--model", "cli_model.json", "--sentence", "--quantifiers",
                 "cli_pairq.json", "--formula", "Q<pairq> x, y . (P(x), P(y))"});
  CHECK(ev.exit_code == 1);  // empty tables: never a member
}

TEST_CASE("unknown names are diagnosed") {
  Fixture fx;
  auto r = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                "--formula", "Q<zzz> x . (P(x))"});
  CHECK(r.exit_code == 2);
  CHECK(r.json["error"]["kind"] == "unknown-name");
}

TEST_CASE("input validation errors") {
  Fixture fx;
  auto nofile = run({"eval", "--model", "cli_missing.json", "--teams", "cli_teams.json",
                     "--formula", "P(x)"});
  CHECK(nofile.exit_code == 2);
  CHECK(nofile.json["error"]["kind"] == "io");

  auto noteams = run({"eval", "--model", "cli_model.json", "--formula", "P(x)"});
  CHECK(noteams.exit_code == 2);
  CHECK(noteams.json["error"]["kind"] == "value");

  auto noformula = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json"});
  CHECK(noformula.exit_code == 2);
  CHECK(noformula.json["error"]["kind"] == "value");

  write_file("cli_formula.txt", "P(x) | ~P(x)\n");
  auto both = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                   "--formula", "P(x)", "--formula-file", "cli_formula.txt"});
  CHECK(both.exit_code == 2);

  auto fromfile = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                       "--formula-file", "cli_formula.txt"});
  CHECK(fromfile.exit_code == 1);

  auto nosub = run({});
  CHECK(nosub.exit_code == 2);
  CHECK(nosub.json["error"]["kind"] == "usage");
}

TEST_CASE("diff exit semantics") {
  write_file("cli_diff_ok.json",
             R"({"mode": "flatness", "vocab": {"P": 1}, "maxDomain": 2,
                 "maxTeamSize": 2, "formulaDepth": 1, "vars": ["x"],
                 "quantifiers": ["exists", "forall"], "atoms": [],
                 "seed": 0, "sampleCount": 0})");
  auto ok = run({"diff", "cli_diff_ok.json"});
  CHECK(ok.exit_code == 0);
  CHECK(ok.json["counts"]["instances"] == 864);
  CHECK(ok.json["counts"]["discrepancies"] == 0);
  CHECK(ok.json["counts"]["inconclusive"] == 0);

  write_file("cli_diff_infeasible.json",
             R"({"mode": "flatness", "vocab": {"P": 1, "R": 2}, "maxDomain": 9,
                 "maxTeamSize": 2, "formulaDepth": 2, "vars": ["x"],
                 "quantifiers": ["exists"], "atoms": [], "seed": 0, "sampleCount": 0})");
  auto infeasible = run({"diff", "cli_diff_infeasible.json"});
  CHECK(infeasible.exit_code == 2);
  CHECK(infeasible.json["error"]["kind"] == "value");

  write_file("cli_diff_bad.json", R"({"mode": "both"})");
  auto bad = run({"diff", "cli_diff_bad.json"});
  CHECK(bad.exit_code == 2);
}

TEST_CASE("diff reports capped instances and exits nonzero") {
  // Q<even> at domain size 4 has 8-member lifts on both sides, so instances
  // whose team sizes sum past five overrun the enumeration cap.
  write_file("cli_diff_capped.json",
             R"json({"mode": "flatness", "vocab": {}, "maxDomain": 4,
                 "maxTeamSize": 4, "formulaDepth": 1, "vars": ["x"],
                 "quantifiers": ["even"], "atoms": [], "seed": 0,
                 "sampleCount": 0})json");
  auto capped = run({"diff", "cli_diff_capped.json"});
  CHECK(capped.exit_code == 1);
  CHECK(capped.json["counts"]["discrepancies"] == 0);
  CHECK(capped.json["counts"]["inconclusive"].get<long long>() > 0);
  CHECK(capped.json["inconclusive"][0]["error"]["kind"] == "cap");
}

TEST_CASE("diff seed override") {
  write_file("cli_diff_sampled.json",
             R"({"mode": "flatness", "vocab": {"P": 1}, "maxDomain": 2,
                 "maxTeamSize": 2, "formulaDepth": 1, "vars": ["x"],
                 "quantifiers": ["exists"], "atoms": [], "seed": 0,
                 "sampleCount": 25})");
  auto base = run({"diff", "cli_diff_sampled.json"});
  CHECK(base.exit_code == 0);
  CHECK(base.json["spec"]["seed"] == 0);
  auto reseeded = run({"diff", "cli_diff_sampled.json", "--seed", "9"});
  CHECK(reseeded.json["spec"]["seed"] == 9);
}

TEST_CASE("quant-check builtins pass") {
  auto r = run({"quant-check"});
  CHECK(r.exit_code == 0);
  CHECK(r.json["violations"].empty());
  CHECK(r.json["maxSize"] == 3);
  CHECK(!r.json["checked"].empty());
}

TEST_CASE("quant-check flags closure violations") {
  write_file("cli_pick0.json",
             R"({"quantifiers": [{"name": "pick0", "type": [1],
                 "tables": {"2": [[[["0"]]]]}}]})");
  auto r = run({"quant-check", "--quantifiers", "cli_pick0.json", "--max-size", "3"});
  CHECK(r.exit_code == 1);
  REQUIRE(!r.json["violations"].empty());
  const Json& v = r.json["violations"][0];
  CHECK(v["name"] == "pick0");
  CHECK(v["size"] == 2);
  CHECK(v["permutation"] == Json::array({1, 0}));
  CHECK(v["relations"] == Json::array({Json::array({Json::array({"0"})})}));

  auto bad = run({"quant-check", "--quantifiers", "cli_missing.json"});
  CHECK(bad.exit_code == 2);
  CHECK(bad.json["error"]["kind"] == "io");
}

TEST_CASE("pretty output stays valid json") {
  Fixture fx;
  auto r = run({"eval", "--model", "cli_model.json", "--teams", "cli_teams.json",
                "--formula", "P(x)", "--pretty"});
  CHECK(r.exit_code == 0);
  CHECK(r.output.find('\n') != std::string::npos);
  CHECK(r.json["verdict"] == true);
}

TEST_CASE("help is available") {
  auto r = run({"--help"});
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("eval") != std::string::npos);
}
