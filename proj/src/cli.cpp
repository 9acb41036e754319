#include "dts/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dts/harness.hpp"
#include "dts/semantics.hpp"

namespace dts {

namespace {

struct EvalOptions {
  std::string model_path;
  std::string teams_path;
  std::string formula_text;
  std::string formula_path;
  std::vector<std::string> quantifier_paths;
  std::string engine = "team";
  bool sentence = false;
  int max_domain = 4;
  int max_team = 6;
  bool pretty = false;
};

struct DiffOptions {
  std::string spec_path;
  std::vector<std::string> quantifier_paths;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool pretty = false;
};

struct QuantCheckOptions {
  std::vector<std::string> quantifier_paths;
  int max_size = 3;
  bool pretty = false;
};

void emit(std::ostream& out, const Json& j, bool pretty) {
  if (pretty) {
    out << j.dump(2) << "\n";
  } else {
    out << j.dump() << "\n";
  }
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", Json{{"kind", kind}, {"message", message}}}};
}

Registry build_registry(const std::vector<std::string>& paths) {
  Registry registry;
  for (const auto& path : paths) {
    for (const auto& def : quantifier_file_from_json(load_json_file(path))) {
      registry.load_extensional(def);
    }
  }
  return registry;
}

std::string formula_source(const EvalOptions& o) {
  if (!o.formula_text.empty() && !o.formula_path.empty()) {
    throw ValueError("give --formula or --formula-file, not both");
  }
  if (!o.formula_text.empty()) return o.formula_text;
  if (o.formula_path.empty()) {
    throw ValueError("a formula is required (--formula or --formula-file)");
  }
  std::ifstream in(o.formula_path);
  if (!in) throw IoError("cannot open '" + o.formula_path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

DoubleTeam input_teams(const EvalOptions& o, const Structure& a) {
  if (o.sentence) return DoubleTeam(Team::singleton_empty(), Team());
  if (o.teams_path.empty()) {
    throw ValueError("either --teams or --sentence is required");
  }
  return double_team_from_json(load_json_file(o.teams_path), a);
}

Json stats_json(const EvalStats& stats) {
  return Json{{"nodesVisited", stats.nodes_visited},
              {"witnessFunctionsTried", stats.witness_functions_tried}};
}

Json stats_json(const GameStats& stats) {
  return Json{{"positionsExpanded", stats.positions_expanded},
              {"candidatesTried", stats.candidates_tried}};
}

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  Registry registry = build_registry(o.quantifier_paths);
  Structure a = structure_from_json(load_json_file(o.model_path));
  Formula f = parse(formula_source(o), registry);
  DoubleTeam dt = input_teams(o, a);
  EvalConfig config;
  config.max_domain = o.max_domain;
  config.max_team = o.max_team;

  Json result;
  bool verdict = false;
  if (o.engine == "team") {
    Verdict v = eval(a, dt, f, config);
    verdict = v.value;
    result = Json{{"verdict", verdict},
                  {"engine", "double-team"},
                  {"stats", stats_json(v.stats)}};
  } else if (o.engine == "fo") {
    long long checked = 0;
    verdict = true;
    for (const Assignment& s : dt.U.members()) {
      ++checked;
      if (!eval_fo(a, s, f, config)) verdict = false;
    }
    for (const Assignment& t : dt.V.members()) {
      ++checked;
      if (eval_fo(a, t, f, config)) verdict = false;
    }
    result = Json{{"verdict", verdict},
                  {"engine", "classical-fo"},
                  {"stats", Json{{"assignmentsChecked", checked}}}};
  } else {
    GameStats stats;
    auto strategy = find_uniform_survival_strategy(a, dt.U, dt.V, f, {}, &stats);
    verdict = strategy.has_value();
    result = Json{{"verdict", verdict}, {"engine", "game"}, {"stats", stats_json(stats)}};
  }
  emit(out, result, o.pretty);
  return verdict ? 0 : 1;
}

int cmd_game(const EvalOptions& o, std::ostream& out) {
  Registry registry = build_registry(o.quantifier_paths);
  Structure a = structure_from_json(load_json_file(o.model_path));
  Formula f = parse(formula_source(o), registry);
  DoubleTeam dt = input_teams(o, a);

  GameStats stats;
  std::optional<Strategy> strategy;
  try {
    strategy = find_uniform_survival_strategy(a, dt.U, dt.V, f, {}, &stats);
  } catch (const SearchCapExceeded& e) {
    Json result = error_json(e.kind(), e.what());
    result["strategy"] = nullptr;
    result["capExceeded"] = true;
    emit(out, result, o.pretty);
    return 2;
  }

  if (!strategy) {
    Json result{{"verdict", false},
                {"engine", "game"},
                {"strategy", nullptr},
                {"exhausted", true},
                {"stats", stats_json(stats)}};
    emit(out, result, o.pretty);
    return 1;
  }

  PlaysResult plays = enumerate_plays(a, dt.U, dt.V, f, *strategy);
  Json result{{"verdict", true},
              {"engine", "game"},
              {"strategy", to_json(a, *strategy)},
              {"finalTeams", to_json(a, plays.final_teams)},
              {"stats", stats_json(stats)}};
  emit(out, result, o.pretty);
  return 0;
}

int cmd_diff(const DiffOptions& o, std::ostream& out) {
  Registry registry = build_registry(o.quantifier_paths);
  CorpusSpec spec = corpus_spec_from_json(load_json_file(o.spec_path));
  if (o.seed_given) spec.seed = o.seed;
  DiffReport report = spec.mode == "flatness" ? diff_flatness(spec, registry)
                                              : diff_game(spec, registry);
  emit(out, report.json, o.pretty);
  return report.discrepancies == 0 && report.inconclusive == 0 ? 0 : 1;
}

int cmd_quant_check(const QuantCheckOptions& o, std::ostream& out) {
  std::vector<QuantifierPtr> targets;
  if (o.quantifier_paths.empty()) {
    Registry registry;
    targets = registry.closure_check_candidates();
  } else {
    for (const auto& path : o.quantifier_paths) {
      for (const auto& def : quantifier_file_from_json(load_json_file(path))) {
        targets.push_back(make_extensional(def));
      }
    }
  }

  Json checked = Json::array();
  Json violations = Json::array();
  for (const auto& q : targets) {
    checked.push_back(Json{{"name", q->name}, {"type", q->type_sig}});
    for (const IsoViolation& v : check_iso_closure(*q, o.max_size)) {
      Structure canon = canonical_structure(v.size);
      Json rels = Json::array();
      for (const TupleSet& ts : v.rels) {
        Json jts = Json::array();
        for (const Tuple& t : ts) {
          Json jt = Json::array();
          for (Elem e : t) jt.push_back(canon.label(e));
          jts.push_back(std::move(jt));
        }
        rels.push_back(std::move(jts));
      }
      violations.push_back(Json{{"name", q->name},
                                {"size", v.size},
                                {"permutation", v.perm},
                                {"relations", std::move(rels)}});
    }
  }
  Json result{{"maxSize", o.max_size}, {"checked", std::move(checked)},
              {"violations", violations}};
  emit(out, result, o.pretty);
  return violations.empty() ? 0 : 1;
}

void add_eval_flags(CLI::App* cmd, EvalOptions& o, bool with_engine) {
  cmd->add_option("--model", o.model_path, "structure JSON file")->required();
  cmd->add_option("--teams", o.teams_path, "double-team JSON file");
  cmd->add_option("--formula", o.formula_text, "formula text");
  cmd->add_option("--formula-file", o.formula_path, "file holding the formula text");
  cmd->add_option("--quantifiers", o.quantifier_paths,
                  "extensional quantifier definition files");
  if (with_engine) {
    cmd->add_option("--engine", o.engine, "semantics to run")
        ->check(CLI::IsMember({"team", "fo", "game"}));
    cmd->add_option("--max-domain", o.max_domain, "largest accepted domain");
    cmd->add_option("--max-team", o.max_team, "largest accepted team");
  }
  cmd->add_flag("--sentence", o.sentence,
                "evaluate as a sentence (U = {empty assignment}, V = empty)");
  cmd->add_flag("--pretty", o.pretty, "indent the JSON output");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"finite-model checker for double-team semantics"};
  app.require_subcommand(1);

  EvalOptions eval_opts;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a formula");
  add_eval_flags(eval_cmd, eval_opts, true);

  EvalOptions game_opts;
  CLI::App* game_cmd =
      app.add_subcommand("game", "search for a uniform survival strategy");
  add_eval_flags(game_cmd, game_opts, false);

  DiffOptions diff_opts;
  CLI::App* diff_cmd = app.add_subcommand("diff", "run a differential sweep");
  diff_cmd->add_option("spec", diff_opts.spec_path, "corpus spec JSON file")->required();
  diff_cmd->add_option("--quantifiers", diff_opts.quantifier_paths,
                       "extensional quantifier definition files");
  diff_cmd->add_option("--seed", diff_opts.seed, "override the spec's seed");
  diff_cmd->add_flag("--pretty", diff_opts.pretty, "indent the JSON output");

  QuantCheckOptions qc_opts;
  CLI::App* qc_cmd =
      app.add_subcommand("quant-check", "check isomorphism closure of quantifiers");
  qc_cmd->add_option("--quantifiers", qc_opts.quantifier_paths,
                     "definition files to check (default: builtins)");
  qc_cmd->add_option("--max-size", qc_opts.max_size, "largest domain size checked")
      ->check(CLI::Range(1, 7));
  qc_cmd->add_flag("--pretty", qc_opts.pretty, "indent the JSON output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit(out, error_json("usage", e.what()), false);
    return 2;
  }
  diff_opts.seed_given = diff_cmd->count("--seed") > 0;

  bool pretty = eval_opts.pretty || game_opts.pretty || diff_opts.pretty || qc_opts.pretty;
  try {
    if (app.got_subcommand(eval_cmd)) return cmd_eval(eval_opts, out);
    if (app.got_subcommand(game_cmd)) return cmd_game(game_opts, out);
    if (app.got_subcommand(diff_cmd)) return cmd_diff(diff_opts, out);
    return cmd_quant_check(qc_opts, out);
  } catch (const Error& e) {
    emit(out, error_json(e.kind(), e.what()), pretty);
    return 2;
  } catch (const std::exception& e) {
    emit(out, error_json("internal", e.what()), pretty);
    return 2;
  }
}

}  // namespace dts
