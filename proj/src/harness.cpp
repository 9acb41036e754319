#include "dts/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "dts/semantics.hpp"

namespace dts {

namespace {

constexpr double kMaxInstances = 2e7;

void validate_spec(const CorpusSpec& spec) {
  if (spec.mode != "flatness" && spec.mode != "game") {
    throw ValueError("corpus mode must be \"flatness\" or \"game\", got \"" + spec.mode + "\"");
  }
  if (spec.max_domain < 1) throw ValueError("maxDomain must be positive");
  if (spec.max_team_size < 1) throw ValueError("maxTeamSize must be positive");
  if (spec.formula_depth < 0) throw ValueError("formulaDepth must be nonnegative");
  if (spec.vars.empty()) throw ValueError("the corpus needs at least one variable");
  for (const auto& v : spec.vars) {
    if (!is_identifier(v)) throw ValueError("bad corpus variable: '" + v + "'");
  }
  std::set<std::string> seen(spec.vars.begin(), spec.vars.end());
  if (seen.size() != spec.vars.size()) throw ValueError("duplicate corpus variable");
  if (spec.quantifiers.empty()) throw ValueError("the quantifier allowlist is empty");
  for (const auto& [name, arity] : spec.vocab) {
    if (!is_identifier(name)) throw ValueError("bad relation name: '" + name + "'");
    if (arity < 1) throw ValueError("relation arity must be positive");
  }
  if (spec.sample_count < 0) throw ValueError("sampleCount must be nonnegative");
}

double formula_pool_count(const CorpusSpec& spec) {
  double nv = static_cast<double>(spec.vars.size());
  double level = nv * nv;
  for (const auto& [name, arity] : spec.vocab) level += std::pow(nv, arity);
  level += static_cast<double>(spec.atoms.size()) * nv * nv;
  double total = level;
  double cum = level;      // formulas of depth < d+1
  double cum_prev = 0;     // formulas of depth < d
  double quants = static_cast<double>(spec.quantifiers.size()) * nv;
  for (int d = 1; d <= spec.formula_depth; ++d) {
    double next = level + (cum * cum - cum_prev * cum_prev) + quants * level;
    total += next;
    cum_prev = cum;
    cum += next;
    level = next;
  }
  return total;
}

// All width-length tuples over {0..n-1}, lexicographic, first coordinate
// most significant.
std::vector<Tuple> all_tuples(int n, int width) {
  std::vector<Tuple> out;
  Tuple t(width, 0);
  while (true) {
    out.push_back(t);
    int i = width - 1;
    while (i >= 0 && t[i] == static_cast<Elem>(n - 1)) {
      t[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++t[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<std::string> canonical_labels(int n) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

std::vector<Assignment> assignment_pool(const std::vector<std::string>& vars, int n) {
  std::vector<Assignment> pool;
  for (const Tuple& t : all_tuples(n, static_cast<int>(vars.size()))) {
    Assignment s;
    for (std::size_t i = 0; i < vars.size(); ++i) s.binds.emplace_back(vars[i], t[i]);
    std::sort(s.binds.begin(), s.binds.end());
    pool.push_back(std::move(s));
  }
  return pool;
}

Json instance_json(long long index, const Structure& a, const DoubleTeam& dt,
                   const Formula& f) {
  return Json{{"index", index},
              {"structure", to_json(a)},
              {"dt", to_json(a, dt)},
              {"formula", pretty(f)}};
}

Team sample_team(SplitMix64& rng, const std::vector<std::string>& vars,
                 const std::vector<Assignment>& pool, int max_team_size) {
  std::uint64_t max_k = std::min<std::uint64_t>(pool.size(), max_team_size);
  std::uint64_t k = rng.below(max_k + 1);
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::set<Assignment> members;
  for (std::uint64_t j = 0; j < k; ++j) {
    std::uint64_t pick = j + rng.below(idx.size() - j);
    std::swap(idx[j], idx[pick]);
    members.insert(pool[idx[j]]);
  }
  return Team(vars, std::move(members));
}

template <typename CheckFn>
DiffReport run_diff(const CorpusSpec& spec, const Registry& registry, CheckFn&& check) {
  auto start = std::chrono::steady_clock::now();
  Json discrepancies = Json::array();
  Json inconclusive = Json::array();
  long long count = 0;
  enumerate_instances(spec, registry,
                      [&](long long index, const Structure& a, const DoubleTeam& dt,
                          const Formula& f) {
                        ++count;
                        check(index, a, dt, f, discrepancies, inconclusive);
                      });
  DiffReport report;
  report.instances = count;
  report.discrepancies = static_cast<long long>(discrepancies.size());
  report.inconclusive = static_cast<long long>(inconclusive.size());
  report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  report.json = Json{{"spec", to_json(spec)},
                     {"counts", Json{{"instances", report.instances},
                                     {"discrepancies", report.discrepancies},
                                     {"inconclusive", report.inconclusive}}},
                     {"discrepancies", std::move(discrepancies)},
                     {"inconclusive", std::move(inconclusive)},
                     {"wallMs", report.wall_ms}};
  return report;
}

EvalConfig corpus_config(const CorpusSpec& spec) {
  EvalConfig config;
  config.max_domain = spec.max_domain;
  config.max_team = spec.max_team_size;
  return config;
}

}  // namespace

CorpusSpec corpus_spec_from_json(const Json& j) {
  if (!j.is_object()) throw IoError("corpus spec must be a JSON object");
  CorpusSpec spec;
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
      throw IoError(std::string("corpus spec needs a string \"") + key + "\"");
    }
    return j.at(key).get<std::string>();
  };
  auto num = [&](const char* key, long long fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
      throw IoError(std::string("corpus spec field \"") + key + "\" must be an integer");
    }
    return j.at(key).get<long long>();
  };
  auto strings = [&](const char* key, std::vector<std::string> fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_array()) {
      throw IoError(std::string("corpus spec field \"") + key +
                    "\" must be an array of strings");
    }
    std::vector<std::string> out;
    for (const Json& s : j.at(key)) {
      if (!s.is_string()) {
        throw IoError(std::string("corpus spec field \"") + key +
                      "\" must be an array of strings");
      }
      out.push_back(s.get<std::string>());
    }
    return out;
  };

  spec.mode = str("mode");
  if (j.contains("vocab")) {
    if (!j.at("vocab").is_object()) {
      throw IoError("corpus spec \"vocab\" must map relation names to arities");
    }
    for (const auto& [name, arity] : j.at("vocab").items()) {
      if (!arity.is_number_integer()) {
        throw IoError("corpus spec \"vocab\" must map relation names to arities");
      }
      spec.vocab[name] = arity.get<int>();
    }
  }
  spec.max_domain = static_cast<int>(num("maxDomain", spec.max_domain));
  spec.max_team_size = static_cast<int>(num("maxTeamSize", spec.max_team_size));
  spec.formula_depth = static_cast<int>(num("formulaDepth", spec.formula_depth));
  spec.vars = strings("vars", spec.vars);
  spec.quantifiers = strings("quantifiers", {});
  spec.atoms = strings("atoms", {});
  spec.seed = static_cast<std::uint64_t>(num("seed", 0));
  spec.sample_count = num("sampleCount", 0);
  validate_spec(spec);
  return spec;
}

Json to_json(const CorpusSpec& spec) {
  return Json{{"mode", spec.mode},
              {"vocab", spec.vocab},
              {"maxDomain", spec.max_domain},
              {"maxTeamSize", spec.max_team_size},
              {"formulaDepth", spec.formula_depth},
              {"vars", spec.vars},
              {"quantifiers", spec.quantifiers},
              {"atoms", spec.atoms},
              {"seed", spec.seed},
              {"sampleCount", spec.sample_count}};
}

SplitMix64 SplitMix64::keyed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 ix(index);
  return SplitMix64(seed ^ ix.next());
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return v % bound;
}

std::vector<Structure> enumerate_structures(const CorpusSpec& spec) {
  validate_spec(spec);
  std::vector<Structure> out;
  for (int n = 1; n <= spec.max_domain; ++n) {
    std::vector<std::string> labels = canonical_labels(n);
    std::vector<std::pair<std::string, std::vector<Tuple>>> slots;
    long long total_bits = 0;
    for (const auto& [name, arity] : spec.vocab) {
      slots.emplace_back(name, all_tuples(n, arity));
      total_bits += static_cast<long long>(slots.back().second.size());
    }
    if (total_bits >= 62 ||
        static_cast<double>(out.size()) + std::ldexp(1.0, static_cast<int>(total_bits)) >
            kMaxInstances) {
      throw ValueError("too many structures to enumerate at size " + std::to_string(n));
    }
    for (long long mask = 0; mask < (1LL << total_bits); ++mask) {
      std::map<std::string, Relation> rels;
      long long bit = 0;
      for (const auto& [name, tuples] : slots) {
        Relation r{static_cast<int>(spec.vocab.at(name)), {}};
        for (const Tuple& t : tuples) {
          if (mask & (1LL << bit)) r.tuples.insert(t);
          ++bit;
        }
        rels[name] = std::move(r);
      }
      out.push_back(Structure(labels, std::move(rels)));
    }
  }
  return out;
}

std::vector<Team> enumerate_teams(const Structure& a, const std::vector<std::string>& vars,
                                  int max_team_size) {
  auto pool = assignment_pool(vars, static_cast<int>(a.size()));
  std::size_t max_k = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(max_team_size));

  double count = 0;
  double binom = 1;
  for (std::size_t k = 0; k <= max_k; ++k) {
    count += binom;
    binom = binom * static_cast<double>(pool.size() - k) / static_cast<double>(k + 1);
  }
  if (count > kMaxInstances) throw ValueError("too many teams to enumerate");

  std::vector<Team> out;
  for (std::size_t k = 0; k <= max_k; ++k) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::set<Assignment> members;
      for (std::size_t i : idx) members.insert(pool[i]);
      out.push_back(Team(vars, std::move(members)));
      int i = static_cast<int>(k) - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == pool.size() - k + static_cast<std::size_t>(i)) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (std::size_t l = static_cast<std::size_t>(i) + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
    }
  }
  return out;
}

std::vector<std::vector<Formula>> enumerate_formula_levels(const CorpusSpec& spec,
                                                           const Registry& registry) {
  validate_spec(spec);
  if (formula_pool_count(spec) > kMaxInstances) {
    throw ValueError("the formula pool is infeasibly large");
  }

  std::vector<QuantifierPtr> quants;
  for (const auto& name : spec.quantifiers) {
    quants.push_back(registry.resolve_quantifier(parse_quant_name(name), {1}));
  }

  std::vector<Formula> base;
  for (const auto& v : spec.vars) {
    for (const auto& w : spec.vars) base.push_back(Formula::equality(v, w));
  }
  for (const auto& [name, arity] : spec.vocab) {
    for (const Tuple& t : all_tuples(static_cast<int>(spec.vars.size()), arity)) {
      std::vector<std::string> args;
      for (Elem i : t) args.push_back(spec.vars[i]);
      base.push_back(Formula::rel_atom(name, VarTuple(std::move(args))));
    }
  }
  for (const auto& name : spec.atoms) {
    if (name == "dep") {
      AtomPtr atom = registry.resolve_atom(name, {2}, {});
      for (const auto& v : spec.vars) {
        for (const auto& w : spec.vars) {
          base.push_back(Formula::gatom(atom, {VarTuple{v, w}}, {}));
        }
      }
    } else {
      AtomPtr atom = registry.resolve_atom(name, {1}, {1});
      for (const auto& v : spec.vars) {
        for (const auto& w : spec.vars) {
          base.push_back(Formula::gatom(atom, {VarTuple{v}}, {VarTuple{w}}));
        }
      }
    }
  }

  std::vector<std::vector<Formula>> levels;
  levels.push_back(std::move(base));
  for (int d = 1; d <= spec.formula_depth; ++d) {
    const auto& prev = levels.back();
    std::vector<Formula> next;
    for (const Formula& f : prev) next.push_back(Formula::lnot(f));
    // Disjunctions where the deeper side sits exactly one level down.
    for (std::size_t la = 0; la < levels.size(); ++la) {
      for (const Formula& a : levels[la]) {
        for (std::size_t lb = 0; lb < levels.size(); ++lb) {
          if (std::max(la, lb) + 1 != static_cast<std::size_t>(d)) continue;
          for (const Formula& b : levels[lb]) next.push_back(Formula::lor(a, b));
        }
      }
    }
    for (const auto& q : quants) {
      for (const auto& v : spec.vars) {
        for (const Formula& f : prev) {
          next.push_back(Formula::quant(q, {VarTuple{v}}, {f}));
        }
      }
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

double estimate_instance_count(const CorpusSpec& spec) {
  validate_spec(spec);
  if (spec.sample_count > 0) return static_cast<double>(spec.sample_count);
  double formulas = formula_pool_count(spec);
  double total = 0;
  for (int n = 1; n <= spec.max_domain; ++n) {
    double structs = 1;
    for (const auto& [name, arity] : spec.vocab) {
      structs *= std::pow(2.0, std::pow(static_cast<double>(n), arity));
    }
    double pool = std::pow(static_cast<double>(n), static_cast<double>(spec.vars.size()));
    double teams = 0;
    double binom = 1;
    for (int k = 0; k <= spec.max_team_size && k <= pool; ++k) {
      teams += binom;
      binom = binom * (pool - k) / static_cast<double>(k + 1);
    }
    total += structs * teams * teams * formulas;
  }
  return total;
}

void enumerate_instances(const CorpusSpec& spec, const Registry& registry,
                         const InstanceVisitor& visit) {
  validate_spec(spec);
  auto levels = enumerate_formula_levels(spec, registry);
  std::vector<const Formula*> formulas;
  for (const auto& level : levels) {
    for (const Formula& f : level) formulas.push_back(&f);
  }

  if (spec.sample_count > 0) {
    if (static_cast<double>(spec.sample_count) > kMaxInstances) {
      throw ValueError("sampleCount exceeds the instance budget");
    }
    for (long long i = 0; i < spec.sample_count; ++i) {
      SplitMix64 rng = SplitMix64::keyed(spec.seed, static_cast<std::uint64_t>(i));
      int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_domain)));
      std::map<std::string, Relation> rels;
      for (const auto& [name, arity] : spec.vocab) {
        Relation r{arity, {}};
        for (const Tuple& t : all_tuples(n, arity)) {
          if (rng.below(2) == 1) r.tuples.insert(t);
        }
        rels[name] = std::move(r);
      }
      Structure a(canonical_labels(n), std::move(rels));
      auto pool = assignment_pool(spec.vars, n);
      Team u = sample_team(rng, spec.vars, pool, spec.max_team_size);
      Team v = sample_team(rng, spec.vars, pool, spec.max_team_size);
      const Formula& f = *formulas[rng.below(formulas.size())];
      visit(i, a, DoubleTeam(std::move(u), std::move(v)), f);
    }
    return;
  }

  double estimate = estimate_instance_count(spec);
  if (estimate > kMaxInstances) {
    throw ValueError("exhaustive corpus is infeasible (about " +
                     std::to_string(static_cast<double>(estimate)) +
                     " instances; the cap is " + std::to_string(kMaxInstances) + ")");
  }

  long long index = 0;
  for (const Structure& a : enumerate_structures(spec)) {
    auto teams = enumerate_teams(a, spec.vars, spec.max_team_size);
    for (const Team& u : teams) {
      for (const Team& v : teams) {
        DoubleTeam dt(u, v);
        for (const Formula* f : formulas) visit(index++, a, dt, *f);
      }
    }
  }
}

DiffReport diff_flatness(const CorpusSpec& spec, const Registry& registry) {
  if (spec.mode != "flatness") throw ValueError("diff_flatness needs a \"flatness\" corpus");
  if (!spec.atoms.empty()) {
    throw ValueError("flatness sweeps admit no generalized atoms");
  }
  EvalConfig config = corpus_config(spec);
  return run_diff(spec, registry,
                  [&](long long index, const Structure& a, const DoubleTeam& dt,
                      const Formula& f, Json& discrepancies, Json& inconclusive) {
                    try {
                      FlatnessReport fr = flatness_check(a, dt, f, config);
                      if (!fr.agree) {
                        Json rec = instance_json(index, a, dt, f);
                        rec["teamValue"] = fr.team_value;
                        rec["foValue"] = fr.fo_value;
                        discrepancies.push_back(std::move(rec));
                      }
                    } catch (const Error& e) {
                      Json rec = instance_json(index, a, dt, f);
                      rec["error"] = Json{{"kind", e.kind()}, {"message", e.what()}};
                      inconclusive.push_back(std::move(rec));
                    }
                  });
}

DiffReport diff_game(const CorpusSpec& spec, const Registry& registry,
                     const GameLimits& limits) {
  if (spec.mode != "game") throw ValueError("diff_game needs a \"game\" corpus");
  EvalConfig config = corpus_config(spec);
  return run_diff(
      spec, registry,
      [&](long long index, const Structure& a, const DoubleTeam& dt, const Formula& f,
          Json& discrepancies, Json& inconclusive) {
        auto record_error = [&](const char* stage, const Error& e) {
          Json rec = instance_json(index, a, dt, f);
          rec["stage"] = stage;
          rec["error"] = Json{{"kind", e.kind()}, {"message", e.what()}};
          inconclusive.push_back(std::move(rec));
        };
        bool ev = false;
        try {
          ev = eval(a, dt, f, config).value;
        } catch (const Error& e) {
          record_error("eval", e);
          return;
        }
        std::optional<Strategy> strategy;
        try {
          strategy = find_uniform_survival_strategy(a, dt.U, dt.V, f, limits);
          if (strategy && !verify_strategy(a, dt.U, dt.V, f, *strategy)) {
            Json rec = instance_json(index, a, dt, f);
            rec["verifyFailed"] = true;
            rec["witness"] = to_json(a, *strategy);
            discrepancies.push_back(std::move(rec));
            return;
          }
        } catch (const Error& e) {
          record_error("game", e);
          return;
        }
        if (ev != strategy.has_value()) {
          Json rec = instance_json(index, a, dt, f);
          rec["evalValue"] = ev;
          rec["strategyFound"] = strategy.has_value();
          if (strategy) {
            rec["witness"] = to_json(a, *strategy);
          } else {
            rec["witness"] = nullptr;
            rec["exhausted"] = true;
          }
          discrepancies.push_back(std::move(rec));
        }
      });
}

Json to_json(const ShrinkInstance& inst) {
  return Json{{"structure", to_json(inst.structure)},
              {"dt", to_json(inst.structure, inst.dt)},
              {"formula", pretty(inst.formula)}};
}

namespace {

Tuple remap_without(const Tuple& t, Elem gone, bool& keep) {
  Tuple out;
  for (Elem e : t) {
    if (e == gone) {
      keep = false;
      return out;
    }
    out.push_back(e > gone ? e - 1 : e);
  }
  return out;
}

Team remap_team(const Team& team, Elem gone) {
  std::set<Assignment> members;
  for (const Assignment& s : team.members()) {
    Assignment mapped;
    bool keep = true;
    for (const auto& [var, val] : s.binds) {
      if (val == gone) {
        keep = false;
        break;
      }
      mapped.binds.emplace_back(var, val > gone ? val - 1 : val);
    }
    if (keep) members.insert(std::move(mapped));
  }
  return Team(team.vars(), std::move(members));
}

std::optional<ShrinkInstance> drop_element(const ShrinkInstance& inst, Elem gone) {
  const Structure& a = inst.structure;
  if (a.size() <= 1) return std::nullopt;
  std::vector<std::string> labels;
  for (Elem e = 0; e < static_cast<Elem>(a.size()); ++e) {
    if (e != gone) labels.push_back(a.label(e));
  }
  std::map<std::string, Relation> rels;
  for (const auto& [name, rel] : a.relations()) {
    Relation reduced{rel.arity, {}};
    for (const Tuple& t : rel.tuples) {
      bool keep = true;
      Tuple mapped = remap_without(t, gone, keep);
      if (keep) reduced.tuples.insert(std::move(mapped));
    }
    rels[name] = std::move(reduced);
  }
  return ShrinkInstance{Structure(std::move(labels), std::move(rels)),
                        DoubleTeam(remap_team(inst.dt.U, gone), remap_team(inst.dt.V, gone)),
                        inst.formula};
}

}  // namespace

ShrinkInstance shrink(ShrinkInstance current, const FailurePredicate& fails) {
  if (!fails(current)) throw ValueError("shrink needs a failing instance");
  const std::vector<std::string> team_vars = current.dt.U.vars();
  bool reduced = true;
  while (reduced) {
    reduced = false;
    for (Elem gone = 0; gone < static_cast<Elem>(current.structure.size()); ++gone) {
      auto candidate = drop_element(current, gone);
      if (candidate && fails(*candidate)) {
        current = std::move(*candidate);
        reduced = true;
        break;
      }
    }
    if (reduced) continue;
    for (const Assignment& s : current.dt.U.members()) {
      ShrinkInstance candidate{current.structure,
                               DoubleTeam(current.dt.U.without(s), current.dt.V),
                               current.formula};
      if (fails(candidate)) {
        current = std::move(candidate);
        reduced = true;
        break;
      }
    }
    if (reduced) continue;
    for (const Assignment& s : current.dt.V.members()) {
      ShrinkInstance candidate{current.structure,
                               DoubleTeam(current.dt.U, current.dt.V.without(s)),
                               current.formula};
      if (fails(candidate)) {
        current = std::move(candidate);
        reduced = true;
        break;
      }
    }
    if (reduced) continue;
    for (NodeId id = 1; id < current.formula.size(); ++id) {
      const auto& free = current.formula.free_vars(id);
      if (!std::includes(team_vars.begin(), team_vars.end(), free.begin(), free.end())) {
        continue;
      }
      ShrinkInstance candidate{current.structure, current.dt,
                               current.formula.subformula(id)};
      if (fails(candidate)) {
        current = std::move(candidate);
        reduced = true;
        break;
      }
    }
  }
  return current;
}

}  // namespace dts
