// Acceptance suite. Every criterion prints exactly one line,
//
//   criterion N (<label>): PASS [<summary>]
//   criterion N (<label>): FAIL: <detail>
//
// and the process exits nonzero when any requested criterion fails. Run with
// criterion numbers as arguments to check a subset, or with none for all.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <dts/errors.hpp>
#include <dts/game.hpp>
#include <dts/harness.hpp>
#include <dts/json_io.hpp>
#include <dts/semantics.hpp>
#include <dts/syntax.hpp>

namespace {

using namespace dts;

struct Outcome {
  bool ok = true;
  std::string note;  // summary when ok, detail when not
};

std::string specs_path(const std::string& name) {
  return std::string(DTS_SPECS_DIR) + "/" + name;
}

CorpusSpec load_spec(const std::string& name) {
  return corpus_spec_from_json(load_json_file(specs_path(name)));
}

long long now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

const std::vector<std::string> kPool = {"x", "y", "z"};

std::string pick_var(SplitMix64& rng, int limit) {
  return kPool[static_cast<std::size_t>(rng.below(limit))];
}

VarTuple random_tuple(SplitMix64& rng, int max_width) {
  int w = 1 + static_cast<int>(rng.below(max_width));
  std::vector<std::string> vs;
  for (int i = 0; i < w; ++i) vs.push_back(pick_var(rng, 3));
  return VarTuple(vs);
}

std::vector<std::string> random_var_domain(SplitMix64& rng, bool allow_empty) {
  std::vector<std::string> vs;
  for (const auto& v : kPool)
    if (rng.below(2)) vs.push_back(v);
  if (vs.empty() && !allow_empty) vs.push_back(kPool[rng.below(3)]);
  return vs;
}

Assignment random_assignment(const std::vector<std::string>& vars, int domain_size,
                             SplitMix64& rng) {
  Assignment s;
  for (const auto& v : vars)
    s.binds.emplace_back(v, static_cast<Elem>(rng.below(domain_size)));
  return s;
}

std::vector<Assignment> all_assignments(const std::vector<std::string>& vars, int domain_size) {
  std::vector<Assignment> out = {Assignment::empty()};
  for (const auto& v : vars) {
    std::vector<Assignment> next;
    for (const auto& s : out)
      for (Elem e = 0; e < static_cast<Elem>(domain_size); ++e) {
        Assignment t = s;
        t.binds.emplace_back(v, e);
        next.push_back(t);
      }
    out = std::move(next);
  }
  for (auto& s : out) {
    Assignment sorted;
    for (const auto& v : vars) sorted.binds.emplace_back(v, s.at(v));
    s = sorted;
  }
  return out;
}

Structure random_structure(SplitMix64& rng, int domain_size) {
  Relation p{1, {}}, r{2, {}};
  for (Elem e = 0; e < static_cast<Elem>(domain_size); ++e)
    if (rng.below(2)) p.tuples.insert({e});
  for (Elem e = 0; e < static_cast<Elem>(domain_size); ++e)
    for (Elem d = 0; d < static_cast<Elem>(domain_size); ++d)
      if (rng.below(2)) r.tuples.insert({e, d});
  std::vector<std::string> labels;
  for (int i = 0; i < domain_size; ++i) labels.push_back(std::to_string(i));
  return Structure(labels, {{"P", p}, {"R", r}});
}

Team random_team(const Structure& a, const std::vector<std::string>& vars, int max_members,
                 SplitMix64& rng) {
  auto pool = all_assignments(vars, a.size());
  std::size_t k =
      rng.below(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(max_members)) + 1);
  for (std::size_t i = 0; i < k; ++i)
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  return Team(vars, std::set<Assignment>(pool.begin(), pool.begin() + k));
}

std::vector<Elem> random_permutation(int n, SplitMix64& rng) {
  std::vector<Elem> pi;
  for (int i = 0; i < n; ++i) pi.push_back(static_cast<Elem>(i));
  for (int i = 0; i + 1 < n; ++i)
    std::swap(pi[i], pi[i + static_cast<int>(rng.below(n - i))]);
  return pi;
}

Structure permute_structure(const Structure& a, const std::vector<Elem>& pi) {
  std::map<std::string, Relation> rels;
  for (const auto& [name, rel] : a.relations()) {
    Relation out{rel.arity, {}};
    for (const auto& t : rel.tuples) {
      Tuple u;
      for (Elem e : t) u.push_back(pi[e]);
      out.tuples.insert(u);
    }
    rels[name] = out;
  }
  return Structure(a.labels(), rels);
}

Team permute_team(const Team& t, const std::vector<Elem>& pi) {
  std::set<Assignment> members;
  for (const auto& s : t.members()) {
    Assignment m = s;
    for (auto& [v, e] : m.binds) e = pi[e];
    members.insert(m);
  }
  return Team(t.vars(), members);
}

// ---- criterion 1: flatness sweeps over the bundled corpora ----

Outcome criterion_flatness_sweeps() {
  Registry reg;
  DiffReport small = diff_flatness(load_spec("prop1-small.json"), reg);
  DiffReport xy = diff_flatness(load_spec("prop1-xy-sample.json"), reg);
  std::ostringstream note;
  note << small.instances << "+" << xy.instances << " instances, "
       << (small.wall_ms + xy.wall_ms) << " ms";
  if (small.discrepancies != 0 || small.inconclusive != 0)
    return {false, "prop1-small: " + std::to_string(small.discrepancies) + " discrepancies, " +
                       std::to_string(small.inconclusive) + " inconclusive"};
  if (xy.discrepancies != 0 || xy.inconclusive != 0)
    return {false, "prop1-xy-sample: " + std::to_string(xy.discrepancies) + " discrepancies, " +
                       std::to_string(xy.inconclusive) + " inconclusive"};
  if (small.instances != 1375920)
    return {false, "prop1-small corpus drifted: " + std::to_string(small.instances) +
                       " instances (expected 1375920)"};
  if (xy.instances != 10000)
    return {false, "prop1-xy-sample drew " + std::to_string(xy.instances) + " instances"};
  if (small.wall_ms + xy.wall_ms >= 5 * 60 * 1000)
    return {false, "runtime " + std::to_string(small.wall_ms + xy.wall_ms) + " ms >= 5 min"};
  return {true, note.str()};
}

// ---- criterion 2: game sweep ----

Outcome criterion_game_sweep() {
  Registry reg;
  DiffReport r = diff_game(load_spec("theorem-small.json"), reg);
  std::ostringstream note;
  note << r.instances << " instances, " << r.wall_ms << " ms";
  if (r.instances < 1000)
    return {false, "only " + std::to_string(r.instances) + " instances (need >= 1000)"};
  if (r.discrepancies != 0 || r.inconclusive != 0)
    return {false, std::to_string(r.discrepancies) + " discrepancies, " +
                       std::to_string(r.inconclusive) + " inconclusive"};
  if (r.wall_ms >= 10 * 60 * 1000)
    return {false, "runtime " + std::to_string(r.wall_ms) + " ms >= 10 min"};
  return {true, note.str()};
}

// ---- criterion 3: counterexample regression ----

Outcome criterion_counterexample() {
  Registry reg;
  Formula f = parse("Q<dual(empty)> x . (@<none>(x ; x))", reg);
  std::vector<Structure> structures = {canonical_structure(1), canonical_structure(2),
                                       canonical_structure(3)};
  structures.push_back(Structure({"a", "b"}, {{"S", Relation{1, {{0}}}}}));
  for (std::size_t i = 0; i < structures.size(); ++i) {
    const Structure& a = structures[i];
    DoubleTeam dt{Team(), Team::singleton_empty()};
    Verdict v = eval(a, dt, f);
    if (v.value)
      return {false, "eval returned true on structure #" + std::to_string(i)};
    auto strat = find_uniform_survival_strategy(a, dt.U, dt.V, f);
    if (strat.has_value())
      return {false, "game found a strategy on structure #" + std::to_string(i)};
  }
  return {true, std::to_string(structures.size()) + " structures, eval false and game exhausted"};
}

// ---- criterion 4: team-algebra identities ----

Outcome criterion_team_algebra() {
  SplitMix64 rng(0x7465616d);
  const int kCases = 1000;

  for (int i = 0; i < kCases; ++i) {  // s[xs/emptyset] = emptyset
    int n = 1 + static_cast<int>(rng.below(4));
    VarTuple xs = random_tuple(rng, 3);
    Assignment s = random_assignment(random_var_domain(rng, true), n, rng);
    Team t = extend_by_set(s, xs, {});
    auto vs = xs.var_set();
    auto want = union_vars(s.variables(), std::vector<std::string>(vs.begin(), vs.end()));
    if (!t.empty() || t.vars() != want)
      return {false, "extend_by_set on empty tuple set, case " + std::to_string(i)};
  }

  for (int i = 0; i < kCases; ++i) {  // V[xs/f] = emptyset for empty V
    VarTuple xs = random_tuple(rng, 3);
    Team v(random_var_domain(rng, true));
    Team t = team_extend(v, xs, WitnessFunction{});
    auto vs = xs.var_set();
    auto want = union_vars(v.vars(), std::vector<std::string>(vs.begin(), vs.end()));
    if (!t.empty() || t.vars() != want)
      return {false, "team_extend on empty team, case " + std::to_string(i)};
  }

  for (int i = 0; i < kCases; ++i) {  // complement involution
    int n = 1 + static_cast<int>(rng.below(4));
    VarTuple xs = random_tuple(rng, 3);
    TupleSet t;
    for (const auto& tup : repetition_respecting_tuples(xs, n))
      if (rng.below(2)) t.insert(tup);
    if (complement_image(complement_image(t, xs, n), xs, n) != t)
      return {false, "complement involution, case " + std::to_string(i)};
  }

  for (int i = 0; i < kCases; ++i) {  // split cover
    int n = 1 + static_cast<int>(rng.below(3));
    auto vars = random_var_domain(rng, false);
    std::set<Assignment> members;
    for (const auto& s : all_assignments(vars, n))
      if (rng.below(2)) members.insert(s);
    Team u(vars, members);
    VChoice h;
    for (const auto& s : u.members())
      h.choice[s] = static_cast<VChoiceValue>(rng.below(3));
    SplitResult r = split(u, h);
    if (r.u1.unite(r.u2) != u)
      return {false, "split cover, case " + std::to_string(i)};
    if (r.u1.unite(r.u1c) != u || r.u2.unite(r.u2c) != u)
      return {false, "split complements, case " + std::to_string(i)};
  }

  return {true, "4 identities x " + std::to_string(kCases) + " cases"};
}

// ---- criterion 5: isomorphism invariance ----

Formula random_iso_formula(SplitMix64& rng, const Registry& reg) {
  auto var = [&] { return pick_var(rng, 2); };  // free vars within {x, y}
  auto leaf = [&]() -> Formula {
    switch (rng.below(7)) {
      case 0: return Formula::equality(var(), var());
      case 1: return Formula::rel_atom("P", VarTuple({var()}));
      case 2: return Formula::rel_atom("R", VarTuple({var(), var()}));
      case 3:
        return Formula::gatom(reg.resolve_atom("none", {1}, {1}), {VarTuple({var()})},
                              {VarTuple({var()})});
      case 4:
        return Formula::gatom(reg.resolve_atom("double", {1}, {1}), {VarTuple({var()})},
                              {VarTuple({var()})});
      case 5:
        return Formula::gatom(reg.resolve_atom("releq", {1}, {1}), {VarTuple({var()})},
                              {VarTuple({var()})});
      default:
        return Formula::gatom(reg.resolve_atom("dep", {2}, {}), {VarTuple({var(), var()})}, {});
    }
  };
  Formula base = [&] {
    switch (rng.below(3)) {
      case 0: return Formula::lnot(leaf());
      case 1: return Formula::lor(leaf(), leaf());
      default: return leaf();
    }
  }();
  if (rng.below(2) == 0) return base;
  static const std::vector<std::string> kQuants = {"exists", "forall",      "even",
                                                   "majority", "empty", "dual(empty)"};
  auto q = reg.resolve_quantifier(parse_quant_name(kQuants[rng.below(kQuants.size())]), {1});
  return Formula::quant(q, {VarTuple({var()})}, {base});
}

Outcome criterion_iso_invariance() {
  Registry reg;
  SplitMix64 rng(0x69736f6d);
  const int kCases = 500;
  const std::vector<std::string> team_vars = {"x", "y"};
  for (int i = 0; i < kCases; ++i) {
    int n = 1 + static_cast<int>(rng.below(3));
    Structure a = random_structure(rng, n);
    Team u = random_team(a, team_vars, 3, rng);
    Team v = random_team(a, team_vars, 3, rng);
    Formula f = random_iso_formula(rng, reg);
    for (int guard = 0; !f.contains_gatom(); ++guard) {
      if (guard > 200) return {false, "formula generator failed to produce an atom"};
      f = random_iso_formula(rng, reg);
    }
    auto pi = random_permutation(n, rng);
    DoubleTeam dt{u, v};
    DoubleTeam pdt{permute_team(u, pi), permute_team(v, pi)};
    bool before = eval(a, dt, f).value;
    bool after = eval(permute_structure(a, pi), pdt, f).value;
    if (before != after)
      return {false, "verdict changed under permutation, case " + std::to_string(i) + ": " +
                         pretty(f)};
  }
  auto candidates = reg.closure_check_candidates();
  for (const auto& q : candidates) {
    auto violations = check_iso_closure(*q, 3);
    if (!violations.empty())
      return {false, q->name + " violates isomorphism closure at size " +
                         std::to_string(violations.front().size)};
  }
  return {true, std::to_string(kCases) + " cases, " + std::to_string(candidates.size()) +
                    " closure candidates"};
}

// ---- criterion 6: negation laws over the flatness corpora ----

Outcome criterion_negation_laws() {
  Registry reg;
  long long checked = 0;
  std::optional<std::string> failure;
  for (const auto& name : {"prop1-small.json", "prop1-xy-sample.json"}) {
    CorpusSpec spec = load_spec(name);
    enumerate_instances(spec, reg, [&](long long index, const Structure& a, const DoubleTeam& dt,
                                       const Formula& f) {
      if (failure) return;
      Formula nf = Formula::lnot(f);
      DoubleTeam swapped{dt.V, dt.U};
      bool neg = eval(a, dt, nf).value;
      bool swp = eval(a, swapped, f).value;
      bool dneg = eval(a, dt, Formula::lnot(nf)).value;
      bool plain = eval(a, dt, f).value;
      if (neg != swp)
        failure = std::string(name) + " #" + std::to_string(index) +
                  ": eval(U,V,~phi) != eval(V,U,phi) for " + pretty(f);
      else if (dneg != plain)
        failure = std::string(name) + " #" + std::to_string(index) +
                  ": double negation changed the verdict for " + pretty(f);
      ++checked;
    });
    if (failure) return {false, *failure};
  }
  return {true, std::to_string(checked) + " instances"};
}

// ---- criterion 7: determinism and memo soundness ----

Json report_without_wall(Json j) {
  j.erase("wallMs");
  return j;
}

Outcome criterion_determinism() {
  Registry reg;

  CorpusSpec xy = load_spec("prop1-xy-sample.json");
  Json a1 = report_without_wall(diff_flatness(xy, reg).json);
  Json a2 = report_without_wall(diff_flatness(xy, reg).json);
  if (a1.dump() != a2.dump())
    return {false, "prop1-xy-sample reports differ between identical runs"};

  CorpusSpec game = load_spec("theorem-small.json");
  Json b1 = report_without_wall(diff_game(game, reg).json);
  Json b2 = report_without_wall(diff_game(game, reg).json);
  if (b1.dump() != b2.dump())
    return {false, "theorem-small reports differ between identical runs"};

  EvalConfig with_memo, without_memo;
  without_memo.memo = false;
  long long compared = 0;
  std::optional<std::string> failure;
  for (const auto& name : {"prop1-small.json", "prop1-xy-sample.json", "theorem-small.json"}) {
    CorpusSpec spec = load_spec(name);
    enumerate_instances(spec, reg, [&](long long index, const Structure& a, const DoubleTeam& dt,
                                       const Formula& f) {
      if (failure) return;
      bool on = eval(a, dt, f, with_memo).value;
      bool off = eval(a, dt, f, without_memo).value;
      if (on != off)
        failure = std::string(name) + " #" + std::to_string(index) +
                  ": memo on/off verdicts differ for " + pretty(f);
      ++compared;
    });
    if (failure) return {false, *failure};
  }
  return {true, "reports byte-stable, " + std::to_string(compared) + " memo comparisons"};
}

// ---- criterion 8: parser round trip ----

Formula random_roundtrip_formula(SplitMix64& rng, const Registry& reg, int depth) {
  auto var = [&] { return pick_var(rng, 3); };
  if (depth == 0 || rng.below(3) == 0) {
    switch (rng.below(7)) {
      case 0: return Formula::equality(var(), var());
      case 1: return Formula::rel_atom("P", VarTuple({var()}));
      case 2: return Formula::rel_atom("R", VarTuple({var(), var()}));
      case 3:
        return Formula::gatom(reg.resolve_atom("none", {1}, {1}), {VarTuple({var()})},
                              {VarTuple({var()})});
      case 4:
        return Formula::gatom(reg.resolve_atom("releq", {1}, {1}), {VarTuple({var()})},
                              {VarTuple({var()})});
      case 5:
        return Formula::gatom(reg.resolve_atom("double", {1}, {1}), {VarTuple({var()})},
                              {VarTuple({var()})});
      default:
        return Formula::gatom(reg.resolve_atom("dep", {2}, {}), {VarTuple({var(), var()})}, {});
    }
  }
  auto sub = [&] { return random_roundtrip_formula(rng, reg, depth - 1); };
  static const std::vector<std::string> kQuants = {
      "exists",     "forall",     "even",        "majority",  "empty",
      "dual(empty)", "dual(even)", "at_least<2>", "exactly<1>"};
  switch (rng.below(6)) {
    case 0: return Formula::lnot(sub());
    case 1: return Formula::lor(sub(), sub());
    case 2: return Formula::land(sub(), sub());
    case 3: {
      auto q = reg.resolve_quantifier(parse_quant_name(kQuants[rng.below(kQuants.size())]), {1});
      return Formula::quant(q, {VarTuple({var()})}, {sub()});
    }
    case 4: {  // one slot of width 2
      auto q = reg.resolve_quantifier(parse_quant_name("exists"), {2});
      return Formula::quant(q, {VarTuple({var(), var()})}, {sub()});
    }
    default: {  // two components
      auto q = reg.resolve_quantifier(parse_quant_name("pairq"), {1, 1});
      return Formula::quant(q, {VarTuple({var()}), VarTuple({var()})}, {sub(), sub()});
    }
  }
}

Outcome criterion_parser_roundtrip() {
  Registry reg;
  reg.load_extensional(ExtensionalDef{"pairq", {1, 1}, {}});
  SplitMix64 rng(0x70727365);
  const int kCases = 1000;
  for (int i = 0; i < kCases; ++i) {
    Formula f = random_roundtrip_formula(rng, reg, 3);
    std::string text = pretty(f);
    Formula back = parse(text, reg);
    if (!(back == f))
      return {false, "round trip changed structure, case " + std::to_string(i) + ": " + text};
  }
  return {true, std::to_string(kCases) + " formulas"};
}

struct Criterion {
  int number;
  std::string label;
  Outcome (*run)();
};

const std::vector<Criterion> kCriteria = {
    {1, "flatness sweeps", criterion_flatness_sweeps},
    {2, "game sweep", criterion_game_sweep},
    {3, "counterexample regression", criterion_counterexample},
    {4, "team algebra", criterion_team_algebra},
    {5, "isomorphism invariance", criterion_iso_invariance},
    {6, "negation laws", criterion_negation_laws},
    {7, "determinism and memo", criterion_determinism},
    {8, "parser round trip", criterion_parser_roundtrip},
};

bool run_one(const Criterion& c) {
  long long start = now_ms();
  Outcome out;
  try {
    out = c.run();
  } catch (const Error& e) {
    out = {false, std::string(e.kind()) + " error: " + e.what()};
  } catch (const std::exception& e) {
    out = {false, std::string("unexpected: ") + e.what()};
  }
  long long elapsed = now_ms() - start;
  std::cout << "criterion " << c.number << " (" << c.label << "): ";
  if (out.ok) {
    std::cout << "PASS [" << out.note << ", " << elapsed << " ms total]" << std::endl;
  } else {
    std::cout << "FAIL: " << out.note << std::endl;
  }
  return out.ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    int n = std::atoi(argv[i]);
    if (n < 1 || n > 8) {
      std::cerr << "usage: acceptance [criterion 1-8]..." << std::endl;
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty())
    for (const auto& c : kCriteria) selected.push_back(c.number);

  bool all_ok = true;
  for (int n : selected) all_ok = run_one(kCriteria[n - 1]) && all_ok;
  return all_ok ? 0 : 1;
}
