#include "dts/semantics.hpp"

#include <algorithm>

namespace dts {

namespace {

void check_member_range(const Structure& a, const Team& team) {
  for (const Assignment& s : team.members()) {
    for (const auto& [var, val] : s.binds) {
      if (val >= static_cast<Elem>(a.size())) {
        throw EvalError("assignment value outside the structure's domain");
      }
    }
  }
}

void check_vars_covered(const Formula& f, const std::vector<std::string>& vars) {
  for (const std::string& v : f.free_variables()) {
    if (!std::binary_search(vars.begin(), vars.end(), v)) {
      throw EvalError("free variable '" + v + "' is not bound by the team");
    }
  }
}

// Candidate budget arithmetic with overflow protection: counts compare
// against the cap as they are built up, so they can never wrap.
long long checked_power(long long base, std::size_t exp, long long cap) {
  long long count = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base == 0) return 0;
    if (count > cap / base) return cap + 1;
    count *= base;
  }
  return count;
}

class Evaluator {
 public:
  Evaluator(const Structure& a, const Formula& f, const EvalConfig& config)
      : a_(a), f_(f), config_(config), quant_cache_(f.size()) {}

  bool evaluate(NodeId id, const DoubleTeam& dt) {
    ++stats_.nodes_visited;
    MemoKey key;
    if (config_.memo) {
      key = {id, dt.U.members(), dt.V.members()};
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    bool value = dispatch(id, dt);
    if (config_.memo) memo_.emplace(std::move(key), value);
    return value;
  }

  const EvalStats& stats() const { return stats_; }

 private:
  using MemoKey = std::tuple<NodeId, std::set<Assignment>, std::set<Assignment>>;

  bool dispatch(NodeId id, const DoubleTeam& dt) {
    const Node& node = f_.node(id);
    if (const auto* e = std::get_if<EqualityNode>(&node)) {
      for (const Assignment& s : dt.U.members()) {
        if (s.at(e->lhs) != s.at(e->rhs)) return false;
      }
      for (const Assignment& t : dt.V.members()) {
        if (t.at(e->lhs) == t.at(e->rhs)) return false;
      }
      return true;
    }
    if (const auto* r = std::get_if<RelAtomNode>(&node)) {
      const Relation& relation = a_.relation(r->rel);
      if (static_cast<int>(r->args.size()) != relation.arity) {
        throw TypeError("relation '" + r->rel + "' has arity " +
                        std::to_string(relation.arity) + ", got " +
                        std::to_string(r->args.size()) + " arguments");
      }
      for (const Assignment& s : dt.U.members()) {
        if (!relation.tuples.count(value_tuple(s, r->args))) return false;
      }
      for (const Assignment& t : dt.V.members()) {
        if (relation.tuples.count(value_tuple(t, r->args))) return false;
      }
      return true;
    }
    if (const auto* n = std::get_if<NotNode>(&node)) {
      return evaluate(n->sub, DoubleTeam(dt.V, dt.U));
    }
    if (const auto* o = std::get_if<OrNode>(&node)) {
      return eval_or(*o, dt);
    }
    if (const auto* q = std::get_if<QuantNode>(&node)) {
      return eval_quant(id, *q, dt);
    }
    const auto& g = std::get<GAtomNode>(node);
    return atom_holds(*g.atom, a_, dt, g.pos_args, g.neg_args);
  }

  bool eval_or(const OrNode& node, const DoubleTeam& dt) {
    const auto& members = dt.U.members();
    long long candidates = checked_power(3, members.size(), config_.enumeration_cap);
    if (candidates > config_.enumeration_cap) {
      throw CapExceeded("disjunction split needs 3^" + std::to_string(members.size()) +
                        " candidates, above the cap of " +
                        std::to_string(config_.enumeration_cap));
    }
    std::vector<const Assignment*> order(members.size());
    std::size_t idx = 0;
    for (const Assignment& s : members) order[idx++] = &s;
    std::vector<int> digits(members.size(), 0);
    for (long long counter = 0; counter < candidates; ++counter) {
      VChoice h;
      for (std::size_t i = 0; i < order.size(); ++i) {
        h.choice[*order[i]] = static_cast<VChoiceValue>(digits[i]);
      }
      SplitResult parts = split(dt.U, h);
      if (evaluate(node.left, DoubleTeam(parts.u1, dt.V.unite(parts.u1c))) &&
          evaluate(node.right, DoubleTeam(parts.u2, dt.V.unite(parts.u2c)))) {
        return true;
      }
      // Base-3 odometer; the first member is the most significant digit.
      for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < 3) break;
        digits[i] = 0;
      }
    }
    return false;
  }

  struct QuantCache {
    bool ready = false;
    std::vector<std::vector<TupleSet>> lift_u, lift_v;        // member tuples
    std::vector<std::vector<TupleSet>> lift_u_c, lift_v_c;    // componentwise complements
  };

  const QuantCache& quant_members(NodeId id, const QuantNode& node) {
    QuantCache& cache = quant_cache_[id];
    if (cache.ready) return cache;
    cache.lift_u = lift(*node.q, a_, node.tuples, config_.enumeration_cap);
    cache.lift_v = lift(*dual(node.q), a_, node.tuples, config_.enumeration_cap);
    auto complements = [&](const std::vector<std::vector<TupleSet>>& members) {
      std::vector<std::vector<TupleSet>> out;
      out.reserve(members.size());
      for (const auto& member : members) {
        std::vector<TupleSet> comp(member.size());
        for (std::size_t j = 0; j < member.size(); ++j) {
          comp[j] = complement_image(member[j], node.tuples[j], a_.size());
        }
        out.push_back(std::move(comp));
      }
      return out;
    };
    cache.lift_u_c = complements(cache.lift_u);
    cache.lift_v_c = complements(cache.lift_v);
    cache.ready = true;
    return cache;
  }

  bool eval_quant(NodeId id, const QuantNode& node, const DoubleTeam& dt) {
    const QuantCache& cache = quant_members(id, node);
    if ((!dt.U.empty() && cache.lift_u.empty()) ||
        (!dt.V.empty() && cache.lift_v.empty())) {
      return false;
    }
    const long long cap = config_.enumeration_cap;
    long long u_count = checked_power(static_cast<long long>(cache.lift_u.size()),
                                      dt.U.size(), cap);
    long long v_count = checked_power(static_cast<long long>(cache.lift_v.size()),
                                      dt.V.size(), cap);
    if (u_count > cap || v_count > cap || u_count > cap / std::max(v_count, 1LL)) {
      throw CapExceeded("witness search for '" + node.q->name +
                        "' exceeds the cap of " + std::to_string(cap));
    }

    std::vector<const Assignment*> u_order, v_order;
    for (const Assignment& s : dt.U.members()) u_order.push_back(&s);
    for (const Assignment& t : dt.V.members()) v_order.push_back(&t);

    std::vector<std::size_t> fi(u_order.size(), 0), gi(v_order.size(), 0);
    auto advance = [](std::vector<std::size_t>& digits, std::size_t base) {
      for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < base) return true;
        digits[i] = 0;
      }
      return false;
    };

    do {
      do {
        ++stats_.witness_functions_tried;
        if (components_hold(node, dt, cache, u_order, fi, v_order, gi)) return true;
      } while (advance(gi, cache.lift_v.size()));
    } while (advance(fi, cache.lift_u.size()));
    return false;
  }

  bool components_hold(const QuantNode& node, const DoubleTeam& dt, const QuantCache& cache,
                       const std::vector<const Assignment*>& u_order,
                       const std::vector<std::size_t>& fi,
                       const std::vector<const Assignment*>& v_order,
                       const std::vector<std::size_t>& gi) {
    for (std::size_t j = 0; j < node.subs.size(); ++j) {
      const VarTuple& xs = node.tuples[j];
      // Supporting side: U extended by the chosen members, V by the duals'.
      Team support = extend_side(dt.U, u_order, fi, cache.lift_u, j, xs)
                         .unite(extend_side(dt.V, v_order, gi, cache.lift_v, j, xs));
      Team oppose = extend_side(dt.U, u_order, fi, cache.lift_u_c, j, xs)
                        .unite(extend_side(dt.V, v_order, gi, cache.lift_v_c, j, xs));
      if (!evaluate(node.subs[j], DoubleTeam(std::move(support), std::move(oppose)))) {
        return false;
      }
    }
    return true;
  }

  Team extend_side(const Team& team, const std::vector<const Assignment*>& order,
                   const std::vector<std::size_t>& choice,
                   const std::vector<std::vector<TupleSet>>& members, std::size_t j,
                   const VarTuple& xs) {
    std::map<const Assignment*, const TupleSet*> images;
    for (std::size_t i = 0; i < order.size(); ++i) {
      images[order[i]] = &members[choice[i]][j];
    }
    return team_extend(team, xs, [&](const Assignment& s) -> const TupleSet& {
      return *images.at(&s);
    });
  }

  Tuple value_tuple(const Assignment& s, const VarTuple& xs) {
    Tuple t;
    t.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) t.push_back(s.at(xs[i]));
    return t;
  }

  const Structure& a_;
  const Formula& f_;
  const EvalConfig& config_;
  std::vector<QuantCache> quant_cache_;
  std::map<MemoKey, bool> memo_;
  EvalStats stats_;
};

bool eval_fo_node(const Structure& a, const Assignment& s, const Formula& f, NodeId id,
                  const EvalConfig& config) {
  const Node& node = f.node(id);
  if (const auto* e = std::get_if<EqualityNode>(&node)) {
    return s.at(e->lhs) == s.at(e->rhs);
  }
  if (const auto* r = std::get_if<RelAtomNode>(&node)) {
    const Relation& relation = a.relation(r->rel);
    if (static_cast<int>(r->args.size()) != relation.arity) {
      throw TypeError("relation '" + r->rel + "' has arity " +
                      std::to_string(relation.arity) + ", got " +
                      std::to_string(r->args.size()) + " arguments");
    }
    Tuple t;
    for (std::size_t i = 0; i < r->args.size(); ++i) t.push_back(s.at(r->args[i]));
    return relation.tuples.count(t) > 0;
  }
  if (const auto* n = std::get_if<NotNode>(&node)) {
    return !eval_fo_node(a, s, f, n->sub, config);
  }
  if (const auto* o = std::get_if<OrNode>(&node)) {
    return eval_fo_node(a, s, f, o->left, config) || eval_fo_node(a, s, f, o->right, config);
  }
  if (const auto* q = std::get_if<QuantNode>(&node)) {
    // Per component, collect the witness tuples whose extension satisfies
    // the component; the quantifier judges the collected relations.
    std::vector<TupleSet> witnesses;
    witnesses.reserve(q->subs.size());
    for (std::size_t j = 0; j < q->subs.size(); ++j) {
      TupleSet w;
      for (const Tuple& t : repetition_respecting_tuples(q->tuples[j], a.size())) {
        if (eval_fo_node(a, extend(s, q->tuples[j], t), f, q->subs[j], config)) {
          w.insert(t);
        }
      }
      witnesses.push_back(std::move(w));
    }
    return member(*q->q, a, witnesses);
  }
  throw EvalError("generalized atoms have no classical satisfaction relation");
}

}  // namespace

Verdict eval(const Structure& a, const DoubleTeam& dt, const Formula& f,
             const EvalConfig& config) {
  if (a.size() > config.max_domain) {
    throw CapExceeded("structure size " + std::to_string(a.size()) +
                      " exceeds max_domain " + std::to_string(config.max_domain));
  }
  if (static_cast<int>(dt.U.size()) > config.max_team ||
      static_cast<int>(dt.V.size()) > config.max_team) {
    throw CapExceeded("input team size exceeds max_team " +
                      std::to_string(config.max_team));
  }
  check_member_range(a, dt.U);
  check_member_range(a, dt.V);
  check_vars_covered(f, dt.U.vars());

  Evaluator ev(a, f, config);
  Verdict v;
  v.value = ev.evaluate(f.root(), dt);
  v.stats = ev.stats();
  return v;
}

bool eval_fo(const Structure& a, const Assignment& s, const Formula& f,
             const EvalConfig& config) {
  if (f.contains_gatom()) {
    throw EvalError("generalized atoms have no classical satisfaction relation");
  }
  for (const auto& [var, val] : s.binds) {
    if (val >= static_cast<Elem>(a.size())) {
      throw EvalError("assignment value outside the structure's domain");
    }
  }
  check_vars_covered(f, s.variables());
  return eval_fo_node(a, s, f, f.root(), config);
}

Verdict sentence_true(const Structure& a, const Formula& f, const EvalConfig& config) {
  if (!f.free_variables().empty()) {
    throw EvalError("sentence evaluation requires a formula without free variables");
  }
  return eval(a, DoubleTeam(Team::singleton_empty(), Team()), f, config);
}

FlatnessReport flatness_check(const Structure& a, const DoubleTeam& dt, const Formula& f,
                              const EvalConfig& config) {
  if (f.contains_gatom()) {
    throw EvalError("flatness only applies to formulas without generalized atoms");
  }
  FlatnessReport report;
  Verdict v = eval(a, dt, f, config);
  report.team_value = v.value;
  report.stats = v.stats;
  report.fo_value = true;
  for (const Assignment& s : dt.U.members()) {
    if (!eval_fo(a, s, f, config)) report.fo_value = false;
  }
  for (const Assignment& t : dt.V.members()) {
    if (eval_fo(a, t, f, config)) report.fo_value = false;
  }
  report.agree = report.team_value == report.fo_value;
  return report;
}

}  // namespace dts
