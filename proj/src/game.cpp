#include "dts/game.hpp"

#include <algorithm>
#include <deque>

namespace dts {

namespace {

void check_game_formula(const Formula& f) {
  for (NodeId id = 0; id < f.size(); ++id) {
    if (const auto* q = std::get_if<QuantNode>(&f.node(id))) {
      if (q->q->type_sig != std::vector<int>{1}) {
        throw GameError("the game supports type (1) quantifiers only; '" +
                        q->q->name + "' is not one");
      }
    }
  }
}

void check_game_inputs(const Structure& a, const Team& u, const Team& v, const Formula& f) {
  if (u.vars() != v.vars()) {
    throw ValueError("both teams must share one variable domain");
  }
  for (const std::string& var : f.free_variables()) {
    if (!std::binary_search(u.vars().begin(), u.vars().end(), var)) {
      throw EvalError("free variable '" + var + "' is not bound by the team");
    }
  }
  for (const Team* team : {&u, &v}) {
    for (const Assignment& s : team->members()) {
      for (const auto& [var, val] : s.binds) {
        if (val >= static_cast<Elem>(a.size())) {
          throw EvalError("assignment value outside the structure's domain");
        }
      }
    }
  }
  check_game_formula(f);
}

bool atom_truth(const Structure& a, const Node& node, const Assignment& t) {
  if (const auto* e = std::get_if<EqualityNode>(&node)) {
    return t.at(e->lhs) == t.at(e->rhs);
  }
  const auto& r = std::get<RelAtomNode>(node);
  const Relation& relation = a.relation(r.rel);
  if (static_cast<int>(r.args.size()) != relation.arity) {
    throw TypeError("relation '" + r.rel + "' has arity " + std::to_string(relation.arity) +
                    ", got " + std::to_string(r.args.size()) + " arguments");
  }
  Tuple vals;
  vals.reserve(r.args.size());
  for (std::size_t i = 0; i < r.args.size(); ++i) vals.push_back(t.at(r.args[i]));
  return relation.tuples.count(vals) > 0;
}

std::vector<std::set<Elem>> quant_options(const Structure& a, const QuantNode& node,
                                          Sign sign, long long lift_cap) {
  QuantifierPtr q = sign == Sign::Plus ? node.q : dual(node.q);
  std::vector<std::set<Elem>> options;
  for (const auto& member : lift(*q, a, node.tuples, lift_cap)) {
    std::set<Elem> s;
    for (const Tuple& t : member[0]) s.insert(t[0]);
    options.push_back(std::move(s));
  }
  return options;
}

}  // namespace

AgentChoice AgentChoice::or_pick(bool left, bool right) {
  if (!left && !right) {
    throw ValueError("a disjunction choice must support at least one side");
  }
  AgentChoice c;
  c.kind = Kind::Or;
  c.or_left = left;
  c.or_right = right;
  return c;
}

AgentChoice AgentChoice::witness_set(std::set<Elem> s) {
  AgentChoice c;
  c.kind = Kind::Witness;
  c.witness = std::move(s);
  return c;
}

MoveDesc transitions(const Structure& a, const Formula& f, const Position& pos,
                     long long lift_cap) {
  const Node& node = f.node(pos.node);
  MoveDesc d;
  if (std::holds_alternative<EqualityNode>(node) || std::holds_alternative<RelAtomNode>(node)) {
    d.kind = PositionKind::Terminal;
    bool truth = atom_truth(a, node, pos.t);
    d.terminal_result = truth == (pos.sign == Sign::Plus) ? PlayResult::Win : PlayResult::Lose;
    return d;
  }
  if (std::holds_alternative<GAtomNode>(node)) {
    d.kind = PositionKind::Terminal;
    d.terminal_result = PlayResult::Survive;
    return d;
  }
  if (const auto* n = std::get_if<NotNode>(&node)) {
    d.kind = PositionKind::Forced;
    Sign flipped = pos.sign == Sign::Plus ? Sign::Minus : Sign::Plus;
    d.successors.push_back({n->sub, flipped, pos.t});
    return d;
  }
  if (const auto* o = std::get_if<OrNode>(&node)) {
    if (pos.sign == Sign::Plus) {
      d.kind = PositionKind::AgentOr;
    } else {
      // A refuting play continues through both disjuncts.
      d.kind = PositionKind::Forced;
      d.successors.push_back({o->left, Sign::Minus, pos.t});
      d.successors.push_back({o->right, Sign::Minus, pos.t});
    }
    return d;
  }
  const auto& q = std::get<QuantNode>(node);
  if (q.q->type_sig != std::vector<int>{1}) {
    throw GameError("the game supports type (1) quantifiers only; '" + q.q->name +
                    "' is not one");
  }
  auto options = quant_options(a, q, pos.sign, lift_cap);
  if (options.empty()) {
    d.kind = PositionKind::Terminal;
    d.terminal_result = PlayResult::Lose;
    return d;
  }
  d.kind = PositionKind::AgentWitness;
  d.witness_options = std::move(options);
  return d;
}

ChoiceResult apply_choice(const Structure& a, const Formula& f, const Position& pos,
                          const AgentChoice& choice) {
  const Node& node = f.node(pos.node);
  ChoiceResult result;
  if (const auto* o = std::get_if<OrNode>(&node)) {
    if (pos.sign != Sign::Plus || choice.kind != AgentChoice::Kind::Or) {
      throw ValueError("a disjunction choice applies to supporting disjunction positions");
    }
    if (!choice.or_left && !choice.or_right) {
      throw ValueError("a disjunction choice must support at least one side");
    }
    if (choice.or_left && choice.or_right) {
      result.successors.push_back({o->left, Sign::Plus, pos.t});
      result.successors.push_back({o->right, Sign::Plus, pos.t});
    } else if (choice.or_left) {
      result.successors.push_back({o->left, Sign::Plus, pos.t});
      result.successors.push_back({o->right, Sign::Minus, pos.t});
    } else {
      result.successors.push_back({o->right, Sign::Plus, pos.t});
      result.successors.push_back({o->left, Sign::Minus, pos.t});
    }
    return result;
  }
  const auto* q = std::get_if<QuantNode>(&node);
  if (!q || choice.kind != AgentChoice::Kind::Witness) {
    throw ValueError("choice does not match the position");
  }
  QuantifierPtr quant = pos.sign == Sign::Plus ? q->q : dual(q->q);
  TupleSet as_rel;
  for (Elem e : choice.witness) {
    if (e >= static_cast<Elem>(a.size())) {
      throw ValueError("witness element outside the structure's domain");
    }
    as_rel.insert({e});
  }
  if (!quant->membership(a, {as_rel})) {
    throw ValueError("witness set is not a member of '" + quant->name + "'");
  }
  for (Elem e = 0; e < static_cast<Elem>(a.size()); ++e) {
    Sign sign = choice.witness.count(e) ? Sign::Plus : Sign::Minus;
    result.successors.push_back({q->subs[0], sign, extend(pos.t, q->tuples[0], {e})});
  }
  result.survive_branch = choice.witness.empty() ||
                          choice.witness.size() == static_cast<std::size_t>(a.size());
  return result;
}

namespace {

struct Expansion {
  std::vector<PlayOutcome> outcomes;
  std::map<NodeId, std::pair<std::set<Assignment>, std::set<Assignment>>> gatom_hits;
  std::optional<Position> unassigned;  // first undecided agent position
  bool lose = false;
};

class Engine {
 public:
  Engine(const Structure& a, const Formula& f, const Team& u, const Team& v,
         GameStats* stats)
      : a_(a), f_(f), u_(u), v_(v), stats_(stats) {}

  Expansion expand(const std::map<Position, AgentChoice>& strategy, bool stop_on_lose,
                   bool require_total) {
    Expansion exp;
    std::deque<Position> queue;
    std::set<Position> visited;
    auto push = [&](const Position& pos) {
      if (visited.insert(pos).second) queue.push_back(pos);
    };
    for (const Assignment& s : u_.members()) push({f_.root(), Sign::Plus, s});
    for (const Assignment& t : v_.members()) push({f_.root(), Sign::Minus, t});

    while (!queue.empty()) {
      Position pos = queue.front();
      queue.pop_front();
      if (stats_) ++stats_->positions_expanded;
      const MoveDesc& d = describe(pos);
      switch (d.kind) {
        case PositionKind::Terminal:
          exp.outcomes.push_back({pos, d.terminal_result});
          if (d.terminal_result == PlayResult::Lose) {
            exp.lose = true;
            if (stop_on_lose) return exp;
          }
          if (std::holds_alternative<GAtomNode>(f_.node(pos.node))) {
            auto& [support, refute] = exp.gatom_hits[pos.node];
            (pos.sign == Sign::Plus ? support : refute).insert(pos.t);
          }
          break;
        case PositionKind::Forced:
          for (const Position& next : d.successors) push(next);
          break;
        case PositionKind::AgentOr:
        case PositionKind::AgentWitness: {
          auto it = strategy.find(pos);
          if (it == strategy.end()) {
            if (require_total) {
              throw EvalError("strategy undefined at a reachable position");
            }
            if (!exp.unassigned) exp.unassigned = pos;
            break;
          }
          ChoiceResult cr = apply_choice(a_, f_, pos, it->second);
          if (cr.survive_branch) exp.outcomes.push_back({pos, PlayResult::Survive});
          for (const Position& next : cr.successors) push(next);
          break;
        }
      }
    }
    return exp;
  }

  // Choices at a decision point, in the fixed search order.
  std::vector<AgentChoice> options(const Position& pos) {
    const MoveDesc& d = describe(pos);
    std::vector<AgentChoice> out;
    if (d.kind == PositionKind::AgentOr) {
      out.push_back(AgentChoice::or_pick(true, true));
      out.push_back(AgentChoice::or_pick(true, false));
      out.push_back(AgentChoice::or_pick(false, true));
    } else if (d.kind == PositionKind::AgentWitness) {
      for (const std::set<Elem>& w : d.witness_options) {
        out.push_back(AgentChoice::witness_set(w));
      }
    }
    return out;
  }

  bool uniform(const Expansion& exp) const {
    for (NodeId id : f_.gatom_nodes()) {
      const auto& g = std::get<GAtomNode>(f_.node(id));
      const auto& bound = f_.bound_above(id);
      std::vector<std::string> vars =
          union_vars(u_.vars(), {bound.begin(), bound.end()});
      std::set<Assignment> support, refute;
      if (auto it = exp.gatom_hits.find(id); it != exp.gatom_hits.end()) {
        support = it->second.first;
        refute = it->second.second;
      }
      DoubleTeam dt(Team(vars, std::move(support)), Team(vars, std::move(refute)));
      if (!atom_holds(*g.atom, a_, dt, g.pos_args, g.neg_args)) return false;
    }
    return true;
  }

  FinalTeams final_teams(const Expansion& exp) const {
    FinalTeams out;
    for (NodeId id : f_.gatom_nodes()) {
      const auto& bound = f_.bound_above(id);
      std::vector<std::string> vars =
          union_vars(u_.vars(), {bound.begin(), bound.end()});
      std::set<Assignment> support, refute;
      if (auto it = exp.gatom_hits.find(id); it != exp.gatom_hits.end()) {
        support = it->second.first;
        refute = it->second.second;
      }
      out.teams.emplace(id, std::make_pair(Team(vars, std::move(support)),
                                           Team(vars, std::move(refute))));
    }
    return out;
  }

 private:
  // Position classifications are cached per (node, sign); for quantifier
  // positions the assignment does not influence the available sets.
  const MoveDesc& describe(const Position& pos) {
    const Node& node = f_.node(pos.node);
    if (std::holds_alternative<QuantNode>(node)) {
      auto key = std::make_pair(pos.node, pos.sign);
      auto it = quant_cache_.find(key);
      if (it == quant_cache_.end()) {
        it = quant_cache_.emplace(key, transitions(a_, f_, pos)).first;
      }
      return it->second;
    }
    scratch_ = transitions(a_, f_, pos);
    return scratch_;
  }

  const Structure& a_;
  const Formula& f_;
  const Team& u_;
  const Team& v_;
  GameStats* stats_;
  std::map<std::pair<NodeId, Sign>, MoveDesc> quant_cache_;
  MoveDesc scratch_;
};

}  // namespace

std::optional<Strategy> find_uniform_survival_strategy(const Structure& a, const Team& u,
                                                       const Team& v, const Formula& f,
                                                       const GameLimits& limits,
                                                       GameStats* stats) {
  check_game_inputs(a, u, v, f);
  Engine engine(a, f, u, v, stats);

  struct Frame {
    Position pos;
    std::vector<AgentChoice> choices;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  std::map<Position, AgentChoice> strategy;
  long long candidates = 0;

  auto assign = [&](Frame& frame) {
    if (++candidates > limits.max_candidates) {
      throw SearchCapExceeded("strategy search exceeded " +
                              std::to_string(limits.max_candidates) + " candidates");
    }
    if (stats) ++stats->candidates_tried;
    strategy[frame.pos] = frame.choices[frame.next];
  };

  while (true) {
    Expansion exp = engine.expand(strategy, /*stop_on_lose=*/true, /*require_total=*/false);
    if (!exp.lose) {
      if (exp.unassigned) {
        Frame frame;
        frame.pos = *exp.unassigned;
        frame.choices = engine.options(frame.pos);
        stack.push_back(std::move(frame));
        assign(stack.back());
        continue;
      }
      if (engine.uniform(exp)) {
        Strategy found;
        found.moves = std::move(strategy);
        return found;
      }
    }
    // Advance the deepest frame with options left; drop exhausted frames.
    bool advanced = false;
    while (!stack.empty()) {
      Frame& top = stack.back();
      strategy.erase(top.pos);
      if (++top.next < top.choices.size()) {
        assign(top);
        advanced = true;
        break;
      }
      stack.pop_back();
    }
    if (!advanced) return std::nullopt;
  }
}

PlaysResult enumerate_plays(const Structure& a, const Team& u, const Team& v,
                            const Formula& f, const Strategy& strategy) {
  check_game_inputs(a, u, v, f);
  Engine engine(a, f, u, v, nullptr);
  Expansion exp = engine.expand(strategy.moves, /*stop_on_lose=*/false,
                                /*require_total=*/true);
  PlaysResult result;
  result.outcomes = std::move(exp.outcomes);
  result.final_teams = engine.final_teams(exp);
  return result;
}

bool verify_strategy(const Structure& a, const Team& u, const Team& v, const Formula& f,
                     const Strategy& strategy) {
  PlaysResult plays = enumerate_plays(a, u, v, f, strategy);
  for (const PlayOutcome& outcome : plays.outcomes) {
    if (outcome.result == PlayResult::Lose) return false;
  }
  for (const auto& [id, teams] : plays.final_teams.teams) {
    const auto& g = std::get<GAtomNode>(f.node(id));
    if (!atom_holds(*g.atom, a, DoubleTeam(teams.first, teams.second), g.pos_args,
                    g.neg_args)) {
      return false;
    }
  }
  return true;
}

}  // namespace dts
