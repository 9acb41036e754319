#pragma once

#include <optional>

#include "dts/semantics.hpp"

namespace dts {

// Evaluation game for formulas whose quantifiers all have type (1). Plays
// start from every supporting team member with sign + and every refuting
// member with sign -; the agent owns the disjunction and quantifier choices
// and tries to keep every play alive, uniformly across the whole bundle.

enum class Sign : std::uint8_t { Plus, Minus };

struct Position {
  NodeId node = 0;
  Sign sign = Sign::Plus;
  Assignment t;

  bool operator==(const Position&) const = default;
  auto operator<=>(const Position&) const = default;
};

enum class PlayResult { Win, Survive, Lose };

struct AgentChoice {
  enum class Kind { Or, Witness };
  Kind kind = Kind::Or;
  bool or_left = false;   // support the left disjunct
  bool or_right = false;  // support the right disjunct
  std::set<Elem> witness;

  static AgentChoice or_pick(bool left, bool right);
  static AgentChoice witness_set(std::set<Elem> s);

  bool operator==(const AgentChoice&) const = default;
  auto operator<=>(const AgentChoice&) const = default;
};

struct Strategy {
  std::map<Position, AgentChoice> moves;
};

enum class PositionKind { Terminal, Forced, AgentOr, AgentWitness };

struct MoveDesc {
  PositionKind kind = PositionKind::Terminal;
  PlayResult terminal_result = PlayResult::Lose;        // Terminal only
  std::vector<Position> successors;                     // Forced only
  std::vector<std::set<Elem>> witness_options;          // AgentWitness only
};

struct ChoiceResult {
  std::vector<Position> successors;
  // True when one side of a witness split is empty: the play may then also
  // end at the quantifier position itself, surviving.
  bool survive_branch = false;
};

// Classifies a position: terminal (with its result), forced (with its
// successors), or an agent decision point (with the available choices).
MoveDesc transitions(const Structure& a, const Formula& f, const Position& pos,
                     long long lift_cap = 1LL << 20);

// Successors of an agent position under a choice; validates the choice.
ChoiceResult apply_choice(const Structure& a, const Formula& f, const Position& pos,
                          const AgentChoice& choice);

struct GameLimits {
  long long max_candidates = 1LL << 20;  // strategy-search budget
};

struct GameStats {
  long long positions_expanded = 0;
  long long candidates_tried = 0;
};

struct PlayOutcome {
  Position position;  // where the play ended
  PlayResult result = PlayResult::Lose;
};

struct FinalTeams {
  // Per generalized atom node: the supporting and refuting teams collected
  // from the plays that ended there.
  std::map<NodeId, std::pair<Team, Team>> teams;
};

struct PlaysResult {
  std::vector<PlayOutcome> outcomes;  // in discovery order, deduplicated
  FinalTeams final_teams;
};

// Searches for a positional strategy under which every play ends in Win or
// Survive and every generalized atom accepts the teams its plays collect;
// atoms no play reaches must accept the doubly empty team. Returns the
// strategy restricted to the positions it makes reachable, or nullopt when
// the search space is exhausted. Throws SearchCapExceeded when the budget
// runs out first.
std::optional<Strategy> find_uniform_survival_strategy(const Structure& a, const Team& u,
                                                       const Team& v, const Formula& f,
                                                       const GameLimits& limits = {},
                                                       GameStats* stats = nullptr);

// Walks every play under a fixed strategy. The strategy must cover every
// reachable agent position.
PlaysResult enumerate_plays(const Structure& a, const Team& u, const Team& v,
                            const Formula& f, const Strategy& strategy);

// Checks the two survival conditions directly from the plays, independently
// of how the strategy was produced.
bool verify_strategy(const Structure& a, const Team& u, const Team& v, const Formula& f,
                     const Strategy& strategy);

}  // namespace dts
