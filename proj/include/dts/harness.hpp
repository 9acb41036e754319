#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dts/json_io.hpp"

namespace dts {

// Describes one differential corpus: which structures, double teams, and
// formulas to range over, and whether to enumerate them all or sample.
struct CorpusSpec {
  std::string mode;                  // "flatness" or "game"
  std::map<std::string, int> vocab;  // relation name -> arity
  int max_domain = 2;
  int max_team_size = 2;
  int formula_depth = 2;
  std::vector<std::string> vars = {"x"};
  std::vector<std::string> quantifiers;
  std::vector<std::string> atoms;
  std::uint64_t seed = 0;
  long long sample_count = 0;  // 0 = exhaustive
};

CorpusSpec corpus_spec_from_json(const Json& j);
Json to_json(const CorpusSpec& spec);

// Counter-based generator (splitmix64): streams are keyed by (seed, index),
// so instance i can be regenerated without replaying 0..i-1.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static SplitMix64 keyed(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound)

 private:
  std::uint64_t state_;
};

// Building blocks of the instance stream, exposed for direct inspection.
std::vector<Structure> enumerate_structures(const CorpusSpec& spec);
std::vector<Team> enumerate_teams(const Structure& a, const std::vector<std::string>& vars,
                                  int max_team_size);
// Formulas of depth <= formula_depth, grouped by exact depth.
std::vector<std::vector<Formula>> enumerate_formula_levels(const CorpusSpec& spec,
                                                           const Registry& registry);
// Closed-form size of the instance stream (no enumeration), as a double so
// astronomically infeasible specs do not overflow.
double estimate_instance_count(const CorpusSpec& spec);

using InstanceVisitor = std::function<void(long long index, const Structure& a,
                                           const DoubleTeam& dt, const Formula& f)>;

// Streams the corpus in a fixed order: structures (ascending size, relation
// subsets in counter order), then double teams (U outer, V inner), then
// formulas. Sampled mode draws spec.sample_count independent instances
// instead. Throws ValueError when an exhaustive request is infeasible.
void enumerate_instances(const CorpusSpec& spec, const Registry& registry,
                         const InstanceVisitor& visit);

struct DiffReport {
  long long instances = 0;
  long long discrepancies = 0;
  long long inconclusive = 0;
  long long wall_ms = 0;
  Json json;  // full report: spec echo, counts, records, wallMs
};

// Checks flatness (team verdict == pointwise classical verdict) on every
// instance. Requires mode "flatness" and an empty atom allowlist.
DiffReport diff_flatness(const CorpusSpec& spec, const Registry& registry);

// Checks that the double-team verdict matches uniform-survival-strategy
// existence on every instance, and that every found strategy verifies.
// Requires mode "game"; quantifiers must all be type (1).
DiffReport diff_game(const CorpusSpec& spec, const Registry& registry,
                     const GameLimits& limits = {});

struct ShrinkInstance {
  Structure structure;
  DoubleTeam dt;
  Formula formula;
};

Json to_json(const ShrinkInstance& inst);

using FailurePredicate = std::function<bool(const ShrinkInstance&)>;

// Greedy minimization: repeatedly tries dropping a domain element, a team
// member, or replacing the formula by a proper subformula, keeping any
// reduction on which the predicate still fails. Restarts after each success,
// so the result is locally minimal.
ShrinkInstance shrink(ShrinkInstance start, const FailurePredicate& fails);

}  // namespace dts
