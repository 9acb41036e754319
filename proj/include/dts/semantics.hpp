#pragma once

#include "dts/syntax.hpp"

namespace dts {

struct EvalConfig {
  int max_domain = 4;                     // largest admissible structure
  int max_team = 6;                       // largest admissible input team
  long long enumeration_cap = 1LL << 16;  // candidate budget per search site
  bool memo = true;
};

struct EvalStats {
  long long nodes_visited = 0;
  long long witness_functions_tried = 0;
};

struct Verdict {
  bool value = false;
  EvalStats stats;
};

// Double-team satisfaction: U jointly supports the formula while V jointly
// refutes it. The search over choice and witness functions is exhaustive;
// enumeration sites whose candidate count exceeds the configured cap throw
// CapExceeded. The caps on domain and team size apply to the inputs only,
// not to teams arising during evaluation.
Verdict eval(const Structure& a, const DoubleTeam& dt, const Formula& f,
             const EvalConfig& config = {});

// Classical single-assignment satisfaction. Quantifiers are interpreted by
// collecting, per component, the witness tuples whose extension satisfies
// the component formula, and asking the quantifier about the collected
// relations. Formulas containing generalized atoms are rejected.
bool eval_fo(const Structure& a, const Assignment& s, const Formula& f,
             const EvalConfig& config = {});

// Satisfaction of a sentence under the convention ({∅}, ∅).
Verdict sentence_true(const Structure& a, const Formula& f, const EvalConfig& config = {});

struct FlatnessReport {
  bool team_value = false;  // (U, V) satisfaction
  bool fo_value = false;    // every member of U satisfies, every member of V falsifies
  bool agree = false;
  EvalStats stats;
};

// Compares the double-team verdict with the pointwise classical one. Only
// meaningful (and only accepted) for formulas without generalized atoms,
// where the two are provably equivalent.
FlatnessReport flatness_check(const Structure& a, const DoubleTeam& dt, const Formula& f,
                              const EvalConfig& config = {});

}  // namespace dts
