#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dts/model.hpp"

namespace dts {

// A generalized quantifier of type (i_1, ..., i_n), given by a membership
// oracle over a structure A and a candidate tuple of relations B_j ⊆ A^{i_j}.
struct QuantifierDef {
  std::string name;           // canonical, e.g. "exists", "at_least<2>", "dual(empty)"
  std::vector<int> type_sig;  // component arities, all >= 1
  std::function<bool(const Structure&, const std::vector<TupleSet>&)> membership;
  std::shared_ptr<const QuantifierDef> dual_of;  // set on dual wrappers
  bool extensional = false;
};

using QuantifierPtr = std::shared_ptr<const QuantifierDef>;

// A generalized atom: its base quantifier of type (i_1, ..., i_{n+m}) judges
// n relations projected from U followed by m relations projected from V.
struct AtomDef {
  std::string name;
  QuantifierPtr base;
  int split_n = 0;  // number of leading components fed from U
};

using AtomPtr = std::shared_ptr<const AtomDef>;

// Structured quantifier name as written in formulas: a base identifier, an
// optional integer parameter, and a number of dual(...) wrappers.
struct QuantName {
  std::string base;
  std::optional<long long> param;
  int dual_depth = 0;

  std::string text() const;

  bool operator==(const QuantName&) const = default;
};

QuantName parse_quant_name(const std::string& text);

// Membership test with well-typedness validation.
bool member(const QuantifierDef& q, const Structure& a, const std::vector<TupleSet>& rels);

// The dual quantifier: complement within well-typed relation tuples.
// Taking the dual twice returns the original definition.
QuantifierPtr dual(const QuantifierPtr& q);

// All members of Q over A whose component relations consist solely of
// tuples respecting the corresponding repetition patterns. Deterministic:
// candidates are enumerated in binary-counter order over the concatenated
// per-component tuple lists (component-major, tuples in lexicographic
// order). Throws CapExceeded when the candidate count exceeds the cap.
std::vector<std::vector<TupleSet>> lift(const QuantifierDef& q, const Structure& a,
                                        const std::vector<VarTuple>& patterns,
                                        long long enumeration_cap);

struct IsoViolation {
  int size = 0;
  std::vector<Elem> perm;  // image of i under the witnessing permutation
  std::vector<TupleSet> rels;
};

// Brute-force isomorphism-closure check over canonical domains of size
// 1..max_size: every permutation must preserve membership.
std::vector<IsoViolation> check_iso_closure(const QuantifierDef& q, int max_size);

// Atom satisfaction on a double team: project the argument tuples (U for the
// first split_n, V for the rest) and ask the base quantifier.
bool atom_holds(const AtomDef& atom, const Structure& a, const DoubleTeam& dt,
                const std::vector<VarTuple>& pos_args, const std::vector<VarTuple>& neg_args);

// Extensional quantifier given by explicit member tables over canonical
// domains, keyed by domain size. Domains not listed have no members.
struct ExtensionalDef {
  std::string name;
  std::vector<int> type_sig;
  std::map<int, std::set<std::vector<TupleSet>>> tables;
};

// Builds the definition without any closure check (used by the closure
// checker itself, which must be able to inspect bad tables).
QuantifierPtr make_extensional(const ExtensionalDef& def);

// Resolves quantifier and atom names. Builtin quantifier families are
// cardinality predicates and apply at any single component arity; the
// arity is taken from the argument tuple written at the use site.
class Registry {
 public:
  Registry();

  // Validates the table's closure under canonical-domain permutations
  // before admitting it.
  void load_extensional(const ExtensionalDef& def);

  QuantifierPtr resolve_quantifier(const QuantName& name, const std::vector<int>& arities) const;
  AtomPtr resolve_atom(const std::string& name, const std::vector<int>& pos_arities,
                       const std::vector<int>& neg_arities) const;

  std::vector<std::string> builtin_quantifier_names() const;
  std::vector<std::string> builtin_atom_names() const;

  // Representative concrete instantiations of every builtin plus all loaded
  // extensional quantifiers, for closure checking.
  std::vector<QuantifierPtr> closure_check_candidates() const;

 private:
  std::map<std::string, ExtensionalDef> extensionals_;
};

}  // namespace dts
