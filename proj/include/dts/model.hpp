#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dts/errors.hpp"

namespace dts {

using Elem = std::uint32_t;
using Tuple = std::vector<Elem>;
using TupleSet = std::set<Tuple>;

bool is_identifier(const std::string& s);

// Ordered, nonempty tuple of variable names. Repetitions are allowed and
// meaningful: (x, x) only matches value tuples with equal coordinates.
struct VarTuple {
  std::vector<std::string> vars;

  explicit VarTuple(std::vector<std::string> vs);
  VarTuple(std::initializer_list<std::string> vs);

  std::size_t size() const { return vars.size(); }
  const std::string& operator[](std::size_t i) const { return vars[i]; }
  std::set<std::string> var_set() const;

  bool operator==(const VarTuple&) const = default;
  auto operator<=>(const VarTuple&) const = default;
};

struct Relation {
  int arity = 0;
  TupleSet tuples;

  bool operator==(const Relation&) const = default;
};

// Finite purely relational structure. Element labels are opaque strings;
// relation tuples are stored densely as indices into the label list.
class Structure {
 public:
  Structure(std::vector<std::string> labels, std::map<std::string, Relation> relations);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Elem e) const;
  std::optional<Elem> elem(const std::string& label) const;
  Elem elem_or_throw(const std::string& label) const;
  bool has_relation(const std::string& name) const;
  const Relation& relation(const std::string& name) const;  // EvalError if absent
  const std::map<std::string, Relation>& relations() const { return rels_; }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, Elem> index_;
  std::map<std::string, Relation> rels_;
};

// Domain {"0", ..., "k-1"} with no relations; the reference domain for
// extensional quantifier tables and isomorphism checks.
Structure canonical_structure(int k);

// Finite partial map from variables to elements, kept sorted by variable
// name so that identical assignments compare equal.
struct Assignment {
  std::vector<std::pair<std::string, Elem>> binds;

  static Assignment empty() { return {}; }
  static Assignment of(std::initializer_list<std::pair<std::string, Elem>> bs);

  bool defined(const std::string& v) const;
  std::optional<Elem> find(const std::string& v) const;
  Elem at(const std::string& v) const;  // EvalError if unbound
  std::vector<std::string> variables() const;

  bool operator==(const Assignment&) const = default;
  auto operator<=>(const Assignment&) const = default;
};

// Set of assignments sharing one variable domain. The domain is explicit:
// the empty team over {x} and the empty team over {x,y} are different teams.
class Team {
 public:
  Team() = default;
  explicit Team(std::vector<std::string> vars, std::set<Assignment> members = {});

  // The team {∅} over the empty variable domain (the sentence convention).
  static Team singleton_empty();

  const std::vector<std::string>& vars() const { return vars_; }
  const std::set<Assignment>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(const Assignment& s) const { return members_.count(s) > 0; }

  Team unite(const Team& other) const;      // domains must agree
  Team without(const Assignment& s) const;  // drop one member

  bool operator==(const Team&) const = default;
  auto operator<=>(const Team&) const = default;

 private:
  std::vector<std::string> vars_;  // sorted, duplicate-free
  std::set<Assignment> members_;
};

struct DoubleTeam {
  Team U, V;

  DoubleTeam(Team u, Team v);  // requires matching variable domains
};

// Value of a disjunction choice function: route an assignment to the left
// disjunct, the right disjunct, or both.
enum class VChoiceValue { Both, LeftOnly, RightOnly };

struct VChoice {
  std::map<Assignment, VChoiceValue> choice;
};

// Maps team members to sets of value tuples (all of one width).
struct WitnessFunction {
  std::map<Assignment, TupleSet> images;
};

struct SplitResult {
  Team u1;   // members routed to the left disjunct
  Team u1c;  // members routed away from it
  Team u2;   // members routed to the right disjunct
  Team u2c;
};

// True when vals[i] == vals[j] whenever xs[i] == xs[j].
bool respects_repetitions(const VarTuple& xs, const Tuple& vals);

// All tuples over {0..domain_size-1} of width |xs| that respect the
// repetition pattern of xs, in lexicographic order.
std::vector<Tuple> repetition_respecting_tuples(const VarTuple& xs, int domain_size);

// s[xs/vals]: rebind xs pointwise to vals; existing bindings are replaced.
Assignment extend(const Assignment& s, const VarTuple& xs, const Tuple& vals);

// s[xs/T] = { s[xs/t] : t ∈ T }. The empty T yields the empty team over
// dom(s) ∪ vars(xs).
Team extend_by_set(const Assignment& s, const VarTuple& xs, const TupleSet& tuples);

// V[xs/f] = ⋃_{s ∈ V} s[xs/f(s)]; the empty team maps to the empty team
// (over the extended domain) no matter what f is.
Team team_extend(const Team& v, const VarTuple& xs, const WitnessFunction& f);
Team team_extend(const Team& v, const VarTuple& xs,
                 const std::function<const TupleSet&(const Assignment&)>& f);

// Repetition-respecting tuples not in `tuples`.
TupleSet complement_image(const TupleSet& tuples, const VarTuple& xs, int domain_size);

// Pointwise complement of f within the repetition-respecting tuples.
WitnessFunction complement_fn(const WitnessFunction& f, const VarTuple& xs, int domain_size);

// Split u along a disjunction choice function. u1 ∪ u2 == u and the
// complements collect exactly the members routed away from each side.
SplitResult split(const Team& u, const VChoice& h);

// Projection {(s(y_1), ..., s(y_k)) : s ∈ v}; duplicates collapse.
TupleSet rel(const Structure& a, const Team& v, const VarTuple& ys);

std::vector<std::string> union_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b);

}  // namespace dts
