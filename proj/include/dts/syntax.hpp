#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dts/gq.hpp"
#include "dts/model.hpp"

namespace dts {

using NodeId = std::uint32_t;

struct EqualityNode {
  std::string lhs, rhs;
};

struct RelAtomNode {
  std::string rel;
  VarTuple args;
};

struct NotNode {
  NodeId sub;
};

struct OrNode {
  NodeId left, right;
};

struct QuantNode {
  QuantifierPtr q;
  std::vector<VarTuple> tuples;  // one per type component, widths match the type
  std::vector<NodeId> subs;
};

struct GAtomNode {
  AtomPtr atom;
  std::vector<VarTuple> pos_args, neg_args;
};

using Node = std::variant<EqualityNode, RelAtomNode, NotNode, OrNode, QuantNode, GAtomNode>;

// Immutable formula tree stored as a preorder node array; a node's id is its
// array index, so two syntactically equal subtrees at different positions
// have distinct ids, and every subtree occupies a contiguous id range.
class Formula {
 public:
  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const;

  const std::set<std::string>& free_vars(NodeId id) const;
  const std::set<std::string>& free_variables() const { return free_vars(root()); }

  // Variables bound by quantifiers on the path from the root to `id`
  // (exclusive of binders below it).
  const std::set<std::string>& bound_above(NodeId id) const;

  std::size_t subtree_size(NodeId id) const;
  Formula subformula(NodeId id) const;

  bool contains_gatom() const;
  std::vector<NodeId> gatom_nodes() const;

  // Structural equality; ids are positional, so this ignores them.
  bool operator==(const Formula& other) const;

  static Formula equality(std::string lhs, std::string rhs);
  static Formula rel_atom(std::string rel, VarTuple args);
  static Formula lnot(const Formula& f);
  static Formula lor(const Formula& left, const Formula& right);
  // Conjunction is surface sugar: a & b builds ~(~a | ~b).
  static Formula land(const Formula& left, const Formula& right);
  static Formula quant(QuantifierPtr q, std::vector<VarTuple> tuples,
                       const std::vector<Formula>& subs);
  static Formula gatom(AtomPtr atom, std::vector<VarTuple> pos_args,
                       std::vector<VarTuple> neg_args);

 private:
  Formula() = default;
  void finish();  // computes free-variable and binder caches

  std::vector<Node> nodes_;
  std::vector<std::set<std::string>> free_;
  std::vector<std::set<std::string>> bound_above_;
};

// Grammar (precedence ~ > & > |, both binary operators left-associative):
//
//   formula  := "~" formula | formula "|" formula | formula "&" formula
//             | "(" formula ")" | var "=" var | RELNAME "(" var ("," var)* ")"
//             | "Q<" QNAME ">" tuple ("," tuple)* "." "(" formula ("," formula)* ")"
//             | "E" var "." formula | "A" var "." formula
//             | "@<" ANAME ">(" tuplelist ";" tuplelist ")"
//   tuple    := var | "(" var ("," var)* ")"
//   QNAME    := name | name "<" int ">" | "dual(" QNAME ")"
//
// "E x. f" and "A x. f" abbreviate Q<exists>/Q<forall> and scope as far
// right as possible; "a & b" expands to ~(~a | ~b) while parsing.
Formula parse(const std::string& text, const Registry& registry);

// Canonical rendering: core syntax only (no E/A/& sugar), minimal
// parentheses. parse(pretty(f)) reproduces f up to node ids.
std::string pretty(const Formula& f);

}  // namespace dts
