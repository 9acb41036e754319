#include "dts/gq.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace dts {

namespace {

unsigned long long ipow(unsigned long long base, int exp) {
  unsigned long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::string type_text(const std::vector<int>& sig) {
  std::string s = "(";
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(sig[i]);
  }
  return s + ")";
}

void validate_typed(const QuantifierDef& q, const Structure& a,
                    const std::vector<TupleSet>& rels) {
  if (rels.size() != q.type_sig.size()) {
    throw TypeError("quantifier '" + q.name + "' has type " + type_text(q.type_sig) +
                    ", got " + std::to_string(rels.size()) + " relations");
  }
  for (std::size_t j = 0; j < rels.size(); ++j) {
    for (const Tuple& t : rels[j]) {
      if (static_cast<int>(t.size()) != q.type_sig[j]) {
        throw TypeError("relation " + std::to_string(j + 1) + " of quantifier '" + q.name +
                        "' expects tuples of width " + std::to_string(q.type_sig[j]));
      }
      for (Elem e : t) {
        if (e >= static_cast<Elem>(a.size())) {
          throw TypeError("relation tuple element outside the structure's domain");
        }
      }
    }
  }
}

// Builtin single-component families, all cardinality predicates on |B|
// relative to |A|^i. They instantiate at any component arity i >= 1.
using CardinalityTest = std::function<bool(unsigned long long bsize, unsigned long long full)>;

struct BuiltinFamily {
  bool takes_param = false;
  std::function<CardinalityTest(long long param)> make;
};

const std::map<std::string, BuiltinFamily>& builtin_families() {
  static const std::map<std::string, BuiltinFamily> families = {
      {"exists",
       {false, [](long long) -> CardinalityTest {
          return [](unsigned long long b, unsigned long long) { return b > 0; };
        }}},
      {"forall",
       {false, [](long long) -> CardinalityTest {
          return [](unsigned long long b, unsigned long long full) { return b == full; };
        }}},
      {"empty",
       {false, [](long long) -> CardinalityTest {
          return [](unsigned long long, unsigned long long) { return false; };
        }}},
      {"full",
       {false, [](long long) -> CardinalityTest {
          return [](unsigned long long, unsigned long long) { return true; };
        }}},
      {"even",
       {false, [](long long) -> CardinalityTest {
          return [](unsigned long long b, unsigned long long) { return b % 2 == 0; };
        }}},
      {"majority",
       {false, [](long long) -> CardinalityTest {
          return [](unsigned long long b, unsigned long long full) { return 2 * b > full; };
        }}},
      {"at_least",
       {true, [](long long k) -> CardinalityTest {
          return [k](unsigned long long b, unsigned long long) {
            return b >= static_cast<unsigned long long>(k);
          };
        }}},
      {"exactly",
       {true, [](long long k) -> CardinalityTest {
          return [k](unsigned long long b, unsigned long long) {
            return b == static_cast<unsigned long long>(k);
          };
        }}},
  };
  return families;
}

QuantifierPtr make_cardinality_quantifier(const std::string& name, int arity,
                                          CardinalityTest test) {
  auto def = std::make_shared<QuantifierDef>();
  def->name = name;
  def->type_sig = {arity};
  def->membership = [arity, test](const Structure& a, const std::vector<TupleSet>& rels) {
    return test(rels[0].size(), ipow(static_cast<unsigned long long>(a.size()), arity));
  };
  return def;
}

bool functional_last_coordinate(const TupleSet& ts) {
  // Every two tuples agreeing on the prefix agree on the last coordinate.
  std::map<Tuple, Elem> seen;
  for (const Tuple& t : ts) {
    Tuple prefix(t.begin(), t.end() - 1);
    auto [it, inserted] = seen.emplace(std::move(prefix), t.back());
    if (!inserted && it->second != t.back()) return false;
  }
  return true;
}

std::vector<TupleSet> permute_rels(const std::vector<TupleSet>& rels,
                                   const std::vector<Elem>& perm) {
  std::vector<TupleSet> out;
  out.reserve(rels.size());
  for (const TupleSet& ts : rels) {
    TupleSet mapped;
    for (const Tuple& t : ts) {
      Tuple m;
      m.reserve(t.size());
      for (Elem e : t) m.push_back(perm[e]);
      mapped.insert(std::move(m));
    }
    out.push_back(std::move(mapped));
  }
  return out;
}

}  // namespace

std::string QuantName::text() const {
  std::string s = base;
  if (param) s += "<" + std::to_string(*param) + ">";
  for (int i = 0; i < dual_depth; ++i) s = "dual(" + s + ")";
  return s;
}

QuantName parse_quant_name(const std::string& text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  std::function<QuantName()> parse_inner = [&]() -> QuantName {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    std::string ident = text.substr(start, pos - start);
    if (!is_identifier(ident)) throw ParseError("bad quantifier name: '" + text + "'");
    skip_ws();
    if (ident == "dual" && pos < text.size() && text[pos] == '(') {
      ++pos;
      QuantName inner = parse_inner();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') {
        throw ParseError("unbalanced dual(...) in quantifier name: '" + text + "'");
      }
      ++pos;
      ++inner.dual_depth;
      return inner;
    }
    QuantName qn;
    qn.base = ident;
    if (pos < text.size() && text[pos] == '<') {
      ++pos;
      skip_ws();
      std::size_t dstart = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (dstart == pos) throw ParseError("expected integer parameter in '" + text + "'");
      qn.param = std::stoll(text.substr(dstart, pos - dstart));
      skip_ws();
      if (pos >= text.size() || text[pos] != '>') {
        throw ParseError("unterminated parameter in quantifier name: '" + text + "'");
      }
      ++pos;
    }
    return qn;
  };
  QuantName qn = parse_inner();
  skip_ws();
  if (pos != text.size()) throw ParseError("trailing characters in quantifier name: '" + text + "'");
  return qn;
}

bool member(const QuantifierDef& q, const Structure& a, const std::vector<TupleSet>& rels) {
  validate_typed(q, a, rels);
  return q.membership(a, rels);
}

QuantifierPtr dual(const QuantifierPtr& q) {
  if (!q) throw ValueError("null quantifier");
  if (q->dual_of) return q->dual_of;
  auto def = std::make_shared<QuantifierDef>();
  def->name = "dual(" + q->name + ")";
  def->type_sig = q->type_sig;
  QuantifierPtr base = q;
  def->membership = [base](const Structure& a, const std::vector<TupleSet>& rels) {
    return !base->membership(a, rels);
  };
  def->dual_of = base;
  def->extensional = q->extensional;
  return def;
}

std::vector<std::vector<TupleSet>> lift(const QuantifierDef& q, const Structure& a,
                                        const std::vector<VarTuple>& patterns,
                                        long long enumeration_cap) {
  if (patterns.size() != q.type_sig.size()) {
    throw TypeError("quantifier '" + q.name + "' has type " + type_text(q.type_sig) +
                    ", got " + std::to_string(patterns.size()) + " tuples");
  }
  std::vector<std::vector<Tuple>> slot_tuples;
  std::size_t total_bits = 0;
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    if (static_cast<int>(patterns[j].size()) != q.type_sig[j]) {
      throw TypeError("tuple " + std::to_string(j + 1) + " of quantifier '" + q.name +
                      "' must have width " + std::to_string(q.type_sig[j]));
    }
    slot_tuples.push_back(repetition_respecting_tuples(patterns[j], a.size()));
    total_bits += slot_tuples.back().size();
  }
  if (total_bits >= 63 || (1LL << total_bits) > enumeration_cap) {
    throw CapExceeded("lift enumeration for '" + q.name + "' needs 2^" +
                      std::to_string(total_bits) + " candidates, above the cap of " +
                      std::to_string(enumeration_cap));
  }
  std::vector<std::vector<TupleSet>> out;
  const long long limit = 1LL << total_bits;
  for (long long counter = 0; counter < limit; ++counter) {
    std::vector<TupleSet> rels(patterns.size());
    std::size_t bit = 0;
    for (std::size_t j = 0; j < slot_tuples.size(); ++j) {
      for (const Tuple& t : slot_tuples[j]) {
        if (counter & (1LL << bit)) rels[j].insert(t);
        ++bit;
      }
    }
    if (q.membership(a, rels)) out.push_back(std::move(rels));
  }
  return out;
}

std::vector<IsoViolation> check_iso_closure(const QuantifierDef& q, int max_size) {
  if (max_size < 1) throw ValueError("max_size must be positive");
  std::vector<IsoViolation> violations;
  for (int k = 1; k <= max_size; ++k) {
    Structure a = canonical_structure(k);
    std::size_t total_bits = 0;
    std::vector<std::vector<Tuple>> slot_tuples;
    for (int arity : q.type_sig) {
      // Distinct placeholder variables make the repetition filter vacuous,
      // so this enumerates all of A^arity in lexicographic order.
      std::vector<std::string> placeholders;
      for (int i = 0; i < arity; ++i) placeholders.push_back("v" + std::to_string(i));
      std::vector<Tuple> all = repetition_respecting_tuples(VarTuple(placeholders), k);
      total_bits += all.size();
      slot_tuples.push_back(std::move(all));
    }
    if (total_bits >= 26) {
      throw CapExceeded("closure check would enumerate 2^" + std::to_string(total_bits) +
                        " relation tuples");
    }
    std::vector<Elem> perm(static_cast<std::size_t>(k));
    const long long limit = 1LL << total_bits;
    for (long long counter = 0; counter < limit; ++counter) {
      std::vector<TupleSet> rels(q.type_sig.size());
      std::size_t bit = 0;
      for (std::size_t j = 0; j < slot_tuples.size(); ++j) {
        for (const Tuple& t : slot_tuples[j]) {
          if (counter & (1LL << bit)) rels[j].insert(t);
          ++bit;
        }
      }
      bool base_verdict = q.membership(a, rels);
      std::iota(perm.begin(), perm.end(), 0);
      while (std::next_permutation(perm.begin(), perm.end())) {
        std::vector<TupleSet> mapped = permute_rels(rels, perm);
        if (q.membership(a, mapped) != base_verdict) {
          violations.push_back(IsoViolation{k, perm, rels});
        }
      }
    }
  }
  return violations;
}

bool atom_holds(const AtomDef& atom, const Structure& a, const DoubleTeam& dt,
                const std::vector<VarTuple>& pos_args, const std::vector<VarTuple>& neg_args) {
  const std::size_t n = static_cast<std::size_t>(atom.split_n);
  const std::size_t m = atom.base->type_sig.size() - n;
  if (pos_args.size() != n || neg_args.size() != m) {
    throw TypeError("atom '" + atom.name + "' takes " + std::to_string(n) + "+" +
                    std::to_string(m) + " argument tuples");
  }
  std::vector<TupleSet> rels;
  rels.reserve(n + m);
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<int>(pos_args[j].size()) != atom.base->type_sig[j]) {
      throw TypeError("argument tuple width mismatch in atom '" + atom.name + "'");
    }
    rels.push_back(rel(a, dt.U, pos_args[j]));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (static_cast<int>(neg_args[j].size()) != atom.base->type_sig[n + j]) {
      throw TypeError("argument tuple width mismatch in atom '" + atom.name + "'");
    }
    rels.push_back(rel(a, dt.V, neg_args[j]));
  }
  return member(*atom.base, a, rels);
}

QuantifierPtr make_extensional(const ExtensionalDef& def) {
  if (!is_identifier(def.name) || def.name == "dual") {
    throw ValueError("bad extensional quantifier name: '" + def.name + "'");
  }
  if (def.type_sig.empty()) throw ValueError("extensional quantifier needs a nonempty type");
  for (int arity : def.type_sig) {
    if (arity < 1) throw ValueError("quantifier type components must be positive");
  }
  for (const auto& [size, members] : def.tables) {
    if (size < 1) throw ValueError("table domain size must be positive");
    for (const auto& rels : members) {
      if (rels.size() != def.type_sig.size()) {
        throw ValueError("table member of '" + def.name + "' has wrong component count");
      }
      for (std::size_t j = 0; j < rels.size(); ++j) {
        for (const Tuple& t : rels[j]) {
          if (static_cast<int>(t.size()) != def.type_sig[j]) {
            throw ValueError("table tuple width mismatch in '" + def.name + "'");
          }
          for (Elem e : t) {
            if (e >= static_cast<Elem>(size)) {
              throw ValueError("table tuple element outside the canonical domain in '" +
                               def.name + "'");
            }
          }
        }
      }
    }
  }
  auto q = std::make_shared<QuantifierDef>();
  q->name = def.name;
  q->type_sig = def.type_sig;
  q->extensional = true;
  auto tables = std::make_shared<const std::map<int, std::set<std::vector<TupleSet>>>>(def.tables);
  q->membership = [tables](const Structure& a, const std::vector<TupleSet>& rels) {
    // Domains are identified with the canonical domain of the same size by
    // element index; closure of the table makes this choice irrelevant.
    auto it = tables->find(a.size());
    if (it == tables->end()) return false;
    return it->second.count(rels) > 0;
  };
  return q;
}

Registry::Registry() = default;

void Registry::load_extensional(const ExtensionalDef& def) {
  QuantifierPtr q = make_extensional(def);  // validates shape
  if (builtin_families().count(def.name) || extensionals_.count(def.name)) {
    throw ValueError("quantifier name already in use: '" + def.name + "'");
  }
  // Permutations act bijectively on members, so closure of the member set
  // under every permutation of each listed canonical domain is equivalent
  // to full isomorphism closure at those sizes.
  for (const auto& [size, members] : def.tables) {
    if (size > 7) {
      throw ValueError("extensional table domain size too large to verify closure");
    }
    std::vector<Elem> perm(static_cast<std::size_t>(size));
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end())) {
      for (const auto& rels : members) {
        if (!members.count(permute_rels(rels, perm))) {
          throw ValueError("extensional quantifier '" + def.name +
                           "' is not isomorphism-closed at domain size " + std::to_string(size));
        }
      }
    }
  }
  extensionals_.emplace(def.name, def);
}

QuantifierPtr Registry::resolve_quantifier(const QuantName& name,
                                           const std::vector<int>& arities) const {
  for (int arity : arities) {
    if (arity < 1) throw TypeError("argument tuples must be nonempty");
  }
  QuantifierPtr core;
  auto fam = builtin_families().find(name.base);
  if (fam != builtin_families().end()) {
    if (fam->second.takes_param != name.param.has_value()) {
      throw NameError(fam->second.takes_param
                          ? "quantifier '" + name.base + "' needs a parameter, e.g. " +
                                name.base + "<2>"
                          : "quantifier '" + name.base + "' takes no parameter");
    }
    if (name.param && *name.param < 0) throw ValueError("negative quantifier parameter");
    if (arities.size() != 1) {
      throw TypeError("type mismatch: quantifier '" + name.base + "' has type (1), got " +
                      std::to_string(arities.size()) + " tuples");
    }
    std::string canonical = name.base;
    if (name.param) canonical += "<" + std::to_string(*name.param) + ">";
    core = make_cardinality_quantifier(canonical, arities[0],
                                       fam->second.make(name.param.value_or(0)));
  } else {
    auto ext = extensionals_.find(name.base);
    if (ext == extensionals_.end()) {
      throw NameError("unknown quantifier: '" + name.base + "'");
    }
    if (name.param) throw NameError("quantifier '" + name.base + "' takes no parameter");
    if (ext->second.type_sig != arities) {
      throw TypeError("type mismatch: quantifier '" + name.base + "' has type " +
                      type_text(ext->second.type_sig) + ", got tuples of widths " +
                      type_text(arities));
    }
    core = make_extensional(ext->second);
  }
  return (name.dual_depth % 2 == 1) ? dual(core) : core;
}

AtomPtr Registry::resolve_atom(const std::string& name, const std::vector<int>& pos_arities,
                               const std::vector<int>& neg_arities) const {
  for (int arity : pos_arities) {
    if (arity < 1) throw TypeError("argument tuples must be nonempty");
  }
  for (int arity : neg_arities) {
    if (arity < 1) throw TypeError("argument tuples must be nonempty");
  }
  auto wrong_shape = [&](const std::string& expected) -> TypeError {
    return TypeError("atom '" + name + "' takes " + expected + "; got " +
                     std::to_string(pos_arities.size()) + "+" +
                     std::to_string(neg_arities.size()) + " tuples of widths " +
                     type_text(pos_arities) + ";" + type_text(neg_arities));
  };
  auto def = std::make_shared<AtomDef>();
  def->name = name;
  if (name == "none") {
    // Rejects every double team, the empty one included.
    if (pos_arities != std::vector<int>{1} || neg_arities != std::vector<int>{1}) {
      throw wrong_shape("one width-1 tuple on each side");
    }
    auto base = std::make_shared<QuantifierDef>();
    base->name = "none";
    base->type_sig = {1, 1};
    base->membership = [](const Structure&, const std::vector<TupleSet>&) { return false; };
    def->base = base;
    def->split_n = 1;
  } else if (name == "double") {
    if (pos_arities.size() != 1 || neg_arities.size() != 1 || pos_arities != neg_arities) {
      throw wrong_shape("one tuple on each side, of equal width");
    }
    int k = pos_arities[0];
    auto base = std::make_shared<QuantifierDef>();
    base->name = "double";
    base->type_sig = {k, k};
    base->membership = [](const Structure&, const std::vector<TupleSet>& rels) {
      return rels[1].size() == 2 * rels[0].size();
    };
    def->base = base;
    def->split_n = 1;
  } else if (name == "releq") {
    if (pos_arities.size() != 1 || neg_arities.size() != 1 || pos_arities != neg_arities) {
      throw wrong_shape("one tuple on each side, of equal width");
    }
    int k = pos_arities[0];
    auto base = std::make_shared<QuantifierDef>();
    base->name = "releq";
    base->type_sig = {k, k};
    base->membership = [](const Structure&, const std::vector<TupleSet>& rels) {
      return rels[0] == rels[1];
    };
    def->base = base;
    def->split_n = 1;
  } else if (name == "dep") {
    if (pos_arities.size() != 1 || !neg_arities.empty()) {
      throw wrong_shape("one tuple before the ';' and none after");
    }
    int k = pos_arities[0];
    auto base = std::make_shared<QuantifierDef>();
    base->name = "dep";
    base->type_sig = {k};
    base->membership = [](const Structure&, const std::vector<TupleSet>& rels) {
      return functional_last_coordinate(rels[0]);
    };
    def->base = base;
    def->split_n = 1;
  } else {
    throw NameError("unknown atom: '" + name + "'");
  }
  return def;
}

std::vector<std::string> Registry::builtin_quantifier_names() const {
  std::vector<std::string> names;
  for (const auto& [name, fam] : builtin_families()) {
    names.push_back(fam.takes_param ? name + "<k>" : name);
  }
  return names;
}

std::vector<std::string> Registry::builtin_atom_names() const {
  return {"dep", "double", "none", "releq"};
}

std::vector<QuantifierPtr> Registry::closure_check_candidates() const {
  std::vector<QuantifierPtr> out;
  for (const auto& [name, fam] : builtin_families()) {
    for (int arity : {1, 2}) {
      QuantName qn;
      qn.base = name;
      if (fam.takes_param) qn.param = 2;
      out.push_back(resolve_quantifier(qn, {arity}));
    }
  }
  for (const std::string& atom_name : builtin_atom_names()) {
    AtomPtr atom = atom_name == "dep" ? resolve_atom(atom_name, {2}, {})
                                      : resolve_atom(atom_name, {1}, {1});
    out.push_back(atom->base);
  }
  for (const auto& [name, def] : extensionals_) {
    out.push_back(make_extensional(def));
  }
  return out;
}

}  // namespace dts
