#include "dts/model.hpp"

#include <algorithm>
#include <cctype>

namespace dts {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

VarTuple::VarTuple(std::vector<std::string> vs) : vars(std::move(vs)) {
  if (vars.empty()) throw ValueError("variable tuple must be nonempty");
  for (const auto& v : vars) {
    if (!is_identifier(v)) throw ValueError("bad variable name: '" + v + "'");
  }
}

VarTuple::VarTuple(std::initializer_list<std::string> vs)
    : VarTuple(std::vector<std::string>(vs)) {}

std::set<std::string> VarTuple::var_set() const {
  return std::set<std::string>(vars.begin(), vars.end());
}

Structure::Structure(std::vector<std::string> labels, std::map<std::string, Relation> relations)
    : labels_(std::move(labels)), rels_(std::move(relations)) {
  if (labels_.empty()) throw ValueError("structure domain must be nonempty");
  for (Elem i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ValueError("element labels must be nonempty");
    if (!index_.emplace(labels_[i], i).second) {
      throw ValueError("duplicate element label: '" + labels_[i] + "'");
    }
  }
  for (const auto& [name, relation] : rels_) {
    if (!is_identifier(name)) throw ValueError("bad relation name: '" + name + "'");
    if (relation.arity < 1) {
      throw ValueError("relation '" + name + "' must have positive arity");
    }
    for (const Tuple& t : relation.tuples) {
      if (static_cast<int>(t.size()) != relation.arity) {
        throw ValueError("tuple width mismatch in relation '" + name + "'");
      }
      for (Elem e : t) {
        if (e >= labels_.size()) {
          throw ValueError("tuple element out of range in relation '" + name + "'");
        }
      }
    }
  }
}

const std::string& Structure::label(Elem e) const {
  if (e >= labels_.size()) throw ValueError("element index out of range");
  return labels_[e];
}

std::optional<Elem> Structure::elem(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Elem Structure::elem_or_throw(const std::string& label) const {
  auto e = elem(label);
  if (!e) throw ValueError("unknown element label: '" + label + "'");
  return *e;
}

bool Structure::has_relation(const std::string& name) const { return rels_.count(name) > 0; }

const Relation& Structure::relation(const std::string& name) const {
  auto it = rels_.find(name);
  if (it == rels_.end()) throw EvalError("unknown relation: '" + name + "'");
  return it->second;
}

Structure canonical_structure(int k) {
  if (k < 1) throw ValueError("canonical domain size must be positive");
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) labels.push_back(std::to_string(i));
  return Structure(std::move(labels), {});
}

Assignment Assignment::of(std::initializer_list<std::pair<std::string, Elem>> bs) {
  Assignment s;
  for (const auto& [v, e] : bs) {
    s.binds.emplace_back(v, e);
  }
  std::sort(s.binds.begin(), s.binds.end());
  for (std::size_t i = 1; i < s.binds.size(); ++i) {
    if (s.binds[i - 1].first == s.binds[i].first) {
      throw ValueError("duplicate variable in assignment: '" + s.binds[i].first + "'");
    }
  }
  return s;
}

bool Assignment::defined(const std::string& v) const { return find(v).has_value(); }

std::optional<Elem> Assignment::find(const std::string& v) const {
  for (const auto& [var, e] : binds) {
    if (var == v) return e;
  }
  return std::nullopt;
}

Elem Assignment::at(const std::string& v) const {
  auto e = find(v);
  if (!e) throw EvalError("variable '" + v + "' is unbound");
  return *e;
}

std::vector<std::string> Assignment::variables() const {
  std::vector<std::string> vs;
  vs.reserve(binds.size());
  for (const auto& [var, e] : binds) vs.push_back(var);
  return vs;
}

Team::Team(std::vector<std::string> vars, std::set<Assignment> members)
    : vars_(std::move(vars)), members_(std::move(members)) {
  std::sort(vars_.begin(), vars_.end());
  for (std::size_t i = 1; i < vars_.size(); ++i) {
    if (vars_[i - 1] == vars_[i]) throw ValueError("duplicate team variable: '" + vars_[i] + "'");
  }
  for (const auto& v : vars_) {
    if (!is_identifier(v)) throw ValueError("bad variable name: '" + v + "'");
  }
  for (const Assignment& s : members_) {
    if (s.variables() != vars_) {
      throw ValueError("team member does not match the team's variable domain");
    }
  }
}

Team Team::singleton_empty() { return Team({}, {Assignment::empty()}); }

Team Team::unite(const Team& other) const {
  if (vars_ != other.vars_) throw ValueError("team union requires matching variable domains");
  std::set<Assignment> members = members_;
  members.insert(other.members_.begin(), other.members_.end());
  return Team(vars_, std::move(members));
}

Team Team::without(const Assignment& s) const {
  std::set<Assignment> members = members_;
  members.erase(s);
  return Team(vars_, std::move(members));
}

DoubleTeam::DoubleTeam(Team u, Team v) : U(std::move(u)), V(std::move(v)) {
  if (U.vars() != V.vars()) {
    throw ValueError("double team requires both teams to share one variable domain");
  }
}

bool respects_repetitions(const VarTuple& xs, const Tuple& vals) {
  if (xs.size() != vals.size()) throw ValueError("tuple width mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i] == xs[j] && vals[i] != vals[j]) return false;
    }
  }
  return true;
}

std::vector<Tuple> repetition_respecting_tuples(const VarTuple& xs, int domain_size) {
  if (domain_size < 0) throw ValueError("negative domain size");
  // Positions of the first occurrence of each distinct variable; the other
  // positions mirror them, so iterating values of the distinct variables in
  // order yields the full tuples in lexicographic order.
  std::vector<std::size_t> source(xs.size());
  std::vector<std::size_t> firsts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t src = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (xs[j] == xs[i]) {
        src = j;
        break;
      }
    }
    source[i] = src;
    if (src == i) firsts.push_back(i);
  }
  std::vector<Tuple> out;
  std::vector<Elem> values(firsts.size(), 0);
  if (domain_size == 0) return out;
  while (true) {
    Tuple t(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::size_t k = 0;
      while (firsts[k] != source[i]) ++k;
      t[i] = values[k];
    }
    out.push_back(std::move(t));
    // Odometer step, least significant position last.
    std::size_t pos = values.size();
    while (pos > 0) {
      --pos;
      if (values[pos] + 1 < static_cast<Elem>(domain_size)) {
        ++values[pos];
        std::fill(values.begin() + static_cast<std::ptrdiff_t>(pos) + 1, values.end(), 0);
        break;
      }
      if (pos == 0) return out;
    }
  }
}

Assignment extend(const Assignment& s, const VarTuple& xs, const Tuple& vals) {
  if (xs.size() != vals.size()) throw ValueError("extension tuple width mismatch");
  if (!respects_repetitions(xs, vals)) {
    throw ValueError("extension values violate the repetition pattern");
  }
  Assignment out = s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bool found = false;
    for (auto& [var, e] : out.binds) {
      if (var == xs[i]) {
        e = vals[i];
        found = true;
        break;
      }
    }
    if (!found) out.binds.emplace_back(xs[i], vals[i]);
  }
  std::sort(out.binds.begin(), out.binds.end());
  return out;
}

Team extend_by_set(const Assignment& s, const VarTuple& xs, const TupleSet& tuples) {
  std::vector<std::string> vars = union_vars(s.variables(), {xs.vars.begin(), xs.vars.end()});
  std::set<Assignment> members;
  for (const Tuple& t : tuples) {
    members.insert(extend(s, xs, t));
  }
  return Team(std::move(vars), std::move(members));
}

Team team_extend(const Team& v, const VarTuple& xs,
                 const std::function<const TupleSet&(const Assignment&)>& f) {
  std::vector<std::string> vars = union_vars(v.vars(), {xs.vars.begin(), xs.vars.end()});
  std::set<Assignment> members;
  for (const Assignment& s : v.members()) {
    const TupleSet& image = f(s);
    for (const Tuple& t : image) {
      members.insert(extend(s, xs, t));
    }
  }
  return Team(std::move(vars), std::move(members));
}

Team team_extend(const Team& v, const VarTuple& xs, const WitnessFunction& f) {
  return team_extend(v, xs, [&](const Assignment& s) -> const TupleSet& {
    auto it = f.images.find(s);
    if (it == f.images.end()) {
      throw EvalError("witness function undefined on a team member");
    }
    return it->second;
  });
}

TupleSet complement_image(const TupleSet& tuples, const VarTuple& xs, int domain_size) {
  TupleSet out;
  for (const Tuple& t : repetition_respecting_tuples(xs, domain_size)) {
    if (!tuples.count(t)) out.insert(t);
  }
  return out;
}

WitnessFunction complement_fn(const WitnessFunction& f, const VarTuple& xs, int domain_size) {
  WitnessFunction out;
  for (const auto& [s, image] : f.images) {
    for (const Tuple& t : image) {
      if (!respects_repetitions(xs, t)) {
        throw ValueError("witness image violates the repetition pattern");
      }
    }
    out.images.emplace(s, complement_image(image, xs, domain_size));
  }
  return out;
}

SplitResult split(const Team& u, const VChoice& h) {
  std::set<Assignment> m1, m1c, m2, m2c;
  for (const Assignment& s : u.members()) {
    auto it = h.choice.find(s);
    if (it == h.choice.end()) throw EvalError("choice function undefined on a team member");
    switch (it->second) {
      case VChoiceValue::Both:
        m1.insert(s);
        m2.insert(s);
        break;
      case VChoiceValue::LeftOnly:
        m1.insert(s);
        m2c.insert(s);
        break;
      case VChoiceValue::RightOnly:
        m2.insert(s);
        m1c.insert(s);
        break;
    }
  }
  return SplitResult{Team(u.vars(), std::move(m1)), Team(u.vars(), std::move(m1c)),
                     Team(u.vars(), std::move(m2)), Team(u.vars(), std::move(m2c))};
}

TupleSet rel(const Structure& a, const Team& v, const VarTuple& ys) {
  TupleSet out;
  for (const Assignment& s : v.members()) {
    Tuple t;
    t.reserve(ys.size());
    for (const auto& y : ys.vars) {
      Elem e = s.at(y);
      if (e >= static_cast<Elem>(a.size())) {
        throw EvalError("assignment value outside the structure's domain");
      }
      t.push_back(e);
    }
    out.insert(std::move(t));
  }
  return out;
}

std::vector<std::string> union_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
  std::set<std::string> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return std::vector<std::string>(s.begin(), s.end());
}

}  // namespace dts
