#include "dts/syntax.hpp"

#include <algorithm>
#include <cctype>

namespace dts {

namespace {

// Appends src's nodes to dst with child references shifted; preorder layout
// is preserved because subtrees stay contiguous.
void append_shifted(std::vector<Node>& dst, const std::vector<Node>& src) {
  const NodeId offset = static_cast<NodeId>(dst.size());
  for (const Node& n : src) {
    Node copy = n;
    if (auto* nn = std::get_if<NotNode>(&copy)) {
      nn->sub += offset;
    } else if (auto* on = std::get_if<OrNode>(&copy)) {
      on->left += offset;
      on->right += offset;
    } else if (auto* qn = std::get_if<QuantNode>(&copy)) {
      for (NodeId& s : qn->subs) s += offset;
    }
    dst.push_back(std::move(copy));
  }
}

bool same_quantifier(const QuantifierPtr& a, const QuantifierPtr& b) {
  return a->name == b->name && a->type_sig == b->type_sig;
}

bool same_node(const Node& a, const Node& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ea = std::get_if<EqualityNode>(&a)) {
    const auto& eb = std::get<EqualityNode>(b);
    return ea->lhs == eb.lhs && ea->rhs == eb.rhs;
  }
  if (const auto* ra = std::get_if<RelAtomNode>(&a)) {
    const auto& rb = std::get<RelAtomNode>(b);
    return ra->rel == rb.rel && ra->args == rb.args;
  }
  if (const auto* na = std::get_if<NotNode>(&a)) {
    return na->sub == std::get<NotNode>(b).sub;
  }
  if (const auto* oa = std::get_if<OrNode>(&a)) {
    const auto& ob = std::get<OrNode>(b);
    return oa->left == ob.left && oa->right == ob.right;
  }
  if (const auto* qa = std::get_if<QuantNode>(&a)) {
    const auto& qb = std::get<QuantNode>(b);
    return same_quantifier(qa->q, qb.q) && qa->tuples == qb.tuples && qa->subs == qb.subs;
  }
  const auto& ga = std::get<GAtomNode>(a);
  const auto& gb = std::get<GAtomNode>(b);
  return ga.atom->name == gb.atom->name && ga.atom->split_n == gb.atom->split_n &&
         ga.atom->base->type_sig == gb.atom->base->type_sig && ga.pos_args == gb.pos_args &&
         ga.neg_args == gb.neg_args;
}

}  // namespace

const Node& Formula::node(NodeId id) const {
  if (id >= nodes_.size()) throw ValueError("node id out of range");
  return nodes_[id];
}

const std::set<std::string>& Formula::free_vars(NodeId id) const {
  if (id >= free_.size()) throw ValueError("node id out of range");
  return free_[id];
}

const std::set<std::string>& Formula::bound_above(NodeId id) const {
  if (id >= bound_above_.size()) throw ValueError("node id out of range");
  return bound_above_[id];
}

void Formula::finish() {
  const std::size_t n = nodes_.size();
  free_.assign(n, {});
  bound_above_.assign(n, {});
  // Children occupy larger indices, so a reverse sweep sees them first.
  for (std::size_t i = n; i-- > 0;) {
    const Node& node = nodes_[i];
    if (const auto* e = std::get_if<EqualityNode>(&node)) {
      free_[i] = {e->lhs, e->rhs};
    } else if (const auto* r = std::get_if<RelAtomNode>(&node)) {
      free_[i] = r->args.var_set();
    } else if (const auto* nn = std::get_if<NotNode>(&node)) {
      free_[i] = free_[nn->sub];
    } else if (const auto* o = std::get_if<OrNode>(&node)) {
      free_[i] = free_[o->left];
      free_[i].insert(free_[o->right].begin(), free_[o->right].end());
    } else if (const auto* q = std::get_if<QuantNode>(&node)) {
      // Component i binds exactly the variables of its own tuple.
      for (std::size_t j = 0; j < q->subs.size(); ++j) {
        std::set<std::string> sub_free = free_[q->subs[j]];
        for (const auto& v : q->tuples[j].vars) sub_free.erase(v);
        free_[i].insert(sub_free.begin(), sub_free.end());
      }
    } else {
      const auto& g = std::get<GAtomNode>(node);
      for (const auto& t : g.pos_args) {
        auto vs = t.var_set();
        free_[i].insert(vs.begin(), vs.end());
      }
      for (const auto& t : g.neg_args) {
        auto vs = t.var_set();
        free_[i].insert(vs.begin(), vs.end());
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Node& node = nodes_[i];
    if (const auto* nn = std::get_if<NotNode>(&node)) {
      bound_above_[nn->sub] = bound_above_[i];
    } else if (const auto* o = std::get_if<OrNode>(&node)) {
      bound_above_[o->left] = bound_above_[i];
      bound_above_[o->right] = bound_above_[i];
    } else if (const auto* q = std::get_if<QuantNode>(&node)) {
      for (std::size_t j = 0; j < q->subs.size(); ++j) {
        std::set<std::string> bound = bound_above_[i];
        auto vs = q->tuples[j].var_set();
        bound.insert(vs.begin(), vs.end());
        bound_above_[q->subs[j]] = std::move(bound);
      }
    }
  }
}

std::size_t Formula::subtree_size(NodeId id) const {
  const Node& n = node(id);
  if (const auto* nn = std::get_if<NotNode>(&n)) return 1 + subtree_size(nn->sub);
  if (const auto* o = std::get_if<OrNode>(&n)) {
    return 1 + subtree_size(o->left) + subtree_size(o->right);
  }
  if (const auto* q = std::get_if<QuantNode>(&n)) {
    std::size_t total = 1;
    for (NodeId s : q->subs) total += subtree_size(s);
    return total;
  }
  return 1;
}

Formula Formula::subformula(NodeId id) const {
  const std::size_t count = subtree_size(id);
  Formula out;
  out.nodes_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Node copy = nodes_[id + i];
    if (auto* nn = std::get_if<NotNode>(&copy)) {
      nn->sub -= id;
    } else if (auto* o = std::get_if<OrNode>(&copy)) {
      o->left -= id;
      o->right -= id;
    } else if (auto* q = std::get_if<QuantNode>(&copy)) {
      for (NodeId& s : q->subs) s -= id;
    }
    out.nodes_.push_back(std::move(copy));
  }
  out.finish();
  return out;
}

bool Formula::contains_gatom() const {
  for (const Node& n : nodes_) {
    if (std::holds_alternative<GAtomNode>(n)) return true;
  }
  return false;
}

std::vector<NodeId> Formula::gatom_nodes() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (std::holds_alternative<GAtomNode>(nodes_[i])) out.push_back(i);
  }
  return out;
}

bool Formula::operator==(const Formula& other) const {
  if (nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!same_node(nodes_[i], other.nodes_[i])) return false;
  }
  return true;
}

Formula Formula::equality(std::string lhs, std::string rhs) {
  if (!is_identifier(lhs) || !is_identifier(rhs)) {
    throw ValueError("bad variable name in equality");
  }
  Formula f;
  f.nodes_.push_back(EqualityNode{std::move(lhs), std::move(rhs)});
  f.finish();
  return f;
}

Formula Formula::rel_atom(std::string rel, VarTuple args) {
  if (!is_identifier(rel)) throw ValueError("bad relation name: '" + rel + "'");
  Formula f;
  f.nodes_.push_back(RelAtomNode{std::move(rel), std::move(args)});
  f.finish();
  return f;
}

Formula Formula::lnot(const Formula& sub) {
  Formula f;
  f.nodes_.push_back(NotNode{1});
  append_shifted(f.nodes_, sub.nodes_);
  f.finish();
  return f;
}

Formula Formula::lor(const Formula& left, const Formula& right) {
  Formula f;
  f.nodes_.push_back(OrNode{1, static_cast<NodeId>(1 + left.nodes_.size())});
  append_shifted(f.nodes_, left.nodes_);
  append_shifted(f.nodes_, right.nodes_);
  f.finish();
  return f;
}

Formula Formula::land(const Formula& left, const Formula& right) {
  return lnot(lor(lnot(left), lnot(right)));
}

Formula Formula::quant(QuantifierPtr q, std::vector<VarTuple> tuples,
                       const std::vector<Formula>& subs) {
  if (!q) throw ValueError("null quantifier");
  const std::size_t n = q->type_sig.size();
  if (tuples.size() != n || subs.size() != n) {
    throw TypeError("quantifier '" + q->name + "' takes " + std::to_string(n) +
                    " tuples and " + std::to_string(n) + " subformulas");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<int>(tuples[j].size()) != q->type_sig[j]) {
      throw TypeError("tuple " + std::to_string(j + 1) + " of quantifier '" + q->name +
                      "' must have width " + std::to_string(q->type_sig[j]));
    }
  }
  Formula f;
  QuantNode qn;
  qn.q = std::move(q);
  qn.tuples = std::move(tuples);
  NodeId next = 1;
  for (const Formula& sub : subs) {
    qn.subs.push_back(next);
    next += static_cast<NodeId>(sub.nodes_.size());
  }
  f.nodes_.push_back(std::move(qn));
  for (const Formula& sub : subs) append_shifted(f.nodes_, sub.nodes_);
  f.finish();
  return f;
}

Formula Formula::gatom(AtomPtr atom, std::vector<VarTuple> pos_args,
                       std::vector<VarTuple> neg_args) {
  if (!atom) throw ValueError("null atom");
  const std::size_t n = static_cast<std::size_t>(atom->split_n);
  const std::size_t total = atom->base->type_sig.size();
  if (pos_args.size() != n || neg_args.size() != total - n) {
    throw TypeError("atom '" + atom->name + "' takes " + std::to_string(n) + "+" +
                    std::to_string(total - n) + " argument tuples");
  }
  for (std::size_t j = 0; j < pos_args.size(); ++j) {
    if (static_cast<int>(pos_args[j].size()) != atom->base->type_sig[j]) {
      throw TypeError("argument tuple width mismatch in atom '" + atom->name + "'");
    }
  }
  for (std::size_t j = 0; j < neg_args.size(); ++j) {
    if (static_cast<int>(neg_args[j].size()) != atom->base->type_sig[n + j]) {
      throw TypeError("argument tuple width mismatch in atom '" + atom->name + "'");
    }
  }
  if (pos_args.empty() && neg_args.empty()) {
    throw TypeError("atom '" + atom->name + "' needs at least one argument tuple");
  }
  Formula f;
  f.nodes_.push_back(GAtomNode{std::move(atom), std::move(pos_args), std::move(neg_args)});
  f.finish();
  return f;
}

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;       // Ident
  long long value = 0;    // Int
  char punct = 0;         // Punct
  std::size_t offset = 0;
};

std::vector<Token> tokenize(const std::string& text) {
  static const std::string puncts = "~|&()=,.;<>@";
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '_')) {
        ++i;
      }
      t.kind = Token::Kind::Ident;
      t.text = text.substr(start, i - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      t.kind = Token::Kind::Int;
      t.value = std::stoll(text.substr(start, i - start));
    } else if (puncts.find(c) != std::string::npos) {
      t.kind = Token::Kind::Punct;
      t.punct = c;
      ++i;
    } else {
      throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                       std::to_string(i));
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.offset = text.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Registry& registry)
      : tokens_(std::move(tokens)), registry_(registry) {}

  Formula run() {
    Formula f = parse_or();
    if (!at_end()) fail("trailing input");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& advance() { return tokens_[pos_++]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool at_punct(char c) const {
    return peek().kind == Token::Kind::Punct && peek().punct == c;
  }
  bool accept_punct(char c) {
    if (!at_punct(c)) return false;
    ++pos_;
    return true;
  }
  void expect_punct(char c) {
    if (!accept_punct(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(peek().offset));
  }
  std::string expect_ident() {
    if (peek().kind != Token::Kind::Ident) fail("expected an identifier");
    return advance().text;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept_punct('|')) f = Formula::lor(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept_punct('&')) f = Formula::land(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (accept_punct('~')) return Formula::lnot(parse_unary());
    return parse_primary();
  }

  Formula parse_primary() {
    if (accept_punct('(')) {
      Formula f = parse_or();
      expect_punct(')');
      return f;
    }
    if (accept_punct('@')) return parse_gatom();
    if (peek().kind != Token::Kind::Ident) fail("expected a formula");
    if (peek().text == "Q" && peek(1).kind == Token::Kind::Punct && peek(1).punct == '<') {
      pos_ += 2;
      return parse_quant();
    }
    if ((peek().text == "E" || peek().text == "A") && peek(1).kind == Token::Kind::Ident) {
      bool existential = peek().text == "E";
      ++pos_;
      std::string var = expect_ident();
      expect_punct('.');
      Formula body = parse_or();  // binder sugar scopes as far right as possible
      QuantName qn;
      qn.base = existential ? "exists" : "forall";
      return Formula::quant(registry_.resolve_quantifier(qn, {1}), {VarTuple{var}}, {body});
    }
    std::string name = advance().text;
    if (accept_punct('(')) {
      std::vector<std::string> args{expect_ident()};
      while (accept_punct(',')) args.push_back(expect_ident());
      expect_punct(')');
      return Formula::rel_atom(name, VarTuple(args));
    }
    if (accept_punct('=')) {
      return Formula::equality(name, expect_ident());
    }
    fail("expected '(', '=', or a quantifier form");
  }

  QuantName parse_quant_name_tokens() {
    std::string ident = expect_ident();
    if (ident == "dual" && accept_punct('(')) {
      QuantName inner = parse_quant_name_tokens();
      expect_punct(')');
      ++inner.dual_depth;
      return inner;
    }
    QuantName qn;
    qn.base = ident;
    if (accept_punct('<')) {
      if (peek().kind != Token::Kind::Int) fail("expected an integer parameter");
      qn.param = advance().value;
      expect_punct('>');
    }
    return qn;
  }

  VarTuple parse_tuple() {
    if (accept_punct('(')) {
      std::vector<std::string> vars{expect_ident()};
      while (accept_punct(',')) vars.push_back(expect_ident());
      expect_punct(')');
      return VarTuple(vars);
    }
    return VarTuple{expect_ident()};
  }

  std::vector<VarTuple> parse_tuple_list() {
    std::vector<VarTuple> tuples;
    if (at_punct(';') || at_punct(')')) return tuples;
    tuples.push_back(parse_tuple());
    while (accept_punct(',')) tuples.push_back(parse_tuple());
    return tuples;
  }

  Formula parse_quant() {
    QuantName qn = parse_quant_name_tokens();
    expect_punct('>');
    std::vector<VarTuple> tuples{parse_tuple()};
    while (accept_punct(',')) tuples.push_back(parse_tuple());
    expect_punct('.');
    std::vector<int> arities;
    for (const VarTuple& t : tuples) arities.push_back(static_cast<int>(t.size()));
    QuantifierPtr q = registry_.resolve_quantifier(qn, arities);
    expect_punct('(');
    std::vector<Formula> subs{parse_or()};
    while (accept_punct(',')) subs.push_back(parse_or());
    expect_punct(')');
    if (subs.size() != tuples.size()) {
      throw TypeError("quantifier '" + q->name + "' takes " + std::to_string(tuples.size()) +
                      " subformulas, got " + std::to_string(subs.size()));
    }
    return Formula::quant(std::move(q), std::move(tuples), subs);
  }

  Formula parse_gatom() {
    expect_punct('<');
    std::string name = expect_ident();
    expect_punct('>');
    expect_punct('(');
    std::vector<VarTuple> pos = parse_tuple_list();
    expect_punct(';');
    std::vector<VarTuple> neg = parse_tuple_list();
    expect_punct(')');
    std::vector<int> pos_ar, neg_ar;
    for (const VarTuple& t : pos) pos_ar.push_back(static_cast<int>(t.size()));
    for (const VarTuple& t : neg) neg_ar.push_back(static_cast<int>(t.size()));
    AtomPtr atom = registry_.resolve_atom(name, pos_ar, neg_ar);
    return Formula::gatom(std::move(atom), std::move(pos), std::move(neg));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Registry& registry_;
};

std::string tuple_text(const VarTuple& t) {
  if (t.size() == 1) return t[0];
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += t[i];
  }
  return s + ")";
}

std::string tuple_list_text(const std::vector<VarTuple>& ts) {
  std::string s;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) s += ", ";
    s += tuple_text(ts[i]);
  }
  return s;
}

// Precedence: disjunction 1, negation 2, self-delimiting forms 3. The right
// disjunct is rendered one level tighter so right-nested disjunctions keep
// their parentheses and the tree shape survives reparsing.
void render(const Formula& f, NodeId id, int context, std::string& out) {
  const Node& n = f.node(id);
  if (const auto* e = std::get_if<EqualityNode>(&n)) {
    out += e->lhs + " = " + e->rhs;
  } else if (const auto* r = std::get_if<RelAtomNode>(&n)) {
    out += r->rel + "(";
    for (std::size_t i = 0; i < r->args.size(); ++i) {
      if (i) out += ", ";
      out += r->args[i];
    }
    out += ")";
  } else if (const auto* nn = std::get_if<NotNode>(&n)) {
    out += "~";
    render(f, nn->sub, 2, out);
  } else if (const auto* o = std::get_if<OrNode>(&n)) {
    bool parens = context > 1;
    if (parens) out += "(";
    render(f, o->left, 1, out);
    out += " | ";
    render(f, o->right, 2, out);
    if (parens) out += ")";
  } else if (const auto* q = std::get_if<QuantNode>(&n)) {
    out += "Q<" + q->q->name + "> " + tuple_list_text(q->tuples) + " . (";
    for (std::size_t i = 0; i < q->subs.size(); ++i) {
      if (i) out += ", ";
      render(f, q->subs[i], 0, out);
    }
    out += ")";
  } else {
    const auto& g = std::get<GAtomNode>(n);
    out += "@<" + g.atom->name + ">(" + tuple_list_text(g.pos_args) + " ; " +
           tuple_list_text(g.neg_args) + ")";
  }
}

}  // namespace

Formula parse(const std::string& text, const Registry& registry) {
  return Parser(tokenize(text), registry).run();
}

std::string pretty(const Formula& f) {
  std::string out;
  render(f, f.root(), 0, out);
  return out;
}

}  // namespace dts
