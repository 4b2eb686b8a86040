#include "clarith/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace clarith {

TermPtr Term::var(std::string name) { return std::make_shared<Term>(Term{Kind::Var, std::move(name), nullptr}); }
TermPtr Term::constant(std::string bits) { return std::make_shared<Term>(Term{Kind::Const, std::move(bits), nullptr}); }
TermPtr Term::succ(TermPtr t) { return std::make_shared<Term>(Term{Kind::Succ, "", std::move(t)}); }
TermPtr Term::size(TermPtr t) { return std::make_shared<Term>(Term{Kind::Size, "", std::move(t)}); }

std::string term_str(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const:
      return t->text;
    case Term::Kind::Succ:
      return term_str(t->sub) + "'";
    case Term::Kind::Size:
      return "|" + term_str(t->sub) + "|";
  }
  return "";
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a->kind != b->kind || a->text != b->text) return false;
  if (!a->sub || !b->sub) return !a->sub && !b->sub;
  return term_equal(a->sub, b->sub);
}

namespace {

FormulaPtr make(FKind k, std::string name, std::vector<TermPtr> terms, BoundExpr b, BoundShape s,
                std::vector<FormulaPtr> kids) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->name = std::move(name);
  f->terms = std::move(terms);
  f->bound = std::move(b);
  f->shape = s;
  f->kids = std::move(kids);
  return f;
}

}  // namespace

FormulaPtr Formula::atom(std::string rel, std::vector<TermPtr> args) {
  return make(FKind::Atom, std::move(rel), std::move(args), {}, BoundShape::Size, {});
}
FormulaPtr Formula::negation(FormulaPtr f) { return make(FKind::Not, "", {}, {}, BoundShape::Size, {std::move(f)}); }
FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  return make(FKind::And, "", {}, {}, BoundShape::Size, {std::move(a), std::move(b)});
}
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
  return make(FKind::Or, "", {}, {}, BoundShape::Size, {std::move(a), std::move(b)});
}
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
  return make(FKind::Implies, "", {}, {}, BoundShape::Size, {std::move(a), std::move(b)});
}
FormulaPtr Formula::choice_all(std::string var, BoundExpr b, FormulaPtr body, BoundShape s) {
  return make(FKind::ChoiceAll, std::move(var), {}, std::move(b), s, {std::move(body)});
}
FormulaPtr Formula::choice_ex(std::string var, BoundExpr b, FormulaPtr body, BoundShape s) {
  return make(FKind::ChoiceEx, std::move(var), {}, std::move(b), s, {std::move(body)});
}
FormulaPtr Formula::blind_all(std::string var, BoundExpr range, FormulaPtr body) {
  return make(FKind::BlindAll, std::move(var), {}, std::move(range), BoundShape::Value, {std::move(body)});
}
FormulaPtr Formula::blind_ex(std::string var, BoundExpr range, FormulaPtr body) {
  return make(FKind::BlindEx, std::move(var), {}, std::move(range), BoundShape::Value, {std::move(body)});
}

// ---------------------------------------------------------------- parsing

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_keyword(const std::string& s) { return s == "ada" || s == "ade" || s == "cla" || s == "cle"; }

class FormulaParser {
 public:
  explicit FormulaParser(const std::string& s) : s_(s) {}

  FormulaPtr parse() {
    FormulaPtr f = implication();
    skip();
    if (i_ != s_.size()) fail("trailing input");
    return f;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) { throw FormulaSyntaxError(i_, what); }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool peek(const std::string& tok) {
    skip();
    return s_.compare(i_, tok.size(), tok) == 0;
  }
  bool accept(const std::string& tok) {
    if (peek(tok)) {
      i_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }
  // A word token: identifier not continued by identifier characters.
  std::optional<std::string> peek_word() {
    skip();
    if (i_ >= s_.size() || !is_ident_start(s_[i_])) return std::nullopt;
    std::size_t j = i_;
    while (j < s_.size() && is_ident_char(s_[j])) ++j;
    return s_.substr(i_, j - i_);
  }
  std::string ident() {
    auto w = peek_word();
    if (!w || is_keyword(*w)) fail("expected identifier");
    i_ += w->size();
    return *w;
  }
  bool accept_word(const std::string& w) {
    auto p = peek_word();
    if (p && *p == w) {
      i_ += w.size();
      return true;
    }
    return false;
  }

  FormulaPtr implication() {
    FormulaPtr a = disjunction();
    if (accept("->")) return Formula::implies(a, implication());
    return a;
  }
  FormulaPtr disjunction() {
    FormulaPtr a = conjunction();
    while (accept_word("v")) a = Formula::disj(a, conjunction());
    return a;
  }
  FormulaPtr conjunction() {
    FormulaPtr a = unary();
    while (accept("&")) a = Formula::conj(a, unary());
    return a;
  }

  BoundExpr bound_until(char close) {
    skip();
    std::size_t j = s_.find(close, i_);
    if (j == std::string::npos) fail(std::string("expected '") + close + "'");
    std::string text = s_.substr(i_, j - i_);
    BoundExpr b;
    try {
      b = parse_bound(text);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    i_ = j + 1;
    return b;
  }

  FormulaPtr unary() {
    skip();
    if (accept("~")) return Formula::negation(unary());
    if (accept("(")) {
      FormulaPtr f = implication();
      expect(")");
      return f;
    }
    if (auto w = peek_word()) {
      if (*w == "ada" || *w == "ade") {
        i_ += 3;
        std::string var = ident();
        if (!accept("[")) fail("choice quantifier needs a bound [B]");
        BoundShape shape = accept("<=") ? BoundShape::Value : BoundShape::Size;
        BoundExpr b = bound_until(']');
        FormulaPtr body = unary();
        return *w == "ada" ? Formula::choice_all(var, b, body, shape) : Formula::choice_ex(var, b, body, shape);
      }
      if (*w == "cla" || *w == "cle") {
        i_ += 3;
        std::string var = ident();
        if (!accept("<")) fail("blind quantifier needs a range '< B :'");
        BoundExpr b = bound_until(':');
        FormulaPtr body = unary();
        return *w == "cla" ? Formula::blind_all(var, b, body) : Formula::blind_ex(var, b, body);
      }
      // predicate atom p(...)
      std::size_t save = i_;
      i_ += w->size();
      if (accept("(")) {
        std::vector<TermPtr> args;
        if (!accept(")")) {
          args.push_back(term());
          while (accept(",")) args.push_back(term());
          expect(")");
        }
        return Formula::atom(*w, std::move(args));
      }
      i_ = save;
    }
    TermPtr lhs = term();
    std::string rel;
    if (accept("<="))
      rel = "<=";
    else if (accept("<"))
      rel = "<";
    else if (accept("="))
      rel = "=";
    else
      fail("expected relation");
    TermPtr rhs = term();
    return Formula::atom(rel, {lhs, rhs});
  }

  TermPtr term() {
    skip();
    TermPtr t;
    if (i_ < s_.size() && s_[i_] == '|') {
      ++i_;
      TermPtr inner = term();
      expect("|");
      t = Term::size(inner);
    } else if (i_ < s_.size() && (s_[i_] == '0' || s_[i_] == '1')) {
      std::size_t j = i_;
      while (j < s_.size() && (s_[j] == '0' || s_[j] == '1')) ++j;
      if (j < s_.size() && is_ident_char(s_[j])) fail("malformed binary literal");
      t = Term::constant(s_.substr(i_, j - i_));
      i_ = j;
    } else {
      t = Term::var(ident());
    }
    while (i_ < s_.size() && s_[i_] == '\'') {
      ++i_;
      t = Term::succ(t);
    }
    return t;
  }
};

// ------------------------------------------------------------ rename-apart

void term_vars(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == Term::Kind::Var) out.insert(t->text);
  if (t->sub) term_vars(t->sub, out);
}

void all_names(const FormulaPtr& f, std::set<std::string>& out) {
  for (const auto& t : f->terms) term_vars(t, out);
  if (f->kind != FKind::Atom && f->kind != FKind::Not && f->kind != FKind::And && f->kind != FKind::Or &&
      f->kind != FKind::Implies) {
    out.insert(f->name);
    auto bv = f->bound.variables();
    out.insert(bv.begin(), bv.end());
  }
  for (const auto& k : f->kids) all_names(k, out);
}

TermPtr subst_term(const TermPtr& t, const std::map<std::string, TermPtr>& repl) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = repl.find(t->text);
      return it == repl.end() ? t : it->second;
    }
    case Term::Kind::Const:
      return t;
    case Term::Kind::Succ:
      return Term::succ(subst_term(t->sub, repl));
    case Term::Kind::Size:
      return Term::size(subst_term(t->sub, repl));
  }
  return t;
}

// A bound mentions |v|; substituting a term t for v is only expressible when t is a variable
// (rename) or a constant (fold its size in as a literal).
BoundExpr subst_bound(const BoundExpr& b, const std::map<std::string, TermPtr>& repl) {
  std::map<std::string, BoundExpr> br;
  for (const auto& v : b.variables()) {
    auto it = repl.find(v);
    if (it == repl.end()) continue;
    const TermPtr& t = it->second;
    if (t->kind == Term::Kind::Var)
      br.emplace(v, BoundExpr::var(t->text));
    else if (t->kind == Term::Kind::Const)
      br.emplace(v, BoundExpr::lit(Natural(size_of(parse_constant(t->text)))));
    else
      throw std::invalid_argument("cannot substitute compound term into a bound");
  }
  return br.empty() ? b : b.substitute(br);
}

FormulaPtr subst(const FormulaPtr& f, std::map<std::string, TermPtr> repl) {
  switch (f->kind) {
    case FKind::Atom: {
      std::vector<TermPtr> args;
      for (const auto& t : f->terms) args.push_back(subst_term(t, repl));
      return Formula::atom(f->name, std::move(args));
    }
    case FKind::Not:
      return Formula::negation(subst(f->kids[0], repl));
    case FKind::And:
      return Formula::conj(subst(f->kids[0], repl), subst(f->kids[1], repl));
    case FKind::Or:
      return Formula::disj(subst(f->kids[0], repl), subst(f->kids[1], repl));
    case FKind::Implies:
      return Formula::implies(subst(f->kids[0], repl), subst(f->kids[1], repl));
    default: {
      BoundExpr b = subst_bound(f->bound, repl);
      repl.erase(f->name);
      FormulaPtr body = subst(f->kids[0], repl);
      return make(f->kind, f->name, {}, b, f->shape, {body});
    }
  }
}

std::string fresh(const std::string& base, std::set<std::string>& used) {
  for (unsigned i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!used.count(cand)) {
      used.insert(cand);
      return cand;
    }
  }
}

FormulaPtr rename_apart(const FormulaPtr& f, std::set<std::string>& bound_so_far, std::set<std::string>& used,
                        const std::set<std::string>& free) {
  switch (f->kind) {
    case FKind::Atom:
      return f;
    case FKind::Not:
      return Formula::negation(rename_apart(f->kids[0], bound_so_far, used, free));
    case FKind::And:
    case FKind::Or:
    case FKind::Implies: {
      auto a = rename_apart(f->kids[0], bound_so_far, used, free);
      auto b = rename_apart(f->kids[1], bound_so_far, used, free);
      return make(f->kind, "", {}, {}, BoundShape::Size, {a, b});
    }
    default: {
      std::string var = f->name;
      FormulaPtr body = f->kids[0];
      if (bound_so_far.count(var) || free.count(var)) {
        std::string nv = fresh(var, used);
        body = subst(body, {{var, Term::var(nv)}});
        var = nv;
      }
      bound_so_far.insert(var);
      body = rename_apart(body, bound_so_far, used, free);
      return make(f->kind, var, {}, f->bound, f->shape, {body});
    }
  }
}

void collect_free(const FormulaPtr& f, std::set<std::string> scope, std::set<std::string>& out) {
  auto add = [&](const std::set<std::string>& vs) {
    for (const auto& v : vs)
      if (!scope.count(v)) out.insert(v);
  };
  if (f->kind == FKind::Atom) {
    std::set<std::string> vs;
    for (const auto& t : f->terms) term_vars(t, vs);
    add(vs);
    return;
  }
  if (f->is_choice() || f->is_blind()) {
    add(f->bound.variables());
    scope.insert(f->name);
  }
  for (const auto& k : f->kids) collect_free(k, scope, out);
}

}  // namespace

std::vector<std::string> free_variables(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_free(f, {}, out);
  return {out.begin(), out.end()};
}

FormulaPtr parse_formula(const std::string& text) {
  FormulaPtr f = FormulaParser(text).parse();
  auto fv = free_variables(f);
  std::set<std::string> free(fv.begin(), fv.end());
  std::set<std::string> used;
  all_names(f, used);
  std::set<std::string> bound;
  return rename_apart(f, bound, used, free);
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, TermPtr>& repl) { return subst(f, repl); }

// --------------------------------------------------------------- printing

namespace {

void print(const FormulaPtr& f, std::ostream& os) {
  switch (f->kind) {
    case FKind::Atom:
      if (f->name == "=" || f->name == "<=" || f->name == "<") {
        os << '(' << term_str(f->terms[0]) << ' ' << f->name << ' ' << term_str(f->terms[1]) << ')';
      } else {
        os << f->name << '(';
        for (std::size_t i = 0; i < f->terms.size(); ++i) {
          if (i) os << ',';
          os << term_str(f->terms[i]);
        }
        os << ')';
      }
      break;
    case FKind::Not:
      os << '~';
      print(f->kids[0], os);
      break;
    case FKind::And:
    case FKind::Or:
    case FKind::Implies: {
      const char* op = f->kind == FKind::And ? " & " : f->kind == FKind::Or ? " v " : " -> ";
      os << '(';
      print(f->kids[0], os);
      os << op;
      print(f->kids[1], os);
      os << ')';
      break;
    }
    case FKind::ChoiceAll:
    case FKind::ChoiceEx:
      os << (f->kind == FKind::ChoiceAll ? "ada " : "ade ") << f->name << " ["
         << (f->shape == BoundShape::Value ? "<= " : "") << f->bound.str() << "] ";
      print(f->kids[0], os);
      break;
    case FKind::BlindAll:
    case FKind::BlindEx:
      os << (f->kind == FKind::BlindAll ? "cla " : "cle ") << f->name << " < " << f->bound.str() << " : ";
      print(f->kids[0], os);
      break;
  }
}

}  // namespace

std::string formula_str(const FormulaPtr& f) {
  std::ostringstream os;
  print(f, os);
  return os.str();
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->kind != b->kind || a->name != b->name || a->shape != b->shape) return false;
  if (a->terms.size() != b->terms.size() || a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->terms.size(); ++i)
    if (!term_equal(a->terms[i], b->terms[i])) return false;
  if ((a->is_choice() || a->is_blind()) && a->bound != b->bound) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!formula_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

// ------------------------------------------------------------------ sites

namespace {

void walk_sites(const FormulaPtr& f, const std::string& addr, bool positive, std::optional<std::size_t> parent,
                std::size_t depth, std::set<std::string> blind, std::vector<ChoiceSite>& out) {
  switch (f->kind) {
    case FKind::Atom:
      return;
    case FKind::Not:
      walk_sites(f->kids[0], addr, !positive, parent, depth, blind, out);
      return;
    case FKind::And:
    case FKind::Or:
      walk_sites(f->kids[0], addr + "0.", positive, parent, depth, blind, out);
      walk_sites(f->kids[1], addr + "1.", positive, parent, depth, blind, out);
      return;
    case FKind::Implies:
      walk_sites(f->kids[0], addr + "0.", !positive, parent, depth, blind, out);
      walk_sites(f->kids[1], addr + "1.", positive, parent, depth, blind, out);
      return;
    case FKind::BlindAll:
    case FKind::BlindEx:
      blind.insert(f->name);
      walk_sites(f->kids[0], addr, positive, parent, depth, blind, out);
      return;
    case FKind::ChoiceAll:
    case FKind::ChoiceEx: {
      ChoiceSite s;
      s.address = addr;
      s.node = f.get();
      s.universal = f->kind == FKind::ChoiceAll;
      bool existential_game = (f->kind == FKind::ChoiceEx) == positive;
      s.owner = existential_game ? Label::Top : Label::Bot;
      s.parent = parent;
      s.depth = depth + 1;
      s.blind_scope = blind;
      out.push_back(s);
      std::size_t me = out.size() - 1;
      walk_sites(f->kids[0], addr + "1.", positive, me, depth + 1, blind, out);
      return;
    }
  }
}

}  // namespace

std::vector<ChoiceSite> choice_sites(const FormulaPtr& f) {
  std::vector<ChoiceSite> out;
  walk_sites(f, "", true, std::nullopt, 0, {}, out);
  return out;
}

ChoiceCensus choice_census(const FormulaPtr& f) {
  ChoiceCensus c;
  for (const auto& s : choice_sites(f)) {
    (s.owner == Label::Top ? c.e_top : c.e_bot)++;
    c.h = std::max(c.h, s.address.size());
  }
  c.e = c.e_top + c.e_bot;
  c.v = free_variables(f).size();
  c.D = c.e + c.v;
  return c;
}

UnaryBound AggregateBounds::S(std::size_t i) const {
  std::vector<UnaryBound> parts;
  UnaryBound cur = UnaryBound::identity();
  for (std::size_t k = 0; k < i; ++k) {
    cur = compose(f, cur);
    parts.push_back(cur);
  }
  return pointwise_max(parts);
}

AggregateBounds aggregate_bounds(const FormulaPtr& f) {
  AggregateBounds a;
  std::vector<BoundExpr> bounds;
  for (const auto& s : choice_sites(f)) bounds.push_back(s.node->bound);
  a.n = bounds.size();
  a.f = unarify(BoundExpr::max(bounds));
  a.G = a.S(a.n);
  return a;
}

std::vector<Unit> units(const FormulaPtr& f) {
  std::vector<Unit> out;
  for (const auto& s : choice_sites(f)) {
    Unit u;
    u.path = s.address;
    u.universal = s.universal;
    u.master_variable = s.node->name;
    u.master_bound = s.node->bound;
    u.shape = s.node->shape;
    u.depth = s.depth;
    out.push_back(u);
  }
  return out;
}

std::optional<std::string> UnitClassification::resolvent(const std::string& var) const {
  auto it = resolvents.find(var);
  if (it == resolvents.end()) return std::nullopt;
  return it->second;
}

// ------------------------------------------------------------- evaluation

Natural eval_term(const TermPtr& t, const std::map<std::string, Natural>& env) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = env.find(t->text);
      if (it == env.end()) throw std::out_of_range("unbound variable " + t->text);
      return it->second;
    }
    case Term::Kind::Const:
      return parse_constant(t->text);
    case Term::Kind::Succ:
      return eval_term(t->sub, env) + 1;
    case Term::Kind::Size:
      return Natural(size_of(eval_term(t->sub, env)));
  }
  return 0;
}

bool eval_atom(const Formula& atom, const std::map<std::string, Natural>& env, const AtomEvaluator& atoms) {
  std::vector<Natural> args;
  for (const auto& t : atom.terms) args.push_back(eval_term(t, env));
  if (atoms) {
    if (auto r = atoms(atom.name, args)) return *r;
  }
  if (atom.name == "=" && args.size() == 2) return args[0] == args[1];
  if (atom.name == "<=" && args.size() == 2) return args[0] <= args[1];
  if (atom.name == "<" && args.size() == 2) return args[0] < args[1];
  if (atom.name == "Bit" && args.size() == 2) return bit(args[0], args[1]);
  throw std::out_of_range("no evaluator for atom " + atom.name);
}

std::map<std::string, Natural> bind_constants(const FormulaPtr& f, const std::vector<Natural>& c) {
  auto fv = free_variables(f);
  if (fv.size() != c.size())
    throw std::invalid_argument("expected " + std::to_string(fv.size()) + " constants, got " + std::to_string(c.size()));
  std::map<std::string, Natural> env;
  for (std::size_t i = 0; i < fv.size(); ++i) env[fv[i]] = c[i];
  return env;
}

}  // namespace clarith
