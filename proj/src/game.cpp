#include "clarith/game.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace clarith {

GameShape::GameShape(FormulaPtr f)
    : f_(std::move(f)), sites_(choice_sites(f_)), census_(choice_census(f_)), agg_(aggregate_bounds(f_)),
      free_(free_variables(f_)) {
  for (std::size_t i = 0; i < sites_.size(); ++i) by_addr_.emplace(sites_[i].address, i);
}

std::optional<std::size_t> GameShape::site_at(std::string_view address) const {
  auto it = by_addr_.find(address);
  if (it == by_addr_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<std::size_t, std::string>> GameShape::parse_site_move(std::string_view move) const {
  std::size_t hash = move.find('#');
  if (hash == std::string_view::npos) return std::nullopt;
  auto s = site_at(move.substr(0, hash));
  if (!s) return std::nullopt;
  std::string_view numer = move.substr(hash + 1);
  if (!is_canonical_numer(numer)) return std::nullopt;
  return std::make_pair(*s, std::string(numer));
}

std::vector<std::size_t> GameShape::lineage(std::size_t s) const {
  std::vector<std::size_t> out;
  std::optional<std::size_t> cur = s;
  while (cur) {
    out.push_back(*cur);
    cur = sites_[*cur].parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

bool prefix_of_site_move(std::string_view s, const std::string& addr) {
  if (s.size() <= addr.size()) return addr.compare(0, s.size(), s) == 0;
  if (s.compare(0, addr.size(), addr) != 0 || s[addr.size()] != '#') return false;
  return is_numer_prefix(s.substr(addr.size() + 1));
}

}  // namespace

bool GameShape::is_move_prefix(Label who, std::string_view s) const {
  for (const auto& site : sites_)
    if (site.owner == who && prefix_of_site_move(s, site.address)) return true;
  return false;
}

Natural GameShape::threshold(const std::vector<Natural>& c) const {
  Natural m = 0;
  for (const auto& x : c)
    if (x > m) m = x;
  return agg_.G(Natural(size_of(m)));
}

NumerInfo numer_and_magnitude(const std::string& move) {
  NumerInfo n;
  std::size_t hash = move.rfind('#');
  if (hash != std::string::npos) n.numer = move.substr(hash + 1);
  n.magnitude = n.numer.size();
  return n;
}

Run project(const Run& g, Projection kind) {
  Run out;
  for (const auto& lm : g) {
    switch (kind) {
      case Projection::Top:
        if (lm.label == Label::Top) out.push_back(lm);
        break;
      case Projection::Bot:
        if (lm.label == Label::Bot) out.push_back(lm);
        break;
      case Projection::Negate:
        out.push_back({opposite(lm.label), lm.move});
        break;
      case Projection::Sub0:
      case Projection::Sub1: {
        const char* pre = kind == Projection::Sub0 ? "0." : "1.";
        if (lm.move.rfind(pre, 0) == 0) out.push_back({lm.label, lm.move.substr(2)});
        break;
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ run walkers

namespace {

bool is_constant_move(const std::string& m) { return !m.empty() && m[0] == '#' && is_canonical_numer(m.substr(1)); }

// Strict legality walk.
struct LegalWalker {
  const GameShape& g;
  std::vector<std::optional<std::string>> res;
  std::size_t constants_needed;
  std::size_t constants_seen = 0;

  LegalWalker(const GameShape& shape, std::size_t constants) : g(shape), res(shape.sites().size()), constants_needed(constants) {}

  bool in_constant_phase() const { return constants_seen < constants_needed; }

  bool site_open_for(std::size_t s, Label who) const {
    if (res[s] || g.sites()[s].owner != who) return false;
    for (std::size_t a : g.lineage(s))
      if (a != s && !res[a]) return false;
    return true;
  }

  bool apply(const Labmove& lm) {
    if (in_constant_phase()) {
      if (lm.label != Label::Bot || !is_constant_move(lm.move)) return false;
      ++constants_seen;
      return true;
    }
    auto pm = g.parse_site_move(lm.move);
    if (!pm || !site_open_for(pm->first, lm.label)) return false;
    res[pm->first] = pm->second;
    return true;
  }

  // Can `open` be completed to a legal move of `who` right now?
  bool completable(Label who, std::string_view open) const {
    if (in_constant_phase())
      return who == Label::Bot && (open.empty() || (open[0] == '#' && is_numer_prefix(open.substr(1))));
    for (std::size_t s = 0; s < g.sites().size(); ++s)
      if (site_open_for(s, who) && prefix_of_site_move(open, g.sites()[s].address)) return true;
    return false;
  }
};

// Quasilegality walk for one player: the other player's moves are freely inserted.
struct QuasiWalker {
  const GameShape& g;
  Label who;
  std::vector<bool> resolved;
  std::size_t constants_needed;  // only enforced when who is bottom
  std::size_t constants_seen = 0;

  QuasiWalker(const GameShape& shape, Label player, std::size_t constants)
      : g(shape), who(player), resolved(shape.sites().size(), false),
        constants_needed(player == Label::Bot ? constants : 0) {}

  bool site_open(std::size_t s) const {
    if (resolved[s] || g.sites()[s].owner != who) return false;
    for (std::size_t a : g.lineage(s))
      if (a != s && !resolved[a] && g.sites()[a].owner == who) return false;
    return true;
  }

  bool apply(const Labmove& lm) {
    if (lm.label != who) return true;
    if (constants_seen < constants_needed) {
      if (!is_constant_move(lm.move)) return false;
      ++constants_seen;
      return true;
    }
    auto pm = g.parse_site_move(lm.move);
    if (!pm || !site_open(pm->first)) return false;
    for (std::size_t a : g.lineage(pm->first)) resolved[a] = true;
    return true;
  }

  bool completable(std::string_view open) const {
    if (constants_seen < constants_needed) return open.empty() || (open[0] == '#' && is_numer_prefix(open.substr(1)));
    for (std::size_t s = 0; s < g.sites().size(); ++s)
      if (site_open(s) && prefix_of_site_move(open, g.sites()[s].address)) return true;
    return false;
  }
};

LegalStatus status_with(const GameShape& g, const Run& gamma, std::size_t constants) {
  LegalStatus st;
  LegalWalker w(g, constants);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (!w.apply(gamma[i])) {
      st.legal = false;
      st.illegal_at = i;
      st.illegal_by = gamma[i].label;
      break;
    }
  }
  for (Label who : {Label::Top, Label::Bot}) {
    QuasiWalker q(g, who, constants);
    bool ok = true;
    for (const auto& lm : gamma)
      if (!q.apply(lm)) {
        ok = false;
        break;
      }
    (who == Label::Top ? st.top_quasilegal : st.bot_quasilegal) = ok;
  }
  return st;
}

}  // namespace

LegalStatus legal_status(const GameShape& g, const Run& gamma) { return status_with(g, gamma, 0); }

LegalStatus legal_status(const FormulaPtr& f, const std::vector<Natural>& c, const Run& gamma) {
  GameShape g(f);
  if (c.size() != g.free_vars().size()) throw std::invalid_argument("constants do not match free variables");
  return legal_status(g, gamma);
}

LegalStatus legal_status_closed(const GameShape& g, const Run& gamma) {
  return status_with(g, gamma, g.free_vars().size());
}

bool quasilegal(const GameShape& g, const Run& gamma, Label who, bool closed) {
  QuasiWalker q(g, who, closed ? g.free_vars().size() : 0);
  for (const auto& lm : gamma)
    if (!q.apply(lm)) return false;
  return true;
}

std::map<std::string, std::string> resolutions(const GameShape& g, const Run& gamma) {
  LegalWalker w(g, 0);
  for (const auto& lm : gamma)
    if (!w.apply(lm)) throw std::domain_error("run is not legal: " + run_str(gamma));
  std::map<std::string, std::string> out;
  for (std::size_t s = 0; s < w.res.size(); ++s)
    if (w.res[s]) out[g.sites()[s].address] = *w.res[s];
  return out;
}

// ---------------------------------------------------------------- winning

namespace {

constexpr unsigned kBlindRangeCap = 1u << 20;

bool condition_holds(const Formula& q, const Natural& a, const std::map<std::string, Natural>& env) {
  Natural b = evaluate_bound(q.bound, env);
  return q.shape == BoundShape::Size ? Natural(size_of(a)) <= b : a <= b;
}

bool eval_game(const FormulaPtr& f, const std::string& addr, std::map<std::string, Natural>& env,
               const std::map<std::string, std::string>& res, const AtomEvaluator& atoms) {
  switch (f->kind) {
    case FKind::Atom:
      return eval_atom(*f, env, atoms);
    case FKind::Not:
      return !eval_game(f->kids[0], addr, env, res, atoms);
    case FKind::And:
      return eval_game(f->kids[0], addr + "0.", env, res, atoms) && eval_game(f->kids[1], addr + "1.", env, res, atoms);
    case FKind::Or:
      return eval_game(f->kids[0], addr + "0.", env, res, atoms) || eval_game(f->kids[1], addr + "1.", env, res, atoms);
    case FKind::Implies:
      return !eval_game(f->kids[0], addr + "0.", env, res, atoms) || eval_game(f->kids[1], addr + "1.", env, res, atoms);
    case FKind::ChoiceAll:
    case FKind::ChoiceEx: {
      bool all = f->kind == FKind::ChoiceAll;
      auto it = res.find(addr);
      if (it == res.end()) return all;
      Natural a = parse_constant(it->second);
      bool cond = condition_holds(*f, a, env);
      auto saved = env.find(f->name) != env.end() ? std::optional<Natural>(env[f->name]) : std::nullopt;
      env[f->name] = a;
      bool body = eval_game(f->kids[0], addr + "1.", env, res, atoms);
      if (saved)
        env[f->name] = *saved;
      else
        env.erase(f->name);
      return all ? (!cond || body) : (cond && body);
    }
    case FKind::BlindAll:
    case FKind::BlindEx: {
      bool all = f->kind == FKind::BlindAll;
      Natural range = evaluate_bound(f->bound, env);
      if (range > kBlindRangeCap) throw std::range_error("blind quantifier range too large to evaluate");
      auto saved = env.find(f->name) != env.end() ? std::optional<Natural>(env[f->name]) : std::nullopt;
      bool result = all;
      for (Natural y = 0; y < range; ++y) {
        env[f->name] = y;
        bool b = eval_game(f->kids[0], addr, env, res, atoms);
        if (all && !b) {
          result = false;
          break;
        }
        if (!all && b) {
          result = true;
          break;
        }
      }
      if (saved)
        env[f->name] = *saved;
      else
        env.erase(f->name);
      return result;
    }
  }
  return false;
}

}  // namespace

Label wins(const GameShape& g, const std::map<std::string, Natural>& c, const Run& gamma, const AtomEvaluator& atoms) {
  auto res = resolutions(g, gamma);
  std::map<std::string, Natural> env = c;
  return eval_game(g.formula(), "", env, res, atoms) ? Label::Top : Label::Bot;
}

Label wins(const FormulaPtr& f, const std::vector<Natural>& c, const Run& gamma, const AtomEvaluator& atoms) {
  GameShape g(f);
  return wins(g, bind_constants(f, c), gamma, atoms);
}

// ------------------------------------------------- prudence and truncation

std::string prudentize(const std::string& move, const Natural& threshold) {
  std::size_t hash = move.rfind('#');
  if (hash == std::string::npos) return move;
  std::size_t limit = clamp_to_size(threshold);
  if (move.size() - hash - 1 <= limit) return move;
  return move.substr(0, hash + 1 + limit);
}

std::string prudentize(const std::string& move, const GameShape& g, const std::vector<Natural>& c) {
  return prudentize(move, g.threshold(c));
}

Truncation truncate_move(const std::string& move, const GameShape& g, const Natural& threshold) {
  std::size_t len = 0;
  while (len < move.size() && g.is_move_prefix(Label::Top, std::string_view(move).substr(0, len + 1))) ++len;
  std::string p = move.substr(0, len);
  std::string out = prudentize(p, threshold);
  return {out, len != move.size() || out != p};
}

std::string truncate(const std::string& move, const GameShape& g, const std::vector<Natural>& c) {
  return truncate_move(move, g, g.threshold(c)).move;
}

Truncation extend_truncation(const Truncation& t, const std::string& appended, const GameShape& g,
                             const Natural& threshold) {
  if (t.frozen || appended.empty()) return t;
  return truncate_move(t.move + appended, g, threshold);
}

// ----------------------------------------------------------- semipositions

std::string compress(const Semiposition& s) {
  std::string out;
  for (std::size_t i = 0; i < s.moves.size(); ++i) {
    if (i) out += ' ';
    out += label_char(s.moves[i].label);
    const std::string& m = s.moves[i].move;
    std::size_t hash = m.rfind('#');
    out += hash == std::string::npos ? m : m.substr(0, hash + 1) + "*";
  }
  if (s.complete) out += s.moves.empty() ? "_" : " _";
  return out;
}

SemipositionAnalysis analyze_semiposition(const Semiposition& s, const GameShape& g) {
  SemipositionAnalysis a;
  a.complete = s.complete;
  a.compression = compress(s);
  std::size_t fixed = s.complete || s.moves.empty() ? s.moves.size() : s.moves.size() - 1;
  const std::size_t constants = g.free_vars().size();

  LegalWalker w(g, constants);
  bool ok = true;
  for (std::size_t i = 0; i < fixed && ok; ++i) ok = w.apply(s.moves[i]);
  if (ok && fixed < s.moves.size()) ok = w.completable(s.moves.back().label, s.moves.back().move);
  a.legitimate = ok;

  // Quasilegal without a prefix: both top- and bottom-quasilegal.
  ok = true;
  for (Label who : {Label::Top, Label::Bot}) {
    QuasiWalker q(g, who, constants);
    for (std::size_t i = 0; i < fixed && ok; ++i) ok = q.apply(s.moves[i]);
    if (ok && fixed < s.moves.size() && s.moves.back().label == who) ok = q.completable(s.moves.back().move);
  }
  a.quasilegitimate = ok;
  return a;
}

namespace {

int key_rank(char c) {
  switch (c) {
    case '#':
      return 0;
    case '0':
      return 1;
    case '1':
      return 2;
    case '.':
      return 3;
    default:
      return 4 + static_cast<unsigned char>(c);
  }
}

}  // namespace

bool keyboard_less(std::string_view a, std::string_view b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return key_rank(a[i]) < key_rank(b[i]);
  return a.size() < b.size();
}

std::string windup(const Semiposition& v, const GameShape& g) {
  if (v.complete || v.moves.empty()) throw std::invalid_argument("windup needs an incomplete semiposition");
  for (const auto& lm : v.moves)
    if (lm.label != Label::Top) throw std::invalid_argument("windup needs an all-top semiposition");
  QuasiWalker q(g, Label::Top, 0);
  for (std::size_t i = 0; i + 1 < v.moves.size(); ++i)
    if (!q.apply(v.moves[i])) throw std::invalid_argument("semiposition is not quasilegitimate");
  const std::string& pi = v.moves.back().move;
  std::optional<std::string> best;
  for (std::size_t s = 0; s < g.sites().size(); ++s) {
    if (!q.site_open(s)) continue;
    const std::string& addr = g.sites()[s].address;
    std::optional<std::string> cand;
    if (pi.size() <= addr.size() && addr.compare(0, pi.size(), pi) == 0)
      cand = addr.substr(pi.size()) + "#";
    else if (prefix_of_site_move(pi, addr))
      cand = "";
    if (cand && (!best || keyboard_less(*cand, *best))) best = cand;
  }
  if (!best) throw std::invalid_argument("semiposition is not quasilegitimate");
  return *best;
}

bool is_p_delay(const Run& delta, const Run& omega) {
  if (project(delta, Projection::Top) != project(omega, Projection::Top)) return false;
  if (project(delta, Projection::Bot) != project(omega, Projection::Bot)) return false;
  // For each top move j, the number of bottom moves before it may only grow from omega to delta.
  auto bots_before_tops = [](const Run& r) {
    std::vector<std::size_t> out;
    std::size_t bots = 0;
    for (const auto& lm : r) {
      if (lm.label == Label::Bot)
        ++bots;
      else
        out.push_back(bots);
    }
    return out;
  };
  auto d = bots_before_tops(delta);
  auto o = bots_before_tops(omega);
  for (std::size_t j = 0; j < o.size(); ++j)
    if (d[j] < o[j]) return false;
  return true;
}

// ---------------------------------------------------------- unit classes

UnitClassification classify_units(const FormulaPtr& f, const Run& gamma, const std::map<std::string, Natural>& c) {
  GameShape g(f);
  auto st = legal_status(g, gamma);
  if (!st.top_quasilegal || !st.bot_quasilegal) throw std::domain_error("run is not quasilegal: " + run_str(gamma));
  // Resolution per site: the first move addressed at it by its owner.
  std::vector<std::optional<std::string>> res(g.sites().size());
  for (const auto& lm : gamma) {
    auto pm = g.parse_site_move(lm.move);
    if (pm && g.sites()[pm->first].owner == lm.label && !res[pm->first]) res[pm->first] = pm->second;
  }
  UnitClassification out;
  std::map<std::string, Natural> env = c;
  for (std::size_t s = 0; s < g.sites().size(); ++s)
    if (res[s]) {
      out.resolvents[g.sites()[s].node->name] = *res[s];
      env[g.sites()[s].node->name] = parse_constant(*res[s]);
    }
  std::vector<bool> well(g.sites().size(), false);
  for (std::size_t s = 0; s < g.sites().size(); ++s) {
    const auto& site = g.sites()[s];
    if (!res[s]) {
      out.status.push_back(UnitStatus::Unresolved);
      continue;
    }
    for (const auto& v : site.node->bound.variables())
      if (site.blind_scope.count(v)) throw std::domain_error("master condition depends on blind variable " + v);
    bool bound_known = true;
    for (const auto& v : site.node->bound.variables())
      if (!env.count(v)) bound_known = false;
    well[s] = bound_known && condition_holds(*site.node, parse_constant(*res[s]), env);
    if (well[s]) {
      out.status.push_back(UnitStatus::WellResolved);
      continue;
    }
    bool supers_well = true;
    for (std::size_t a : g.lineage(s))
      if (a != s && !well[a]) supers_well = false;
    out.status.push_back(supers_well ? UnitStatus::Critical : UnitStatus::IllResolved);
  }
  return out;
}

}  // namespace clarith
