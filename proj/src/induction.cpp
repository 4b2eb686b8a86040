#include "clarith/induction.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace clarith {

// ------------------------------------------------------------------ bodies

std::string organ_str(const Organ& o) {
  std::string out = "(";
  for (std::size_t i = 0; i < o.payload.size(); ++i) {
    if (i) out += ',';
    out += o.payload[i];
  }
  return out + ";" + o.scale.str() + ")";
}

std::string signed_organ_str(const SignedOrgan& s) { return (s.positive ? "+" : "-") + organ_str(s.organ); }

std::string body_str(const Body& b) {
  std::string out;
  for (const auto& o : b) out += organ_str(o);
  return out.empty() ? "()" : out;
}

std::string aggregation_str(const Aggregation& e) {
  std::string out;
  for (const auto& en : e) out += "[" + std::to_string(en.index) + ":" + body_str(en.body) + "]";
  return out;
}

BodyRelation body_relate(const Body& b, const Body& b2) {
  std::size_t common = std::min(b.size(), b2.size());
  bool prefix = std::equal(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(common), b2.begin());
  BodyRelation r;
  r.extension = prefix && b2.size() >= b.size();
  r.restriction = prefix && b2.size() <= b.size();
  r.consistent = prefix;
  return r;
}

Body body_project(const Body& b, Parity p) {
  Body out;
  for (std::size_t i = (p == Parity::Odd ? 0 : 1); i < b.size(); i += 2) out.push_back(b[i]);
  return out;
}

Run body_run(const Body& b) {
  Run out;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (const auto& m : b[i].payload) out.push_back({i % 2 == 0 ? Label::Bot : Label::Top, m});
  return out;
}

std::optional<std::string> validate_aggregation(const Aggregation& e, std::size_t k) {
  if (e.empty()) return "(i) the aggregation is empty";
  if (e.back().index != k) return "(i) the last entry is " + std::to_string(e.back().index) + "-indexed, not k";
  if (e.back().body.size() % 2 == 0) return std::string("(i) the master entry has even size");
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i].index <= e[i - 1].index) return "(ii) index " + std::to_string(e[i].index) + " does not increase";
  bool odd_seen = false;
  for (const auto& en : e) {
    bool odd = en.body.size() % 2 == 1;
    if (odd) odd_seen = true;
    if (!odd && odd_seen) return "(iii) even-size entry " + std::to_string(en.index) + " after an odd-size one";
  }
  std::optional<std::size_t> last_even, last_odd;
  for (const auto& en : e) {
    std::size_t s = en.body.size();
    if (s % 2 == 0) {
      if (last_even && s >= *last_even) return "(iv) even sizes do not decrease at " + std::to_string(en.index);
      last_even = s;
    } else if (en.index != k) {
      if (last_odd && s <= *last_odd) return "(v) odd sizes do not increase at " + std::to_string(en.index);
      last_odd = s;
    }
  }
  for (const auto& en : e)
    if (en.body.empty()) return "(vi) entry " + std::to_string(en.index) + " has size 0";
  return std::nullopt;
}

CentralTriple central_triple(const Aggregation& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i].body.size() % 2 == 0) continue;
    CentralTriple t;
    t.n = e[i].index;
    t.right = e[i].body;
    if (t.n > 0)
      for (const auto& en : e)
        if (en.index == t.n - 1) t.left = en.body;
    return t;
  }
  throw std::invalid_argument("central triple: no odd-size entry in " + aggregation_str(e));
}

// --------------------------------------------------------------------- Sim

Sim::Sim(SimContext ctx, Body a, Body b, std::size_t n)
    : ctx_(std::move(ctx)), a_(std::move(a)), b_(std::move(b)), n_(n) {
  if (b_.empty()) throw std::invalid_argument("Sim: B must be nonempty");
  if (n_ == 0 && !a_.empty()) throw std::invalid_argument("Sim_0: A must be empty");
  if (n_ > ctx_.k) throw std::invalid_argument("Sim: n exceeds k");
  w_ = ctx_.make_h(n_);
  r_ = SignedOrgan{true, b_[0]};
  result_.u = Natural(w_->spacecost());
  begin_pass();
}

Sim::Sim(const Sim& o)
    : ctx_(o.ctx_), a_(o.a_), b_(o.b_), n_(o.n_), ai_(o.ai_), bi_(o.bi_), psi_(o.psi_), nu_(o.nu_),
      w_(o.w_ ? o.w_->clone() : nullptr), cur_(o.cur_ ? o.cur_->clone() : nullptr), r_(o.r_),
      remaining_(o.remaining_), done_(o.done_), result_(o.result_) {}

void Sim::begin_pass() {
  const char* prefix = n_ == 0 ? "" : (r_.positive ? "1." : "0.");
  for (const auto& m : r_.organ.payload) w_->inject(prefix + m);
  cur_ = w_->clone();
  remaining_ = r_.organ.scale;
}

void Sim::advance() {
  if (done_) return;
  if (remaining_ > 0) {
    // A stationary configuration stays put for the rest of the pass.
    if (cur_->is_stationary()) {
      remaining_ = 0;
    } else {
      auto mv = cur_->cycle();
      ++result_.traced_steps;
      result_.u = std::max(result_.u, Natural(cur_->spacecost()));
      --remaining_;
      if (mv) {
        if (n_ == 0) {
          nu_.push_back(*mv);
        } else if (mv->rfind("1.", 0) == 0) {
          nu_.push_back(mv->substr(2));
        } else if (mv->rfind("0.", 0) == 0) {
          psi_.push_back(mv->substr(2));
        }
        w_ = cur_->clone();
      }
      if (remaining_ > 0) return;
    }
  }
  end_pass();
}

void Sim::end_pass() {
  const Natural p = r_.organ.scale;
  if (!nu_.empty()) {
    result_.s = SignedOrgan{true, Organ{nu_, p}};
    result_.s_values.push_back(result_.s);
    if (bi_ == b_.size()) {
      done_ = true;
      return;
    }
    r_ = SignedOrgan{true, b_[bi_++]};
    nu_.clear();
  } else {
    result_.s = SignedOrgan{false, Organ{psi_, p}};
    result_.s_values.push_back(result_.s);
    if (n_ == 0 || ai_ == a_.size()) {
      done_ = true;
      return;
    }
    r_ = SignedOrgan{false, a_[ai_++]};
    psi_.clear();
  }
  begin_pass();
}

void Sim::run_to_end() {
  while (!done_) advance();
}

SimResult sim(const SimContext& ctx, const Body& a, const Body& b, std::size_t n) {
  Sim s(ctx, a, b, n);
  s.run_to_end();
  return s.result();
}

SimViews sim_views(const SimContext& ctx, const Body& a, const Body& b, std::size_t n) {
  SimResult r = sim(ctx, a, b, n);
  SimViews v;
  v.bullet = r.s;
  Body neg, pos;
  for (const auto& s : r.s_values) (s.positive ? pos : neg).push_back(s.organ);
  // Every negative value but an n=0 exit consumed an organ of A; every positive one but the last, of B.
  std::size_t a_used = 0, b_used = 1;
  for (std::size_t i = 0; i < r.s_values.size(); ++i) {
    bool last = i + 1 == r.s_values.size();
    if (last) break;
    if (r.s_values[i].positive)
      ++b_used;
    else
      ++a_used;
  }
  if (n > 0) {
    if (!(a_used <= neg.size() && neg.size() <= a_used + 1))
      throw std::logic_error("sim_views: left cardinality out of range");
    for (std::size_t i = 0; i < std::max(neg.size(), a_used); ++i) {
      if (i < neg.size()) v.left.push_back(neg[i]);
      if (i < a_used) v.left.push_back(a[i]);
    }
  }
  if (!(pos.size() <= b_used && b_used <= pos.size() + 1))
    throw std::logic_error("sim_views: right cardinality out of range");
  for (std::size_t i = 0; i < b_used; ++i) {
    v.right.push_back(b[i]);
    if (i < pos.size()) v.right.push_back(pos[i]);
  }
  return v;
}

bool is_saturated(const SimContext& ctx, const Body& a, const Body& b, std::size_t n) {
  SignedOrgan bullet = sim(ctx, a, b, n).s;
  if (!bullet.positive) {
    for (std::size_t len = 1; len < b.size(); ++len)
      if (!sim(ctx, a, Body(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(len)), n).s.positive) return false;
    return true;
  }
  for (std::size_t len = 0; len < a.size(); ++len)
    if (sim(ctx, Body(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(len)), b, n).s.positive) return false;
  return true;
}

// -------------------------------------------------------------------- Main

const char* main_case_str(MainCase c) {
  switch (c) {
    case MainCase::Case1:
      return "1";
    case MainCase::Sub211:
      return "2.1.1";
    case MainCase::Sub212:
      return "2.1.2";
    case MainCase::Sub221:
      return "2.2.1";
    case MainCase::Sub2221:
      return "2.2.2.1";
    case MainCase::Sub2222:
      return "2.2.2.2";
  }
  return "?";
}

namespace {

MainCase parse_main_case(const std::string& s) {
  for (MainCase c : {MainCase::Case1, MainCase::Sub211, MainCase::Sub212, MainCase::Sub221, MainCase::Sub2221,
                     MainCase::Sub2222})
    if (s == main_case_str(c)) return c;
  throw std::runtime_error("unknown case " + s);
}

std::size_t count_bots(const Run& r) {
  return static_cast<std::size_t>(
      std::count_if(r.begin(), r.end(), [](const Labmove& m) { return m.label == Label::Bot; }));
}

std::vector<std::string> bot_moves(const Run& r) {
  std::vector<std::string> out;
  for (const auto& lm : r)
    if (lm.label == Label::Bot) out.push_back(lm.move);
  return out;
}

Entry* find_entry(Aggregation& e, std::size_t index) {
  for (auto& en : e)
    if (en.index == index) return &en;
  return nullptr;
}

std::vector<std::string> sorted_union(std::vector<std::string> a, const std::set<std::string>& b) {
  std::set<std::string> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

}  // namespace

MachineCensus census_of(const Stepper& s) {
  MachineCensus c;
  if (const auto* h = dynamic_cast<const HpmStepper*>(&s)) {
    c.states = h->spec().state_count();
    c.worktapes = h->spec().worktapes();
    c.symbols = h->spec().symbol_census();
  }
  return c;
}

FormulaPtr instantiate(const FormulaPtr& f, const std::string& x, const TermPtr& t) {
  return substitute(f, {{x, t}});
}

FormulaPtr induction_step_game(const FormulaPtr& f, const std::string& x) {
  return Formula::implies(f, instantiate(f, x, Term::succ(Term::var(x))));
}

InductionSolver::InductionSolver(StepperPtr n, StepperPtr k, FormulaPtr f, BoundExpr b, InductionOptions opt)
    : n_proto_(std::move(n)), k_proto_(std::move(k)), f_(std::move(f)), b_(std::move(b)), opt_(std::move(opt)) {
  f0_ = instantiate(f_, opt_.x, Term::constant("0"));
  f_shape_ = std::make_shared<GameShape>(f_);
  std::set<std::string> extra = b_.variables();
  extra.insert(opt_.x);
  vars_ = sorted_union(free_variables(f_), extra);
  if (opt_.census) {
    census_ = *opt_.census;
  } else {
    MachineCensus a = census_of(*n_proto_), c = census_of(*k_proto_);
    census_.states = std::max(a.states, c.states);
    census_.worktapes = std::max(a.worktapes, c.worktapes);
    census_.symbols = std::max(a.symbols, c.symbols);
  }
  if (opt_.poll_every == 0) opt_.poll_every = 1;
  reset();
}

InductionSolver::InductionSolver(const InductionSolver& o)
    : Stepper(), n_proto_(o.n_proto_), k_proto_(o.k_proto_), f_(o.f_), f0_(o.f0_), step_game_(o.step_game_), b_(o.b_),
      opt_(o.opt_), vars_(o.vars_), f_shape_(o.f_shape_), census_(o.census_), run_(o.run_), mode_(o.mode_),
      params_(o.params_), threshold_(o.threshold_), consts_(o.consts_), sim_ctx_(o.sim_ctx_), e_(o.e_), u_(o.u_),
      sim_(o.sim_ ? std::make_unique<Sim>(*o.sim_) : nullptr), since_poll_(o.since_poll_), current_(o.current_),
      trace_(o.trace_), pending_(o.pending_), replay_(o.replay_ ? o.replay_->clone() : nullptr),
      replay_fed_(o.replay_fed_) {}

void InductionSolver::reset() {
  run_.clear();
  mode_ = Mode::Wait;
  params_.reset();
  threshold_ = 0;
  consts_ = vars_.size();
  sim_ctx_ = SimContext{};
  e_.clear();
  u_ = 0;
  sim_.reset();
  since_poll_ = 0;
  current_ = IterationRecord{};
  trace_.clear();
  pending_.clear();
  replay_.reset();
  replay_fed_ = 0;
}

StepperPtr InductionSolver::make_h(std::size_t n) const {
  if (!sim_ctx_.make_h) throw std::logic_error("make_h: constants not yet received");
  return sim_ctx_.make_h(n);
}

void InductionSolver::start() {
  InductionParams p;
  auto bots = bot_moves(run_);
  Natural greatest = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const std::string& m = bots[i];
    Natural c = parse_constant(m.size() > 1 ? m.substr(1) : "");
    p.constants[vars_[i]] = c;
    greatest = std::max(greatest, c);
  }
  const Natural& kval = p.constants.at(opt_.x);
  p.l = size_of(greatest);
  p.bound = evaluate_bound(b_, p.constants);
  p.f = unarify(b_);
  const ChoiceCensus& cc = f_shape_->census();
  p.e_top = cc.e_top;
  p.e_bot = cc.e_bot;
  p.statute.r = census_.states;
  p.statute.g = census_.worktapes;
  p.statute.q = census_.symbols;
  p.statute.e = cc.e_top + cc.e_bot;
  auto fv = free_variables(f_);
  p.statute.v = static_cast<unsigned>(fv.size() - std::count(fv.begin(), fv.end(), opt_.x));
  p.statute.h = cc.h;
  p.statute.G = f_shape_->aggregates().G;

  if (kval > p.bound) {
    p.k = 0;
    params_ = p;
    mode_ = Mode::Retired;
    return;
  }
  p.k = clamp_to_size(kval);
  params_ = p;

  std::vector<Natural> fc;
  for (const auto& v : fv) fc.push_back(p.constants.at(v));
  threshold_ = f_shape_->threshold(fc);

  // H_0 plays F(0); H_n plays F(x) -> F(x') with x = n-1. Constants go in lexicographic order.
  auto n_proto = n_proto_;
  auto k_proto = k_proto_;
  std::vector<std::string> vars0 = free_variables(f0_);
  std::set<std::string> with_x = {opt_.x};
  std::vector<std::string> vars_n = sorted_union(fv, with_x);
  std::string x = opt_.x;
  std::map<std::string, Natural> constants = p.constants;
  sim_ctx_.k = p.k;
  sim_ctx_.make_h = [n_proto, k_proto, vars0, vars_n, x, constants](std::size_t n) {
    StepperPtr h = (n == 0 ? n_proto : k_proto)->clone();
    h->reset();
    for (const auto& v : n == 0 ? vars0 : vars_n) {
      Natural c = v == x ? Natural(n - 1) : constants.at(v);
      h->inject("#" + to_binary(c));
    }
    return h;
  };

  if (p.k == 0) {
    replay_ = make_h(0);
    mode_ = Mode::Replay;
    return;
  }
  e_ = {Entry{p.k, Body{Organ{{}, 1}}}};
  u_ = 0;
  mode_ = Mode::Main;
  begin_iteration();
}

void InductionSolver::begin_iteration() {
  CentralTriple t = central_triple(e_);
  current_ = IterationRecord{};
  current_.number = trace_.size() + 1;
  current_.e = e_;
  current_.u_before = u_;
  current_.n = t.n;
  current_.left_size = t.left.size();
  current_.right_size = t.right.size();
  sim_ = std::make_unique<Sim>(sim_ctx_, body_project(t.left, Parity::Even), body_project(t.right, Parity::Odd), t.n);
  since_poll_ = 0;
}

void InductionSolver::finish_iteration(MainCase kind) {
  current_.kind = kind;
  trace_.push_back(current_);
}

void InductionSolver::restart() {
  u_ = 0;
  std::size_t k = params_->k;
  e_.erase(std::remove_if(e_.begin(), e_.end(), [k](const Entry& en) { return en.index != k; }), e_.end());
}

std::size_t InductionSolver::master_odd_moves() const {
  std::size_t q = 0;
  const Body& master = e_.back().body;
  for (std::size_t i = 0; i < master.size(); i += 2) q += master[i].payload.size();
  return q;
}

std::optional<std::string> InductionSolver::poll_new_move() const {
  auto bots = bot_moves(run_);
  std::size_t q = master_odd_moves();
  if (bots.size() <= consts_ + q) return std::nullopt;
  return bots[consts_ + q];
}

void InductionSolver::absorb_env_move(const std::string& move) {
  std::string theta = move.rfind("1.", 0) == 0 ? move.substr(2) : move;
  Organ& master = e_.back().body.back();
  master.payload.push_back(prudentize(theta, threshold_));
  master.scale = 1;
}

std::optional<std::string> InductionSolver::cycle() {
  if (!pending_.empty()) {
    std::string m = pending_.front();
    pending_.pop_front();
    run_.push_back(top(m));
    return m;
  }
  switch (mode_) {
    case Mode::Wait:
      if (count_bots(run_) >= vars_.size()) start();
      return std::nullopt;
    case Mode::Retired:
      return std::nullopt;
    case Mode::Replay: {
      auto bots = bot_moves(run_);
      for (; consts_ + replay_fed_ < bots.size(); ++replay_fed_) {
        const std::string& m = bots[consts_ + replay_fed_];
        if (m.rfind("1.", 0) == 0) replay_->inject(m.substr(2));
      }
      auto out = replay_->cycle();
      if (!out) return std::nullopt;
      std::string m = "1." + *out;
      run_.push_back(top(m));
      return m;
    }
    case Mode::Waiting2222: {
      auto m = poll_new_move();
      if (!m) return std::nullopt;
      absorb_env_move(*m);
      trace_.back().completed = true;
      restart();
      mode_ = Mode::Main;
      begin_iteration();
      return std::nullopt;
    }
    case Mode::Main:
      break;
  }

  if (++since_poll_ >= opt_.poll_every) {
    since_poll_ = 0;
    if (auto m = poll_new_move()) {
      absorb_env_move(*m);
      finish_iteration(MainCase::Case1);
      restart();
      begin_iteration();
      return std::nullopt;
    }
  }
  sim_->advance();
  if (!sim_->done()) return std::nullopt;

  // Case 2.
  const SimResult& res = sim_->result();
  u_ = std::max(u_, res.u);
  current_.s = res.s;
  current_.u = res.u;
  current_.u_after = u_;
  const std::size_t n = current_.n, k = params_->k;
  if (res.s.positive) {
    Entry* en = find_entry(e_, n);
    if (n < k) {
      en->body.push_back(res.s.organ);
      std::size_t size = en->body.size();
      e_.erase(std::remove_if(e_.begin(), e_.end(),
                              [n, size](const Entry& x) { return x.index < n && x.body.size() <= size; }),
               e_.end());
      finish_iteration(MainCase::Sub211);
    } else {
      en->body.push_back(res.s.organ);
      en->body.push_back(Organ{{}, res.s.organ.scale});
      for (const auto& w : res.s.organ.payload) pending_.push_back("1." + w);
      finish_iteration(MainCase::Sub212);
    }
  } else if (n > 0) {
    Entry* prev = find_entry(e_, n - 1);
    if (prev) {
      prev->body.push_back(res.s.organ);
    } else {
      auto at = std::find_if(e_.begin(), e_.end(), [n](const Entry& x) { return x.index == n; });
      e_.insert(at, Entry{n - 1, Body{res.s.organ}});
    }
    std::size_t size = find_entry(e_, n - 1)->body.size();
    e_.erase(std::remove_if(e_.begin(), e_.end(),
                            [n, k, size](const Entry& x) { return x.index >= n && x.index != k && x.body.size() <= size; }),
             e_.end());
    finish_iteration(MainCase::Sub221);
  } else {
    Natural limit = statute_limit(Natural(params_->l), u_, params_->statute);
    current_.statute = limit;
    Natural& v = e_.back().body.back().scale;
    if (v < limit) {
      v *= 2;
      finish_iteration(MainCase::Sub2221);
      restart();
    } else {
      current_.completed = false;
      finish_iteration(MainCase::Sub2222);
      sim_.reset();
      mode_ = Mode::Waiting2222;
      return std::nullopt;
    }
  }
  begin_iteration();
  return std::nullopt;
}

std::size_t InductionSolver::spacecost() const {
  if (replay_) return replay_->spacecost();
  return sim_ ? sim_->spacecost() : 0;
}

bool InductionSolver::is_stationary() const {
  if (!pending_.empty()) return false;
  switch (mode_) {
    case Mode::Wait:
      return count_bots(run_) < vars_.size();
    case Mode::Retired:
      return true;
    case Mode::Replay:
      return count_bots(run_) == consts_ + replay_fed_ && replay_->is_stationary();
    case Mode::Waiting2222:
      return !poll_new_move().has_value();
    case Mode::Main:
      return false;
  }
  return false;
}

Label InductionSolver::winner(const AtomEvaluator& atoms) const {
  if (!params_) return Label::Top;  // constants never arrived: the conclusion has no legal run to lose
  const InductionParams& p = *params_;
  if (p.constants.at(opt_.x) > p.bound) return Label::Top;
  Run after;
  std::size_t skipped = 0;
  for (const auto& lm : run_) {
    if (lm.label == Label::Bot && skipped < consts_) {
      ++skipped;
      continue;
    }
    after.push_back(lm);
  }
  Run consequent = project(after, Projection::Sub1);
  std::vector<Natural> fc;
  for (const auto& v : free_variables(f_)) fc.push_back(p.constants.at(v));
  LegalStatus ls = legal_status(*f_shape_, consequent);
  if (!ls.legal) return opposite(*ls.illegal_by);
  return wins(*f_shape_, p.constants, consequent, atoms);
}

StepperPtr build_induction_solver(const Stepper& n, const Stepper& k, const FormulaPtr& f, const BoundExpr& b,
                                  InductionOptions opt) {
  return std::make_unique<InductionSolver>(n.clone(), k.clone(), f, b, std::move(opt));
}

// ------------------------------------------------------------- diagnostics

namespace {

bool restarting(const IterationRecord& r) {
  return r.kind == MainCase::Case1 || r.kind == MainCase::Sub2221 || (r.kind == MainCase::Sub2222 && r.completed);
}

}  // namespace

DiagnosticParams diagnostic_params(const InductionParams& p, const std::vector<IterationRecord>& trace,
                                   std::optional<Natural> space) {
  Natural s = 0;
  if (space) {
    s = *space;
  } else {
    for (const auto& r : trace) s = std::max({s, r.u_after, r.u_before});
  }
  Natural l(p.l);
  Natural base = size_of(statute_limit(l, s, p.statute));
  base = std::max({base, p.f(l), Natural(2 * p.e_top + 1), Natural(p.e_bot)});
  return DiagnosticParams{p.k, p.e_top, p.e_bot, base + 1};
}

Diagnostics diagnostics(const std::vector<IterationRecord>& trace, const DiagnosticParams& p) {
  Diagnostics d;
  d.base = p.base;
  const std::size_t dd = 2 * p.e_top + 1;
  const std::size_t k = p.k;
  auto note = [&d](const std::string& s) {
    if (d.violations.size() < 64) d.violations.push_back(s);
  };

  for (const auto& r : trace) {
    std::string tag = "iteration " + std::to_string(r.number) + ": ";
    if (auto bad = validate_aggregation(r.e, k)) note(tag + *bad);
    std::vector<Natural> c(dd + 4, 0);
    for (const auto& en : r.e) {
      std::size_t j = en.body.size();
      if (j > dd) note(tag + "entry " + std::to_string(en.index) + " has size " + std::to_string(j) + " above 2e+1");
      if (en.index == k || j == 0 || j > dd) continue;
      c[j] = j % 2 == 0 ? Natural(en.index + 1) : Natural(k - en.index);
    }
    if (!r.e.empty() && r.e.back().index == k && !r.e.back().body.empty()) {
      const Body& master = r.e.back().body;
      c[dd + 1] = Natural(size_of(master.back().scale));
      c[dd + 2] = master.back().payload.size();
      c[dd + 3] = master.size();
    }
    Natural rank = 0, power = 1;
    for (const auto& digit : c) {
      if (digit >= p.base) d.digits_below_base = false;
      rank += digit * power;
      power *= p.base;
    }
    d.digits.push_back(c);
    d.rank.push_back(rank);
    switch (r.kind) {
      case MainCase::Sub212:
        d.classification.push_back("locking+repeating");
        break;
      case MainCase::Sub211:
      case MainCase::Sub221:
        d.classification.push_back("repeating");
        break;
      default:
        d.classification.push_back(restarting(r) ? "restarting" : "waiting");
    }
  }
  for (std::size_t i = 1; i < d.rank.size(); ++i)
    if (!(d.rank[i - 1] < d.rank[i])) {
      d.rank_increasing = false;
      note("rank does not increase at iteration " + std::to_string(i + 1));
    }
  if (trace.empty()) return d;

  // I-sets relative to h = the last iteration; positions are 0-based, reported 1-based.
  const std::size_t h = trace.size();
  {
    // transient: some restarting j in [i, h) comes before every locking e >= i
    std::optional<std::size_t> next_restart, next_lock;
    std::vector<bool> transient(h, false);
    for (std::size_t i = h; i-- > 0;) {
      if (i + 1 < h && restarting(trace[i])) next_restart = i;
      if (trace[i].kind == MainCase::Sub212) next_lock = i;
      transient[i] = next_restart && (!next_lock || *next_restart < *next_lock);
    }
    for (std::size_t i = 0; i < h; ++i) (transient[i] ? d.transient : d.bang).push_back(i + 1);
  }
  {
    bool b1 = true, b2 = true, b3 = true;
    std::vector<std::size_t> s1, s2, s3;
    for (std::size_t i = h; i-- > 0;) {
      if (i + 1 < h) {
        MainCase c = trace[i].kind;
        if (c == MainCase::Case1 || c == MainCase::Sub2222) b1 = false;
        if (c == MainCase::Sub2221) b2 = false;
        if (c == MainCase::Sub212) b3 = false;
      }
      if (b1) s1.push_back(i + 1);
      if (b1 && b2) s2.push_back(i + 1);
      if (b1 && b2 && b3) s3.push_back(i + 1);
    }
    d.bullet1.assign(s1.rbegin(), s1.rend());
    d.bullet2.assign(s2.rbegin(), s2.rend());
    d.bullet3.assign(s3.rbegin(), s3.rend());
  }

  // B_n^h: the least common extension of the n-entry bodies over I^h_!.
  for (std::size_t i : d.bang)
    for (const auto& en : trace[i - 1].e) {
      auto [it, fresh] = d.b_h.emplace(en.index, en.body);
      if (fresh) continue;
      BodyRelation rel = body_relate(it->second, en.body);
      if (!rel.consistent)
        note("bodies of entry " + std::to_string(en.index) + " are inconsistent at iteration " + std::to_string(i));
      else if (rel.extension)
        it->second = en.body;
    }
  for (const auto& [n, body] : d.b_h) {
    std::vector<std::size_t> births;
    for (std::size_t len = 1; len <= body.size(); ++len) {
      Body prefix(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(len));
      std::size_t born = 0;
      for (std::size_t i : d.bang) {
        for (const auto& en : trace[i - 1].e)
          if (en.index == n && body_relate(prefix, en.body).extension) born = i;
        if (born) break;
      }
      births.push_back(born);
    }
    d.birthtimes[n] = births;
  }

  // At termination (a final 2.2.2.2 still waiting) every B_n has odd size and ends at the master scale.
  const IterationRecord& last = trace.back();
  if (last.kind == MainCase::Sub2222 && !last.completed) {
    const Natural& master_scale = last.e.back().body.back().scale;
    for (std::size_t n = 0; n <= k; ++n) {
      auto it = d.b_h.find(n);
      if (it == d.b_h.end()) {
        note("no " + std::to_string(n) + "-indexed entry among the non-transient iterations");
        continue;
      }
      if (it->second.size() % 2 == 0) note("B_" + std::to_string(n) + " has even size");
      if (it->second.back().scale != master_scale) note("B_" + std::to_string(n) + " ends off the master scale");
      if (n > 0 && d.b_h.count(n - 1)) {
        std::size_t lower = d.birthtimes[n - 1].back(), upper = d.birthtimes[n].back();
        if (!(lower > upper)) note("B_" + std::to_string(n - 1) + " was not born after B_" + std::to_string(n));
      }
    }
  }
  return d;
}

std::string diagnostics_str(const Diagnostics& d, const std::vector<IterationRecord>& trace) {
  std::ostringstream out;
  out << "base " << d.base << "\n";
  out << "iter  case      class              n  rank\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::string kind = main_case_str(trace[i].kind);
    std::string cls = i < d.classification.size() ? d.classification[i] : "";
    out << trace[i].number << std::string(6 - std::min<std::size_t>(5, std::to_string(trace[i].number).size()), ' ')
        << kind << std::string(10 - std::min<std::size_t>(9, kind.size()), ' ') << cls
        << std::string(19 - std::min<std::size_t>(18, cls.size()), ' ') << trace[i].n << "  "
        << (i < d.rank.size() ? d.rank[i].str() : "") << "\n";
  }
  auto list = [&out](const char* name, const std::vector<std::size_t>& v) {
    out << name << " {";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    out << "}\n";
  };
  list("transient", d.transient);
  list("I!", d.bang);
  list("I*", d.bullet1);
  list("I**", d.bullet2);
  list("I***", d.bullet3);
  for (const auto& [n, body] : d.b_h) {
    out << "B_" << n << " = " << body_str(body) << "  born";
    for (auto t : d.birthtimes.at(n)) out << " " << t;
    out << "\n";
  }
  out << "rank increasing: " << (d.rank_increasing ? "yes" : "no") << "\n";
  for (const auto& v : d.violations) out << "violation: " << v << "\n";
  return out.str();
}

// ------------------------------------------------------------- trace files

namespace {

void write_body(std::ostream& out, const Body& b) {
  for (const auto& o : b) out << organ_str(o);
}

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  void expect(char c) {
    if (i >= s.size() || s[i] != c) throw std::runtime_error(std::string("induction trace: expected '") + c + "'");
    ++i;
  }
  bool peek(char c) const { return i < s.size() && s[i] == c; }
  std::string until(const std::string& stops) {
    std::size_t j = s.find_first_of(stops, i);
    if (j == std::string::npos) throw std::runtime_error("induction trace: unterminated field");
    std::string out = s.substr(i, j - i);
    i = j;
    return out;
  }
};

Organ read_organ(Cursor& c) {
  Organ o;
  c.expect('(');
  while (!c.peek(';')) {
    o.payload.push_back(c.until(",;"));
    if (c.peek(',')) c.expect(',');
  }
  c.expect(';');
  o.scale = Natural(c.until(")"));
  c.expect(')');
  return o;
}

Body read_body(Cursor& c, char stop) {
  Body b;
  if (c.peek('(') && c.i + 1 < c.s.size() && c.s[c.i + 1] == ')') {  // "()" is the empty body
    c.i += 2;
    return b;
  }
  while (!c.peek(stop)) b.push_back(read_organ(c));
  return b;
}

}  // namespace

void write_induction_trace(std::ostream& out, const InductionTrace& t) {
  out << "params k=" << t.params.k << " e_top=" << t.params.e_top << " e_bot=" << t.params.e_bot
      << " base=" << t.params.base << "\n";
  for (const auto& r : t.records) {
    out << "iter " << r.number << " case=" << main_case_str(r.kind) << " done=" << (r.completed ? 1 : 0)
        << " n=" << r.n << " L=" << r.left_size << " R=" << r.right_size << " U=" << r.u_before << " u=" << r.u
        << " U'=" << r.u_after << " stat=" << r.statute << " S=";
    if (r.s)
      out << (r.s->positive ? '+' : '-') << organ_str(r.s->organ);
    else
      out << "none";
    out << " E=";
    for (const auto& en : r.e) {
      out << "[" << en.index << ":";
      write_body(out, en.body);
      out << "]";
    }
    out << "\n";
  }
}

InductionTrace read_induction_trace(std::istream& in) {
  InductionTrace t;
  std::string line;
  bool have_params = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    std::map<std::string, std::string> kv;
    std::string field;
    while (ls >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos) {
        kv["#"] = field;
        continue;
      }
      kv[field.substr(0, eq)] = field.substr(eq + 1);
    }
    auto get = [&kv, &line](const std::string& key) -> const std::string& {
      auto it = kv.find(key);
      if (it == kv.end()) throw std::runtime_error("induction trace: missing " + key + " in: " + line);
      return it->second;
    };
    try {
      if (head == "params") {
        t.params.k = std::stoul(get("k"));
        t.params.e_top = std::stoul(get("e_top"));
        t.params.e_bot = std::stoul(get("e_bot"));
        t.params.base = Natural(get("base"));
        have_params = true;
      } else if (head == "iter") {
        IterationRecord r;
        r.number = std::stoul(get("#"));
        r.kind = parse_main_case(get("case"));
        r.completed = get("done") == "1";
        r.n = std::stoul(get("n"));
        r.left_size = std::stoul(get("L"));
        r.right_size = std::stoul(get("R"));
        r.u_before = Natural(get("U"));
        r.u = Natural(get("u"));
        r.u_after = Natural(get("U'"));
        r.statute = Natural(get("stat"));
        const std::string& s = get("S");
        if (s != "none") {
          Cursor c{s};
          bool positive = s[0] == '+';
          c.i = 1;
          r.s = SignedOrgan{positive, read_organ(c)};
        }
        const std::string& e = get("E");
        Cursor c{e};
        while (c.i < e.size()) {
          c.expect('[');
          Entry en;
          en.index = std::stoul(c.until(":"));
          c.expect(':');
          en.body = read_body(c, ']');
          c.expect(']');
          r.e.push_back(std::move(en));
        }
        t.records.push_back(std::move(r));
      } else {
        throw std::runtime_error("induction trace: unknown record " + head);
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("induction trace: bad number in: " + line);
    }
  }
  if (!have_params) throw std::runtime_error("induction trace: no params line");
  return t;
}

}  // namespace clarith
