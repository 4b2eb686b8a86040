#include "clarith/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "clarith/comprehension.hpp"
#include "clarith/induction.hpp"
#include "clarith/wrappers.hpp"
#include "clarith/zoo.hpp"

namespace clarith::oracle {

namespace {

using zoo::Rng;

std::size_t upto(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

CaseResult fail(std::string why) {
  CaseResult r;
  r.ok = false;
  r.detail = std::move(why);
  return r;
}

std::size_t count_label(const Run& r, Label l) {
  return static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [l](const Labmove& m) { return m.label == l; }));
}

// ------------------------------------------------------------------ fetch

CaseResult fetch_case(std::size_t id, std::uint64_t seed) {
  Rng rng = zoo::case_rng(seed, id);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::string text = zoo::random_machine_text(rng);
    HpmSpec spec = HpmSpec::parse_text(text);
    auto env = zoo::random_instant_env(rng);
    zoo::Transcript tr = zoo::record(spec, env, 80);
    // Replay cost grows with every earlier top move the machine rereads, so
    // desk cases fetch from the first few moves only.
    std::vector<std::size_t> candidates;
    std::size_t k = 0;
    for (const auto& lm : tr.run)
      if (lm.label == Label::Top) {
        if (!lm.move.empty() && k < 4) candidates.push_back(k);
        ++k;
      }
    if (candidates.empty()) continue;
    std::size_t pick = candidates[upto(rng, 0, candidates.size() - 1)];
    std::size_t size = 0, seen = 0;
    for (const auto& lm : tr.run)
      if (lm.label == Label::Top && seen++ == pick) size = lm.move.size();
    std::size_t n = upto(rng, 1, size);

    GlobalHistory h = zoo::history_of(tr.run);
    RecursionProbe probe;
    ResimContext ctx;
    ctx.spec = &spec;
    ctx.history = &h;
    ctx.own_run = &tr.run;
    ctx.probe = &probe;
    char got = fetch_symbol(ctx, pick, n);
    char want = zoo::run_symbol(tr.run, Label::Top, pick, n);
    CaseResult r;
    r.tally["fetch_calls"] = probe.fetch_calls;
    r.tally["update_calls"] = probe.update_calls;
    r.tally["probe_violations"] = probe.violations;
    if (got != want || probe.violations) {
      std::ostringstream o;
      o << "fetch(" << pick << "," << n << ") = '" << got << "', transcript '" << want << "', probe violations "
        << probe.violations << "\nrun " << run_str(tr.run) << "\nmachine:\n" << text;
      r.ok = false;
      r.detail = o.str();
    }
    return r;
  }
  CaseResult r;
  r.tally["no_moves"] = 1;
  return r;
}

// ------------------------------------------------------------------ probe

Run truncated_skeleton(const Run& run, const GameShape& g, const std::vector<Natural>& c) {
  Run out;
  for (const auto& lm : run) out.push_back(lm.label == Label::Top ? top(truncate(lm.move, g, c)) : lm);
  return out;
}

CaseResult probe_case(std::size_t id, std::uint64_t seed) {
  Rng rng = zoo::case_rng(seed, id);
  const auto& formulas = zoo::zoo_formulas();
  FormulaPtr f = parse_formula(formulas[id % formulas.size()]);
  GameShape g(f);
  zoo::Skeleton sk = zoo::random_skeleton(g, rng, 6, false);
  auto n = zoo::spec(zoo::waiter_machine_text(sk.run, upto(rng, 0, 1) == 1, upto(rng, 0, 1) == 1));
  ScriptedEnvironment env(zoo::waiter_env(sk.run));
  ReasonWrapper k(n, f);
  PlayOptions po;
  po.fuel = 20000;
  PlayResult pr = play(k, env, po);
  CaseResult r;
  r.tally["update_calls"] = k.probe().update_calls;
  r.tally["fetch_calls"] = k.probe().fetch_calls;
  r.tally["max_depth"] = k.probe().max_depth;
  r.tally["probe_violations"] = k.probe().violations;
  Run want = truncated_skeleton(sk.run, g, sk.constants);
  std::ostringstream o;
  if (k.probe().violations) o << "probe: " << k.probe().notes.front() << "\n";
  if (!legal_status_closed(g, pr.run).top_quasilegal) o << "real run not top-quasilegal\n";
  if (pr.run != want) o << "real run differs from the truncated imaginary run\n";
  if (pr.fuel_truncated) o << "fuel ran out\n";
  if (!o.str().empty()) {
    o << "formula " << formula_str(f) << "\nimaginary " << run_str(sk.run) << "\nexpected " << run_str(want)
      << "\nreal " << run_str(pr.run);
    r.ok = false;
    r.detail = o.str();
  }
  return r;
}

// -------------------------------------------------------------------- sim

// H_n for the Sim suite: a pure function of the visible run decides the next
// move and how many quiet cycles precede it. Legal in the consequent: at most
// e_top consequent moves and e_bot antecedent moves.
class DelayedScript : public Stepper {
 public:
  DelayedScript(std::uint64_t seed, std::size_t n, std::size_t e_top, std::size_t e_bot)
      : seed_(seed), n_(n), e_top_(e_top), e_bot_(e_bot) {}
  void reset() override {
    run_.clear();
    waited_ = 0;
  }
  void inject(const std::string& m) override {
    run_.push_back(bot(m));
    waited_ = 0;
  }
  std::optional<std::string> cycle() override {
    auto plan = decide();
    if (!plan) return std::nullopt;
    if (waited_ < plan->second) {
      ++waited_;
      return std::nullopt;
    }
    run_.push_back(top(plan->first));
    waited_ = 0;
    return plan->first;
  }
  StepperPtr clone() const override { return std::make_unique<DelayedScript>(*this); }
  const Run& run() const override { return run_; }
  std::size_t spacecost() const override { return run_.size() + waited_ % 3; }
  bool is_stationary() const override { return !decide().has_value(); }

 private:
  std::optional<std::pair<std::string, std::size_t>> decide() const {
    std::string key = std::to_string(seed_) + "/" + std::to_string(n_) + "/" + run_str(run_);
    Rng rng(std::hash<std::string>{}(key));
    if (std::bernoulli_distribution(0.3)(rng)) return std::nullopt;
    std::size_t cons = 0, ante = 0;
    for (const auto& lm : run_)
      if (lm.label == Label::Top) (lm.move.rfind("0.", 0) == 0 ? ante : cons)++;
    bool want_ante = n_ > 0 && std::bernoulli_distribution(0.5)(rng);
    if (want_ante && ante >= e_bot_) want_ante = false;
    if (!want_ante && cons >= e_top_) {
      if (n_ == 0 || ante >= e_bot_) return std::nullopt;
      want_ante = true;
    }
    std::string numer = to_binary(Natural(upto(rng, 0, 9)));
    std::string move = (n_ == 0 ? "" : want_ante ? "0." : "1.") + ("#" + numer);
    return std::make_pair(move, upto(rng, 0, 6));
  }

  std::uint64_t seed_;
  std::size_t n_, e_top_, e_bot_;
  Run run_;
  std::size_t waited_ = 0;
};

Body random_body(Rng& rng, std::size_t lo, std::size_t hi) {
  Body b;
  for (std::size_t i = upto(rng, lo, hi); i > 0; --i) {
    Organ o;
    for (std::size_t j = upto(rng, 0, 2); j > 0; --j) o.payload.push_back("#" + to_binary(Natural(upto(rng, 0, 7))));
    o.scale = upto(rng, 1, 8);
    b.push_back(o);
  }
  return b;
}

std::string sim_str(const SimResult& r) { return signed_organ_str(r.s) + " u=" + r.u.str(); }

CaseResult sim_case(std::size_t id, std::uint64_t seed) {
  Rng rng = zoo::case_rng(seed, id);
  const std::size_t k = 3;
  const std::size_t e_top = upto(rng, 1, 3), e_bot = upto(rng, 1, 3);
  const std::uint64_t machine_seed = rng();
  SimContext ctx;
  ctx.k = k;
  ctx.make_h = [=](std::size_t n) -> StepperPtr { return std::make_unique<DelayedScript>(machine_seed, n, e_top, e_bot); };
  const std::size_t n = upto(rng, 0, k);
  Body a = n == 0 ? Body{} : random_body(rng, 0, 3);
  Body b = random_body(rng, 1, 3);
  SimResult base = sim(ctx, a, b, n);
  CaseResult r;
  std::ostringstream o;
  auto same = [](const SimResult& x, const SimResult& y) { return x.s == y.s && x.u == y.u; };
  if (!base.s.positive) {
    Body b2 = b;
    for (const auto& extra : random_body(rng, 1, 2)) b2.push_back(extra);
    SimResult ext = sim(ctx, a, b2, n);
    r.tally["clause1"] = 1;
    if (!same(base, ext))
      o << "negative bullet changed under extension of B: " << sim_str(base) << " vs " << sim_str(ext) << " with B' "
        << body_str(b2) << "\n";
  } else {
    r.tally["clause3"] = 1;
    if (b.size() > e_top) o << "positive bullet with |B| = " << b.size() << " > e_top = " << e_top << "\n";
    if (n != 0) {
      Body a2 = a;
      for (const auto& extra : random_body(rng, 1, 2)) a2.push_back(extra);
      SimResult ext = sim(ctx, a2, b, n);
      r.tally["clause2"] = 1;
      if (!same(base, ext))
        o << "positive bullet changed under extension of A: " << sim_str(base) << " vs " << sim_str(ext) << " with A' "
          << body_str(a2) << "\n";
    }
  }
  r.tally["traced_steps"] = base.traced_steps;
  if (!o.str().empty()) {
    r.ok = false;
    r.detail = o.str() + "n=" + std::to_string(n) + " A=" + body_str(a) + " B=" + body_str(b) + " bullet " +
               sim_str(base);
  }
  return r;
}

// ----------------------------------------------------------------- windup

struct WindupCase {
  std::size_t formula;
  std::vector<std::string> done;  // completed top moves
  std::string open;
};

// Keyboard order, spelled independently of the library's comparator.
const std::string kKeys = "#01.";

bool quasilegal_top(const GameShape& g, const std::vector<std::string>& done, const std::string& last) {
  Run r;
  for (const auto& m : done) r.push_back(top(m));
  r.push_back(top(last));
  return legal_status(g, r).top_quasilegal;
}

// Preorder search in keyboard order finds the smallest string first.
std::optional<std::string> brute_windup(const GameShape& g, const WindupCase& c, std::size_t max_len) {
  std::string w;
  std::function<bool()> dfs = [&]() -> bool {
    if (quasilegal_top(g, c.done, c.open + w)) return true;
    if (w.size() == max_len) return false;
    for (char ch : kKeys) {
      w.push_back(ch);
      if (dfs()) return true;
      w.pop_back();
    }
    return false;
  };
  if (dfs()) return w;
  return std::nullopt;
}

const std::vector<WindupCase>& windup_cases() {
  static const std::vector<WindupCase> cases = [] {
    std::vector<WindupCase> out;
    const auto& formulas = zoo::zoo_formulas();
    for (std::size_t fi = 0; fi < formulas.size(); ++fi) {
      GameShape g(parse_formula(formulas[fi]));
      std::vector<std::string> moves;
      for (const auto& s : g.sites())
        if (s.owner == Label::Top)
          for (const char* numer : {"", "1", "10"}) moves.push_back(s.address + "#" + numer);
      std::vector<std::vector<std::string>> prefixes = {{}};
      for (const auto& m : moves) prefixes.push_back({m});
      std::vector<std::string> opens = {"", "2", "0.0"};
      for (const auto& m : moves)
        for (std::size_t len = 1; len <= m.size(); ++len) opens.push_back(m.substr(0, len));
      std::sort(opens.begin(), opens.end());
      opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
      for (const auto& pre : prefixes)
        for (const auto& open : opens) {
          Semiposition v;
          for (const auto& m : pre) v.moves.push_back(top(m));
          v.moves.push_back(top(open));
          if (!analyze_semiposition(v, g).quasilegitimate) continue;
          out.push_back({fi, pre, open});
        }
    }
    return out;
  }();
  return cases;
}

CaseResult windup_case(std::size_t id, std::uint64_t) {
  const WindupCase& c = windup_cases().at(id);
  FormulaPtr f = parse_formula(zoo::zoo_formulas()[c.formula]);
  GameShape g(f);
  Semiposition v;
  for (const auto& m : c.done) v.moves.push_back(top(m));
  v.moves.push_back(top(c.open));
  std::string got = windup(v, g);
  auto want = brute_windup(g, c, g.census().h + 2);
  if (!want || *want != got) {
    std::string pre;
    for (const auto& m : c.done) pre += "T" + m + " ";
    return fail("formula " + formula_str(f) + " semiposition " + pre + "T" + c.open + "... windup \"" + got +
                "\" brute " + (want ? "\"" + *want + "\"" : std::string("none")));
  }
  CaseResult r;
  r.tally[got.empty() ? "empty_windup" : "nonempty_windup"] = 1;
  return r;
}

// ---------------------------------------------------------- comprehension

constexpr std::size_t kComprExhaustive = 2 + 4 + 16 + 256;  // c = 0..3, tables over y < 2^c

CaseResult comprehension_case(std::size_t id, std::uint64_t seed) {
  std::size_t c = 0;
  std::vector<bool> table;
  if (id < kComprExhaustive) {
    std::size_t rest = id;
    while (rest >= (std::size_t{1} << (std::size_t{1} << c))) rest -= std::size_t{1} << (std::size_t{1} << c), ++c;
    for (std::size_t y = 0; y < (std::size_t{1} << c); ++y) table.push_back((rest >> y) & 1);
  } else {
    Rng rng = zoo::case_rng(seed, id);
    c = 4 + (id - kComprExhaustive) % 5;
    for (std::size_t y = 0; y < (std::size_t{1} << c); ++y) table.push_back(upto(rng, 0, 1) == 1);
  }
  Natural d = 0;
  for (std::size_t y = 0; y < c; ++y)
    if (table[y]) d += Natural(1) << y;

  FormulaPtr p = parse_formula("p(y)");
  BoundExpr b = BoundExpr::lit(c);
  auto pred = [table](const Natural& y, const std::vector<Natural>&) {
    std::size_t i = clamp_to_size(y);
    return i < table.size() && table[i];
  };
  ComprehensionSolver solver(std::make_unique<ScriptedStepper>(verdict_policy(0, pred)), p, b);
  ScriptedEnvironment env({});
  PlayOptions po;
  po.fuel = 200000;
  PlayResult pr = play(solver, env, po);
  std::string want = "#" + (d == 0 ? std::string() : to_binary(d));
  CaseResult r;
  r.tally["simulations"] = solver.simulations();
  std::size_t tops = count_label(pr.run, Label::Top);
  if (tops != 1 || pr.run.back().move != want || solver.fault()) {
    std::ostringstream o;
    o << "c=" << c << " table";
    for (bool t : table) o << t;
    o << ": run " << run_str(pr.run) << ", expected one move " << want;
    if (solver.fault()) o << ", fault " << *solver.fault();
    return fail(o.str());
  }
  return r;
}

// ------------------------------------------------------------------- vasa

CaseResult vasa_case(std::size_t id, std::uint64_t seed) {
  Rng rng = zoo::case_rng(seed, id);
  const auto& formulas = zoo::zoo_formulas();
  FormulaPtr f = parse_formula(formulas[(id / 2) % formulas.size()]);
  GameShape g(f);
  const bool illegal = id % 2 == 1;
  zoo::Skeleton sk = zoo::random_skeleton(g, rng, 6, illegal);
  auto l_spec = zoo::spec(zoo::waiter_machine_text(sk.run, true, id % 4 >= 2));
  auto entries = zoo::waiter_env(sk.run);
  ScriptedEnvironment env_l(entries), env_m(entries);
  HpmStepper l(l_spec);
  VasaWrapper m(l_spec, f);
  Run run_l, run_m;
  std::optional<std::size_t> retired_at;
  std::size_t moves_after = 0;
  std::ostringstream o;
  for (std::size_t t = 0; t < 400 && o.str().empty(); ++t) {
    auto in_l = env_l.moves_at(t, run_l);
    auto in_m = env_m.moves_at(t, run_m);
    for (const auto& mv : in_l) run_l.push_back(bot(mv));
    for (const auto& mv : in_m) run_m.push_back(bot(mv));
    auto out_l = l.step(in_l);
    auto out_m = m.step(in_m);
    if (out_l) run_l.push_back(top(*out_l));
    if (out_m) run_m.push_back(top(*out_m));
    if (!retired_at && m.retired()) retired_at = t;
    if (retired_at) {
      if (out_m) ++moves_after;
      continue;
    }
    if (out_l != out_m) o << "cycle " << t << ": L moved " << out_l.value_or("-") << ", wrapper " << out_m.value_or("-") << "\n";
    if (l.spacecost() != m.spacecost())
      o << "cycle " << t << ": spacecost " << l.spacecost() << " vs " << m.spacecost() << "\n";
  }
  if (!illegal && retired_at) o << "retired on a bottom-legal branch at cycle " << *retired_at << "\n";
  if (moves_after > 1) o << moves_after << " moves after retirement\n";
  if (!legal_status_closed(g, run_m).top_quasilegal) o << "wrapper run is not top-quasilegal\n";
  CaseResult r;
  r.tally[illegal ? "illegal_branches" : "legal_branches"] = 1;
  if (retired_at) r.tally["retirements"] = 1;
  if (moves_after) r.tally["retirement_moves"] = moves_after;
  r.tally["compression_states"] = m.compression_states();
  if (!o.str().empty()) {
    r.ok = false;
    r.detail = o.str() + "formula " + formula_str(f) + "\nskeleton " + run_str(sk.run) + "\nwrapper run " + run_str(run_m);
  }
  return r;
}

// ----------------------------------------------------------------- sketch

CaseResult sketch_case(std::size_t id, std::uint64_t seed) {
  Rng rng = zoo::case_rng(seed, id);
  std::string text;
  std::vector<ScriptEntry> env;
  switch (id % 8) {
    case 0:
      text = zoo::kAppBMachine;
      env = zoo::env_entries(zoo::kAppBEnv);
      break;
    case 1:
      text = zoo::kCounterStep;
      env = {{0, 0, "#" + to_binary(Natural(upto(rng, 1, 9)))}, {0, 0, "0.#" + to_binary(Natural(upto(rng, 0, 40)))}};
      break;
    default:
      text = zoo::random_machine_text(rng);
      env = zoo::random_instant_env(rng);
  }
  HpmSpec spec = HpmSpec::parse_text(text);
  const std::size_t cycles = 200;
  zoo::Transcript tr = zoo::record(spec, env, cycles);
  GlobalHistory h = zoo::history_of(tr.run);
  SymbolSource source = [&tr](Label l, std::size_t k, std::size_t n) { return zoo::run_symbol(tr.run, l, k, n); };

  FormulaPtr f = parse_formula(zoo::zoo_formulas()[upto(rng, 0, zoo::zoo_formulas().size() - 1)]);
  GameShape g(f);
  TruncationContext raw;
  TruncationContext game{&g, Natural(upto(rng, 0, 6))};
  CaseResult r;
  for (const TruncationContext* ctx : {&raw, &game}) {
    Sketch s = Sketch::initial(spec);
    for (std::size_t t = 0; t <= cycles; ++t) {
      Sketch want = sketch_of(tr.configs[t], tr.appends[t], *ctx);
      if (s != want) {
        std::ostringstream o;
        o << "cycle " << t << (ctx == &raw ? " (raw)" : " (truncating)") << ": advanced " << s.str() << " projected "
          << want.str() << "\nmachine:\n" << text;
        return fail(o.str());
      }
      // Buffer discipline and run-head clamp.
      if (spec.is_move_state(tr.configs[t].state) && !tr.configs[t].buffer.empty())
        return fail("buffer not empty in a move state at cycle " + std::to_string(t));
      std::size_t first_blank = tr.configs[t].run_tape.size();
      if (tr.configs[t].run_head > first_blank) return fail("run head beyond the first blank at cycle " + std::to_string(t));
      if (t < cycles) s = sketch_advance(spec, s, h, source, *ctx);
    }
  }
  r.tally["top_moves"] = count_label(tr.run, Label::Top);
  r.tally["steps"] = 2 * cycles;
  return r;
}

// ---------------------------------------------------------------- counter

CaseResult counter_case(std::size_t id, std::uint64_t) {
  const std::size_t k = id + 1;
  FormulaPtr f = parse_formula(zoo::kCounterFormula);
  InductionSolver m(std::make_unique<HpmStepper>(zoo::spec(zoo::kCounterBase)),
                    std::make_unique<HpmStepper>(zoo::spec(zoo::kCounterStep)), f, parse_bound("8"));
  ScriptedEnvironment env({ScriptEntry{0, 0, "#" + to_binary(Natural(k))}});
  PlayOptions po;
  po.fuel = 5000000;
  PlayResult pr = play(m, env, po);
  std::ostringstream o;
  if (pr.fuel_truncated) o << "fuel ran out\n";
  const auto& params = *m.params();
  for (const auto& rec : m.trace()) {
    if (auto bad = validate_aggregation(rec.e, k))
      o << "iteration " << rec.number << ": aggregation violates " << *bad << "\n";
    for (const auto& en : rec.e)
      if (en.body.size() > 2 * params.e_top + 1)
        o << "iteration " << rec.number << ": entry of size " << en.body.size() << " exceeds 2e_top+1\n";
  }
  Diagnostics d = diagnostics(m.trace(), diagnostic_params(params, m.trace()));
  if (!d.rank_increasing) o << "rank not strictly increasing\n";
  for (const auto& v : d.violations) o << v << "\n";
  std::string want = "1.#" + to_binary(Natural(k));
  if (pr.run.empty() || pr.run.back() != top(want)) o << "last move is not T" << want << "\n";
  if (m.winner() != Label::Top) o << "run not won by top\n";
  CaseResult r;
  r.tally["iterations"] = m.trace().size();
  r.tally["cycles"] = pr.cycles;
  if (!o.str().empty()) {
    r.ok = false;
    r.detail = "k=" + std::to_string(k) + ": " + o.str() + "run " + run_str(pr.run);
  }
  return r;
}

CaseResult guarded(const Suite& s, std::size_t id, std::uint64_t seed) {
  try {
    return s.run(id, seed);
  } catch (const std::exception& e) {
    return fail(std::string("exception: ") + e.what());
  }
}

Report merge(const Suite& s, const std::vector<CaseResult>& results) {
  Report rep;
  rep.suite = s.name;
  rep.cases = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CaseResult& r = results[i];
    for (const auto& [key, v] : r.tally) rep.tally[key] += v;
    if (!r.ok) {
      if (!rep.first_failure) {
        rep.first_failure = i;
        rep.first_detail = r.detail;
      }
      ++rep.failures;
    }
  }
  return rep;
}

std::size_t case_count(const Suite& s, std::size_t cases) {
  return s.fixed_count || cases == 0 ? s.default_cases : cases;
}

}  // namespace

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = [] {
    std::vector<Suite> v;
    v.push_back({"fetch", "fetch_symbol against recorded transcripts of random machines", 1000, false, fetch_case});
    v.push_back({"probe", "reason wrapper on legal zoo runs: index discipline and exact truncated replay", 300, false,
                 probe_case});
    v.push_back({"sim", "Sim output under extensions of the bodies; size of B on positive bullets", 600, false, sim_case});
    v.push_back({"windup", "windup against preorder search up to length h+2", windup_cases().size(), true, windup_case});
    v.push_back({"comprehension", "comprehension output against the bit-defined integer", kComprExhaustive + 200, true,
                 comprehension_case});
    v.push_back({"vasa", "quasilegality wrapper: mimicry on legal branches, one move after retiring", 300, false,
                 vasa_case});
    v.push_back({"sketch", "sketch_advance against projections of full configurations", 200, false, sketch_case});
    v.push_back({"counter", "induction solver on the counter family, k = 1..8", 8, true, counter_case});
    return v;
  }();
  return all;
}

const Suite* find_suite(const std::string& name) {
  for (const auto& s : suites())
    if (s.name == name) return &s;
  return nullptr;
}

Report run_serial(const Suite& s, std::size_t cases, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<CaseResult> results(case_count(s, cases));
  for (std::size_t i = 0; i < results.size(); ++i) results[i] = guarded(s, i, seed);
  Report rep = merge(s, results);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Report run_parallel(const Suite& s, std::size_t cases, std::uint64_t seed, int threads) {
#ifdef _OPENMP
  auto t0 = std::chrono::steady_clock::now();
  std::vector<CaseResult> results(case_count(s, cases));
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(results.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    results[static_cast<std::size_t>(i)] = guarded(s, static_cast<std::size_t>(i), seed);
  Report rep = merge(s, results);
  rep.threads = nthreads;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
#else
  (void)threads;
  return run_serial(s, cases, seed);
#endif
}

std::string report_str(const Report& r) {
  std::ostringstream o;
  o << r.suite << ": " << (r.cases - r.failures) << "/" << r.cases << " cases agree";
  for (const auto& [k, v] : r.tally) o << ", " << k << "=" << v;
  o << " (" << r.threads << " thread" << (r.threads == 1 ? "" : "s") << ")";
  if (r.first_failure) o << "\nfirst counterexample, case " << *r.first_failure << ":\n" << r.first_detail;
  return o.str();
}

}  // namespace clarith::oracle
