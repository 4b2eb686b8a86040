#include "clarith/zoo.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace clarith::zoo {

Rng case_rng(std::uint64_t seed, std::uint64_t case_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(case_id), static_cast<std::uint32_t>(case_id >> 32), 0x5eedu};
  return Rng(seq);
}

const char* const kAppBFormula = "ada y [|x|] ade z [|x|] p(z,y) v ada u [|x|] ade v [|x|] q(u,v)";

const char* const kAppBMachine = R"(% Answers the first bottom move after the constant with 0.1.#1111111 and the
% next one with 1.1.#0, then idles.
states: s0, s1, w1, mv1, s2, w2, mv2, s3
start: s0
movestates: mv1, mv2
worktapes: 0
delta: s0, B -> s1, R
delta: s0, _ -> s0, S
delta: s0, * -> s0, R
delta: s1, B -> w1, R, append "0.1.#1111111"
delta: s1, _ -> s1, S
delta: s1, * -> s1, R
delta: w1, * -> mv1, S
delta: mv1, * -> s2, S
delta: s2, B -> w2, R, append "1.1.#0"
delta: s2, _ -> s2, S
delta: s2, * -> s2, R
delta: w2, * -> mv2, S
delta: mv2, * -> s3, S
delta: s3, * -> s3, S
)";

const char* const kAppBEnv = R"(% after-top-moves delay move
0 0 #1001
0 0 0.#10
1 0 1.#1
)";

const char* const kCounterFormula = "ade v [|x|+1] (v = x)";

const char* const kCounterBase = R"(% Solves F(0): moves #0 at once.
states: s, w, mv, done
start: s
movestates: mv
worktapes: 0
delta: s, * -> w, S, append "#0"
delta: w, * -> mv, S
delta: mv, * -> done, S
delta: done, * -> done, S
)";

const char* const kCounterStep = R"(% Solves F(x) -> F(x'): waits for the antecedent move 0.#m, then moves 1.#(m+1).
% The work tape holds $0m; the guard 0 absorbs the carry.
states: s0, s1, r0, r1, r2, g, c, inc, rew, e0, e1, mv, done
start: s0
movestates: mv
worktapes: 1
alphabet: 0, 1, $
delta: s0, B, * -> s1, *, R, S
delta: s0, _, * -> s0, *, S, S
delta: s0, *, * -> s0, *, R, S
delta: s1, B, * -> r0, *, R, S
delta: s1, _, * -> s1, *, S, S
delta: s1, *, * -> s1, *, R, S
delta: r0, 0, * -> r1, *, R, S
delta: r0, _, * -> r0, *, S, S
delta: r0, *, * -> s1, *, R, S
delta: r1, ., * -> r2, *, R, S
delta: r1, *, * -> s1, *, S, S
delta: r2, #, * -> g, $, R, R
delta: r2, *, * -> s1, *, S, S
delta: g, *, * -> c, 0, S, R
delta: c, 0, * -> c, 0, R, R
delta: c, 1, * -> c, 1, R, R
delta: c, *, * -> inc, *, S, L
delta: inc, *, 1 -> inc, 0, S, L
delta: inc, *, 0 -> rew, 1, S, S
delta: rew, *, $ -> e0, *, S, R, append "1.#"
delta: rew, *, * -> rew, *, S, L
delta: e0, *, 0 -> e0, *, S, R
delta: e0, *, 1 -> e1, *, S, R, append "1"
delta: e1, *, 0 -> e1, *, S, R, append "0"
delta: e1, *, 1 -> e1, *, S, R, append "1"
delta: e1, *, _ -> mv, *, S, S
delta: mv, *, * -> done, *, S, S
delta: done, *, * -> done, *, S, S
)";

const char* const kSilent = R"(% Never moves.
states: q
start: q
worktapes: 0
delta: q, * -> q, S
)";

std::shared_ptr<const HpmSpec> spec(const std::string& text) {
  return std::make_shared<const HpmSpec>(HpmSpec::parse_text(text));
}

std::vector<ScriptEntry> env_entries(const std::string& text) {
  std::istringstream in(text);
  return ScriptedEnvironment::parse(in).entries();
}

const std::vector<std::string>& two_unit_formulas() {
  static const std::vector<std::string> f = {
      "ade a [|x|] ade b [|x|] p(a,b)",        "ada y [|x|] ade z [|x|] p(z,y)",
      "ade a [|x|] ada b [|x|] p(a,b)",        "ada a [|x|] ada b [|x|] p(a,b)",
      "ade a [|x|] p(a) v ada b [|x|] q(b)",   "ade a [|x|] p(a) & ade b [|x|+1] q(b)",
      "ada a [|x|] p(a) -> ade b [|x|] q(b)",  "ade a [|x|] p(a,w) v ade b [|w|] q(b,x)",
  };
  return f;
}

const std::vector<std::string>& zoo_formulas() {
  static const std::vector<std::string> f = [] {
    std::vector<std::string> out = two_unit_formulas();
    out.push_back(kAppBFormula);
    return out;
  }();
  return f;
}

namespace {

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::size_t upto(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string random_string(Rng& rng, std::size_t lo, std::size_t hi, const std::string& alphabet) {
  std::string s;
  for (std::size_t i = upto(rng, lo, hi); i > 0; --i) s += alphabet[upto(rng, 0, alphabet.size() - 1)];
  return s;
}

std::string dir_name(Rng& rng, double right) {
  if (chance(rng, right)) return "R";
  return chance(rng, 0.5) ? "S" : "L";
}

std::string random_numer(Rng& rng, std::size_t max_len) {
  std::size_t len = upto(rng, 0, max_len);
  if (len == 0) return "";
  if (len == 1) return chance(rng, 0.5) ? "0" : "1";
  return "1" + random_string(rng, len - 1, len - 1, "01");
}

}  // namespace

std::string random_machine_text(Rng& rng, const RandomMachineOptions& opt) {
  const std::size_t n = upto(rng, opt.min_states, opt.max_states);
  const std::size_t g = upto(rng, 0, opt.max_worktapes);
  std::ostringstream o;
  o << "states: mv";
  for (std::size_t i = 0; i < n; ++i) o << ", q" << i;
  o << "\nstart: q0\nmovestates: mv\nworktapes: " << g << "\n";
  if (g) o << "alphabet: 0, 1\n";

  auto state = [&] { return "q" + std::to_string(upto(rng, 0, n - 1)); };
  auto rule = [&](const std::string& from, const std::string& run_sym, const std::string& work_sym, bool allow_move) {
    o << "delta: " << from << ", " << run_sym;
    for (std::size_t i = 0; i < g; ++i) o << ", " << (i == 0 ? work_sym : "*");
    bool to_move = allow_move && chance(rng, opt.move_rate);
    o << " -> " << (to_move ? "mv" : state());
    for (std::size_t i = 0; i < g; ++i) o << ", " << pick(rng, std::vector<std::string>{"0", "1", "*"});
    o << ", " << dir_name(rng, 0.5);
    for (std::size_t i = 0; i < g; ++i) o << ", " << dir_name(rng, 0.4);
    if (!to_move && chance(rng, opt.append_rate)) o << ", append \"" << random_string(rng, 1, 3, "01#.") << "\"";
    o << "\n";
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::string q = "q" + std::to_string(i);
    for (const char* sym : {"B", "T", "_", "#"})
      if (chance(rng, 0.6)) rule(q, sym, "*", true);
    if (g && chance(rng, 0.5)) rule(q, "*", "1", true);
    if (chance(rng, 0.9)) rule(q, "*", "*", true);
  }
  rule("mv", "*", "*", false);
  return o.str();
}

std::vector<ScriptEntry> random_instant_env(Rng& rng, std::size_t max_entries) {
  std::vector<ScriptEntry> out;
  std::size_t after = 0;
  for (std::size_t i = upto(rng, 0, max_entries); i > 0; --i) {
    if (chance(rng, 0.5)) after += upto(rng, 0, 2);
    out.push_back({after, 0, random_string(rng, 0, 4, "01#.")});
  }
  return out;
}

Skeleton random_skeleton(const GameShape& g, Rng& rng, std::size_t max_moves, bool make_illegal) {
  Skeleton sk;
  for (std::size_t i = 0; i < g.free_vars().size(); ++i) {
    sk.constants.push_back(upto(rng, 1, 31));
    sk.run.push_back(bot("#" + to_binary(sk.constants.back())));
  }
  const std::size_t fixed = sk.run.size();
  const std::size_t want = upto(rng, 1, max_moves);
  for (std::size_t step = 0; step < want; ++step) {
    bool placed = false;
    for (int attempt = 0; attempt < 12 && !placed; ++attempt) {
      const ChoiceSite& s = pick(rng, g.sites());
      Labmove lm{s.owner, s.address + "#" + random_numer(rng, 6)};
      Run next = sk.run;
      next.push_back(lm);
      if (legal_status_closed(g, next).legal) {
        sk.run = std::move(next);
        placed = true;
      }
    }
    if (!placed) break;
  }
  if (make_illegal) {
    std::vector<std::size_t> bots;
    for (std::size_t i = fixed; i < sk.run.size(); ++i)
      if (sk.run[i].label == Label::Bot) bots.push_back(i);
    std::size_t at = bots.empty() ? sk.run.size() : pick(rng, bots);
    std::vector<std::string> bad = {"2.#1", "0.0.0.#1", "#", "1.#11.", ""};
    for (const auto& s : g.sites()) {
      bad.push_back(s.address + "#01");
      if (s.owner == Label::Top) bad.push_back(s.address + "#1");
    }
    for (int attempt = 0; attempt < 32; ++attempt) {
      Run next(sk.run.begin(), sk.run.begin() + static_cast<std::ptrdiff_t>(at));
      next.push_back(bot(pick(rng, bad)));
      auto st = legal_status_closed(g, next);
      if (!st.legal && st.illegal_by == Label::Bot && st.illegal_at == at) {
        if (at < sk.run.size())
          sk.run[at] = next.back();
        else
          sk.run.push_back(next.back());
        sk.illegal_index = at;
        break;
      }
    }
  }
  return sk;
}

std::string waiter_machine_text(const Run& run, bool scribble, bool eager) {
  // One phase per labmove of `run`: a B phase scans past one B label, a T phase emits the move.
  std::ostringstream o;
  const std::size_t n = run.size();
  o << "states: ";
  for (std::size_t i = 0; i <= n; ++i) o << (i ? ", " : "") << "p" << i;
  for (std::size_t i = 0; i < n; ++i)
    if (run[i].label == Label::Top) o << ", e" << i << ", m" << i;
  o << "\nstart: p0\nmovestates: ";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i)
    if (run[i].label == Label::Top) {
      o << (first ? "" : ", ") << "m" << i;
      first = false;
    }
  o << "\nworktapes: " << (scribble ? 1 : 0) << "\n";
  if (scribble) o << "alphabet: 1\n";
  const std::string keep = scribble ? ", *" : "";
  const std::string still = scribble ? ", S" : "";
  for (std::size_t i = 0; i < n; ++i) {
    std::string p = "p" + std::to_string(i), next = "p" + std::to_string(i + 1);
    const bool split = eager && i + 1 < n && run[i + 1].label == Label::Top && run[i + 1].move.size() >= 2;
    if (run[i].label == Label::Bot) {
      o << "delta: " << p << ", B" << keep << " -> " << next << keep << ", R" << still;
      if (split) o << ", append \"" << run[i + 1].move.substr(0, run[i + 1].move.size() / 2) << "\"";
      o << "\n";
      o << "delta: " << p << ", _" << keep << " -> " << p << keep << ", S" << still << "\n";
      o << "delta: " << p << ", *" << keep << " -> " << p << (scribble ? ", 1" : "") << ", R"
        << (scribble ? ", R" : "") << "\n";
    } else {
      std::string e = "e" + std::to_string(i), m = "m" + std::to_string(i);
      const bool early = eager && i > 0 && run[i - 1].label == Label::Bot && run[i].move.size() >= 2;
      const std::string rest = early ? run[i].move.substr(run[i].move.size() / 2) : run[i].move;
      o << "delta: " << p << ", *" << keep << " -> " << e << keep << ", S" << still << ", append \"" << rest << "\"\n";
      o << "delta: " << e << ", *" << keep << " -> " << m << keep << ", S" << still << "\n";
      o << "delta: " << m << ", *" << keep << " -> " << next << keep << ", S" << still << "\n";
    }
  }
  o << "delta: p" << n << ", *" << keep << " -> p" << n << keep << ", S" << still << "\n";
  return o.str();
}

std::vector<ScriptEntry> waiter_env(const Run& run) {
  std::vector<ScriptEntry> out;
  std::size_t tops = 0;
  for (const auto& lm : run) {
    if (lm.label == Label::Top)
      ++tops;
    else
      out.push_back({tops, 0, lm.move});
  }
  return out;
}

Transcript record(const HpmSpec& spec, std::vector<ScriptEntry> env, std::size_t cycles) {
  Transcript tr;
  ScriptedEnvironment e(std::move(env));
  Configuration cfg = Configuration::initial(spec);
  tr.configs.push_back(cfg);
  tr.appends.emplace_back();
  for (std::size_t t = 0; t < cycles; ++t) {
    auto incoming = e.moves_at(t, tr.run);
    for (const auto& m : incoming) tr.run.push_back(bot(m));
    std::size_t before = cfg.buffer.size();
    auto out = step_in_place(spec, cfg, incoming);
    if (out) tr.run.push_back(top(*out));
    tr.appends.push_back(out || cfg.halted ? std::string() : cfg.buffer.substr(before));
    tr.configs.push_back(cfg);
  }
  return tr;
}

GlobalHistory history_of(const Run& r) {
  GlobalHistory h;
  for (const auto& lm : r) h.push_back({lm.label, lm.move.size()});
  return h;
}

char run_symbol(const Run& r, Label l, std::size_t k, std::size_t n) {
  for (const auto& lm : r)
    if (lm.label == l && k-- == 0) {
      if (n == 0 || n > lm.move.size()) throw std::out_of_range("symbol outside the move");
      return lm.move[n - 1];
    }
  throw std::out_of_range("move not in the run");
}

}  // namespace clarith::zoo
