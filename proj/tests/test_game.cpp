#include <algorithm>
#include <functional>

#include "clarith/game.hpp"
#include "clarith/zoo.hpp"
#include "doctest.h"

using namespace clarith;

namespace {

// The worked example's run after the constant move, bottom's choices first.
Run amind1() { return {bot("0.#10"), top("0.1.#1111111"), bot("1.#1"), top("1.1.#0")}; }

Semiposition open_top(std::vector<std::string> moves) {
  Semiposition s;
  for (auto& m : moves) s.moves.push_back(top(std::move(m)));
  return s;
}

// p(a,b): a+b odd; q(a,b): a <= b.
std::optional<bool> toy_atoms(const std::string& rel, const std::vector<Natural>& args) {
  if (rel == "p") return args.size() == 1 ? args[0] % 2 == 1 : (args[0] + args[1]) % 2 == 1;
  if (rel == "q") return args.size() == 1 ? args[0] == 0 : args[0] <= args[1];
  return std::nullopt;
}

// Legal runs that resolve some sites, each once, in any order, with numers from `numers`.
void legal_runs(const GameShape& g, const std::vector<std::string>& numers, Run& cur, std::vector<bool>& used,
                std::vector<Run>& out) {
  out.push_back(cur);
  for (std::size_t s = 0; s < g.sites().size(); ++s) {
    if (used[s]) continue;
    bool parent_done = true;
    for (std::size_t a : g.lineage(s))
      if (a != s && !used[a]) parent_done = false;
    if (!parent_done) continue;
    used[s] = true;
    for (const auto& n : numers) {
      cur.push_back({g.sites()[s].owner, g.sites()[s].address + "#" + n});
      legal_runs(g, numers, cur, used, out);
      cur.pop_back();
    }
    used[s] = false;
  }
}

// Every interleaving of the top and bottom subsequences of r.
void interleavings(const Run& tops, const Run& bots, std::size_t i, std::size_t j, Run& cur, std::vector<Run>& out) {
  if (i == tops.size() && j == bots.size()) {
    out.push_back(cur);
    return;
  }
  if (i < tops.size()) {
    cur.push_back(tops[i]);
    interleavings(tops, bots, i + 1, j, cur, out);
    cur.pop_back();
  }
  if (j < bots.size()) {
    cur.push_back(bots[j]);
    interleavings(tops, bots, i, j + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST_CASE("numer and magnitude") {
  CHECK(numer_and_magnitude("0.1.#1111111").numer == "1111111");
  CHECK(numer_and_magnitude("0.1.#1111111").magnitude == 7);
  CHECK(numer_and_magnitude("1.#1").numer == "1");
  CHECK(numer_and_magnitude("1.#1").magnitude == 1);
  CHECK(numer_and_magnitude("done").numer.empty());
  CHECK(numer_and_magnitude("done").magnitude == 0);
  CHECK(numer_and_magnitude("#").magnitude == 0);
}

TEST_CASE("move view reassembles the move") {
  for (const char* m : {"0.1.#1111111", "1.#", "done", "0.x#1", "#1001", ""}) CHECK(view_move(m).str() == m);
  MoveView v = view_move("0.1.#101");
  CHECK(v.address == std::vector<std::string>{"0.", "1."});
  CHECK(v.numeric);
  CHECK(v.numer == "101");
}

TEST_CASE("projections") {
  CHECK(project({bot("0.#10"), top("1.#0")}, Projection::Sub1) == Run{top("#0")});
  CHECK(project(amind1(), Projection::Sub0) == Run{bot("#10"), top("1.#1111111")});
  CHECK(project(amind1(), Projection::Top) == Run{top("0.1.#1111111"), top("1.1.#0")});
  CHECK(project(amind1(), Projection::Bot) == Run{bot("0.#10"), bot("1.#1")});
  CHECK(project(amind1(), Projection::Negate)[0] == top("0.#10"));
}

TEST_CASE("property: negation is an involution") {
  auto rng = zoo::case_rng(5, 0);
  for (const auto& text : zoo::zoo_formulas()) {
    GameShape g(parse_formula(text));
    for (int i = 0; i < 30; ++i) {
      Run r = zoo::random_skeleton(g, rng, 6, i % 3 == 0).run;
      CHECK(project(project(r, Projection::Negate), Projection::Negate) == r);
    }
  }
}

TEST_CASE("legal status") {
  FormulaPtr f = parse_formula("ade v [|x|] p(v)");
  CHECK(legal_status(f, {3}, {}).legal);
  CHECK(legal_status(f, {3}, {top("#101")}).legal);
  LegalStatus twice = legal_status(f, {3}, {top("#101"), top("#101")});
  CHECK_FALSE(twice.legal);
  CHECK(twice.illegal_at == std::optional<std::size_t>(1));
  CHECK(twice.illegal_by == std::optional<Label>(Label::Top));
  CHECK_FALSE(twice.top_quasilegal);
  CHECK(twice.bot_quasilegal);

  GameShape h(parse_formula(zoo::kAppBFormula));
  CHECK(legal_status(h, amind1()).legal);
  LegalStatus wrong = legal_status(h, {bot("2.#1"), top("0.1.#1")});
  CHECK_FALSE(wrong.legal);
  CHECK(wrong.illegal_by == std::optional<Label>(Label::Bot));
  CHECK_FALSE(wrong.bot_quasilegal);
  // Top's inner move needs bottom's outer move in a legal run, not in its own projection.
  CHECK(wrong.top_quasilegal);
}

TEST_CASE("legal status by brute force on legal runs") {
  // Any run built site by site, each once and parents first, is legal; doubling a move is not.
  for (const auto& text : zoo::zoo_formulas()) {
    GameShape g(parse_formula(text));
    std::vector<Run> runs;
    Run cur;
    std::vector<bool> used(g.sites().size(), false);
    legal_runs(g, {"0", "11"}, cur, used, runs);
    for (const Run& r : runs) {
      INFO(text << " " << run_str(r));
      CHECK(legal_status(g, r).legal);
      if (r.empty()) continue;
      Run doubled = r;
      doubled.push_back(r.back());
      CHECK_FALSE(legal_status(g, doubled).legal);
      CHECK(legal_status(g, doubled).illegal_at == std::optional<std::size_t>(r.size()));
    }
  }
}

TEST_CASE("winning") {
  FormulaPtr f = parse_formula("ade v [|x|+1] (v = x)");
  CHECK(wins(f, {0}, {top("#")}) == Label::Top);
  CHECK(wins(f, {0}, {}) == Label::Bot);
  CHECK(wins(f, {5}, {top("#101")}) == Label::Top);
  CHECK(wins(f, {5}, {top("#100")}) == Label::Bot);
  // Right value but too long for the bound.
  CHECK(wins(parse_formula("ade v [|x|] (v <= v)"), {1}, {top("#111")}) == Label::Bot);
  CHECK(wins(parse_formula("ada y [|x|] p(y)"), {3}, {}) == Label::Top);
  CHECK(wins(parse_formula("ada y [|x|] (y = x)"), {3}, {bot("#111")}) == Label::Top);
  CHECK(wins(parse_formula("ada y [|x|] (y = x)"), {3}, {bot("#10")}) == Label::Bot);
  CHECK_THROWS_AS(wins(f, {0}, {top("#"), top("#")}), std::domain_error);
}

TEST_CASE("winning the worked example") {
  GameShape h(parse_formula(zoo::kAppBFormula));
  std::map<std::string, Natural> c{{"x", 9}};
  // z = 127 is oversized for |x| = 4, so the left disjunct is lost; v = 0 <= u = 1 wins the right.
  AtomEvaluator atoms = [](const std::string& rel, const std::vector<Natural>& a) -> std::optional<bool> {
    if (rel == "p") return a[0] == a[1];
    if (rel == "q") return a[1] <= a[0];
    return std::nullopt;
  };
  CHECK(wins(h, c, amind1(), atoms) == Label::Top);
  Run lost = amind1();
  lost.back() = top("1.1.#11");
  CHECK(wins(h, c, lost, atoms) == Label::Bot);
}

TEST_CASE("prudentization") {
  CHECK(prudentize("0.1.#1111111", Natural(4)) == "0.1.#1111");
  CHECK(prudentize("0.1.#11", Natural(4)) == "0.1.#11");
  CHECK(prudentize("#101", Natural(0)) == "#");
  CHECK(prudentize("done", Natural(0)) == "done");
  GameShape h(parse_formula(zoo::kAppBFormula));
  CHECK(prudentize("0.1.#1111111", h, {9}) == "0.1.#1111");
}

TEST_CASE("property: prudentization is idempotent and prudent") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 500; ++i) {
    std::string numer;
    for (std::size_t k = rng() % 12; k > 0; --k) numer += "01"[rng() % 2];
    std::string m = std::vector<std::string>{"", "0.", "1.1."}[rng() % 3] + "#" + numer;
    Natural t = rng() % 10;
    std::string p = prudentize(m, t);
    CHECK(prudentize(p, t) == p);
    CHECK(numer_and_magnitude(p).magnitude <= t);
    CHECK(m.compare(0, p.size(), p) == 0);
  }
}

TEST_CASE("truncation") {
  GameShape h(parse_formula(zoo::kAppBFormula));
  CHECK(truncate("0.1.#1111111", h, {9}) == "0.1.#1111");
  CHECK(truncate("0.1.#11", h, {9}) == "0.1.#11");
  CHECK(truncate("2.#1", h, {9}).empty());
  CHECK(truncate("0.1.x#1", h, {9}) == "0.1.");
  Truncation t = truncate_move("0.1.#1111111", h, Natural(4));
  CHECK(t.move == "0.1.#1111");
  CHECK(t.frozen);
  CHECK_FALSE(truncate_move("0.1.#11", h, Natural(4)).frozen);
}

TEST_CASE("property: truncation is a prudent quasilegal prefix and extends incrementally") {
  std::mt19937_64 rng(43);
  const std::string keys = "#01.x";
  for (const auto& text : zoo::zoo_formulas()) {
    GameShape g(parse_formula(text));
    for (int i = 0; i < 200; ++i) {
      std::string m;
      for (std::size_t k = rng() % 12; k > 0; --k) m += keys[rng() % keys.size()];
      Natural threshold = rng() % 5;
      Truncation t = truncate_move(m, g, threshold);
      INFO(text << " " << m);
      CHECK(m.compare(0, t.move.size(), t.move) == 0);
      CHECK((t.move.empty() || g.is_move_prefix(Label::Top, t.move)));
      CHECK(prudentize(t.move, threshold) == t.move);
      std::size_t cut = rng() % (m.size() + 1);
      Truncation stepped = extend_truncation(truncate_move(m.substr(0, cut), g, threshold), m.substr(cut), g, threshold);
      CHECK(stepped == t);
    }
  }
}

TEST_CASE("semipositions") {
  GameShape h(parse_formula(zoo::kAppBFormula));
  Semiposition full{{bot("#1001"), bot("0.#10"), top("0.1.#1111111")}, true};
  auto a = analyze_semiposition(full, h);
  CHECK(a.complete);
  CHECK(a.legitimate);
  CHECK(a.quasilegitimate);
  CHECK(a.compression == "B#* B0.#* T0.1.#* _");

  Semiposition open{{bot("#1001"), bot("0.#10"), top("0.1.#11")}, false};
  CHECK(analyze_semiposition(open, h).quasilegitimate);
  CHECK_FALSE(analyze_semiposition(open, h).complete);

  Semiposition bad{{bot("#1001"), bot("2.#1")}, true};
  CHECK_FALSE(analyze_semiposition(bad, h).quasilegitimate);
  CHECK_FALSE(analyze_semiposition(bad, h).legitimate);

  // Quasilegitimate but not legitimate: top answers a choice bottom never made.
  Semiposition ahead{{bot("#1001"), top("0.1.#1")}, true};
  CHECK(analyze_semiposition(ahead, h).quasilegitimate);
  CHECK_FALSE(analyze_semiposition(ahead, h).legitimate);
}

TEST_CASE("windup") {
  GameShape one(parse_formula("ade v [|x|] p(v)"));
  CHECK(windup(open_top({"#1"}), one).empty());
  GameShape two(parse_formula("ade a [|x|] p(a) v ade b [|x|] q(b)"));
  CHECK(windup(open_top({"0."}), two) == "#");
  CHECK(windup(open_top({"0.#"}), two).empty());
  CHECK(windup(open_top({""}), two) == "0.#");
  CHECK(windup(open_top({"0.#1", "1"}), two) == ".#");
  CHECK_THROWS_AS(windup(Semiposition{{top("#1")}, true}, one), std::invalid_argument);
  CHECK_THROWS_AS(windup(open_top({"2."}), two), std::invalid_argument);
  CHECK_THROWS_AS(windup(open_top({"0.#1", "0."}), two), std::invalid_argument);
}

TEST_CASE("keyboard order") {
  CHECK(keyboard_less("#", "0"));
  CHECK(keyboard_less("0", "1"));
  CHECK(keyboard_less("1", "."));
  CHECK(keyboard_less("0.", "0.#"));
  CHECK_FALSE(keyboard_less("0.#", "0."));
}

TEST_CASE("top delays") {
  Run omega{top("a"), bot("b")};
  CHECK(is_p_delay(omega, omega));
  CHECK(is_p_delay({bot("b"), top("a")}, omega));
  CHECK_FALSE(is_p_delay({top("a"), bot("b")}, {bot("b"), top("a")}));
  CHECK_FALSE(is_p_delay({top("a")}, omega));
}

TEST_CASE("property: delaying top's moves keeps a top-won run top-won") {
  std::size_t won = 0, delays = 0;
  for (const auto& text : zoo::two_unit_formulas()) {
    FormulaPtr f = parse_formula(text);
    GameShape g(f);
    std::vector<Run> runs;
    Run cur;
    std::vector<bool> used(g.sites().size(), false);
    legal_runs(g, {"0", "1", "10", "11", "111"}, cur, used, runs);
    for (unsigned xv = 0; xv < 4; ++xv) {
      std::map<std::string, Natural> c;
      for (const auto& v : g.free_vars()) c[v] = v == "x" ? Natural(xv) : Natural(2);
      for (const Run& omega : runs) {
        if (wins(g, c, omega, toy_atoms) != Label::Top) continue;
        ++won;
        std::vector<Run> all;
        Run scratch;
        interleavings(project(omega, Projection::Top), project(omega, Projection::Bot), 0, 0, scratch, all);
        for (const Run& delta : all) {
          if (!is_p_delay(delta, omega) || !legal_status(g, delta).legal) continue;
          ++delays;
          INFO(text << " x=" << xv << " omega=" << run_str(omega) << " delta=" << run_str(delta));
          CHECK(wins(g, c, delta, toy_atoms) == Label::Top);
        }
      }
    }
  }
  CHECK(won > 100);
  CHECK(delays > won);
}
