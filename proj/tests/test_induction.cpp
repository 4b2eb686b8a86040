#include <set>
#include <sstream>
#include <tuple>

#include "clarith/induction.hpp"
#include "clarith/zoo.hpp"
#include "doctest.h"

using namespace clarith;

namespace {

Organ org(std::vector<std::string> p, unsigned scale) { return Organ{std::move(p), Natural(scale)}; }
Organ blank(unsigned scale = 1) { return org({}, scale); }

// Moves "m" in its third cycle, then idles.
const char* kLateMover = R"(states: s, a, w, mv, done
start: s
movestates: mv
worktapes: 0
delta: s, * -> a, S
delta: a, * -> w, S, append "m"
delta: w, * -> mv, S
delta: mv, * -> done, S
delta: done, * -> done, S
)";

SimContext context(std::size_t k, std::function<StepperPtr()> h) {
  return SimContext{k, [h](std::size_t) { return h(); }};
}

SimContext hpm_context(std::size_t k, const char* text) {
  auto s = zoo::spec(text);
  return context(k, [s] { return std::make_unique<HpmStepper>(s); });
}

// Asks the antecedent once, with "0.#1", and never answers.
SimContext echo_context() {
  return context(1, [] {
    return std::make_unique<ScriptedStepper>([](const Run& r) -> std::optional<std::string> {
      for (const auto& lm : r)
        if (lm.label == Label::Top) return std::nullopt;
      return std::string("0.#1");
    });
  });
}

struct CounterRun {
  std::unique_ptr<InductionSolver> m;
  PlayResult r;
};

CounterRun counter(const std::string& k_move, const std::string& bound = "8") {
  CounterRun c;
  c.m = std::make_unique<InductionSolver>(std::make_unique<HpmStepper>(zoo::spec(zoo::kCounterBase)),
                                          std::make_unique<HpmStepper>(zoo::spec(zoo::kCounterStep)),
                                          parse_formula(zoo::kCounterFormula), parse_bound(bound));
  ScriptedEnvironment env({ScriptEntry{0, 0, k_move}});
  PlayOptions po;
  po.fuel = 5000000;
  c.r = play(*c.m, env, po);
  return c;
}

Run top_part(const Run& r) { return project(r, Projection::Top); }

}  // namespace

TEST_CASE("bodies") {
  Organ o1 = org({"a"}, 1), o2 = org({"b"}, 5), o3 = org({}, 2);
  BodyRelation r = body_relate({o1, o2}, {o1, o2, o3});
  CHECK(r.extension);
  CHECK_FALSE(r.restriction);
  CHECK(r.consistent);
  r = body_relate({o1, o2, o3}, {o1, o2});
  CHECK(r.restriction);
  CHECK_FALSE(r.extension);
  CHECK_FALSE(body_relate({o1}, {o2}).consistent);
  CHECK(body_relate({o1}, {o1}).extension);
  CHECK(body_relate({o1}, {o1}).restriction);

  CHECK(body_project({o1, o2, o3}, Parity::Odd) == Body{o1, o3});
  CHECK(body_project({o1, o2, o3}, Parity::Even) == Body{o2});

  CHECK(body_run({o1, o2}) == Run{bot("a"), top("b")});
  CHECK(body_run({}).empty());
  CHECK(body_run({org({"x", "y"}, 3)}) == Run{bot("x"), bot("y")});
  CHECK(body_str({o1, o3}) == "(a;1)(;2)");
}

TEST_CASE("aggregation validity") {
  CHECK_FALSE(validate_aggregation({{3, {blank()}}}, 3));
  auto bad = validate_aggregation({{1, {}}, {3, {blank()}}}, 3);
  REQUIRE(bad);
  CHECK(bad->rfind("(vi)", 0) == 0);
  bad = validate_aggregation({{1, {blank(), blank()}}, {2, {blank(), blank()}}, {3, {blank()}}}, 3);
  REQUIRE(bad);
  CHECK(bad->rfind("(iv)", 0) == 0);
  bad = validate_aggregation({{2, {blank()}}}, 3);
  REQUIRE(bad);
  CHECK(bad->rfind("(i)", 0) == 0);
  bad = validate_aggregation({{1, {blank()}}, {2, {blank(), blank()}}, {3, {blank()}}}, 3);
  REQUIRE(bad);
  CHECK(bad->rfind("(iii)", 0) == 0);
  bad = validate_aggregation({{1, {blank(), blank(), blank()}}, {2, {blank()}}, {3, {blank()}}}, 3);
  REQUIRE(bad);
  CHECK(bad->rfind("(v)", 0) == 0);
}

TEST_CASE("central triple") {
  Body master{blank()};
  CentralTriple t = central_triple({{4, master}});
  CHECK(t.left.empty());
  CHECK(t.right == master);
  CHECK(t.n == 4);

  Body b2{org({"a"}, 2)}, b3{org({"b"}, 3)};
  t = central_triple({{2, b2}, {3, b3}});
  CHECK(t.left.empty());
  CHECK(t.right == b2);
  CHECK(t.n == 2);

  Body b2e{org({"a"}, 2), org({"c"}, 2)};
  t = central_triple({{2, b2e}, {3, b3}});
  CHECK(t.left == b2e);
  CHECK(t.right == b3);
  CHECK(t.n == 3);

  CHECK_THROWS_AS(central_triple({{2, b2e}}), std::invalid_argument);
}

TEST_CASE("sim") {
  SUBCASE("silent premise") {
    SimResult r = sim(hpm_context(0, zoo::kSilent), {}, {blank(5)}, 0);
    CHECK(r.s == SignedOrgan{false, blank(5)});
  }
  SUBCASE("a move in the third step") {
    SimResult r = sim(hpm_context(0, kLateMover), {}, {blank(10)}, 0);
    CHECK(r.s == SignedOrgan{true, org({"m"}, 10)});
    // Too short a pass misses it.
    CHECK(sim(hpm_context(0, kLateMover), {}, {blank(2)}, 0).s == SignedOrgan{false, blank(2)});
  }
  SUBCASE("antecedent requests become the negative payload") {
    SimResult r = sim(echo_context(), {}, {blank(4)}, 1);
    CHECK(r.s == SignedOrgan{false, org({"#1"}, 4)});
  }
  SUBCASE("contract") {
    CHECK_THROWS_AS(sim(hpm_context(0, zoo::kSilent), {}, {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(sim(hpm_context(0, zoo::kSilent), {blank()}, {blank()}, 0), std::invalid_argument);
    CHECK_THROWS_AS(sim(hpm_context(1, zoo::kSilent), {}, {blank()}, 2), std::invalid_argument);
  }
  SUBCASE("the resumable form matches") {
    Sim s(hpm_context(0, kLateMover), {}, {blank(10)}, 0);
    std::size_t calls = 0;
    while (!s.done()) {
      s.advance();
      ++calls;
    }
    CHECK(s.result().s == SignedOrgan{true, org({"m"}, 10)});
    CHECK(calls >= 3);
  }
}

TEST_CASE("sim views and saturation") {
  SimViews v = sim_views(hpm_context(0, zoo::kSilent), {}, {blank(5)}, 0);
  CHECK(v.bullet == SignedOrgan{false, blank(5)});
  CHECK(v.left.empty());
  CHECK(v.right == Body{blank(5)});

  v = sim_views(hpm_context(0, kLateMover), {}, {blank(10)}, 0);
  CHECK(v.bullet.positive);
  CHECK(v.right == Body{blank(10), org({"m"}, 10)});

  CHECK(is_saturated(hpm_context(0, zoo::kSilent), {}, {blank(5)}, 0));
  CHECK(is_saturated(hpm_context(0, kLateMover), {}, {blank(10)}, 0));
  CHECK_FALSE(is_saturated(hpm_context(0, zoo::kSilent), {}, {blank(1), blank(2), blank(3)}, 0));
}

TEST_CASE("induction solver on the counter family") {
  SUBCASE("k = 3") {
    CounterRun c = counter("#11");
    CHECK_FALSE(c.r.fuel_truncated);
    REQUIRE_FALSE(c.r.run.empty());
    CHECK(c.r.run.back() == top("1.#11"));
    CHECK(c.m->winner() == Label::Top);
    CHECK_FALSE(c.m->retired());
    REQUIRE(c.m->params());
    CHECK(c.m->params()->k == 3);
  }
  SUBCASE("k = 0 replays the base solver") {
    CounterRun c = counter("#0");
    CHECK(top_part(c.r.run) == Run{top("1.#0")});
    CHECK(c.m->winner() == Label::Top);
    CHECK(c.m->trace().empty());
  }
  SUBCASE("k above the bound retires") {
    CounterRun c = counter("#1001");
    CHECK(c.m->retired());
    CHECK(top_part(c.r.run).empty());
    CHECK(c.m->winner() == Label::Top);
  }
  SUBCASE("the bound is read from the constants") {
    CounterRun c = counter("#11", "2");
    CHECK(c.m->retired());
    CHECK(c.m->winner() == Label::Top);
  }
}

TEST_CASE("instantiation") {
  FormulaPtr f = parse_formula(zoo::kCounterFormula);
  FormulaPtr f0 = instantiate(f, "x", Term::constant("0"));
  CHECK(free_variables(f0).empty());
  // x in a bound has no exact bound expression for its successor.
  CHECK_THROWS_AS(induction_step_game(f, "x"), std::invalid_argument);
  FormulaPtr step = induction_step_game(parse_formula("ade v [|y|] (v = x)"), "x");
  CHECK(step->kind == FKind::Implies);
  CHECK(free_variables(step) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("diagnostics on counter traces") {
  for (const char* k : {"#1", "#10", "#11"}) {
    CAPTURE(k);
    CounterRun c = counter(k);
    const auto& trace = c.m->trace();
    REQUIRE_FALSE(trace.empty());
    DiagnosticParams dp = diagnostic_params(*c.m->params(), trace);
    Diagnostics d = diagnostics(trace, dp);
    CHECK(d.rank.size() == trace.size());
    CHECK(d.rank_increasing);
    CHECK(d.violations.empty());
    REQUIRE(d.classification.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
      bool locking = d.classification[i].find("locking") != std::string::npos;
      CHECK(locking == (trace[i].kind == MainCase::Sub212));
    }
    // Every top move of the consequent comes from a locking iteration.
    std::size_t locking = 0;
    for (const auto& rec : trace) locking += rec.kind == MainCase::Sub212;
    CHECK(locking >= 1);

    // At termination every final body has odd size and ends on the master scale.
    const Body& master = trace.back().e.back().body;
    for (const auto& [n, body] : d.b_h) {
      CAPTURE(n);
      REQUIRE_FALSE(body.empty());
      CHECK(body.size() % 2 == 1);
      CHECK(body.back().scale == master.back().scale);
    }

    Diagnostics one = diagnostics({trace.front()}, dp);
    CHECK(one.rank.size() == 1);
    CHECK(one.rank_increasing);
    CHECK(diagnostics_str(d, trace).find("rank") != std::string::npos);
  }
}

TEST_CASE("induction trace round trip") {
  CounterRun c = counter("#11");
  InductionTrace t{diagnostic_params(*c.m->params(), c.m->trace()), c.m->trace()};
  std::ostringstream a;
  write_induction_trace(a, t);
  std::istringstream in(a.str());
  InductionTrace back = read_induction_trace(in);
  CHECK(back.records.size() == t.records.size());
  std::ostringstream b;
  write_induction_trace(b, back);
  CHECK(a.str() == b.str());
  Diagnostics d1 = diagnostics(t.records, t.params), d2 = diagnostics(back.records, back.params);
  CHECK(d1.rank == d2.rank);
  CHECK(d1.classification == d2.classification);

  std::istringstream junk("params k=x\n");
  CHECK_THROWS_AS(read_induction_trace(junk), std::runtime_error);
}

TEST_CASE("property: a repeated configuration under a silent adversary never moves again") {
  std::size_t repeats = 0;
  for (std::uint64_t id = 0; id < 300; ++id) {
    auto rng = zoo::case_rng(31, id);
    auto spec = zoo::spec(zoo::random_machine_text(rng));
    Configuration cfg = Configuration::initial(*spec);
    using Key = std::tuple<std::string, std::vector<std::pair<std::string, std::size_t>>, std::string, std::size_t,
                           std::string>;
    std::set<Key> seen;
    std::optional<std::uint64_t> repeat_at;
    for (std::uint64_t t = 0; t < 400; ++t) {
      std::vector<std::pair<std::string, std::size_t>> tapes;
      for (const auto& w : cfg.work) tapes.emplace_back(w.trimmed(), w.head);
      Key key{cfg.state, tapes, cfg.run_tape, cfg.run_head, cfg.buffer};
      if (!repeat_at && !seen.insert(key).second) repeat_at = t;
      auto mv = step_in_place(*spec, cfg, {});
      if (repeat_at) {
        CAPTURE(id);
        CHECK_FALSE(mv);
      }
    }
    repeats += repeat_at.has_value();
  }
  CHECK(repeats > 100);
}
