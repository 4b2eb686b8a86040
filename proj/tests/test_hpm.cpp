#include <sstream>

#include "clarith/hpm.hpp"
#include "clarith/zoo.hpp"
#include "doctest.h"

using namespace clarith;

namespace {

const char* kAppender = R"(states: s
start: s
worktapes: 0
delta: s, * -> s, S, append "a"
)";

const char* kOneMove = R"(states: s, w, mv, done
start: s
movestates: mv
worktapes: 0
delta: s, * -> w, S, append "#1"
delta: w, * -> mv, S
delta: mv, * -> done, S
delta: done, * -> done, S
)";

// Writes three 1s on its work tape, then idles.
const char* kWriter = R"(states: a, b, c, d
start: a
worktapes: 1
alphabet: 1
delta: a, *, * -> b, 1, S, R
delta: b, *, * -> c, 1, S, R
delta: c, *, * -> d, 1, S, R
delta: d, *, * -> d, *, S, S
)";

// Walks right along the run tape forever.
const char* kReader = R"(states: r
start: r
worktapes: 0
delta: r, * -> r, R
)";

}  // namespace

TEST_CASE("machine spec parsing") {
  HpmSpec s = HpmSpec::parse_text(zoo::kCounterStep);
  CHECK(s.worktapes() == 1);
  CHECK(s.start() == "s0");
  CHECK(s.is_move_state("mv"));
  CHECK_FALSE(s.is_move_state("done"));
  CHECK(s.symbol_census() == 4);  // 0, 1, $ and blank
  CHECK(s.state_count() == 13);

  CHECK_THROWS_AS(HpmSpec::parse_text("states: s\nstart: t\nworktapes: 0\n"), HpmSyntaxError);
  CHECK_THROWS_AS(HpmSpec::parse_text("states: s\nstart: s\ncolour: red\n"), HpmSyntaxError);
  CHECK_THROWS_AS(HpmSpec::parse_text("states: s\nstart: s\nworktapes: 0\ndelta: s, * -> s, X\n"), HpmSyntaxError);
  // Entering a move state must not append.
  CHECK_THROWS_AS(HpmSpec::parse_text("states: s, m\nstart: s\nmovestates: m\nworktapes: 0\n"
                                      "delta: s, * -> m, S, append \"#\"\n"),
                  HpmSyntaxError);
  try {
    HpmSpec::parse_text("states: s\nstart: s\nworktapes: 0\n\ndelta: s, * -> q, S\n");
    FAIL("expected a syntax error");
  } catch (const HpmSyntaxError& e) {
    CHECK(e.line == 5);
  }
}

TEST_CASE("rule lookup prefers exact rules, then fewer wildcards") {
  HpmSpec s = HpmSpec::parse_text(zoo::kCounterStep);
  CHECK(s.find("s0", 'B', {kBlank})->to == "s1");
  CHECK(s.find("s0", kBlank, {kBlank})->to == "s0");
  CHECK(s.find("s0", kBlank, {kBlank})->run_dir == Dir::S);
  CHECK(s.find("s0", '#', {kBlank})->run_dir == Dir::R);
  CHECK(s.find("inc", 'x', {'1'})->to == "inc");
  CHECK(s.find("inc", 'x', {'0'})->to == "rew");
}

TEST_CASE("stepping") {
  auto idle = HpmSpec::parse_text(zoo::kSilent);
  Configuration c0 = Configuration::initial(idle);
  Configuration c1 = step(idle, c0, {});
  CHECK(c1.cycle == c0.cycle + 1);
  CHECK(c1.state == c0.state);
  CHECK(c1.run.empty());

  auto app = HpmSpec::parse_text(kAppender);
  Configuration a = Configuration::initial(app);
  for (int i = 0; i < 3; ++i) a = step(app, a, {});
  CHECK(a.buffer == "aaa");

  auto one = HpmSpec::parse_text(kOneMove);
  Configuration m = Configuration::initial(one);
  m = step(one, m, {});
  CHECK(m.buffer == "#1");
  std::optional<std::string> made = step_in_place(one, m, {});
  CHECK(made == std::optional<std::string>("#1"));
  CHECK(m.run == Run{top("#1")});
  CHECK(m.buffer.empty());
  CHECK(m.top_moves == 1);
  CHECK(m.move_log == std::vector<std::uint64_t>{1});  // 0-based index of the cycle that moved
  CHECK(m.run_tape == "T#1");
}

TEST_CASE("incoming moves land on the run tape before the transition") {
  auto rd = HpmSpec::parse_text(kReader);
  Configuration c = Configuration::initial(rd);
  c = step(rd, c, {"#10"});
  CHECK(c.run_tape == "B#10");
  CHECK(c.run_head == 1);
  for (int i = 0; i < 10; ++i) c = step(rd, c, {});
  // Clamped at the leftmost blank.
  CHECK(c.run_head == 4);
  c = step(rd, c, {"0.#1"});
  CHECK(c.run_tape == "B#10B0.#1");
  CHECK(c.run_head == 5);
}

TEST_CASE("play") {
  SUBCASE("silent against silent") {
    HpmStepper m(zoo::spec(zoo::kSilent));
    ScriptedEnvironment env({});
    PlayResult r = play(m, env);
    CHECK(r.run.empty());
    CHECK_FALSE(r.fuel_truncated);
  }
  SUBCASE("the worked scenario") {
    HpmStepper m(zoo::spec(zoo::kAppBMachine));
    ScriptedEnvironment env(zoo::env_entries(zoo::kAppBEnv));
    PlayResult r = play(m, env);
    CHECK(r.run == Run{bot("#1001"), bot("0.#10"), top("0.1.#1111111"), bot("1.#1"), top("1.1.#0")});
    CHECK_FALSE(r.fuel_truncated);
  }
  SUBCASE("no fuel") {
    HpmStepper m(zoo::spec(zoo::kAppBMachine));
    ScriptedEnvironment env(zoo::env_entries(zoo::kAppBEnv));
    PlayOptions po;
    po.fuel = 0;
    PlayResult r = play(m, env, po);
    CHECK(r.run.empty());
    CHECK(r.fuel_truncated);
    CHECK(r.cycles == 0);
  }
  SUBCASE("fuel runs out mid-play") {
    HpmStepper m(zoo::spec(kAppender));
    ScriptedEnvironment env({});
    PlayOptions po;
    po.fuel = 7;
    PlayResult r = play(m, env, po);
    CHECK(r.fuel_truncated);
    CHECK(r.cycles == 7);
    CHECK(m.buffer_length() == 7);
  }
}

TEST_CASE("scripted environment timing") {
  ScriptedEnvironment env({{0, 2, "#1"}, {1, 0, "0.#1"}});
  Run run;
  CHECK(env.moves_at(0, run).empty());
  CHECK(env.moves_at(1, run).empty());
  CHECK(env.moves_at(2, run) == std::vector<std::string>{"#1"});
  run.push_back(bot("#1"));
  CHECK(env.moves_at(3, run).empty());
  run.push_back(top("0.#0"));
  CHECK(env.moves_at(4, run) == std::vector<std::string>{"0.#1"});
  CHECK(env.exhausted());

  std::istringstream in("% comment\n0 0 #1001\n\n1 3 1.#1\n");
  auto parsed = ScriptedEnvironment::parse(in).entries();
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[1].after_top_moves == 1);
  CHECK(parsed[1].delay == 3);
  CHECK(parsed[1].move == "1.#1");
}

TEST_CASE("meter report") {
  Meter silent;
  for (std::uint64_t t = 0; t < 5; ++t) silent.on_cycle(t, 0);
  MeterReport s = meter_report(silent);
  CHECK(s.max_amplitude == 0);
  CHECK(s.max_spacecost == 0);
  CHECK(s.max_timecost == 0);

  Meter m;
  m.on_bottom("#1111", 0);
  m.on_cycle(0, 0);
  m.on_cycle(1, 2);
  m.on_top("#111", 1);
  MeterReport r = meter_report(m);
  CHECK(r.amplitude_by_background == std::map<std::size_t, std::size_t>{{4, 3}});
  CHECK(r.max_timecost == 2);
  CHECK(r.max_spacecost == 2);

  HpmStepper w(zoo::spec(kWriter));
  ScriptedEnvironment env({});
  PlayOptions po;
  po.fuel = 10;
  po.stop_when_quiet = false;
  CHECK(meter_report(play(w, env, po).meter).max_spacecost == 3);
}

TEST_CASE("timecost counts from the later of the last moves") {
  Meter m;
  m.on_top("#1", 4);      // 5 cycles: 0..4
  m.on_bottom("#11", 10);  // resets the count
  m.on_top("#1", 12);     // 3 cycles: 10..12
  REQUIRE(m.time().size() == 2);
  CHECK(m.time()[0].timecost == 5);
  CHECK(m.time()[1].timecost == 3);
  CHECK(m.time()[1].background == 2);
}

TEST_CASE("trace round trip") {
  HpmStepper m(zoo::spec(zoo::kAppBMachine));
  ScriptedEnvironment env(zoo::env_entries(zoo::kAppBEnv));
  PlayResult r = play(m, env);
  std::ostringstream once;
  write_trace(once, r.meter);
  std::istringstream in(once.str());
  Meter back = read_trace(in);
  std::ostringstream twice;
  write_trace(twice, back);
  CHECK(twice.str() == once.str());
  CHECK(meter_report_str(meter_report(back)) == meter_report_str(meter_report(r.meter)));
  std::istringstream bad("3 X 1\n");
  CHECK_THROWS(read_trace(bad));
}

TEST_CASE("sketches") {
  auto spec = HpmSpec::parse_text(zoo::kAppBMachine);
  TruncationContext raw;
  Sketch s0 = Sketch::initial(spec);
  SymbolSource nothing = [](Label, std::size_t, std::size_t) -> char { throw std::logic_error("no moves to read"); };
  Sketch s1 = sketch_advance(spec, s0, {}, nothing, raw);
  CHECK(s1 == sketch_of(step(spec, Configuration::initial(spec), {}), "", raw));
  CHECK(s1.state == "s0");
  CHECK(s1.run_head == 0);  // blank scanned, head stays

  GameShape h(parse_formula(zoo::kAppBFormula));
  TruncationContext cut{&h, Natural(4)};
  zoo::Transcript tr = zoo::record(spec, zoo::env_entries(zoo::kAppBEnv), 40);
  GlobalHistory hist = zoo::history_of(tr.run);
  SymbolSource source = [&tr](Label l, std::size_t k, std::size_t n) { return zoo::run_symbol(tr.run, l, k, n); };
  Sketch s = Sketch::initial(spec);
  bool saw_cut = false;
  for (std::size_t t = 0; t < 40; ++t) {
    CHECK(s == sketch_of(tr.configs[t], tr.appends[t], cut));
    CHECK(s.buffer_length >= s.last_append.size());
    if (s.truncation.move == "0.1.#1111") saw_cut = true;
    s = sketch_advance(spec, s, hist, source, cut);
  }
  CHECK(saw_cut);
}

TEST_CASE("property: sketches advance in step with full configurations") {
  for (std::uint64_t id = 0; id < 40; ++id) {
    auto rng = zoo::case_rng(3, id);
    HpmSpec spec = HpmSpec::parse_text(zoo::random_machine_text(rng));
    zoo::Transcript tr = zoo::record(spec, zoo::random_instant_env(rng), 60);
    GlobalHistory hist = zoo::history_of(tr.run);
    SymbolSource source = [&tr](Label l, std::size_t k, std::size_t n) { return zoo::run_symbol(tr.run, l, k, n); };
    TruncationContext raw;
    Sketch s = Sketch::initial(spec);
    for (std::size_t t = 0; t <= 60; ++t) {
      REQUIRE(s == sketch_of(tr.configs[t], tr.appends[t], raw));
      if (spec.is_move_state(tr.configs[t].state)) CHECK(tr.configs[t].buffer.empty());
      CHECK(tr.configs[t].run_head <= tr.configs[t].run_tape.size());
      if (t < 60) s = sketch_advance(spec, s, hist, source, raw);
    }
  }
}

TEST_CASE("steppers clone independently") {
  HpmStepper a(zoo::spec(kAppender));
  a.cycle();
  StepperPtr b = a.clone();
  b->cycle();
  CHECK(a.buffer_length() == 1);
  CHECK(b->buffer_length() == 2);
  b->reset();
  CHECK(b->buffer_length() == 0);

  ScriptedStepper echo([](const Run& r) -> std::optional<std::string> {
    if (!r.empty() && r.back().label == Label::Bot) return "1." + r.back().move;
    return std::nullopt;
  });
  CHECK(echo.is_stationary());
  CHECK(echo.step({"#1"}) == std::optional<std::string>("1.#1"));
  CHECK(echo.run() == Run{bot("#1"), top("1.#1")});
}
