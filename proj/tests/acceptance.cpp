// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "clarith/oracle.hpp"
#include "clarith/wrappers.hpp"
#include "clarith/zoo.hpp"

using namespace clarith;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

Verdict worked_run() {
  auto t0 = std::chrono::steady_clock::now();
  ReasonWrapper k(zoo::spec(zoo::kAppBMachine), parse_formula(zoo::kAppBFormula));
  ScriptedEnvironment env(zoo::env_entries(zoo::kAppBEnv));
  PlayOptions po;
  po.fuel = 100000;
  PlayResult r = play(k, env, po);
  double s = seconds_since(t0);
  Run want{bot("#1001"), bot("0.#10"), top("0.1.#1111"), bot("1.#1"), top("1.1.#0")};
  Verdict v;
  v.ok = r.run == want && s < 1.0;
  v.detail = "run " + run_str(r.run) + " in " + fmt_seconds(s);
  return v;
}

Verdict worked_truncation() {
  GameShape g(parse_formula(zoo::kAppBFormula));
  std::string t = truncate("0.1.#1111111", g, {Natural(9)});
  return {t == "0.1.#1111", "truncate(0.1.#1111111) = " + t};
}

// Runs a suite with its default case count and checks it against the criterion's floor and time limit.
Verdict suite(const std::string& name, std::size_t min_cases, double limit,
              std::function<std::string(const oracle::Report&)> extra = nullptr) {
  const oracle::Suite* s = oracle::find_suite(name);
  if (!s) return {false, "no suite " + name};
  oracle::Report r = oracle::run_parallel(*s);
  std::ostringstream o;
  o << r.cases << " cases, " << r.failures << " failures, " << fmt_seconds(r.seconds);
  bool ok = r.ok() && r.cases >= min_cases && (limit <= 0 || r.seconds < limit);
  if (extra) {
    std::string e = extra(r);
    if (!e.empty()) {
      ok = false;
      o << "; " << e;
    }
  }
  if (!r.ok()) o << "\n  first counterexample (case " << *r.first_failure << "): " << r.first_detail;
  return {ok, o.str()};
}

std::string tally_zero(const oracle::Report& r, const std::string& key) {
  auto it = r.tally.find(key);
  if (it == r.tally.end()) return "tally " + key + " missing";
  return it->second == 0 ? "" : key + " = " + std::to_string(it->second);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {"worked example real run", worked_run},
      {"worked example truncation", worked_truncation},
      {"fetch symbol oracle", [] { return suite("fetch", 1000, 30); }},
      {"recursion index discipline",
       [] { return suite("probe", 1, 0, [](const oracle::Report& r) { return tally_zero(r, "probe_violations"); }); }},
      {"sim extension invariance", [] { return suite("sim", 500, 60); }},
      {"induction structural invariants", [] { return suite("counter", 8, 60); }},
      {"comprehension exhaustive oracle", [] { return suite("comprehension", 478, 60); }},
      {"windup oracle", [] { return suite("windup", 1, 0); }},
      {"vasa wrapper resources", [] { return suite("vasa", 1, 0); }},
      {"sketch coherence", [] { return suite("sketch", 1, 0); }},
  };
  int failed = 0, i = 0;
  for (const auto& c : criteria) {
    ++i;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", v.ok ? "PASS" : "FAIL", i, c.name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.ok;
  }
  return failed == 0 ? 0 : 1;
}
