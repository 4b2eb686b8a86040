// clarith: command-line harness over the library.
//
// Exit codes: 0 ok, 1 file or input error, 2 usage error, 3 property violation.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "clarith/comprehension.hpp"
#include "clarith/induction.hpp"
#include "clarith/oracle.hpp"
#include "clarith/wrappers.hpp"

using namespace clarith;

namespace {

constexpr int kFileError = 1;
constexpr int kUsage = 2;
constexpr int kViolation = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

// Formula files: one formula, possibly over several lines; '%' starts a comment line.
FormulaPtr load_formula(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line, text;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    text += line + " ";
  }
  try {
    return parse_formula(text);
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::shared_ptr<const HpmSpec> load_machine(const std::string& path) {
  std::string text = slurp(path);
  try {
    return std::make_shared<const HpmSpec>(HpmSpec::parse_text(text));
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Reads bottom moves from a terminal: prompts at the start and after every top move.
class ReplEnvironment : public Environment {
 public:
  std::vector<std::string> moves_at(std::uint64_t t, const Run& run) override {
    std::size_t tops = 0;
    for (const auto& lm : run) tops += lm.label == Label::Top;
    if (done_ || (t > 0 && tops == seen_tops_)) return {};
    seen_tops_ = tops;
    std::cout << "run " << run_str(run) << "\nbottom moves (space separated; '.' to stop)> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) {
      done_ = true;
      return {};
    }
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string m; in >> m;) {
      if (m == ".") {
        done_ = true;
        break;
      }
      out.push_back(m);
    }
    return out;
  }
  bool exhausted() const override { return done_; }

 private:
  std::size_t seen_tops_ = 0;
  bool done_ = false;
};

// --env takes "repl", a list of assignments "a=5,b=2" (constants for the given
// variables, in order), or the path of a script file.
std::unique_ptr<Environment> make_env(const std::string& spec, const std::vector<std::string>& vars,
                                      const std::map<std::string, std::string>& aliases = {}) {
  if (spec.empty()) return std::make_unique<ScriptedEnvironment>(std::vector<ScriptEntry>{});
  if (spec == "repl") return std::make_unique<ReplEnvironment>();
  if (spec.find('=') == std::string::npos) {
    std::istringstream in(slurp(spec));
    try {
      return std::make_unique<ScriptedEnvironment>(ScriptedEnvironment::parse(in));
    } catch (const std::exception& e) {
      throw InputError(spec + ": " + e.what());
    }
  }
  std::map<std::string, Natural> given;
  std::istringstream in(spec);
  for (std::string item; std::getline(in, item, ',');) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("bad assignment '" + item + "' in --env");
    std::string name = item.substr(0, eq);
    if (auto a = aliases.find(name); a != aliases.end()) name = a->second;
    try {
      given[name] = Natural(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad value in '" + item + "'");
    }
  }
  std::vector<ScriptEntry> entries;
  for (const auto& v : vars) {
    auto it = given.find(v);
    if (it == given.end()) throw UsageError("--env gives no value for " + v);
    entries.push_back({0, 0, "#" + to_binary(it->second)});
    given.erase(it);
  }
  if (!given.empty()) throw UsageError("--env names " + given.begin()->first + ", which is not a free variable");
  return std::make_unique<ScriptedEnvironment>(std::move(entries));
}

PlayOptions play_options(std::optional<std::uint64_t> fuel) {
  PlayOptions po;
  po.fuel = fuel;
  return po;
}

// Winner of a closed run: the first free-variable-count moves are bottom's constants.
std::string winner_str(const FormulaPtr& f, const Run& run) {
  std::size_t v = free_variables(f).size();
  if (run.size() < v) return "undetermined (constants not all chosen)";
  std::vector<Natural> c;
  for (std::size_t i = 0; i < v; ++i) {
    MoveView mv = view_move(run[i].move);
    if (run[i].label != Label::Bot || !mv.numeric || !mv.address.empty() || !mv.payload.empty())
      return "undetermined (move " + std::to_string(i + 1) + " is not a constant)";
    c.push_back(parse_constant(mv.numer));
  }
  try {
    Label w = wins(f, c, Run(run.begin() + static_cast<std::ptrdiff_t>(v), run.end()));
    return w == Label::Top ? "top" : "bottom";
  } catch (const std::exception& e) {
    return std::string("undetermined (") + e.what() + ")";
  }
}

void print_play(const PlayResult& r) {
  std::cout << "run: " << run_str(r.run) << "\n";
  std::cout << "cycles: " << r.cycles << (r.fuel_truncated ? " (fuel exhausted)" : "") << "\n";
}

void write_meter(const std::string& path, const Meter& m) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_trace(out, m);
}

// ------------------------------------------------------------------ commands

int cmd_fmt_check(const std::string& file) {
  FormulaPtr f = load_formula(file);
  ChoiceCensus c = choice_census(f);
  AggregateBounds ab = aggregate_bounds(f);
  std::cout << "formula: " << formula_str(f) << "\n";
  std::cout << "free variables:";
  for (const auto& v : free_variables(f)) std::cout << ' ' << v;
  std::cout << "\n";
  std::cout << "e_top " << c.e_top << "\ne_bot " << c.e_bot << "\ne " << c.e << "\nv " << c.v << "\nD " << c.D
            << "\nh " << c.h << "\n";
  std::cout << "f(z) = " << ab.f.str() << "\n";
  bool identity = true;
  for (unsigned z = 0; z <= 256 && identity; ++z) identity = ab.G(Natural(z)) == z;
  std::cout << "G(z) = " << ab.G.str() << (identity ? " (identity)" : "") << "\n";
  return 0;
}

int cmd_play(const std::string& machine, const std::string& formula, const std::string& env,
             std::optional<std::uint64_t> fuel, const std::string& trace) {
  auto spec = load_machine(machine);
  FormulaPtr f = load_formula(formula);
  auto e = make_env(env, free_variables(f));
  HpmStepper m(spec);
  PlayResult r = play(m, *e, play_options(fuel));
  print_play(r);
  std::cout << "winner: " << winner_str(f, r.run) << "\n";
  write_meter(trace, r.meter);
  return 0;
}

struct TransformArgs {
  std::string kind, n, k, f, p, b, env, trace, meter;
  bool play = false;
  std::optional<std::uint64_t> fuel;
};

BoundExpr bound_arg(const std::string& text) {
  try {
    return parse_bound(text);
  } catch (const std::exception& e) {
    throw UsageError("bad bound '" + text + "': " + e.what());
  }
}

int cmd_transform(const TransformArgs& a) {
  auto need = [&](const std::string& v, const char* flag) {
    if (v.empty()) throw UsageError("transform " + a.kind + " needs " + flag);
  };
  StepperPtr solver;
  FormulaPtr game;
  InductionSolver* induct = nullptr;
  std::map<std::string, std::string> aliases;
  if (a.kind == "compr") {
    need(a.n, "--n");
    need(a.p, "--p");
    need(a.b, "--b");
    FormulaPtr p = load_formula(a.p);
    BoundExpr b = bound_arg(a.b);
    game = comprehension_conclusion(p, b);
    solver = std::make_unique<ComprehensionSolver>(std::make_unique<HpmStepper>(load_machine(a.n)), p, b);
  } else if (a.kind == "reason" || a.kind == "vasa") {
    need(a.n, "--n");
    need(a.f, "--f");
    game = load_formula(a.f);
    if (a.kind == "reason")
      solver = std::make_unique<ReasonWrapper>(load_machine(a.n), game);
    else
      solver = std::make_unique<VasaWrapper>(load_machine(a.n), game);
  } else if (a.kind == "induct") {
    need(a.n, "--n");
    need(a.k, "--k");
    need(a.f, "--f");
    FormulaPtr f = load_formula(a.f);
    auto s = std::make_unique<InductionSolver>(std::make_unique<HpmStepper>(load_machine(a.n)),
                                               std::make_unique<HpmStepper>(load_machine(a.k)), f,
                                               bound_arg(a.b.empty() ? "8" : a.b));
    induct = s.get();
    solver = std::move(s);
    // "k=3" names the induction variable's value unless k is itself a variable.
    const auto& cv = induct->conclusion_vars();
    if (std::find(cv.begin(), cv.end(), "k") == cv.end()) aliases["k"] = "x";
  } else {
    throw UsageError("unknown transform '" + a.kind + "' (compr, reason, vasa, induct)");
  }

  std::vector<std::string> vars = induct ? induct->conclusion_vars() : free_variables(game);
  if (game) std::cout << "game: " << formula_str(game) << "\n";
  std::cout << "constants:";
  for (const auto& v : vars) std::cout << ' ' << v;
  std::cout << "\n";
  if (!a.play) return 0;

  auto e = make_env(a.env, vars, aliases);
  PlayResult r = play(*solver, *e, play_options(a.fuel));
  print_play(r);
  write_meter(a.meter, r.meter);
  if (induct) {
    std::cout << "iterations: " << induct->trace().size() << (induct->retired() ? " (retired)" : "") << "\n";
    std::cout << "winner: " << (induct->winner() == Label::Top ? "top" : "bottom") << "\n";
    if (!a.trace.empty() && induct->params()) {
      std::ofstream out(a.trace);
      if (!out) throw InputError("cannot write " + a.trace);
      write_induction_trace(out, {diagnostic_params(*induct->params(), induct->trace()), induct->trace()});
    }
  } else {
    std::cout << "winner: " << winner_str(game, r.run) << "\n";
  }
  return 0;
}

int cmd_meter(const std::string& file) {
  std::istringstream in(slurp(file));
  Meter m;
  try {
    m = read_trace(in);
  } catch (const std::exception& e) {
    throw InputError(file + ": " + e.what());
  }
  std::cout << meter_report_str(meter_report(m));
  return 0;
}

int cmd_diag_induct(const std::string& file) {
  std::istringstream in(slurp(file));
  InductionTrace t;
  try {
    t = read_induction_trace(in);
  } catch (const std::exception& e) {
    throw InputError(file + ": " + e.what());
  }
  Diagnostics d = diagnostics(t.records, t.params);
  std::cout << diagnostics_str(d, t.records);
  return d.violations.empty() && d.rank_increasing ? 0 : kViolation;
}

int cmd_oracle(const std::string& name, std::size_t cases, std::uint64_t seed, bool serial, int threads) {
  std::vector<const oracle::Suite*> chosen;
  if (name == "all") {
    for (const auto& s : oracle::suites()) chosen.push_back(&s);
  } else if (const auto* s = oracle::find_suite(name)) {
    chosen.push_back(s);
  } else {
    std::string known;
    for (const auto& s : oracle::suites()) known += " " + s.name;
    throw UsageError("unknown suite '" + name + "'; known:" + known + " all");
  }
  int rc = 0;
  for (const auto* s : chosen) {
    oracle::Report r = serial ? oracle::run_serial(*s, cases, seed) : oracle::run_parallel(*s, cases, seed, threads);
    std::cout << oracle::report_str(r) << "\n";
    if (!r.ok()) rc = kViolation;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clarith: machines, games and solver transformers"};
  app.require_subcommand(1);

  auto* fmt = app.add_subcommand("fmt", "formula tools");
  fmt->require_subcommand(1);
  auto* fmt_check = fmt->add_subcommand("check", "parse a formula file and report its census and bounds");
  std::string formula_file;
  fmt_check->add_option("formula", formula_file, "formula file")->required();

  auto* play_cmd = app.add_subcommand("play", "run a machine against an environment");
  std::string machine, env, trace_out;
  std::optional<std::uint64_t> fuel;
  play_cmd->add_option("machine", machine, "machine file")->required();
  play_cmd->add_option("formula", formula_file, "formula file")->required();
  play_cmd->add_option("--env", env, "script file, 'repl', or constants like x=5,y=2");
  play_cmd->add_option("--fuel", fuel, "cycles to run");
  play_cmd->add_option("--trace", trace_out, "write the meter trace here");

  auto* transform = app.add_subcommand("transform", "build a solver from premises, optionally play it");
  TransformArgs ta;
  transform->add_option("kind", ta.kind, "compr, reason, vasa or induct")->required();
  transform->add_option("--n", ta.n, "machine (premise, base solver, or machine to wrap)");
  transform->add_option("--k", ta.k, "step solver (induct)");
  transform->add_option("--f", ta.f, "formula: the game (reason, vasa) or F(x) (induct)");
  transform->add_option("--p", ta.p, "formula p(y) (compr)");
  transform->add_option("--b", ta.b, "bound expression (compr; induct, default 8)");
  transform->add_flag("--play", ta.play, "play the built solver");
  transform->add_option("--env", ta.env, "script file, 'repl', or constants like k=3");
  transform->add_option("--fuel", ta.fuel, "cycles to run");
  transform->add_option("--trace", ta.trace, "write the induction trace here (induct)");
  transform->add_option("--meter", ta.meter, "write the meter trace here");

  auto* meter = app.add_subcommand("meter", "report amplitude, space and time from a meter trace");
  std::string trace_in;
  meter->add_option("trace", trace_in, "meter trace file")->required();

  auto* diag = app.add_subcommand("diag", "diagnostics");
  diag->require_subcommand(1);
  auto* diag_induct = diag->add_subcommand("induct", "rank, birthtimes and classifications of an induction trace");
  diag_induct->add_option("trace", trace_in, "induction trace file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "run brute-force oracle suites");
  std::string suite;
  std::size_t cases = 0;
  std::uint64_t seed = oracle::kDefaultSeed;
  bool serial = false;
  int threads = 0;
  oracle_cmd->add_option("suite", suite, "suite name or 'all'")->required();
  oracle_cmd->add_option("--cases", cases, "case count (0: suite default)");
  oracle_cmd->add_option("--seed", seed, "seed");
  oracle_cmd->add_flag("--serial", serial, "use the serial runner");
  oracle_cmd->add_option("--threads", threads, "OpenMP threads (0: default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (fmt_check->parsed()) return cmd_fmt_check(formula_file);
    if (play_cmd->parsed()) return cmd_play(machine, formula_file, env, fuel, trace_out);
    if (transform->parsed()) return cmd_transform(ta);
    if (meter->parsed()) return cmd_meter(trace_in);
    if (diag_induct->parsed()) return cmd_diag_induct(trace_in);
    if (oracle_cmd->parsed()) return cmd_oracle(suite, cases, seed, serial, threads);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFileError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFileError;
  }
  return kUsage;
}
