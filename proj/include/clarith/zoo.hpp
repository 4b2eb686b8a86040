#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "clarith/game.hpp"
#include "clarith/hpm.hpp"

// Test zoo: the worked fixtures plus generators of small machines, legal runs
// and scripted environments. Shared by the tests, the oracle suites and the CLI.
namespace clarith::zoo {

using Rng = std::mt19937_64;

// Per-case generator, independent of how cases are sharded.
Rng case_rng(std::uint64_t seed, std::uint64_t case_id);

extern const char* const kAppBFormula;
extern const char* const kAppBMachine;  // N of the worked example
extern const char* const kAppBEnv;
extern const char* const kCounterFormula;
extern const char* const kCounterBase;  // solves F(0)
extern const char* const kCounterStep;  // solves F(x) -> F(x')
extern const char* const kSilent;

std::shared_ptr<const HpmSpec> spec(const std::string& text);
std::vector<ScriptEntry> env_entries(const std::string& text);

// Formulas with two choice operators, plus the worked example's formula.
const std::vector<std::string>& two_unit_formulas();
const std::vector<std::string>& zoo_formulas();

struct RandomMachineOptions {
  std::size_t min_states = 2, max_states = 5;
  std::size_t max_worktapes = 2;
  double move_rate = 0.15;    // chance a rule enters the move state
  double append_rate = 0.35;  // chance a rule appends to the buffer
};

// A random machine over work alphabet {0,1}; it may halt, loop or move.
std::string random_machine_text(Rng& rng, const RandomMachineOptions& opt = {});

// Bottom moves at random times, every entry firing as soon as it is due.
std::vector<ScriptEntry> random_instant_env(Rng& rng, std::size_t max_entries = 4);

// A run of the closure game: constant moves first, then moves that keep the run
// legal. With `illegal_at`, the bottom move at that position (counted after the
// constants, clamped to the end) is replaced by an illegal one.
struct Skeleton {
  std::vector<Natural> constants;
  Run run;                       // constants included
  std::optional<std::size_t> illegal_index;  // position in run of the illegal move
};

Skeleton random_skeleton(const GameShape& g, Rng& rng, std::size_t max_moves = 6, bool make_illegal = false);

// A machine that replays the top moves of `run` in order, each one once it has
// scanned as many B labels as precede the move in `run`. With `scribble`, it
// also marks one work-tape cell per scanned run cell. With `eager`, the first half
// of a move that directly follows a B label is buffered as soon as that label is seen.
std::string waiter_machine_text(const Run& run, bool scribble, bool eager = false);

// Environment firing each bottom move of `run` once the preceding top moves were made.
std::vector<ScriptEntry> waiter_env(const Run& run);

// Per-cycle record of a machine played against an environment.
struct Transcript {
  std::vector<Configuration> configs;     // configs[t]: after t cycles
  std::vector<std::string> appends;       // appends[t]: buffer growth in cycle t (t >= 1)
  Run run;
};

Transcript record(const HpmSpec& spec, std::vector<ScriptEntry> env, std::size_t cycles);

GlobalHistory history_of(const Run& r);

// The n-th (1-based) character of the k-th (0-based) move with label l.
char run_symbol(const Run& r, Label l, std::size_t k, std::size_t n);

}  // namespace clarith::zoo
