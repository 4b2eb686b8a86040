#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clarith/game.hpp"
#include "clarith/run.hpp"

namespace clarith {

inline constexpr char kBlank = '_';
inline constexpr char kWildcard = '*';

enum class Dir { L, R, S };

struct Transition {
  std::string from;
  char run_symbol = kBlank;
  std::vector<char> work_symbols;
  std::string to;
  std::vector<char> writes;  // '*' keeps the scanned symbol
  Dir run_dir = Dir::S;
  std::vector<Dir> work_dirs;
  std::string append;
  std::size_t wildcards = 0;
  std::size_t line = 0;
};

struct HpmSyntaxError : std::runtime_error {
  std::size_t line;
  HpmSyntaxError(std::size_t l, const std::string& what)
      : std::runtime_error("machine spec line " + std::to_string(l) + ": " + what), line(l) {}
};

class HpmSpec {
 public:
  static HpmSpec parse(std::istream& in);
  static HpmSpec parse_text(const std::string& text);
  static HpmSpec parse_file(const std::string& path);

  const std::vector<std::string>& states() const { return states_; }
  const std::string& start() const { return start_; }
  bool is_move_state(const std::string& q) const { return move_states_.count(q) > 0; }
  std::size_t worktapes() const { return worktapes_; }
  const std::set<char>& alphabet() const { return alphabet_; }  // work-tape symbols, blank included
  const std::vector<Transition>& delta() const { return delta_; }

  // Exact rules first, then fewest wildcards, then declaration order.
  const Transition* find(const std::string& q, char run_symbol, const std::vector<char>& work) const;

  std::size_t state_count() const { return states_.size(); }
  std::size_t symbol_census() const { return alphabet_.size(); }

 private:
  std::vector<std::string> states_;
  std::string start_;
  std::set<std::string> move_states_;
  std::size_t worktapes_ = 0;
  std::set<char> alphabet_;
  std::vector<Transition> delta_;
  std::map<std::string, std::vector<std::size_t>> by_state_;
};

struct WorkTape {
  std::string cells;  // cells beyond the end are blank
  std::size_t head = 0;
  char read() const { return head < cells.size() ? cells[head] : kBlank; }
  std::size_t nonblank() const;
  std::string trimmed() const;  // without trailing blanks
};

struct Configuration {
  std::string state;
  std::vector<WorkTape> work;
  std::string run_tape;  // cell string: label cell then move characters per labmove
  Run run;               // the same content as labmoves
  std::size_t run_head = 0;
  std::string buffer;
  std::uint64_t cycle = 0;
  std::vector<std::uint64_t> move_log;  // cycles at which top moves were made
  std::size_t top_moves = 0;
  bool halted = false;

  static Configuration initial(const HpmSpec& spec);
  char run_symbol() const { return run_head < run_tape.size() ? run_tape[run_head] : kBlank; }
  void append_labmove(const Labmove& lm);
};

// One cycle: incoming bottom moves are appended, then one transition applies.
// Returns the top move made in this cycle, if any.
std::optional<std::string> step_in_place(const HpmSpec& spec, Configuration& cfg,
                                         const std::vector<std::string>& incoming);
Configuration step(const HpmSpec& spec, const Configuration& cfg, const std::vector<std::string>& incoming);

// ------------------------------------------------------------------ steppers

// Contract shared by machine-backed and scripted strategies.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual void reset() = 0;
  // Append a bottom move to the visible run without running a cycle (the W (+) Theta operation).
  virtual void inject(const std::string& bot_move) = 0;
  virtual std::optional<std::string> cycle() = 0;
  virtual std::unique_ptr<Stepper> clone() const = 0;
  virtual const Run& run() const = 0;
  virtual std::size_t spacecost() const { return 0; }
  virtual std::size_t buffer_length() const { return 0; }
  // True when no further cycle can change anything unless a new bottom move arrives.
  virtual bool is_stationary() const { return false; }

  std::optional<std::string> step(const std::vector<std::string>& incoming) {
    for (const auto& m : incoming) inject(m);
    return cycle();
  }
};

using StepperPtr = std::unique_ptr<Stepper>;

class HpmStepper : public Stepper {
 public:
  explicit HpmStepper(std::shared_ptr<const HpmSpec> spec);
  void reset() override;
  void inject(const std::string& bot_move) override;
  std::optional<std::string> cycle() override;
  StepperPtr clone() const override { return std::make_unique<HpmStepper>(*this); }
  const Run& run() const override { return cfg_.run; }
  std::size_t spacecost() const override;
  std::size_t buffer_length() const override { return cfg_.buffer.size(); }
  bool is_stationary() const override;

  const Configuration& configuration() const { return cfg_; }
  const HpmSpec& spec() const { return *spec_; }
  std::shared_ptr<const HpmSpec> spec_ptr() const { return spec_; }

 private:
  std::shared_ptr<const HpmSpec> spec_;
  Configuration cfg_;
};

// A strategy given as a pure function of the visible run: the returned move is made this cycle.
class ScriptedStepper : public Stepper {
 public:
  using Policy = std::function<std::optional<std::string>(const Run&)>;
  explicit ScriptedStepper(Policy policy) : policy_(std::move(policy)) {}
  void reset() override { run_.clear(); }
  void inject(const std::string& bot_move) override { run_.push_back(bot(bot_move)); }
  std::optional<std::string> cycle() override;
  StepperPtr clone() const override { return std::make_unique<ScriptedStepper>(*this); }
  const Run& run() const override { return run_; }
  bool is_stationary() const override { return !policy_(run_).has_value(); }

 private:
  Policy policy_;
  Run run_;
};

// ---------------------------------------------------------------- play

class Environment {
 public:
  virtual ~Environment() = default;
  // Bottom moves arriving at the boundary before cycle t, given the run so far.
  virtual std::vector<std::string> moves_at(std::uint64_t t, const Run& run) = 0;
  virtual bool exhausted() const = 0;
};

// Entries fire in order; an entry is ready once the machine has made
// `after_top_moves` moves and `delay` further cycles have passed.
struct ScriptEntry {
  std::size_t after_top_moves = 0;
  std::uint64_t delay = 0;
  std::string move;
};

class ScriptedEnvironment : public Environment {
 public:
  explicit ScriptedEnvironment(std::vector<ScriptEntry> entries) : entries_(std::move(entries)) {}
  std::vector<std::string> moves_at(std::uint64_t t, const Run& run) override;
  bool exhausted() const override { return next_ >= entries_.size(); }
  const std::vector<ScriptEntry>& entries() const { return entries_; }

  // Lines "<after_top_moves> <delay> <move>"; '%' comments.
  static ScriptedEnvironment parse(std::istream& in);

 private:
  std::vector<ScriptEntry> entries_;
  std::size_t next_ = 0;
  std::vector<std::uint64_t> reached_;  // cycle at which the j-th top move count was reached
};

struct AmplitudeEvent {
  Labmove move;
  std::size_t magnitude = 0;
  std::size_t background = 1;
  std::uint64_t cycle = 0;
};

struct SpaceSample {
  std::uint64_t cycle = 0;
  std::size_t background = 1;
  std::size_t spacecost = 0;
};

struct TimeEvent {
  std::string move;
  std::uint64_t timecost = 0;
  std::size_t background = 1;
};

class Meter {
 public:
  void on_bottom(const std::string& move, std::uint64_t cycle);
  void on_top(const std::string& move, std::uint64_t cycle);
  void on_cycle(std::uint64_t cycle, std::size_t spacecost);

  const std::vector<AmplitudeEvent>& amplitude() const { return amplitude_; }
  const std::vector<SpaceSample>& space() const { return space_; }
  const std::vector<TimeEvent>& time() const { return time_; }
  std::size_t background() const { return background_; }

 private:
  std::vector<AmplitudeEvent> amplitude_;
  std::vector<SpaceSample> space_;
  std::vector<TimeEvent> time_;
  std::size_t background_ = 1;
  std::uint64_t mark_ = 0;  // first cycle not yet charged to a move
};

struct MeterReport {
  std::map<std::size_t, std::size_t> amplitude_by_background;  // top moves only
  std::map<std::size_t, std::size_t> space_by_background;
  std::map<std::size_t, std::uint64_t> time_by_background;
  std::size_t max_amplitude = 0;
  std::size_t max_spacecost = 0;
  std::uint64_t max_timecost = 0;
  std::vector<std::size_t> backgrounds;
};

MeterReport meter_report(const Meter& m);
std::string meter_report_str(const MeterReport& r);

// Trace records: "<cycle> B <move>", "<cycle> T <move>", "<cycle> S <spacecost>".
void write_trace(std::ostream& out, const Meter& m);
Meter read_trace(std::istream& in);

struct PlayOptions {
  std::optional<std::uint64_t> fuel;  // cycles to run; default_fuel() when absent
  bool stop_when_quiet = true;    // stop once the environment is exhausted and the machine stationary
};

struct PlayResult {
  Run run;
  Meter meter;
  bool fuel_truncated = false;
  std::uint64_t cycles = 0;
};

// Default fuel: CLARITH_FUEL_DEFAULT if set, else 100000.
std::uint64_t default_fuel();

PlayResult play(Stepper& machine, Environment& env, const PlayOptions& opt = {});

// --------------------------------------------------------------- sketches

// What a sketch needs to keep component 8 up to date.
struct TruncationContext {
  const GameShape* game = nullptr;  // null: component 8 tracks the raw buffer
  Natural threshold = 0;
  Truncation extend(const Truncation& t, const std::string& appended) const;
  Truncation of(const std::string& buffer) const;
};

struct Sketch {
  std::string state;                     // 1
  std::vector<std::string> work;         // 2, trailing blanks trimmed
  std::vector<std::size_t> work_heads;   // 3
  std::size_t run_head = 0;              // 4
  std::size_t top_moves = 0;             // 5
  std::size_t buffer_length = 0;         // 6
  std::string last_append;               // 7
  Truncation truncation;                 // 8
  bool halted = false;                   // part of the state component

  static Sketch initial(const HpmSpec& spec);
  friend bool operator==(const Sketch& a, const Sketch& b);
  friend bool operator!=(const Sketch& a, const Sketch& b) { return !(a == b); }
  std::string str() const;
};

// Sketch projection of a full configuration. `last_append` is not stored in a
// configuration, so it is passed in.
Sketch sketch_of(const Configuration& cfg, const std::string& last_append, const TruncationContext& ctx);

struct HistoryEntry {
  Label label;
  std::size_t size = 0;
  friend bool operator==(const HistoryEntry& a, const HistoryEntry& b) {
    return a.label == b.label && a.size == b.size;
  }
};

using GlobalHistory = std::vector<HistoryEntry>;

// Symbol of the k-th (0-based) move with the given label, n-th (1-based) character.
using SymbolSource = std::function<char(Label, std::size_t k, std::size_t n)>;

Sketch sketch_advance(const HpmSpec& spec, const Sketch& s, const GlobalHistory& h, const SymbolSource& source,
                      const TruncationContext& ctx);

}  // namespace clarith
