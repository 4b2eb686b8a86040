#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clarith/bounds.hpp"
#include "clarith/formula.hpp"
#include "clarith/game.hpp"
#include "clarith/hpm.hpp"

namespace clarith {

struct Organ {
  std::vector<std::string> payload;
  Natural scale = 1;
  friend bool operator==(const Organ& a, const Organ& b) { return a.payload == b.payload && a.scale == b.scale; }
  friend bool operator!=(const Organ& a, const Organ& b) { return !(a == b); }
};

struct SignedOrgan {
  bool positive = true;
  Organ organ;
  friend bool operator==(const SignedOrgan& a, const SignedOrgan& b) {
    return a.positive == b.positive && a.organ == b.organ;
  }
  friend bool operator!=(const SignedOrgan& a, const SignedOrgan& b) { return !(a == b); }
};

using Body = std::vector<Organ>;

std::string organ_str(const Organ& o);
std::string signed_organ_str(const SignedOrgan& s);
std::string body_str(const Body& b);

struct BodyRelation {
  bool extension = false;    // second extends first
  bool restriction = false;  // second restricts first
  bool consistent = false;
};

BodyRelation body_relate(const Body& b, const Body& b2);
enum class Parity { Odd, Even };
Body body_project(const Body& b, Parity p);  // odd: organs 1,3,..; even: 2,4,.. (1-based)
Run body_run(const Body& b);                 // odd organs bottom, even organs top

struct Entry {
  std::size_t index = 0;
  Body body;
  friend bool operator==(const Entry& a, const Entry& b) { return a.index == b.index && a.body == b.body; }
};

using Aggregation = std::vector<Entry>;

std::string aggregation_str(const Aggregation& e);

// First violated condition "(i)".."(vi)" with a reason, or nullopt.
std::optional<std::string> validate_aggregation(const Aggregation& e, std::size_t k);

struct CentralTriple {
  Body left;
  Body right;
  std::size_t n = 0;
};

// Throws std::invalid_argument when e has no odd-size entry.
CentralTriple central_triple(const Aggregation& e);

// ---------------------------------------------------------------------- Sim

struct SimContext {
  std::size_t k = 0;
  // Fresh H_n: the premise with its constant moves already on the run tape.
  std::function<StepperPtr(std::size_t n)> make_h;
};

struct SimResult {
  SignedOrgan s;
  Natural u = 0;
  std::vector<SignedOrgan> s_values;  // every value S went through, in order
  std::uint64_t traced_steps = 0;
};

// Resumable Sim_n(A, B); one call to advance() traces at most one step.
class Sim {
 public:
  Sim(SimContext ctx, Body a, Body b, std::size_t n);
  Sim(const Sim& o);
  Sim& operator=(const Sim&) = delete;

  bool done() const { return done_; }
  void advance();
  void run_to_end();
  const SimResult& result() const { return result_; }
  std::size_t spacecost() const { return cur_ ? cur_->spacecost() : 0; }

 private:
  void begin_pass();
  void end_pass();

  SimContext ctx_;
  Body a_, b_;
  std::size_t n_;
  std::size_t ai_ = 0, bi_ = 1;
  std::vector<std::string> psi_, nu_;
  StepperPtr w_;    // configuration at the last move (plus injected organs)
  StepperPtr cur_;  // the configuration being traced
  SignedOrgan r_;
  Natural remaining_ = 0;
  bool done_ = false;
  SimResult result_;
};

// Throws std::invalid_argument unless (A, B, n) is Sim-appropriate.
SimResult sim(const SimContext& ctx, const Body& a, const Body& b, std::size_t n);

struct SimViews {
  SignedOrgan bullet;
  Body left;   // (P1, A1, P2, A2, ..)
  Body right;  // (B1, Q1, B2, Q2, ..)
};

SimViews sim_views(const SimContext& ctx, const Body& a, const Body& b, std::size_t n);
bool is_saturated(const SimContext& ctx, const Body& a, const Body& b, std::size_t n);

// --------------------------------------------------------------------- Main

enum class MainCase { Case1, Sub211, Sub212, Sub221, Sub2221, Sub2222 };
const char* main_case_str(MainCase c);

struct IterationRecord {
  std::size_t number = 0;  // 1-based
  Aggregation e;           // at the beginning of the iteration
  Natural u_before = 0;    // U at the beginning
  std::size_t n = 0;
  std::size_t left_size = 0;
  std::size_t right_size = 0;
  MainCase kind = MainCase::Case1;
  std::optional<SignedOrgan> s;
  Natural u = 0;       // from Sim (Case 2)
  Natural u_after = 0; // U after the Case 2 update
  Natural statute = 0; // L(l, U) when consulted
  bool completed = true;  // false only for a final 2.2.2.2 still waiting
};

struct MachineCensus {
  std::size_t states = 1;     // r
  std::size_t worktapes = 0;  // g
  std::size_t symbols = 1;    // q
};

MachineCensus census_of(const Stepper& s);  // HPM-backed steppers report their spec; others the default

struct InductionOptions {
  std::string x = "x";         // the induction variable of F
  std::size_t poll_every = 1;  // simulated steps between polls
  std::optional<MachineCensus> census;  // overrides the census read from the premises
};

struct InductionParams {
  std::size_t k = 0;
  std::map<std::string, Natural> constants;  // every conclusion variable
  std::size_t l = 0;                         // |greatest constant|
  Natural bound = 0;                         // b|d|
  StatuteParams statute;
  std::size_t e_top = 0, e_bot = 0;
  UnaryBound f;  // unarification of b
};

// Solver of  x <= b|s| -> F(x)  built from solvers N of F(0) and K of F(x) -> F(x').
// Constants arrive for the conclusion's free variables in lexicographic order.
class InductionSolver : public Stepper {
 public:
  InductionSolver(StepperPtr n, StepperPtr k, FormulaPtr f, BoundExpr b, InductionOptions opt = {});
  InductionSolver(const InductionSolver& o);
  InductionSolver& operator=(const InductionSolver&) = delete;

  void reset() override;
  void inject(const std::string& bot_move) override { run_.push_back(bot(bot_move)); }
  std::optional<std::string> cycle() override;
  StepperPtr clone() const override { return std::make_unique<InductionSolver>(*this); }
  const Run& run() const override { return run_; }
  std::size_t spacecost() const override;
  bool is_stationary() const override;

  const std::vector<std::string>& conclusion_vars() const { return vars_; }
  const std::vector<IterationRecord>& trace() const { return trace_; }
  const Aggregation& aggregation() const { return e_; }
  const std::optional<InductionParams>& params() const { return params_; }
  bool retired() const { return mode_ == Mode::Retired; }
  // Truth of the conclusion on the run, consequent judged by the game of F(k).
  Label winner(const AtomEvaluator& atoms = nullptr) const;

  StepperPtr make_h(std::size_t n) const;

 private:
  enum class Mode { Wait, Replay, Main, Waiting2222, Retired };

  void start();
  void begin_iteration();
  void finish_iteration(MainCase kind);
  void restart();
  std::size_t master_odd_moves() const;
  std::optional<std::string> poll_new_move() const;
  void absorb_env_move(const std::string& move);

  std::shared_ptr<const Stepper> n_proto_, k_proto_;
  FormulaPtr f_;
  FormulaPtr f0_;
  FormulaPtr step_game_;
  BoundExpr b_;
  InductionOptions opt_;
  std::vector<std::string> vars_;
  std::shared_ptr<const GameShape> f_shape_;
  MachineCensus census_;

  Run run_;
  Mode mode_ = Mode::Wait;
  std::optional<InductionParams> params_;
  Natural threshold_ = 0;
  std::size_t consts_ = 0;
  SimContext sim_ctx_;
  Aggregation e_;
  Natural u_ = 0;
  std::unique_ptr<Sim> sim_;
  std::size_t since_poll_ = 0;
  IterationRecord current_;
  std::vector<IterationRecord> trace_;
  std::deque<std::string> pending_;
  StepperPtr replay_;
  std::size_t replay_fed_ = 0;
};

StepperPtr build_induction_solver(const Stepper& n, const Stepper& k, const FormulaPtr& f, const BoundExpr& b,
                                  InductionOptions opt = {});

// F(t) for a term t in place of x.
FormulaPtr instantiate(const FormulaPtr& f, const std::string& x, const TermPtr& t);
// F(x) -> F(x').
FormulaPtr induction_step_game(const FormulaPtr& f, const std::string& x);

// ---------------------------------------------------------------- diagnostics

struct Diagnostics {
  Natural base = 0;                        // k-frak
  std::vector<std::vector<Natural>> digits;  // per iteration, c_0 .. c_{d+3}
  std::vector<Natural> rank;
  bool rank_increasing = true;
  bool digits_below_base = true;
  std::vector<std::string> classification;  // restarting / repeating / locking+repeating / waiting
  std::vector<std::size_t> transient;       // I^h-transient iterations, h = last
  std::vector<std::size_t> bang;            // I^h_!
  std::vector<std::size_t> bullet1, bullet2, bullet3;
  std::map<std::size_t, Body> b_h;                        // B_n^h per index n
  std::map<std::size_t, std::vector<std::size_t>> birthtimes;  // per n: birthtime of (O_1..O_p), p = 1..|B_n^h|
  std::vector<std::string> violations;   // aggregation validity, size bound, consistency and rank-step checks
};

struct DiagnosticParams {
  std::size_t k = 0;
  std::size_t e_top = 0, e_bot = 0;
  Natural base = 2;  // k-frak
};

// space: the value standing for s(G(l)); the largest U in the trace when absent.
DiagnosticParams diagnostic_params(const InductionParams& p, const std::vector<IterationRecord>& trace,
                                   std::optional<Natural> space = std::nullopt);
Diagnostics diagnostics(const std::vector<IterationRecord>& trace, const DiagnosticParams& p);
std::string diagnostics_str(const Diagnostics& d, const std::vector<IterationRecord>& trace);

struct InductionTrace {
  DiagnosticParams params;
  std::vector<IterationRecord> records;
};

// A params line, then one line per iteration: number, case, n, |L|, |R|, U, S, entries.
void write_induction_trace(std::ostream& out, const InductionTrace& t);
InductionTrace read_induction_trace(std::istream& in);  // throws std::runtime_error on malformed lines

}  // namespace clarith
