#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clarith/bounds.hpp"
#include "clarith/formula.hpp"
#include "clarith/hpm.hpp"

namespace clarith {

struct ComprehensionOptions {
  std::string y = "y";                  // the bit-index variable of p
  std::uint64_t fuel_per_simulation = 100000;
};

// Solver of  ade x [b] cla y < b : (Bit(y,x) <-> p)  built from a solver of
// cla y (p v ~p), the latter answering "0" for p and "1" for ~p.
//
// Constants arrive for the free variables of the conclusion in lexicographic
// order; the premise is replayed with its own constants (free variables of p
// other than y, lexicographically) followed by the choice of y.
class ComprehensionSolver : public Stepper {
 public:
  ComprehensionSolver(StepperPtr premise, FormulaPtr p, BoundExpr b, ComprehensionOptions opt = {});
  ComprehensionSolver(const ComprehensionSolver& o);
  ComprehensionSolver& operator=(const ComprehensionSolver&) = delete;

  void reset() override;
  void inject(const std::string& bot_move) override { run_.push_back(bot(bot_move)); }
  std::optional<std::string> cycle() override;
  StepperPtr clone() const override { return std::make_unique<ComprehensionSolver>(*this); }
  const Run& run() const override { return run_; }
  std::size_t spacecost() const override { return sim_ ? sim_->spacecost() : 0; }
  std::size_t buffer_length() const override { return buffer_.size(); }
  bool is_stationary() const override;

  const std::vector<std::string>& conclusion_vars() const { return vars_; }
  const std::optional<std::string>& fault() const { return fault_; }
  std::size_t simulations() const { return simulations_; }

 private:
  enum class Phase { Wait, Step1, Step2, Done };
  void start_simulation();

  StepperPtr premise_;
  FormulaPtr p_;
  BoundExpr b_;
  ComprehensionOptions opt_;
  std::vector<std::string> vars_;          // conclusion constants, in arrival order
  std::vector<std::string> premise_vars_;  // premise constants before y

  Run run_;
  Phase phase_ = Phase::Wait;
  std::map<std::string, Natural> env_;
  Natural c_ = 0;
  std::string buffer_;
  StepperPtr sim_;
  std::uint64_t fuel_used_ = 0;
  std::size_t simulations_ = 0;
  std::optional<std::string> fault_;
};

StepperPtr build_comprehension_solver(const Stepper& premise, const FormulaPtr& p, const BoundExpr& b,
                                      ComprehensionOptions opt = {});

// ade x [b] cla y < b : ((Bit(y,x) -> p) & (p -> Bit(y,x))), with x fresh.
FormulaPtr comprehension_conclusion(const FormulaPtr& p, const BoundExpr& b, const std::string& y = "y");

// Premise verdict policy from a predicate on (y, other constants): answers once the constants are in.
ScriptedStepper::Policy verdict_policy(std::size_t constants_before_y,
                                       std::function<bool(const Natural& y, const std::vector<Natural>& v)> pred);

}  // namespace clarith
