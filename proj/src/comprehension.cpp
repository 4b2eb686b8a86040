#include "clarith/comprehension.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace clarith {

FormulaPtr comprehension_conclusion(const FormulaPtr& p, const BoundExpr& b, const std::string& y) {
  std::set<std::string> taken;
  for (const auto& v : free_variables(p)) taken.insert(v);
  for (const auto& v : b.variables()) taken.insert(v);
  taken.insert(y);
  std::string x = "x";
  for (int i = 1; taken.count(x); ++i) x = "x" + std::to_string(i);
  auto bit = Formula::atom("Bit", {Term::var(y), Term::var(x)});
  auto iff = Formula::conj(Formula::implies(bit, p), Formula::implies(p, bit));
  return Formula::choice_ex(x, b, Formula::blind_all(y, b, iff));
}

ScriptedStepper::Policy verdict_policy(std::size_t constants_before_y,
                                       std::function<bool(const Natural& y, const std::vector<Natural>& v)> pred) {
  return [constants_before_y, pred](const Run& run) -> std::optional<std::string> {
    std::vector<Natural> consts;
    for (const auto& lm : run) {
      if (lm.label == Label::Top) return std::nullopt;  // already answered
      consts.push_back(parse_constant(lm.move.size() > 1 ? lm.move.substr(1) : ""));
    }
    if (consts.size() < constants_before_y + 1) return std::nullopt;
    Natural y = consts[constants_before_y];
    consts.resize(constants_before_y);
    return pred(y, consts) ? std::string("0") : std::string("1");
  };
}

ComprehensionSolver::ComprehensionSolver(StepperPtr premise, FormulaPtr p, BoundExpr b, ComprehensionOptions opt)
    : premise_(std::move(premise)), p_(std::move(p)), b_(std::move(b)), opt_(std::move(opt)) {
  vars_ = free_variables(comprehension_conclusion(p_, b_, opt_.y));
  for (const auto& v : free_variables(p_))
    if (v != opt_.y) premise_vars_.push_back(v);
}

ComprehensionSolver::ComprehensionSolver(const ComprehensionSolver& o)
    : premise_(o.premise_->clone()), p_(o.p_), b_(o.b_), opt_(o.opt_), vars_(o.vars_),
      premise_vars_(o.premise_vars_), run_(o.run_), phase_(o.phase_), env_(o.env_), c_(o.c_), buffer_(o.buffer_),
      sim_(o.sim_ ? o.sim_->clone() : nullptr), fuel_used_(o.fuel_used_), simulations_(o.simulations_),
      fault_(o.fault_) {}

void ComprehensionSolver::reset() {
  run_.clear();
  phase_ = Phase::Wait;
  env_.clear();
  c_ = 0;
  buffer_.clear();
  sim_.reset();
  fuel_used_ = 0;
  simulations_ = 0;
  fault_.reset();
}

bool ComprehensionSolver::is_stationary() const {
  if (phase_ == Phase::Done) return true;
  if (phase_ == Phase::Wait) {
    std::size_t bots = 0;
    for (const auto& lm : run_)
      if (lm.label == Label::Bot) ++bots;
    return bots < vars_.size();
  }
  return false;
}

void ComprehensionSolver::start_simulation() {
  sim_ = premise_->clone();
  sim_->reset();
  for (const auto& v : premise_vars_) sim_->inject("#" + to_binary(env_.at(v)));
  sim_->inject("#" + to_binary(c_ - 1));
  fuel_used_ = 0;
  ++simulations_;
}

std::optional<std::string> ComprehensionSolver::cycle() {
  switch (phase_) {
    case Phase::Done:
      return std::nullopt;
    case Phase::Wait: {
      std::vector<const std::string*> consts;
      for (const auto& lm : run_)
        if (lm.label == Label::Bot) consts.push_back(&lm.move);
      if (consts.size() < vars_.size()) return std::nullopt;
      for (std::size_t i = 0; i < vars_.size(); ++i)
        env_[vars_[i]] = parse_constant(consts[i]->size() > 1 ? consts[i]->substr(1) : "");
      c_ = evaluate_bound(b_, env_);
      if (c_ == 0) {
        phase_ = Phase::Done;
        run_.push_back(top("#"));
        return std::string("#");
      }
      phase_ = Phase::Step1;
      start_simulation();
      return std::nullopt;
    }
    case Phase::Step1:
    case Phase::Step2:
      break;
  }
  // One simulated step of the premise under a silent adversary.
  auto verdict = sim_->cycle();
  ++fuel_used_;
  if (!verdict) {
    if (fuel_used_ >= opt_.fuel_per_simulation || sim_->is_stationary()) {
      fault_ = "premise gave no verdict for y=" + to_binary(c_ - 1);
      phase_ = Phase::Done;
    }
    return std::nullopt;
  }
  if (*verdict != "0" && *verdict != "1") {
    fault_ = "premise made the non-verdict move '" + *verdict + "'";
    phase_ = Phase::Done;
    return std::nullopt;
  }
  bool p = *verdict == "0";
  c_ -= 1;
  if (phase_ == Phase::Step1) {
    if (p) {
      buffer_ = "1";
      phase_ = Phase::Step2;
    }
  } else {
    buffer_ += p ? '1' : '0';
  }
  if (c_ == 0) {
    std::string move = "#" + buffer_;
    buffer_.clear();
    phase_ = Phase::Done;
    sim_.reset();
    run_.push_back(top(move));
    return move;
  }
  start_simulation();
  return std::nullopt;
}

StepperPtr build_comprehension_solver(const Stepper& premise, const FormulaPtr& p, const BoundExpr& b,
                                      ComprehensionOptions opt) {
  return std::make_unique<ComprehensionSolver>(premise.clone(), p, b, std::move(opt));
}

}  // namespace clarith
