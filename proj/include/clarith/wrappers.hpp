#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clarith/game.hpp"
#include "clarith/hpm.hpp"

namespace clarith {

// Number of entries left after deleting the (m+1)-th top entry and everything after it.
std::size_t h_index(const GlobalHistory& h, std::size_t m);

// Records the index discipline of nested update/fetch calls.
struct RecursionProbe {
  std::size_t limit = 0;  // index cap, 2D; zero disables the cap check
  std::size_t update_calls = 0;
  std::size_t fetch_calls = 0;
  std::size_t max_depth = 0;
  std::size_t violations = 0;
  std::vector<std::string> notes;  // first few violations

  struct Frame {
    bool is_fetch;
    std::size_t index;
  };
  std::vector<Frame> stack;

  void enter(bool is_fetch, std::size_t index);
  void leave() { stack.pop_back(); }
};

struct ResimContext {
  const HpmSpec* spec = nullptr;
  const GlobalHistory* history = nullptr;
  const Run* own_run = nullptr;  // the bottom moves are read from here
  TruncationContext truncation;
  RecursionProbe* probe = nullptr;
  std::size_t step_cap = 1u << 20;  // per fetch replay
};

// Next sketch of the simulated machine; top-move symbols are fetched recursively.
Sketch update_sketch(const ResimContext& ctx, const Sketch& s);

// n-th (1-based) symbol of the (k+1)-th top move in the history's scenario.
// Throws std::out_of_range if k or n is outside the history.
char fetch_symbol(const ResimContext& ctx, std::size_t k, std::size_t n);

// The providence and prudence wrapper: a solver of H in which every move is
// the truncation of a move of N in the instantaneous-adversary scenario.
class ReasonWrapper : public Stepper {
 public:
  ReasonWrapper(std::shared_ptr<const HpmSpec> n, FormulaPtr h);

  void reset() override;
  void inject(const std::string& bot_move) override;
  std::optional<std::string> cycle() override;
  StepperPtr clone() const override { return std::make_unique<ReasonWrapper>(*this); }
  const Run& run() const override { return run_; }
  bool is_stationary() const override;

  const GlobalHistory& history() const { return hist_; }
  const RecursionProbe& probe() const { return probe_; }
  std::size_t restarts() const { return restarts_; }
  const Sketch& sketch() const { return sketch_; }

 private:
  std::shared_ptr<const HpmSpec> n_;
  std::shared_ptr<const GameShape> game_;
  Run run_;
  bool started_ = false;
  Natural threshold_ = 0;
  GlobalHistory hist_;
  Sketch sketch_;
  RecursionProbe probe_;
  std::size_t restarts_ = 0;
  bool quiet_ = false;  // the last simulated step changed nothing
};

// The quasilegality wrapper: behaves like L until the part of the run L has
// read turns illegitimate, then retires, first winding up a pending move.
class VasaWrapper : public Stepper {
 public:
  VasaWrapper(std::shared_ptr<const HpmSpec> l, FormulaPtr h);

  void reset() override;
  void inject(const std::string& bot_move) override;
  std::optional<std::string> cycle() override;
  StepperPtr clone() const override { return std::make_unique<VasaWrapper>(*this); }
  const Run& run() const override { return run_; }
  std::size_t spacecost() const override { return inner_.spacecost(); }
  std::size_t buffer_length() const override { return inner_.buffer_length(); }
  bool is_stationary() const override { return retired_ || inner_.is_stationary(); }

  bool retired() const { return retired_; }
  // Distinct compressed (W, V) pairs met so far: the finite-state product in use.
  std::size_t compression_states() const { return table_->size(); }
  const std::string& seen_compression() const { return w_compression_; }

 private:
  Semiposition seen_semiposition() const;
  Semiposition authored_semiposition() const;

  HpmStepper inner_;
  std::shared_ptr<const GameShape> game_;
  Run run_;
  std::size_t frontier_ = 0;  // run-tape cells L has scanned
  bool retired_ = false;
  std::string w_compression_;
  std::shared_ptr<std::map<std::string, std::size_t>> table_;
};

// Numer representative kept in finite control: "", "0", "1" or "00" (non-canonical).
std::string numer_representative(const std::string& numer);

}  // namespace clarith
