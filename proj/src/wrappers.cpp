#include "clarith/wrappers.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace clarith {

std::size_t h_index(const GlobalHistory& h, std::size_t m) {
  std::size_t tops = 0;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i].label == Label::Top && tops++ == m) return i;
  return h.size();
}

void RecursionProbe::enter(bool is_fetch, std::size_t index) {
  auto flag = [this](const std::string& what) {
    ++violations;
    if (notes.size() < 8) notes.push_back(what);
  };
  if (is_fetch)
    ++fetch_calls;
  else
    ++update_calls;
  if (!is_fetch && limit && index > limit)
    flag("update index " + std::to_string(index) + " exceeds " + std::to_string(limit));
  if (!stack.empty()) {
    const Frame& caller = stack.back();
    if (is_fetch && !caller.is_fetch && !(index < caller.index))
      flag("fetch index " + std::to_string(index) + " not below caller " + std::to_string(caller.index));
    if (!is_fetch && caller.is_fetch && index > caller.index)
      flag("update index " + std::to_string(index) + " above caller " + std::to_string(caller.index));
  }
  stack.push_back({is_fetch, index});
  max_depth = std::max(max_depth, stack.size());
}

namespace {

struct ProbeGuard {
  RecursionProbe* p;
  ProbeGuard(RecursionProbe* probe, bool is_fetch, std::size_t index) : p(probe) {
    if (p) p->enter(is_fetch, index);
  }
  ~ProbeGuard() {
    if (p) p->leave();
  }
  ProbeGuard(const ProbeGuard&) = delete;
  ProbeGuard& operator=(const ProbeGuard&) = delete;
};

std::size_t count_label(const Run& r, Label l) {
  return static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [l](const Labmove& m) { return m.label == l; }));
}

std::size_t count_label(const GlobalHistory& h, Label l) {
  return static_cast<std::size_t>(std::count_if(h.begin(), h.end(), [l](const HistoryEntry& e) { return e.label == l; }));
}

const std::string& nth_bot(const Run& r, std::size_t k) {
  for (const auto& lm : r)
    if (lm.label == Label::Bot && k-- == 0) return lm.move;
  throw std::out_of_range("bottom move " + std::to_string(k) + " not on the run tape");
}

}  // namespace

Sketch update_sketch(const ResimContext& ctx, const Sketch& s) {
  ProbeGuard guard(ctx.probe, false, h_index(*ctx.history, s.top_moves));
  SymbolSource source = [&ctx](Label l, std::size_t k, std::size_t n) -> char {
    if (l == Label::Bot) {
      const std::string& m = nth_bot(*ctx.own_run, k);
      if (n == 0 || n > m.size()) throw std::out_of_range("symbol outside bottom move");
      return m[n - 1];
    }
    return fetch_symbol(ctx, k, n);
  };
  return sketch_advance(*ctx.spec, s, *ctx.history, source, ctx.truncation);
}

char fetch_symbol(const ResimContext& ctx, std::size_t k, std::size_t n) {
  const GlobalHistory& h = *ctx.history;
  std::size_t tops = 0;
  const HistoryEntry* entry = nullptr;
  for (const auto& e : h)
    if (e.label == Label::Top && tops++ == k) entry = &e;
  if (!entry) throw std::out_of_range("fetch: top move " + std::to_string(k) + " not in the history");
  if (n == 0 || n > entry->size) throw std::out_of_range("fetch: symbol " + std::to_string(n) + " outside the move");

  ProbeGuard guard(ctx.probe, true, h_index(h, k));
  Sketch s = Sketch::initial(*ctx.spec);
  for (std::size_t steps = 0; steps < ctx.step_cap; ++steps) {
    Sketch next = update_sketch(ctx, s);
    const std::string& sigma = next.last_append;
    if (s.top_moves == k && s.buffer_length < n && n <= s.buffer_length + sigma.size())
      return sigma[n - s.buffer_length - 1];
    if (next.halted && s.halted) break;
    s = std::move(next);
  }
  throw std::runtime_error("fetch: replay did not reach the requested symbol");
}

// ------------------------------------------------------------ reason wrapper

ReasonWrapper::ReasonWrapper(std::shared_ptr<const HpmSpec> n, FormulaPtr h)
    : n_(std::move(n)), game_(std::make_shared<GameShape>(std::move(h))) {
  reset();
}

void ReasonWrapper::reset() {
  run_.clear();
  started_ = false;
  threshold_ = 0;
  hist_.clear();
  sketch_ = Sketch::initial(*n_);
  probe_ = RecursionProbe{};
  probe_.limit = 2 * game_->census().D;
  restarts_ = 0;
  quiet_ = false;
}

void ReasonWrapper::inject(const std::string& bot_move) {
  run_.push_back(bot(bot_move));
  quiet_ = false;
}

bool ReasonWrapper::is_stationary() const {
  if (!started_) return count_label(run_, Label::Bot) < game_->free_vars().size();
  return quiet_ && count_label(run_, Label::Bot) == count_label(hist_, Label::Bot);
}

std::optional<std::string> ReasonWrapper::cycle() {
  const std::size_t u = game_->free_vars().size();
  if (!started_) {
    if (count_label(run_, Label::Bot) < u) return std::nullopt;
    std::vector<Natural> c;
    for (std::size_t i = 0; i < u; ++i) {
      const std::string& m = nth_bot(run_, i);
      c.push_back(parse_constant(m.size() > 1 ? m.substr(1) : ""));
      hist_.push_back({Label::Bot, m.size()});
    }
    threshold_ = game_->threshold(c);
    sketch_ = Sketch::initial(*n_);
    started_ = true;
  }
  // Stage 2: a globally new bottom move restarts the simulation.
  std::size_t seen = count_label(hist_, Label::Bot);
  if (count_label(run_, Label::Bot) > seen) {
    for (std::size_t i = seen; i < count_label(run_, Label::Bot); ++i)
      hist_.push_back({Label::Bot, nth_bot(run_, i).size()});
    sketch_ = Sketch::initial(*n_);
    ++restarts_;
    quiet_ = false;
    return std::nullopt;
  }
  // Stage 3: one simulated step.
  ResimContext ctx;
  ctx.spec = n_.get();
  ctx.history = &hist_;
  ctx.own_run = &run_;
  ctx.truncation = TruncationContext{game_.get(), threshold_};
  ctx.probe = &probe_;
  Sketch t = update_sketch(ctx, sketch_);
  if (t.top_moves > sketch_.top_moves && t.top_moves > count_label(hist_, Label::Top)) {
    std::string move = sketch_.truncation.move;
    hist_.push_back({Label::Top, sketch_.buffer_length});
    run_.push_back(top(move));
    sketch_ = Sketch::initial(*n_);
    ++restarts_;
    quiet_ = false;
    return move;
  }
  quiet_ = t == sketch_;
  sketch_ = std::move(t);
  return std::nullopt;
}

// -------------------------------------------------------------- vasa wrapper

std::string numer_representative(const std::string& numer) {
  if (numer.empty() || numer == "0") return numer;
  return numer[0] == '1' ? "1" : "00";
}

namespace {

Labmove represent(Label l, const std::string& move) {
  std::size_t hash = move.rfind('#');
  if (hash == std::string::npos) return {l, move};
  return {l, move.substr(0, hash + 1) + numer_representative(move.substr(hash + 1))};
}

}  // namespace

VasaWrapper::VasaWrapper(std::shared_ptr<const HpmSpec> l, FormulaPtr h)
    : inner_(std::move(l)), game_(std::make_shared<GameShape>(std::move(h))),
      table_(std::make_shared<std::map<std::string, std::size_t>>()) {
  reset();
}

void VasaWrapper::reset() {
  inner_.reset();
  run_.clear();
  frontier_ = 0;
  retired_ = false;
  w_compression_.clear();
}

void VasaWrapper::inject(const std::string& bot_move) {
  run_.push_back(bot(bot_move));
  if (!retired_) inner_.inject(bot_move);
}

Semiposition VasaWrapper::seen_semiposition() const {
  const std::string& tape = inner_.configuration().run_tape;
  Semiposition w;
  std::size_t upto = std::min(frontier_, tape.size());
  std::string cur;
  std::optional<Label> label;
  for (std::size_t i = 0; i < upto; ++i) {
    char c = tape[i];
    if (c == 'T' || c == 'B') {
      if (label) w.moves.push_back(represent(*label, cur));
      label = c == 'T' ? Label::Top : Label::Bot;
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (label) w.moves.push_back(represent(*label, cur));
  w.complete = frontier_ > tape.size();
  return w;
}

Semiposition VasaWrapper::authored_semiposition() const {
  Semiposition v;
  for (const auto& lm : inner_.run())
    if (lm.label == Label::Top) v.moves.push_back(represent(Label::Top, lm.move));
  const std::string& buffer = inner_.configuration().buffer;
  if (buffer.empty())
    v.complete = true;
  else
    v.moves.push_back(represent(Label::Top, buffer));
  return v;
}

std::optional<std::string> VasaWrapper::cycle() {
  if (retired_) return std::nullopt;
  frontier_ = std::max(frontier_, inner_.configuration().run_head + 1);
  Semiposition w = seen_semiposition();
  SemipositionAnalysis wa = analyze_semiposition(w, *game_);
  w_compression_ = wa.compression;
  Semiposition v = authored_semiposition();
  std::string key = w_compression_ + " | " + compress(v);
  table_->emplace(key, table_->size());
  if (!wa.legitimate) {
    retired_ = true;
    if (v.complete) return std::nullopt;
    SemipositionAnalysis va = analyze_semiposition(v, *game_);
    if (!va.quasilegitimate) return std::nullopt;
    std::string move = inner_.configuration().buffer + windup(v, *game_);
    run_.push_back(top(move));
    return move;
  }
  auto out = inner_.cycle();
  if (out) run_.push_back(top(*out));
  return out;
}

}  // namespace clarith
