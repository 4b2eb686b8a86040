#include "clarith/hpm.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace clarith {

// ------------------------------------------------------------ spec parsing

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

char symbol_token(const std::string& tok, std::size_t line) {
  if (tok.size() != 1) throw HpmSyntaxError(line, "expected a single symbol, got '" + tok + "'");
  return tok[0];
}

Dir dir_token(const std::string& tok, std::size_t line) {
  if (tok == "L") return Dir::L;
  if (tok == "R") return Dir::R;
  if (tok == "S") return Dir::S;
  throw HpmSyntaxError(line, "expected L, R or S, got '" + tok + "'");
}

}  // namespace

HpmSpec HpmSpec::parse(std::istream& in) {
  HpmSpec spec;
  bool have_states = false, have_start = false, have_tapes = false;
  std::vector<std::pair<std::size_t, std::string>> deltas;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '%') continue;
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw HpmSyntaxError(lineno, "expected 'key: value'");
    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    if (key == "states") {
      spec.states_ = split_list(value);
      have_states = true;
    } else if (key == "start") {
      spec.start_ = value;
      have_start = true;
    } else if (key == "movestates") {
      for (auto& q : split_list(value)) spec.move_states_.insert(q);
    } else if (key == "worktapes") {
      try {
        spec.worktapes_ = std::stoul(value);
      } catch (const std::exception&) {
        throw HpmSyntaxError(lineno, "worktapes needs a number");
      }
      have_tapes = true;
    } else if (key == "alphabet") {
      for (auto& t : split_list(value)) spec.alphabet_.insert(symbol_token(t, lineno));
    } else if (key == "delta") {
      deltas.emplace_back(lineno, value);
    } else {
      throw HpmSyntaxError(lineno, "unknown key '" + key + "'");
    }
  }
  if (!have_states || !have_start) throw HpmSyntaxError(lineno, "missing states or start");
  if (!have_tapes) spec.worktapes_ = 0;
  spec.alphabet_.insert(kBlank);
  std::set<std::string> known(spec.states_.begin(), spec.states_.end());
  if (!known.count(spec.start_)) throw HpmSyntaxError(lineno, "start state not declared");
  for (const auto& q : spec.move_states_)
    if (!known.count(q)) throw HpmSyntaxError(lineno, "move state '" + q + "' not declared");

  const std::size_t g = spec.worktapes_;
  for (const auto& [ln, text] : deltas) {
    std::size_t arrow = text.find("->");
    if (arrow == std::string::npos) throw HpmSyntaxError(ln, "delta needs '->'");
    auto lhs = split_commas(text.substr(0, arrow));
    std::string rhs_text = text.substr(arrow + 2);
    Transition t;
    t.line = ln;
    std::size_t app = rhs_text.find("append");
    if (app != std::string::npos) {
      std::size_t q1 = rhs_text.find('"', app);
      std::size_t q2 = q1 == std::string::npos ? q1 : rhs_text.find('"', q1 + 1);
      if (q2 == std::string::npos) throw HpmSyntaxError(ln, "append needs a quoted string");
      t.append = rhs_text.substr(q1 + 1, q2 - q1 - 1);
      if (!trim(rhs_text.substr(q2 + 1)).empty()) throw HpmSyntaxError(ln, "trailing text after append");
      rhs_text = rhs_text.substr(0, app);
      std::string tail = trim(rhs_text);
      if (!tail.empty() && tail.back() == ',') rhs_text = tail.substr(0, tail.size() - 1);
    }
    auto rhs = split_commas(rhs_text);
    if (lhs.size() != 2 + g) throw HpmSyntaxError(ln, "left side needs state, run symbol and one symbol per work tape");
    if (rhs.size() != 2 + 2 * g) throw HpmSyntaxError(ln, "right side needs state, writes, run direction and work directions");
    t.from = lhs[0];
    t.run_symbol = symbol_token(lhs[1], ln);
    if (t.run_symbol == kWildcard) ++t.wildcards;
    for (std::size_t i = 0; i < g; ++i) {
      char c = symbol_token(lhs[2 + i], ln);
      if (c == kWildcard)
        ++t.wildcards;
      else if (!spec.alphabet_.count(c))
        throw HpmSyntaxError(ln, std::string("symbol '") + c + "' not in the work alphabet");
      t.work_symbols.push_back(c);
    }
    t.to = rhs[0];
    for (std::size_t i = 0; i < g; ++i) {
      char c = symbol_token(rhs[1 + i], ln);
      if (c != kWildcard && !spec.alphabet_.count(c))
        throw HpmSyntaxError(ln, std::string("symbol '") + c + "' not in the work alphabet");
      t.writes.push_back(c);
    }
    t.run_dir = dir_token(rhs[1 + g], ln);
    for (std::size_t i = 0; i < g; ++i) t.work_dirs.push_back(dir_token(rhs[2 + g + i], ln));
    if (!known.count(t.from) || !known.count(t.to)) throw HpmSyntaxError(ln, "undeclared state");
    if (spec.move_states_.count(t.to) && !t.append.empty())
      throw HpmSyntaxError(ln, "a transition into a move state must not append");
    for (std::size_t idx : spec.by_state_[t.from]) {
      const Transition& o = spec.delta_[idx];
      if (o.run_symbol == t.run_symbol && o.work_symbols == t.work_symbols)
        throw HpmSyntaxError(ln, "duplicate rule (first at line " + std::to_string(o.line) + ")");
    }
    spec.by_state_[t.from].push_back(spec.delta_.size());
    spec.delta_.push_back(std::move(t));
  }
  return spec;
}

HpmSpec HpmSpec::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

HpmSpec HpmSpec::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse(in);
}

const Transition* HpmSpec::find(const std::string& q, char run_symbol, const std::vector<char>& work) const {
  auto it = by_state_.find(q);
  if (it == by_state_.end()) return nullptr;
  const Transition* best = nullptr;
  for (std::size_t idx : it->second) {
    const Transition& t = delta_[idx];
    if (t.run_symbol != kWildcard && t.run_symbol != run_symbol) continue;
    bool ok = true;
    for (std::size_t i = 0; i < work.size() && ok; ++i)
      ok = t.work_symbols[i] == kWildcard || t.work_symbols[i] == work[i];
    if (!ok) continue;
    if (!best || t.wildcards < best->wildcards) best = &t;
  }
  return best;
}

// ----------------------------------------------------------- configurations

std::size_t WorkTape::nonblank() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](char c) { return c != kBlank; }));
}

std::string WorkTape::trimmed() const {
  std::size_t e = cells.find_last_not_of(kBlank);
  return e == std::string::npos ? std::string() : cells.substr(0, e + 1);
}

Configuration Configuration::initial(const HpmSpec& spec) {
  Configuration c;
  c.state = spec.start();
  c.work.resize(spec.worktapes());
  return c;
}

void Configuration::append_labmove(const Labmove& lm) {
  run.push_back(lm);
  run_tape += label_char(lm.label);
  run_tape += lm.move;
}

namespace {

std::size_t move_head(std::size_t head, Dir d, std::size_t limit) {
  switch (d) {
    case Dir::L:
      return head == 0 ? 0 : head - 1;
    case Dir::R:
      return std::min(head + 1, limit);
    case Dir::S:
      break;
  }
  return head;
}

}  // namespace

std::optional<std::string> step_in_place(const HpmSpec& spec, Configuration& cfg,
                                         const std::vector<std::string>& incoming) {
  for (const auto& m : incoming) cfg.append_labmove(bot(m));
  ++cfg.cycle;
  if (cfg.halted) return std::nullopt;
  std::vector<char> work(cfg.work.size());
  for (std::size_t i = 0; i < work.size(); ++i) work[i] = cfg.work[i].read();
  const Transition* t = spec.find(cfg.state, cfg.run_symbol(), work);
  if (!t) {
    cfg.halted = true;
    return std::nullopt;
  }
  for (std::size_t i = 0; i < cfg.work.size(); ++i) {
    WorkTape& w = cfg.work[i];
    if (t->writes[i] != kWildcard) {
      if (w.head >= w.cells.size()) w.cells.resize(w.head + 1, kBlank);
      w.cells[w.head] = t->writes[i];
    }
    w.head = move_head(w.head, t->work_dirs[i], SIZE_MAX);
  }
  cfg.run_head = move_head(cfg.run_head, t->run_dir, cfg.run_tape.size());
  cfg.buffer += t->append;
  cfg.state = t->to;
  if (spec.is_move_state(cfg.state)) {
    std::string m = std::move(cfg.buffer);
    cfg.buffer.clear();
    cfg.append_labmove(top(m));
    cfg.move_log.push_back(cfg.cycle - 1);
    ++cfg.top_moves;
    return m;
  }
  return std::nullopt;
}

Configuration step(const HpmSpec& spec, const Configuration& cfg, const std::vector<std::string>& incoming) {
  Configuration next = cfg;
  step_in_place(spec, next, incoming);
  return next;
}

// ---------------------------------------------------------------- steppers

HpmStepper::HpmStepper(std::shared_ptr<const HpmSpec> spec) : spec_(std::move(spec)) { reset(); }

void HpmStepper::reset() { cfg_ = Configuration::initial(*spec_); }

void HpmStepper::inject(const std::string& bot_move) { cfg_.append_labmove(bot(bot_move)); }

std::optional<std::string> HpmStepper::cycle() { return step_in_place(*spec_, cfg_, {}); }

std::size_t HpmStepper::spacecost() const {
  std::size_t m = 0;
  for (const auto& w : cfg_.work) m = std::max(m, w.nonblank());
  return m;
}

bool HpmStepper::is_stationary() const {
  if (cfg_.halted) return true;
  std::vector<char> work(cfg_.work.size());
  for (std::size_t i = 0; i < work.size(); ++i) work[i] = cfg_.work[i].read();
  const Transition* t = spec_->find(cfg_.state, cfg_.run_symbol(), work);
  if (!t) return true;  // halts on the next cycle and stays put
  if (t->to != cfg_.state || spec_->is_move_state(t->to) || !t->append.empty()) return false;
  if (move_head(cfg_.run_head, t->run_dir, cfg_.run_tape.size()) != cfg_.run_head) return false;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (t->writes[i] != kWildcard && t->writes[i] != work[i]) return false;
    if (move_head(cfg_.work[i].head, t->work_dirs[i], SIZE_MAX) != cfg_.work[i].head) return false;
  }
  return true;
}

std::optional<std::string> ScriptedStepper::cycle() {
  auto m = policy_(run_);
  if (m) run_.push_back(top(*m));
  return m;
}

// -------------------------------------------------------------------- play

std::vector<std::string> ScriptedEnvironment::moves_at(std::uint64_t t, const Run& run) {
  std::size_t tops = 0;
  for (const auto& lm : run)
    if (lm.label == Label::Top) ++tops;
  if (reached_.empty()) reached_.push_back(0);
  while (reached_.size() <= tops) reached_.push_back(t);
  std::vector<std::string> out;
  while (next_ < entries_.size()) {
    const ScriptEntry& e = entries_[next_];
    if (e.after_top_moves > tops || t < reached_[e.after_top_moves] + e.delay) break;
    out.push_back(e.move);
    ++next_;
  }
  return out;
}

ScriptedEnvironment ScriptedEnvironment::parse(std::istream& in) {
  std::vector<ScriptEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    ScriptEntry e;
    if (!(ls >> e.after_top_moves >> e.delay)) throw std::runtime_error("env script line " + std::to_string(lineno) + ": expected '<after> <delay> <move>'");
    ls >> e.move;  // a missing move token stands for the empty move
    entries.push_back(e);
  }
  return ScriptedEnvironment(std::move(entries));
}

void Meter::on_bottom(const std::string& move, std::uint64_t cycle) {
  std::size_t mag = numer_and_magnitude(move).magnitude;
  background_ = std::max(background_, mag);
  amplitude_.push_back({bot(move), mag, background_, cycle});
  mark_ = cycle;
}

void Meter::on_top(const std::string& move, std::uint64_t cycle) {
  std::size_t mag = numer_and_magnitude(move).magnitude;
  amplitude_.push_back({top(move), mag, background_, cycle});
  time_.push_back({move, cycle + 1 - mark_, background_});
  mark_ = cycle + 1;
}

void Meter::on_cycle(std::uint64_t cycle, std::size_t spacecost) { space_.push_back({cycle, background_, spacecost}); }

MeterReport meter_report(const Meter& m) {
  MeterReport r;
  std::set<std::size_t> bgs;
  for (const auto& a : m.amplitude()) {
    if (a.move.label != Label::Top) continue;
    auto& slot = r.amplitude_by_background[a.background];
    slot = std::max(slot, a.magnitude);
    r.max_amplitude = std::max(r.max_amplitude, a.magnitude);
    bgs.insert(a.background);
  }
  for (const auto& s : m.space()) {
    auto& slot = r.space_by_background[s.background];
    slot = std::max(slot, s.spacecost);
    r.max_spacecost = std::max(r.max_spacecost, s.spacecost);
    bgs.insert(s.background);
  }
  for (const auto& t : m.time()) {
    auto& slot = r.time_by_background[t.background];
    slot = std::max(slot, t.timecost);
    r.max_timecost = std::max(r.max_timecost, t.timecost);
  }
  r.backgrounds.assign(bgs.begin(), bgs.end());
  return r;
}

std::string meter_report_str(const MeterReport& r) {
  std::ostringstream o;
  o << "max amplitude  " << r.max_amplitude << "\n";
  o << "max spacecost  " << r.max_spacecost << "\n";
  o << "max timecost   " << r.max_timecost << "\n";
  o << "background  amplitude  spacecost  timecost\n";
  for (std::size_t bg : r.backgrounds) {
    auto get = [bg](const auto& m) -> std::uint64_t {
      auto it = m.find(bg);
      return it == m.end() ? 0 : it->second;
    };
    o << bg << "  " << get(r.amplitude_by_background) << "  " << get(r.space_by_background) << "  "
      << get(r.time_by_background) << "\n";
  }
  return o.str();
}

void write_trace(std::ostream& out, const Meter& m) {
  // Merge by cycle: moves at a boundary come before that cycle's space sample.
  std::size_t ai = 0;
  for (const auto& s : m.space()) {
    while (ai < m.amplitude().size() && m.amplitude()[ai].cycle <= s.cycle) {
      const auto& a = m.amplitude()[ai++];
      out << a.cycle << ' ' << label_char(a.move.label) << ' ' << a.move.move << '\n';
    }
    out << s.cycle << " S " << s.spacecost << '\n';
  }
  for (; ai < m.amplitude().size(); ++ai) {
    const auto& a = m.amplitude()[ai];
    out << a.cycle << ' ' << label_char(a.move.label) << ' ' << a.move.move << '\n';
  }
}

Meter read_trace(std::istream& in) {
  Meter m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line)[0] == '%') continue;
    std::istringstream ls(line);
    std::uint64_t cycle;
    std::string kind, payload;
    if (!(ls >> cycle >> kind)) throw std::runtime_error("trace line " + std::to_string(lineno) + ": malformed");
    ls >> payload;
    if (kind == "B")
      m.on_bottom(payload, cycle);
    else if (kind == "T")
      m.on_top(payload, cycle);
    else if (kind == "S")
      m.on_cycle(cycle, std::stoul(payload));
    else
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": unknown record '" + kind + "'");
  }
  return m;
}

std::uint64_t default_fuel() {
  if (const char* v = std::getenv("CLARITH_FUEL_DEFAULT")) {
    try {
      return std::stoull(v);
    } catch (const std::exception&) {
    }
  }
  return 100000;
}

PlayResult play(Stepper& machine, Environment& env, const PlayOptions& opt) {
  PlayResult r;
  const std::uint64_t fuel = opt.fuel.value_or(default_fuel());
  r.fuel_truncated = true;
  for (std::uint64_t t = 0; t < fuel; ++t) {
    auto incoming = env.moves_at(t, r.run);
    for (const auto& m : incoming) {
      r.run.push_back(bot(m));
      r.meter.on_bottom(m, t);
    }
    auto out = machine.step(incoming);
    r.meter.on_cycle(t, machine.spacecost());
    if (out) {
      r.run.push_back(top(*out));
      r.meter.on_top(*out, t);
    }
    r.cycles = t + 1;
    if (opt.stop_when_quiet && env.exhausted() && machine.is_stationary()) {
      r.fuel_truncated = false;
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------- sketches

Truncation TruncationContext::extend(const Truncation& t, const std::string& appended) const {
  if (!game) return {t.move + appended, false};
  return extend_truncation(t, appended, *game, threshold);
}

Truncation TruncationContext::of(const std::string& buffer) const {
  if (!game) return {buffer, false};
  return truncate_move(buffer, *game, threshold);
}

Sketch Sketch::initial(const HpmSpec& spec) {
  Sketch s;
  s.state = spec.start();
  s.work.resize(spec.worktapes());
  s.work_heads.resize(spec.worktapes(), 0);
  return s;
}

bool operator==(const Sketch& a, const Sketch& b) {
  return a.state == b.state && a.work == b.work && a.work_heads == b.work_heads && a.run_head == b.run_head &&
         a.top_moves == b.top_moves && a.buffer_length == b.buffer_length && a.last_append == b.last_append &&
         a.truncation == b.truncation && a.halted == b.halted;
}

std::string Sketch::str() const {
  std::ostringstream o;
  o << "(" << state << (halted ? "!" : "") << ", [";
  for (std::size_t i = 0; i < work.size(); ++i) o << (i ? " " : "") << work[i] << "@" << work_heads[i];
  o << "], " << run_head << ", " << top_moves << ", " << buffer_length << ", \"" << last_append << "\", \""
    << truncation.move << "\"" << (truncation.frozen ? "!" : "") << ")";
  return o.str();
}

Sketch sketch_of(const Configuration& cfg, const std::string& last_append, const TruncationContext& ctx) {
  Sketch s;
  s.state = cfg.state;
  s.halted = cfg.halted;
  for (const auto& w : cfg.work) {
    s.work.push_back(w.trimmed());
    s.work_heads.push_back(w.head);
  }
  s.run_head = cfg.run_head;
  s.top_moves = cfg.top_moves;
  s.buffer_length = cfg.buffer.size();
  s.last_append = last_append;
  s.truncation = ctx.of(cfg.buffer);
  return s;
}

Sketch sketch_advance(const HpmSpec& spec, const Sketch& s, const GlobalHistory& h, const SymbolSource& source,
                      const TruncationContext& ctx) {
  if (s.halted) {
    Sketch n = s;
    n.last_append.clear();
    return n;
  }
  // H': drop everything from the (m+1)-th top entry on.
  std::size_t cut = h.size(), tops = 0;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i].label == Label::Top && tops++ == s.top_moves) {
      cut = i;
      break;
    }
  std::size_t p = 0;
  for (std::size_t i = 0; i < cut; ++i) p += 1 + h[i].size;

  char symbol = kBlank;
  if (s.run_head < p) {
    std::size_t start = 0;
    std::size_t ordinal[2] = {0, 0};
    for (std::size_t i = 0; i < cut; ++i) {
      std::size_t len = 1 + h[i].size;
      if (s.run_head < start + len) {
        std::size_t off = s.run_head - start;
        symbol = off == 0 ? label_char(h[i].label) : source(h[i].label, ordinal[h[i].label == Label::Bot], off);
        break;
      }
      ++ordinal[h[i].label == Label::Bot];
      start += len;
    }
  }

  std::vector<char> work(s.work.size());
  for (std::size_t i = 0; i < work.size(); ++i)
    work[i] = s.work_heads[i] < s.work[i].size() ? s.work[i][s.work_heads[i]] : kBlank;
  const Transition* t = spec.find(s.state, symbol, work);
  Sketch n = s;
  if (!t) {
    n.halted = true;
    n.last_append.clear();
    return n;
  }
  for (std::size_t i = 0; i < work.size(); ++i) {
    std::string& cells = n.work[i];
    std::size_t hd = n.work_heads[i];
    if (t->writes[i] != kWildcard) {
      if (hd >= cells.size()) cells.resize(hd + 1, kBlank);
      cells[hd] = t->writes[i];
      std::size_t e = cells.find_last_not_of(kBlank);
      cells.resize(e == std::string::npos ? 0 : e + 1);
    }
    n.work_heads[i] = move_head(hd, t->work_dirs[i], SIZE_MAX);
  }
  n.run_head = move_head(s.run_head, t->run_dir, p);
  n.state = t->to;
  if (spec.is_move_state(n.state)) {
    n.top_moves = s.top_moves + 1;
    n.buffer_length = 0;
    n.last_append.clear();
    n.truncation = Truncation{};
  } else {
    n.buffer_length = s.buffer_length + t->append.size();
    n.last_append = t->append;
    n.truncation = ctx.extend(s.truncation, t->append);
  }
  return n;
}

}  // namespace clarith
