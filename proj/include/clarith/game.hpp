#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clarith/formula.hpp"
#include "clarith/run.hpp"

namespace clarith {

// Precomputed move structure of a formula's game.
class GameShape {
 public:
  explicit GameShape(FormulaPtr f);

  const FormulaPtr& formula() const { return f_; }
  const std::vector<ChoiceSite>& sites() const { return sites_; }
  const ChoiceCensus& census() const { return census_; }
  const AggregateBounds& aggregates() const { return agg_; }
  const std::vector<std::string>& free_vars() const { return free_; }

  std::optional<std::size_t> site_at(std::string_view address) const;
  // "A#b" with A a site address and b canonical; nullopt otherwise.
  std::optional<std::pair<std::size_t, std::string>> parse_site_move(std::string_view move) const;
  // Site indices from the root down to s, inclusive.
  std::vector<std::size_t> lineage(std::size_t s) const;
  // Is s a prefix of "A#b" for some site A owned by `who` and canonical b?
  bool is_move_prefix(Label who, std::string_view s) const;
  // Prudence threshold G(|max c|).
  Natural threshold(const std::vector<Natural>& c) const;

 private:
  FormulaPtr f_;
  std::vector<ChoiceSite> sites_;
  std::map<std::string, std::size_t, std::less<>> by_addr_;
  ChoiceCensus census_;
  AggregateBounds agg_;
  std::vector<std::string> free_;
};

struct NumerInfo {
  std::string numer;
  std::size_t magnitude = 0;
};

NumerInfo numer_and_magnitude(const std::string& move);

enum class Projection { Top, Bot, Negate, Sub0, Sub1 };
Run project(const Run& g, Projection kind);

struct LegalStatus {
  bool legal = true;
  std::optional<std::size_t> illegal_at;
  std::optional<Label> illegal_by;
  bool top_quasilegal = true;
  bool bot_quasilegal = true;
};

// Gamma excludes the constant moves (c instantiates the free variables).
LegalStatus legal_status(const GameShape& g, const Run& gamma);
LegalStatus legal_status(const FormulaPtr& f, const std::vector<Natural>& c, const Run& gamma);
// Gamma is a run of the choice-universal closure: its first free-variable-count
// moves must be bottom's "#c" constant moves.
LegalStatus legal_status_closed(const GameShape& g, const Run& gamma);
bool quasilegal(const GameShape& g, const Run& gamma, Label who, bool closed = false);

// Resolved numer per site address for a legal run.
std::map<std::string, std::string> resolutions(const GameShape& g, const Run& gamma);

// Throws std::domain_error if gamma is not legal.
Label wins(const GameShape& g, const std::map<std::string, Natural>& c, const Run& gamma,
           const AtomEvaluator& atoms = nullptr);
Label wins(const FormulaPtr& f, const std::vector<Natural>& c, const Run& gamma, const AtomEvaluator& atoms = nullptr);

std::string prudentize(const std::string& move, const Natural& threshold);
std::string prudentize(const std::string& move, const GameShape& g, const std::vector<Natural>& c);

struct Truncation {
  std::string move;
  bool frozen = false;  // no extension of the original can change the result
  friend bool operator==(const Truncation& a, const Truncation& b) {
    return a.move == b.move && a.frozen == b.frozen;
  }
};

Truncation truncate_move(const std::string& move, const GameShape& g, const Natural& threshold);
std::string truncate(const std::string& move, const GameShape& g, const std::vector<Natural>& c);
// Truncation of (original + appended) given the truncation of the original.
Truncation extend_truncation(const Truncation& t, const std::string& appended, const GameShape& g,
                             const Natural& threshold);

struct Semiposition {
  std::vector<Labmove> moves;  // the last one is open unless complete
  bool complete = false;       // terminated by BLANK
};

struct SemipositionAnalysis {
  bool complete = false;
  bool legitimate = false;
  bool quasilegitimate = false;  // both top- and bottom-quasilegitimate
  std::string compression;
};

// Semipositions are read against the closure game: they include the constant moves.
SemipositionAnalysis analyze_semiposition(const Semiposition& s, const GameShape& g);
std::string compress(const Semiposition& s);

// Order '#' < '0' < '1' < '.', others after by byte; a proper prefix is smaller.
bool keyboard_less(std::string_view a, std::string_view b);

// V: all labels top, incomplete and quasilegitimate; throws std::invalid_argument otherwise.
std::string windup(const Semiposition& v, const GameShape& g);

bool is_p_delay(const Run& delta, const Run& omega);

}  // namespace clarith
