#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clarith/bounds.hpp"
#include "clarith/run.hpp"

namespace clarith {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Const, Succ, Size };
  Kind kind;
  std::string text;  // variable name or binary literal
  TermPtr sub;       // Succ / Size operand

  static TermPtr var(std::string name);
  static TermPtr constant(std::string bits);
  static TermPtr succ(TermPtr t);
  static TermPtr size(TermPtr t);
};

std::string term_str(const TermPtr& t);
bool term_equal(const TermPtr& a, const TermPtr& b);

enum class FKind { Atom, Not, And, Or, Implies, ChoiceAll, ChoiceEx, BlindAll, BlindEx };
// Size: |x| <= B (written [B]); Value: x <= B (written [<= B]).
enum class BoundShape { Size, Value };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind;
  std::string name;            // relation name for atoms, bound variable for quantifiers
  std::vector<TermPtr> terms;  // atom arguments
  BoundExpr bound;             // choice bound or blind range
  BoundShape shape = BoundShape::Size;
  std::vector<FormulaPtr> kids;

  static FormulaPtr atom(std::string rel, std::vector<TermPtr> args);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr choice_all(std::string var, BoundExpr b, FormulaPtr body, BoundShape s = BoundShape::Size);
  static FormulaPtr choice_ex(std::string var, BoundExpr b, FormulaPtr body, BoundShape s = BoundShape::Size);
  static FormulaPtr blind_all(std::string var, BoundExpr range, FormulaPtr body);
  static FormulaPtr blind_ex(std::string var, BoundExpr range, FormulaPtr body);

  bool is_choice() const { return kind == FKind::ChoiceAll || kind == FKind::ChoiceEx; }
  bool is_blind() const { return kind == FKind::BlindAll || kind == FKind::BlindEx; }
};

FormulaPtr parse_formula(const std::string& text);  // throws FormulaSyntaxError
std::string formula_str(const FormulaPtr& f);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

struct FormulaSyntaxError : std::runtime_error {
  std::size_t position;
  FormulaSyntaxError(std::size_t pos, const std::string& what)
      : std::runtime_error("formula syntax error at " + std::to_string(pos) + ": " + what), position(pos) {}
};

// Free variables in lexicographic order.
std::vector<std::string> free_variables(const FormulaPtr& f);

// Replace free occurrences of variables by terms (quantifier bounds included).
FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, TermPtr>& repl);

// A choice operator occurrence. Moves at it read "<address>#<numer>".
struct ChoiceSite {
  std::string address;
  const Formula* node = nullptr;
  bool universal = false;          // choice-all unit
  Label owner = Label::Top;        // who resolves it
  std::optional<std::size_t> parent;  // nearest enclosing site
  std::size_t depth = 1;           // enclosing sites including itself
  std::set<std::string> blind_scope;  // blind variables in scope
};

// Sites in preorder.
std::vector<ChoiceSite> choice_sites(const FormulaPtr& f);

struct ChoiceCensus {
  std::size_t D = 0;      // e + free-variable count
  std::size_t e_top = 0;
  std::size_t e_bot = 0;
  std::size_t e = 0;
  std::size_t h = 0;      // longest #-free quasilegal move prefix
  std::size_t v = 0;      // free-variable count
};

ChoiceCensus choice_census(const FormulaPtr& f);

struct AggregateBounds {
  UnaryBound f;  // subaggregate
  UnaryBound G;  // superaggregate
  std::size_t n = 0;
  UnaryBound S(std::size_t i) const;  // max(f, .., f^i)
};

AggregateBounds aggregate_bounds(const FormulaPtr& f);

struct Unit {
  std::string path;  // site address
  bool universal = false;
  std::string master_variable;
  BoundExpr master_bound;
  BoundShape shape = BoundShape::Size;
  std::size_t depth = 1;
};

std::vector<Unit> units(const FormulaPtr& f);

enum class UnitStatus { Unresolved, WellResolved, IllResolved, Critical };

struct UnitClassification {
  std::vector<UnitStatus> status;                              // parallel to units()
  std::map<std::string, std::string> resolvents;               // master variable -> numer
  std::optional<std::string> resolvent(const std::string& var) const;
};

// c maps free variables to constants. Throws std::domain_error if Gamma is not quasilegal.
UnitClassification classify_units(const FormulaPtr& f, const Run& gamma, const std::map<std::string, Natural>& c);

// Atom truth: relation name and argument values. Return nullopt to defer to built-ins.
using AtomEvaluator = std::function<std::optional<bool>(const std::string&, const std::vector<Natural>&)>;

Natural eval_term(const TermPtr& t, const std::map<std::string, Natural>& env);
bool eval_atom(const Formula& atom, const std::map<std::string, Natural>& env, const AtomEvaluator& atoms);

// Assign constants to free variables in lexicographic order.
std::map<std::string, Natural> bind_constants(const FormulaPtr& f, const std::vector<Natural>& c);

}  // namespace clarith
