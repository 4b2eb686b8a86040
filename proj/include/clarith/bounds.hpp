#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "clarith/natural.hpp"

namespace clarith {

class UnaryBound;

// Immutable monotone bound expression. A variable node stands for the size |v|
// of the named variable; the unary variable "z" stands for a number directly.
class BoundExpr {
 public:
  enum class Kind { Lit, Var, Add, Mul, Max, Log, Apply };

  BoundExpr();  // literal 0
  static BoundExpr lit(Natural n);
  static BoundExpr var(std::string name);
  static BoundExpr add(BoundExpr a, BoundExpr b);
  static BoundExpr mul(BoundExpr a, BoundExpr b);
  static BoundExpr max(std::vector<BoundExpr> args);
  static BoundExpr log(BoundExpr a);
  // f(arg) where f is a unary bound; kept symbolic so iterates stay linear in size.
  static BoundExpr apply(const UnaryBound& f, BoundExpr arg);

  Kind kind() const;
  const Natural& literal() const;
  const std::string& name() const;
  const std::vector<BoundExpr>& args() const;

  std::set<std::string> variables() const;
  // Evaluate with every variable bound to a size (not a value).
  Natural eval_sizes(const std::map<std::string, Natural>& sizes) const;
  BoundExpr substitute(const std::map<std::string, BoundExpr>& repl) const;
  std::string str() const;

  friend bool operator==(const BoundExpr& a, const BoundExpr& b);
  friend bool operator!=(const BoundExpr& a, const BoundExpr& b) { return !(a == b); }

 private:
  struct Node;
  explicit BoundExpr(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

// A bound in the single variable z (or a constant).
class UnaryBound {
 public:
  UnaryBound();  // constant 0
  explicit UnaryBound(BoundExpr body);  // throws unless variables(body) is a subset of {z}
  static UnaryBound identity();
  static UnaryBound constant(Natural n);

  Natural operator()(const Natural& z) const;
  const BoundExpr& body() const { return body_; }
  std::string str() const { return body_.str(); }

 private:
  BoundExpr body_;
};

inline const char* kUnaryVar = "z";

// Values of the named variables; |v| is taken of each before evaluation.
Natural evaluate_bound(const BoundExpr& b, const std::map<std::string, Natural>& env);

UnaryBound unarify(const BoundExpr& b);
UnaryBound compose(const UnaryBound& f, const UnaryBound& g);  // f(g(z))
UnaryBound iterate(const UnaryBound& f, std::size_t i);         // f^i, f^0 = identity
UnaryBound pointwise_max(const std::vector<UnaryBound>& fs);    // 0 if empty

BoundExpr parse_bound(const std::string& text);

// Pointwise a <= b on the grid lo..hi.
bool sampled_le(const UnaryBound& a, const UnaryBound& b, unsigned lo = 0, unsigned hi = 1024);
// Nondecreasing on lo..hi.
bool sampled_monotone(const UnaryBound& f, unsigned lo = 0, unsigned hi = 1024);

struct TricomplexityTriple {
  UnaryBound amplitude;
  UnaryBound space;
  UnaryBound time;
  bool le(const TricomplexityTriple& o, unsigned lo = 0, unsigned hi = 1024) const;
};

struct StatuteParams {
  Natural r;  // max state count of the two premise machines
  Natural g;  // max work-tape count
  Natural q;  // max tape alphabet size
  Natural e;  // e_top + e_bot
  Natural v;  // free variables other than x
  Natural h;  // longest #-free move prefix
  UnaryBound G;
};

Natural statute_limit(const Natural& w, const Natural& u, const StatuteParams& p);

}  // namespace clarith
