#include "clarith/bounds.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace clarith {

struct BoundExpr::Node {
  Kind kind = Kind::Lit;
  Natural value = 0;
  std::string name;
  std::vector<BoundExpr> args;  // for Apply: args[0] = f body, args[1] = argument
};

BoundExpr::BoundExpr() : node_(std::make_shared<Node>()) {}
BoundExpr::BoundExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

BoundExpr BoundExpr::lit(Natural n) {
  auto node = std::make_shared<Node>();
  node->value = std::move(n);
  return BoundExpr(node);
}

BoundExpr BoundExpr::var(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Var;
  node->name = std::move(name);
  return BoundExpr(node);
}

BoundExpr BoundExpr::add(BoundExpr a, BoundExpr b) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Add;
  node->args = {std::move(a), std::move(b)};
  return BoundExpr(node);
}

BoundExpr BoundExpr::mul(BoundExpr a, BoundExpr b) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Mul;
  node->args = {std::move(a), std::move(b)};
  return BoundExpr(node);
}

BoundExpr BoundExpr::max(std::vector<BoundExpr> args) {
  if (args.empty()) return lit(0);
  std::vector<BoundExpr> uniq;
  for (auto& a : args) {
    bool seen = false;
    for (auto& u : uniq)
      if (u == a) seen = true;
    if (!seen) uniq.push_back(std::move(a));
  }
  if (uniq.size() == 1) return uniq.front();
  auto node = std::make_shared<Node>();
  node->kind = Kind::Max;
  node->args = std::move(uniq);
  return BoundExpr(node);
}

BoundExpr BoundExpr::log(BoundExpr a) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Log;
  node->args = {std::move(a)};
  return BoundExpr(node);
}

BoundExpr BoundExpr::apply(const UnaryBound& f, BoundExpr arg) {
  if (f.body().variables().empty()) return f.body();
  if (f.body().kind() == Kind::Var) return arg;  // identity
  auto node = std::make_shared<Node>();
  node->kind = Kind::Apply;
  node->args = {f.body(), std::move(arg)};
  return BoundExpr(node);
}

BoundExpr::Kind BoundExpr::kind() const { return node_->kind; }
const Natural& BoundExpr::literal() const { return node_->value; }
const std::string& BoundExpr::name() const { return node_->name; }
const std::vector<BoundExpr>& BoundExpr::args() const { return node_->args; }

std::set<std::string> BoundExpr::variables() const {
  std::set<std::string> out;
  switch (kind()) {
    case Kind::Lit:
      break;
    case Kind::Var:
      out.insert(name());
      break;
    case Kind::Apply:
      return args()[1].variables();
    default:
      for (const auto& a : args()) {
        auto s = a.variables();
        out.insert(s.begin(), s.end());
      }
  }
  return out;
}

static Natural ceil_log2_succ(const Natural& x) {
  // ceil(log2(x+1)) = bit length of x, with 0 for x = 0
  if (x == 0) return 0;
  return Natural(boost::multiprecision::msb(x) + 1);
}

Natural BoundExpr::eval_sizes(const std::map<std::string, Natural>& sizes) const {
  switch (kind()) {
    case Kind::Lit:
      return literal();
    case Kind::Var: {
      auto it = sizes.find(name());
      if (it == sizes.end()) throw std::out_of_range("missing assignment for variable " + name());
      return it->second;
    }
    case Kind::Add:
      return args()[0].eval_sizes(sizes) + args()[1].eval_sizes(sizes);
    case Kind::Mul:
      return args()[0].eval_sizes(sizes) * args()[1].eval_sizes(sizes);
    case Kind::Max: {
      Natural m = 0;
      for (const auto& a : args()) {
        Natural v = a.eval_sizes(sizes);
        if (v > m) m = v;
      }
      return m;
    }
    case Kind::Log:
      return ceil_log2_succ(args()[0].eval_sizes(sizes));
    case Kind::Apply: {
      Natural inner = args()[1].eval_sizes(sizes);
      return args()[0].eval_sizes({{kUnaryVar, inner}});
    }
  }
  return 0;
}

BoundExpr BoundExpr::substitute(const std::map<std::string, BoundExpr>& repl) const {
  switch (kind()) {
    case Kind::Lit:
      return *this;
    case Kind::Var: {
      auto it = repl.find(name());
      return it == repl.end() ? *this : it->second;
    }
    case Kind::Add:
      return add(args()[0].substitute(repl), args()[1].substitute(repl));
    case Kind::Mul:
      return mul(args()[0].substitute(repl), args()[1].substitute(repl));
    case Kind::Max: {
      std::vector<BoundExpr> v;
      for (const auto& a : args()) v.push_back(a.substitute(repl));
      return max(std::move(v));
    }
    case Kind::Log:
      return log(args()[0].substitute(repl));
    case Kind::Apply: {
      auto node = std::make_shared<Node>();
      node->kind = Kind::Apply;
      node->args = {args()[0], args()[1].substitute(repl)};
      return BoundExpr(node);
    }
  }
  return *this;
}

namespace {

int precedence(const BoundExpr& e) {
  switch (e.kind()) {
    case BoundExpr::Kind::Add:
      return 1;
    case BoundExpr::Kind::Mul:
      return 2;
    case BoundExpr::Kind::Apply:
      return precedence(e.args()[0].substitute({{kUnaryVar, e.args()[1]}}));
    default:
      return 3;
  }
}

void print(const BoundExpr& e, std::ostream& os, int ctx) {
  using K = BoundExpr::Kind;
  if (e.kind() == K::Apply) {
    print(e.args()[0].substitute({{kUnaryVar, e.args()[1]}}), os, ctx);
    return;
  }
  int p = precedence(e);
  bool paren = p < ctx;
  if (paren) os << '(';
  switch (e.kind()) {
    case K::Lit:
      os << e.literal();
      break;
    case K::Var:
      os << '|' << e.name() << '|';
      break;
    case K::Add:
      print(e.args()[0], os, 1);
      os << '+';
      print(e.args()[1], os, 2);
      break;
    case K::Mul:
      print(e.args()[0], os, 2);
      os << '*';
      print(e.args()[1], os, 3);
      break;
    case K::Max:
      os << "max(";
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) os << ',';
        print(e.args()[i], os, 0);
      }
      os << ')';
      break;
    case K::Log:
      os << "log(";
      print(e.args()[0], os, 0);
      os << ')';
      break;
    case K::Apply:
      break;
  }
  if (paren) os << ')';
}

}  // namespace

std::string BoundExpr::str() const {
  std::ostringstream os;
  print(*this, os, 0);
  return os.str();
}

bool operator==(const BoundExpr& a, const BoundExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case BoundExpr::Kind::Lit:
      return a.literal() == b.literal();
    case BoundExpr::Kind::Var:
      return a.name() == b.name();
    default:
      if (a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (a.args()[i] != b.args()[i]) return false;
      return true;
  }
}

UnaryBound::UnaryBound() : body_(BoundExpr::lit(0)) {}

UnaryBound::UnaryBound(BoundExpr body) : body_(std::move(body)) {
  for (const auto& v : body_.variables())
    if (v != kUnaryVar) throw std::invalid_argument("unary bound mentions variable " + v);
}

UnaryBound UnaryBound::identity() { return UnaryBound(BoundExpr::var(kUnaryVar)); }
UnaryBound UnaryBound::constant(Natural n) { return UnaryBound(BoundExpr::lit(std::move(n))); }

Natural UnaryBound::operator()(const Natural& z) const { return body_.eval_sizes({{kUnaryVar, z}}); }

Natural evaluate_bound(const BoundExpr& b, const std::map<std::string, Natural>& env) {
  std::map<std::string, Natural> sizes;
  for (const auto& v : b.variables()) {
    auto it = env.find(v);
    if (it == env.end()) throw std::out_of_range("missing assignment for variable " + v);
    sizes[v] = Natural(size_of(it->second));
  }
  return b.eval_sizes(sizes);
}

UnaryBound unarify(const BoundExpr& b) {
  std::map<std::string, BoundExpr> repl;
  for (const auto& v : b.variables()) repl.emplace(v, BoundExpr::var(kUnaryVar));
  return UnaryBound(b.substitute(repl));
}

UnaryBound compose(const UnaryBound& f, const UnaryBound& g) { return UnaryBound(BoundExpr::apply(f, g.body())); }

UnaryBound iterate(const UnaryBound& f, std::size_t i) {
  UnaryBound r = UnaryBound::identity();
  for (std::size_t k = 0; k < i; ++k) r = compose(f, r);
  return r;
}

UnaryBound pointwise_max(const std::vector<UnaryBound>& fs) {
  std::vector<BoundExpr> v;
  for (const auto& f : fs) v.push_back(f.body());
  return UnaryBound(BoundExpr::max(std::move(v)));
}

namespace {

class BoundParser {
 public:
  explicit BoundParser(const std::string& s) : s_(s) {}

  BoundExpr parse() {
    BoundExpr e = sum();
    skip();
    if (i_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("bound syntax error at " + std::to_string(i_) + ": " + what);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool accept(const std::string& tok) {
    skip();
    if (s_.compare(i_, tok.size(), tok) == 0) {
      i_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }

  BoundExpr sum() {
    BoundExpr e = product();
    while (accept("+")) e = BoundExpr::add(e, product());
    return e;
  }
  BoundExpr product() {
    BoundExpr e = atom();
    while (accept("*")) e = BoundExpr::mul(e, atom());
    return e;
  }
  BoundExpr atom() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      Natural n(s_.substr(i_, j - i_));
      i_ = j;
      return BoundExpr::lit(n);
    }
    if (c == '|') {
      ++i_;
      skip();
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      if (j == i_) fail("expected identifier");
      std::string name = s_.substr(i_, j - i_);
      i_ = j;
      expect("|");
      return BoundExpr::var(name);
    }
    if (accept("max(")) {
      std::vector<BoundExpr> args{sum()};
      while (accept(",")) args.push_back(sum());
      expect(")");
      return BoundExpr::max(std::move(args));
    }
    if (accept("log(")) {
      BoundExpr a = sum();
      expect(")");
      return BoundExpr::log(a);
    }
    if (accept("(")) {
      BoundExpr a = sum();
      expect(")");
      return a;
    }
    fail(std::string("unexpected '") + c + "'");
  }
};

}  // namespace

BoundExpr parse_bound(const std::string& text) { return BoundParser(text).parse(); }

bool sampled_le(const UnaryBound& a, const UnaryBound& b, unsigned lo, unsigned hi) {
  for (unsigned z = lo; z <= hi; ++z)
    if (a(z) > b(z)) return false;
  return true;
}

bool sampled_monotone(const UnaryBound& f, unsigned lo, unsigned hi) {
  Natural prev = f(lo);
  for (unsigned z = lo + 1; z <= hi; ++z) {
    Natural cur = f(z);
    if (cur < prev) return false;
    prev = cur;
  }
  return true;
}

bool TricomplexityTriple::le(const TricomplexityTriple& o, unsigned lo, unsigned hi) const {
  return sampled_le(amplitude, o.amplitude, lo, hi) && sampled_le(space, o.space, lo, hi) &&
         sampled_le(time, o.time, lo, hi);
}

Natural statute_limit(const Natural& w, const Natural& u, const StatuteParams& p) {
  using boost::multiprecision::pow;
  auto small = [](const Natural& n) { return static_cast<unsigned>(clamp_to_size(n)); };
  Natural heads = pow(u + 1, small(p.g));
  Natural runhead = (p.v + 1) * (w + 2) + 2 * p.e * (p.G(w) + p.h + 2) + 1;
  Natural contents = pow(p.q, small(p.g * u));
  return p.r * heads * runhead * contents * 2 * p.e;
}

}  // namespace clarith
