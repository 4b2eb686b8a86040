#include <random>
#include <set>

#include "clarith/formula.hpp"
#include "clarith/game.hpp"
#include "clarith/zoo.hpp"
#include "doctest.h"

using namespace clarith;

namespace {

// Random trees whose binders are pairwise distinct and never clash with a free
// variable, so that parsing has nothing to rename.
struct TreeGen {
  std::mt19937_64 rng;
  std::vector<std::string> scope;
  int fresh = 0;

  TermPtr term() {
    static const char* frees[] = {"a", "x", "w"};
    std::string v = !scope.empty() && rng() % 2 ? scope[rng() % scope.size()] : frees[rng() % 3];
    switch (rng() % 4) {
      case 0:
        return Term::constant(std::vector<std::string>{"0", "1", "101"}[rng() % 3]);
      case 1:
        return Term::succ(Term::var(v));
      default:
        return Term::var(v);
    }
  }

  BoundExpr bound() {
    static const char* texts[] = {"|x|", "|x|+1", "max(|x|,|w|)", "|w|*2", "3"};
    return parse_bound(texts[rng() % 5]);
  }

  FormulaPtr quantified(unsigned kind, int depth) {
    std::string v = "u" + std::to_string(fresh++);
    BoundExpr b = bound();
    BoundShape shape = rng() % 2 ? BoundShape::Size : BoundShape::Value;
    scope.push_back(v);
    FormulaPtr body = formula(depth - 1);
    scope.pop_back();
    switch (kind) {
      case 5:
        return Formula::choice_all(v, b, body, shape);
      case 6:
        return Formula::choice_ex(v, b, body, shape);
      case 7:
        return Formula::blind_all(v, b, body);
      default:
        return Formula::blind_ex(v, b, body);
    }
  }

  FormulaPtr formula(int depth) {
    unsigned pick = depth <= 0 ? 0 : static_cast<unsigned>(rng() % 9);
    switch (pick) {
      case 0: {
        unsigned k = static_cast<unsigned>(rng() % 5);
        if (k == 0) return Formula::atom("=", {term(), term()});
        if (k == 1) return Formula::atom("<=", {term(), term()});
        if (k == 2) return Formula::atom("Bit", {term(), term()});
        if (k == 3) return Formula::atom("p", {term()});
        return Formula::atom("q", {term(), term()});
      }
      case 1:
        return Formula::negation(formula(depth - 1));
      case 2:
        return Formula::conj(formula(depth - 1), formula(depth - 1));
      case 3:
        return Formula::disj(formula(depth - 1), formula(depth - 1));
      case 4:
        return Formula::implies(formula(depth - 1), formula(depth - 1));
      default:
        return quantified(pick, depth);
    }
  }
};

void collect_binders(const FormulaPtr& f, std::vector<std::string>& out) {
  if (f->is_choice() || f->is_blind()) out.push_back(f->name);
  for (const auto& k : f->kids) collect_binders(k, out);
}

}  // namespace

TEST_CASE("parse a choice existential") {
  FormulaPtr f = parse_formula("ade v [|x|+1] (v = x)");
  REQUIRE(f->kind == FKind::ChoiceEx);
  CHECK(f->name == "v");
  CHECK(f->bound == parse_bound("|x|+1"));
  CHECK(f->shape == BoundShape::Size);
  const FormulaPtr& body = f->kids[0];
  REQUIRE(body->kind == FKind::Atom);
  CHECK(body->name == "=");
  CHECK(term_equal(body->terms[0], Term::var("v")));
  CHECK(term_equal(body->terms[1], Term::var("x")));
}

TEST_CASE("the worked example parses to a disjunction of two universal units") {
  FormulaPtr h = parse_formula(zoo::kAppBFormula);
  REQUIRE(h->kind == FKind::Or);
  for (const auto& kid : h->kids) {
    CHECK(kid->kind == FKind::ChoiceAll);
    CHECK(kid->kids[0]->kind == FKind::ChoiceEx);
  }
  CHECK(free_variables(h) == std::vector<std::string>{"x"});
}

TEST_CASE("syntax errors carry a position") {
  CHECK_THROWS_AS(parse_formula("ada x p(x)"), FormulaSyntaxError);
  CHECK_THROWS_AS(parse_formula("ade v [|x|] (v = "), FormulaSyntaxError);
  CHECK_THROWS_AS(parse_formula("p(x) &"), FormulaSyntaxError);
  try {
    parse_formula("p(x) & & q(x)");
    FAIL("expected a syntax error");
  } catch (const FormulaSyntaxError& e) {
    CHECK(e.position > 0);
  }
}

TEST_CASE("value-bounded choice") {
  FormulaPtr f = parse_formula("ade v [<= |x|+1] (v = x)");
  CHECK(f->shape == BoundShape::Value);
  CHECK(formula_equal(parse_formula(formula_str(f)), f));
}

TEST_CASE("property: printing then parsing returns the same tree") {
  TreeGen gen{std::mt19937_64(17)};
  for (int i = 0; i < 500; ++i) {
    FormulaPtr f = gen.formula(4);
    std::string text = formula_str(f);
    INFO(text);
    CHECK(formula_equal(parse_formula(text), f));
  }
  for (const auto& text : zoo::zoo_formulas()) {
    FormulaPtr f = parse_formula(text);
    CHECK(formula_equal(parse_formula(formula_str(f)), f));
  }
}

TEST_CASE("parsing renames rebound variables apart") {
  FormulaPtr f = parse_formula("ada y [|x|] ada y [|x|] p(y) & ade x [|x|] p(x)");
  std::vector<std::string> binders;
  collect_binders(f, binders);
  std::set<std::string> distinct(binders.begin(), binders.end());
  CHECK(distinct.size() == binders.size());
  CHECK(distinct.count("x") == 0);
  CHECK(free_variables(f) == std::vector<std::string>{"x"});
}

TEST_CASE("property: printing a parsed formula is a fixed point") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 300; ++i) {
    static const char* clash[] = {"ade a [|x|] ada a [|a|] p(a)", "cla x < |x| : ade x [|x|] (x = x)",
                                  "ada y [|x|] q(y,x) & ada y [|x|+1] q(y,x)"};
    FormulaPtr f = parse_formula(clash[rng() % 3]);
    std::string once = formula_str(f);
    CHECK(formula_str(parse_formula(once)) == once);
  }
}

TEST_CASE("choice census") {
  auto one = choice_census(parse_formula("ade v [|x|] p(v)"));
  CHECK(one.e_top == 1);
  CHECK(one.e_bot == 0);
  auto flip = choice_census(parse_formula("ade v [|x|] p(v) -> ade w [|x|] p(w)"));
  CHECK(flip.e_top == 1);
  CHECK(flip.e_bot == 1);
  CHECK(flip.e == 2);
  auto neg = choice_census(parse_formula("~ade v [|x|] p(v)"));
  CHECK(neg.e_top == 0);
  CHECK(neg.e_bot == 1);
  auto h = choice_census(parse_formula(zoo::kAppBFormula));
  CHECK(h.e_bot == 2);
  CHECK(h.e_top == 2);
  CHECK(h.h == 4);
  CHECK(h.v == 1);
}

TEST_CASE("longest #-free move prefix by enumeration") {
  // Every top or bottom move is "<address>#<numer>"; h is the longest address.
  for (const auto& text : zoo::zoo_formulas()) {
    GameShape g(parse_formula(text));
    std::size_t longest = 0;
    for (const auto& s : g.sites()) longest = std::max(longest, s.address.size());
    CHECK(g.census().h == longest);
  }
}

TEST_CASE("aggregate bounds") {
  auto h = aggregate_bounds(parse_formula(zoo::kAppBFormula));
  auto single = aggregate_bounds(parse_formula("ade v [|x|+1] (v = x)"));
  auto pair = aggregate_bounds(parse_formula("ade a [|x|+1] ade b [|x|*2] p(a,b)"));
  auto none = aggregate_bounds(parse_formula("p(x)"));
  for (unsigned z = 0; z <= 16; ++z) {
    CHECK(h.f(z) == z);
    CHECK(h.G(z) == z);
    CHECK(single.f(z) == z + 1);
    CHECK(single.G(z) == z + 1);
    // f = max(z+1, 2z); G = max(f, f o f) by direct composition.
    Natural f = std::max<Natural>(z + 1, 2 * z);
    Natural ff = std::max<Natural>(f + 1, 2 * f);
    CHECK(pair.f(z) == f);
    CHECK(pair.G(z) == std::max(f, ff));
    if (z >= 1) CHECK(pair.G(z) == 4 * z);
    CHECK(none.G(z) == 0);
  }
  CHECK(pair.G(0) == 2);
}

TEST_CASE("property: adding a choice operator never lowers G") {
  const char* pairs[][2] = {
      {"ade a [|x|] p(a)", "ade a [|x|] ade b [|x|+1] p(a,b)"},
      {"ade a [|x|+1] p(a)", "ade a [|x|+1] p(a) & ada b [|x|*2] q(b)"},
      {"ada y [|x|] p(y)", "ada y [|x|] ade z [|y|+1] p(z,y)"},
  };
  for (auto& pr : pairs) {
    auto small = aggregate_bounds(parse_formula(pr[0]));
    auto big = aggregate_bounds(parse_formula(pr[1]));
    CHECK(sampled_le(small.G, big.G, 0, 256));
  }
}

TEST_CASE("units") {
  auto one = units(parse_formula("ade v [|x|] p(v)"));
  REQUIRE(one.size() == 1);
  CHECK_FALSE(one[0].universal);
  CHECK(one[0].depth == 1);
  CHECK(one[0].master_variable == "v");
  auto nested = units(parse_formula("ada y [|x|] ade z [|y|] p(z)"));
  REQUIRE(nested.size() == 2);
  CHECK(nested[0].depth == 1);
  CHECK(nested[1].depth == 2);
  CHECK(nested[0].universal);
  auto h = units(parse_formula(zoo::kAppBFormula));
  REQUIRE(h.size() == 4);
  std::vector<std::size_t> depths;
  for (const auto& u : h) depths.push_back(u.depth);
  CHECK(depths == std::vector<std::size_t>{1, 2, 1, 2});
}

TEST_CASE("classify units") {
  FormulaPtr h = parse_formula("ade x [|y|] p(x)");
  std::map<std::string, Natural> c{{"y", 8}};
  auto empty = classify_units(h, {}, c);
  CHECK(empty.status == std::vector<UnitStatus>{UnitStatus::Unresolved});
  auto well = classify_units(h, {top("#11")}, c);
  CHECK(well.status == std::vector<UnitStatus>{UnitStatus::WellResolved});
  CHECK(well.resolvent("x") == std::optional<std::string>("11"));
  auto ill = classify_units(h, {top("#11111")}, c);
  CHECK(ill.status == std::vector<UnitStatus>{UnitStatus::Critical});
  CHECK_THROWS_AS(classify_units(h, {top("#1"), top("#1")}, c), std::domain_error);

  FormulaPtr nested = parse_formula("ade a [|x|] ade b [|a|] p(a,b)");
  auto below = classify_units(nested, {top("#11111"), top("1.#111111")}, {{"x", 1}});
  CHECK(below.status == std::vector<UnitStatus>{UnitStatus::Critical, UnitStatus::IllResolved});
}

TEST_CASE("property: resolvents of well-resolved chains stay below S_depth") {
  for (const auto& text : zoo::zoo_formulas()) {
    FormulaPtr f = parse_formula(text);
    GameShape g(f);
    auto agg = aggregate_bounds(f);
    auto us = units(f);
    for (std::uint64_t id = 0; id < 150; ++id) {
      auto rng = zoo::case_rng(99, id);
      auto sk = zoo::random_skeleton(g, rng, 8);
      Run gamma(sk.run.begin() + static_cast<std::ptrdiff_t>(sk.constants.size()), sk.run.end());
      auto c = bind_constants(f, sk.constants);
      auto cls = classify_units(f, gamma, c);
      Natural biggest = 0;
      for (const auto& v : sk.constants) biggest = std::max(biggest, v);
      for (std::size_t s = 0; s < us.size(); ++s) {
        bool chain = true;
        for (std::size_t a : g.lineage(s)) chain = chain && cls.status[a] == UnitStatus::WellResolved;
        if (!chain) continue;
        auto a = cls.resolvent(us[s].master_variable);
        REQUIRE(a);
        CHECK(size_of(parse_constant(*a)) <= agg.S(us[s].depth)(size_of(biggest)));
      }
    }
  }
}

TEST_CASE("substitution and free variables") {
  FormulaPtr f = parse_formula("ade v [|x|+1] (v = x) & p(w)");
  CHECK(free_variables(f) == std::vector<std::string>{"w", "x"});
  FormulaPtr g = substitute(f, {{"w", Term::constant("101")}});
  CHECK(free_variables(g) == std::vector<std::string>{"x"});
  CHECK_THROWS(substitute(f, {{"x", Term::succ(Term::var("y"))}}));
  auto env = bind_constants(f, {5, 9});
  CHECK(env.at("w") == 5);
  CHECK(env.at("x") == 9);
}

TEST_CASE("terms and atoms") {
  std::map<std::string, Natural> env{{"x", 6}, {"y", 1}};
  CHECK(eval_term(Term::succ(Term::var("x")), env) == 7);
  CHECK(eval_term(Term::size(Term::var("x")), env) == 3);
  CHECK(eval_term(Term::constant("101"), env) == 5);
  CHECK(eval_atom(*parse_formula("Bit(y,x)"), env, nullptr));
  CHECK_FALSE(eval_atom(*parse_formula("Bit(0,x)"), env, nullptr));
  CHECK(eval_atom(*parse_formula("(y < x)"), env, nullptr));
  AtomEvaluator odd = [](const std::string& rel, const std::vector<Natural>& args) -> std::optional<bool> {
    if (rel != "odd") return std::nullopt;
    return args[0] % 2 == 1;
  };
  CHECK(eval_atom(*parse_formula("odd(y)"), env, odd));
  CHECK_FALSE(eval_atom(*parse_formula("odd(x)"), env, odd));
}
