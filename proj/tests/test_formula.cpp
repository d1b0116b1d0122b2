#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bunchworks/formula.hpp"

using namespace bunchworks;

TEST_CASE("parse wand and conjunction") {
  auto f = parse_formula("x & (y -* z)", Dialect::CoreBI);
  REQUIRE(f->kind == Formula::Kind::And);
  CHECK(f->lhs->kind == Formula::Kind::Var);
  CHECK(f->lhs->name == "x");
  CHECK(f->rhs->kind == Formula::Kind::LRes);
  CHECK(f->rhs->lhs->name == "y");
  CHECK(f->rhs->rhs->name == "z");
}

TEST_CASE("fuse parses left-associative and flattens") {
  auto f = parse_formula("x . y . z", Dialect::CoreGBI);
  REQUIRE(f->kind == Formula::Kind::Fuse);
  CHECK(f->lhs->kind == Formula::Kind::Fuse);  // (x.y).z
  auto n = normalize(f);
  auto m = normalize(parse_formula("x . (y . z)", Dialect::CoreGBI));
  CHECK(formula_equal(n, m));
}

TEST_CASE("points-to-list parses") {
  auto f = parse_formula("x |->l [1,2]", Dialect::SLAssertion);
  REQUIRE(f->kind == Formula::Kind::PointsToList);
  CHECK(f->e1->kind == Expr::Kind::LogVar);
  REQUIRE(f->elist.size() == 2);
  CHECK(f->elist[0]->num == 1);
  CHECK(f->elist[1]->num == 2);
}

TEST_CASE("dialect violations are reported") {
  CHECK_THROWS_AS(parse_formula("x \\ y", Dialect::CoreBI), ParseError);
  CHECK_THROWS_AS(parse_formula("x -* y", Dialect::CoreGBI), ParseError);
  CHECK_THROWS_AS(parse_formula("emp", Dialect::CoreGBI), ParseError);
  try {
    parse_formula("x &", Dialect::CoreGBI);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position == 3);
  }
}

TEST_CASE("normal form: associativity, units, commutativity of meet") {
  auto a = normalize(parse_formula("(x . y) . z", Dialect::CoreGBI));
  auto b = normalize(parse_formula("x . (y . z)", Dialect::CoreGBI));
  CHECK(formula_equal(a, b));

  auto c = normalize(parse_formula("x & top", Dialect::CoreGBI));
  CHECK(formula_equal(c, f_var("x")));

  auto d = normalize(parse_formula("y & x", Dialect::CoreGBI));
  auto e = normalize(parse_formula("x & y", Dialect::CoreGBI));
  CHECK(formula_equal(d, e));

  // fuse is order-preserving: x.y and y.x differ
  auto g = normalize(parse_formula("x . y", Dialect::CoreGBI));
  auto h = normalize(parse_formula("y . x", Dialect::CoreGBI));
  CHECK(!formula_equal(g, h));
  // ... except in BI mode
  CHECK(formula_equal(normalize(g, NormMode::BI), normalize(h, NormMode::BI)));
}

TEST_CASE("unit absorption list") {
  const char* units[] = {"x . 1", "1 . x", "x & top", "top & x", "x | bot", "bot | x"};
  for (auto s : units) {
    auto f = normalize(parse_formula(s, Dialect::CoreGBI));
    CHECK(formula_equal(f, f_var("x")));
  }
}

TEST_CASE("bunch decompositions") {
  auto f = parse_formula("x & (y . z)", Dialect::CoreGBI);
  auto ds = bunch_decompositions(f);
  CHECK(ds.size() == 5);
  for (auto& [u, s] : ds) {
    CHECK(bunch_valid(u));
    CHECK(formula_equal(bunch_plug(u, s), f));
  }

  auto g = parse_formula("x -> y", Dialect::CoreGBI);
  CHECK(bunch_decompositions(g).size() == 1);

  auto one = parse_formula("1", Dialect::CoreGBI);
  CHECK(bunch_decompositions(one).size() == 1);
}

// independent oracle: count subterm occurrences reachable through fuse/and
static std::size_t count_path_subterms(const FormulaPtr& f) {
  std::size_t n = 1;
  if (f->kind == Formula::Kind::Fuse || f->kind == Formula::Kind::And)
    n += count_path_subterms(f->lhs) + count_path_subterms(f->rhs);
  return n;
}

// small random formula generator over the core GBI signature
static FormulaPtr random_formula(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> leaf(0, 5), node(0, 5);
  if (depth == 0 || leaf(rng) == 0) {
    switch (leaf(rng)) {
      case 0: return f_top();
      case 1: return f_bot();
      case 2: return f_one();
      default: {
        std::uniform_int_distribution<int> v(0, 2);
        return f_var(std::string(1, char('x' + v(rng))));
      }
    }
  }
  auto l = random_formula(rng, depth - 1);
  auto r = random_formula(rng, depth - 1);
  switch (node(rng)) {
    case 0: return f_and(l, r);
    case 1: return f_or(l, r);
    case 2: return f_imp(l, r);
    case 3: return f_fuse(l, r);
    case 4: return f_lres(l, r);
    default: return f_rres(l, r);
  }
}

TEST_CASE("property: normalize is idempotent; render/parse round-trips; decomposition counts") {
  std::mt19937 rng(20240711);
  for (int i = 0; i < 500; ++i) {
    auto f = random_formula(rng, 4);

    auto n1 = normalize(f);
    auto n2 = normalize(n1);
    CHECK(formula_equal(n1, n2));

    auto back = parse_formula(render(f), Dialect::CoreGBI);
    CHECK(formula_equal(normalize(back), n1));

    CHECK(bunch_decompositions(f).size() == count_path_subterms(f));
  }
}

TEST_CASE("propositional substitution") {
  auto f = parse_formula("x -> y", Dialect::CoreGBI);
  auto g = parse_formula("a & b", Dialect::CoreGBI);
  auto h = subst_var(f, "x", g);
  CHECK(render(h) == "a & b -> y");
}

TEST_CASE("capture-avoiding expression substitution") {
  // (E v. x = v)[x := v]  ~~>  E v'. v = v'
  auto f = parse_formula("E v. x = v", Dialect::SLAssertion);
  auto h = subst_expr(f, false, "x", e_avar("v"));
  REQUIRE(h->kind == Formula::Kind::Exists);
  CHECK(h->name == "v'");
  auto body = h->lhs;
  REQUIRE(body->kind == Formula::Kind::Eq);
  CHECK(render_expr(body->e1) == "v");
  CHECK(render_expr(body->e2) == "v'");
}

TEST_CASE("assignment-axiom style substitution P[a/X]") {
  auto p = parse_formula("X = 3", Dialect::SLAssertion);
  auto h = subst_expr(p, true, "X", e_add(e_pvar("X"), e_num(1)));
  CHECK(render(h) == "X+1 = 3");
}

TEST_CASE("sort mismatch and invariants") {
  CHECK_THROWS(f_points_to_list(e_avar("x"), {}));
  // quantifier binds AVar only
  CHECK_THROWS_AS(parse_formula("E X. X = 1", Dialect::SLAssertion), ParseError);
}
