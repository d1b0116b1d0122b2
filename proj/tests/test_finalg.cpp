#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bunchworks/finalg.hpp"

using namespace bunchworks;
using namespace bunchworks::finalg;

namespace {

FinitePoset chain_poset(int n) {
  FinitePoset p;
  p.n = n;
  p.leq.assign(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) p.leq[a][b] = true;
  return p;
}

FinitePoset antichain(int n) {
  FinitePoset p;
  p.n = n;
  p.leq.assign(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a) p.leq[a][a] = true;
  return p;
}

FormulaPtr gbi(const std::string& s) { return parse_formula(s, Dialect::CoreGBI); }

}  // namespace

TEST_CASE("upsets of small posets") {
  auto l1 = upsets(chain_poset(1));
  CHECK(l1.poset.n == 2);  // {} and {*}

  auto l2 = upsets(antichain(2));
  CHECK(l2.poset.n == 4);  // Boolean square

  // independent oracle: the upsets of the 2-chain 0<1 are {}, {1}, {0,1}
  auto l3 = upsets(chain_poset(2));
  CHECK(l3.poset.n == 3);
  REQUIRE(l3.element_sets.size() == 3);
  CHECK(l3.element_sets[0] == 0ul);
  CHECK(l3.element_sets[1] == 2ul);  // {1}
  CHECK(l3.element_sets[2] == 3ul);  // {0,1}
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(l3.poset.leq[a][b] == (a <= b));
  CHECK(!check_lattice(l3));
  CHECK(lattice_distributive(l3));
}

TEST_CASE("join-irreducibles invert upsets") {
  auto three_chain = upsets(chain_poset(2));
  auto ji = join_irreducibles(three_chain);
  CHECK(posets_isomorphic(ji, chain_poset(2)));

  auto boolean4 = upsets(antichain(2));
  CHECK(posets_isomorphic(join_irreducibles(boolean4), antichain(2)));

  // diamond M3 is not distributive: bot, three atoms, top
  FinitePoset m3;
  m3.n = 5;
  m3.leq.assign(5, std::vector<bool>(5, false));
  for (int i = 0; i < 5; ++i) m3.leq[i][i] = true;
  for (int a = 1; a <= 3; ++a) {
    m3.leq[0][a] = true;
    m3.leq[a][4] = true;
  }
  m3.leq[0][4] = true;
  FiniteDistLattice lm3;
  lm3.poset = m3;
  lm3.meet.assign(5, std::vector<int>(5, 0));
  lm3.join.assign(5, std::vector<int>(5, 4));
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      if (m3.leq[a][b]) { lm3.meet[a][b] = a; lm3.join[a][b] = b; }
      if (m3.leq[b][a]) { lm3.meet[a][b] = b; lm3.join[a][b] = a; }
    }
  }
  lm3.bot = 0;
  lm3.top = 4;
  CHECK(!check_lattice(lm3));
  CHECK(!lattice_distributive(lm3));
  CHECK_THROWS_AS(join_irreducibles(lm3), std::invalid_argument);
}

TEST_CASE("property: J(Up(P)) is isomorphic to P") {
  for (int p = 0; p <= 4; ++p)
    for (auto& poset : enumerate_posets(p)) {
      auto lat = upsets(poset);
      REQUIRE(!check_lattice(lat));
      if (poset.n > 0) CHECK(posets_isomorphic(join_irreducibles(lat), poset));
    }
}

TEST_CASE("residuals from meet on a Heyting lattice equal implication") {
  auto lat = upsets(antichain(2));
  int n = lat.poset.n;
  Table mult(n, std::vector<int>(n, 0));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) mult[x][y] = lat.meet[x][y];
  auto r = residuals_from_mult(lat, mult);
  REQUIRE(r.ok);
  auto imp = heyting_imp(lat);
  CHECK(r.lres == imp);
  // a/b = max{x : x ^ b <= a} = b -> a
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y) CHECK(r.rres[z][y] == imp[y][z]);
}

TEST_CASE("S3 multiplication is residuated") {
  auto& s3 = catalog_algebra("S3");
  auto r = residuals_from_mult(s3.lat, s3.mult);
  CHECK(r.ok);
}

TEST_CASE("non-join-preserving table is rejected with a witness") {
  auto lat = upsets(antichain(2));
  int n = lat.poset.n;
  Table mult(n, std::vector<int>(n, 0));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) mult[x][y] = lat.meet[x][y];
  mult[1][1] = lat.bot;  // perturb one entry
  auto r = residuals_from_mult(lat, mult);
  REQUIRE(!r.ok);
  // independent oracle: the witnessing set {y : x.y <= z} has no maximum
  int x = r.failure.left ? r.failure.x : r.failure.x;
  int z = r.failure.left ? r.failure.z : r.failure.z;
  std::vector<int> s;
  for (int y = 0; y < n; ++y) {
    int prod = r.failure.left ? mult[x][y] : mult[y][z];
    if (lat.poset.leq[prod][r.failure.left ? z : x]) s.push_back(y);
  }
  bool has_max = false;
  for (int cand : s) {
    bool max = true;
    for (int y : s)
      if (!lat.poset.leq[y][cand]) { max = false; break; }
    if (max) has_max = true;
  }
  CHECK(!has_max);
}

TEST_CASE("catalog is valid, named entries have their documented shapes") {
  CHECK(catalog().size() == 24);
  auto& l3 = catalog_algebra("L3");
  CHECK(l3.mult[1][1] == 0);  // a*a = bot
  auto& g3 = catalog_algebra("G3");
  CHECK(g3.mult[1][1] == 1);  // a*a = a
  auto& s3 = catalog_algebra("S3");
  CHECK(s3.unit == 1);
  CHECK(s3.mult[1][1] == 1);
}

TEST_CASE("enumeration counts for n <= 4") {
  CHECK(enumerate_algebras(2, Variety::GBI).size() == 1);
  CHECK(enumerate_algebras(3, Variety::GBI).size() == 3);
  CHECK(enumerate_algebras(3, Variety::BI).size() == 3);
  CHECK(enumerate_algebras(4, Variety::GBI).size() == 20);
  CHECK(enumerate_algebras(4, Variety::BI).size() == 16);
}

TEST_CASE("every enumerated algebra passes the axiom audit") {
  for (int n = 2; n <= 4; ++n)
    for (auto& a : enumerate_algebras(n, Variety::GBI)) {
      auto err = check_algebra(a);
      if (err) CAPTURE(*err);
      CHECK(!err);
    }
}

TEST_CASE("the three 3-element algebras are G3, L3, S3") {
  auto algs = enumerate_algebras(3, Variety::GBI);
  REQUIRE(algs.size() == 3);
  for (const char* name : {"G3", "L3", "S3"}) {
    bool found = false;
    for (auto& a : algs)
      if (isomorphic(a, catalog_algebra(name))) found = true;
    CHECK(found);
  }
}

TEST_CASE("all twenty 4-element catalog entries are found by enumeration") {
  auto algs = enumerate_algebras(4, Variety::GBI);
  REQUIRE(algs.size() == 20);
  std::set<std::string> keys;
  int four_count = 0;
  for (auto& e : catalog()) {
    if (e.algebra.n() != 4) continue;
    ++four_count;
    keys.insert(canonical_key(e.algebra));
    bool found = false;
    for (auto& a : algs)
      if (isomorphic(a, e.algebra)) found = true;
    CAPTURE(e.name);
    CHECK(found);
  }
  CHECK(four_count == 20);
  CHECK(keys.size() == 20);  // pairwise non-isomorphic
}

TEST_CASE("holds and countermodels") {
  auto& n1 = catalog_algebra("N1");
  auto s = gbi("x . y");
  auto t = gbi("y . x");
  CHECK(!holds(n1, s, t));
  // the documented failing assignment x:=b, y:=a
  int b = 2, a = 1;
  CHECK(n1.mult[b][a] == a);
  CHECK(n1.mult[a][b] == 0);
  CHECK(!n1.leq(n1.mult[b][a], n1.mult[a][b]));

  for (auto& e : catalog()) CHECK(holds(e.algebra, gbi("x"), gbi("top")));

  // double negation fails in G3 at x := a
  auto& g3 = catalog_algebra("G3");
  auto dn = gbi("(x -> bot) -> bot");
  CHECK(!holds(g3, dn, gbi("x")));
  CHECK(g3.imp[1][0] == 0);
  CHECK(g3.imp[0][0] == 2);

  auto cm = find_countermodel(s, t, 4);
  REQUIRE(cm.has_value());
  CHECK(!holds(cm->algebra, s, t));
}

TEST_CASE("congruence analysis of the 3-element algebras") {
  auto cg = congruences(catalog_algebra("G3"));
  CHECK(cg.congruences.size() == 3);
  CHECK(cg.subdirectly_irreducible);
  CHECK(!cg.simple);

  auto cl = congruences(catalog_algebra("L3"));
  CHECK(cl.simple);
  CHECK(!cl.strictly_simple);  // has the 2-element subalgebra {bot, top}

  auto cs = congruences(catalog_algebra("S3"));
  CHECK(cs.simple);
  CHECK(cs.strictly_simple);
}

TEST_CASE("quotients by computed congruences are again GBI-algebras") {
  for (const char* name : {"G3", "G4", "L3[2]", "N1", "2x2"}) {
    auto& a = catalog_algebra(name);
    for (auto& cls : congruences(a).congruences) {
      auto q = quotient(a, cls);
      CHECK(!check_algebra(q));
    }
  }
}

TEST_CASE("classification") {
  auto c2 = classify(catalog_algebra("2"));
  CHECK(c2.count("BA"));
  CHECK(c2.count("HA"));
  CHECK(c2.count("GA"));
  CHECK(c2.count("BI"));
  CHECK(c2.count("BBI"));
  CHECK(c2.count("GBI"));

  auto cg3 = classify(catalog_algebra("G3"));
  CHECK(cg3.count("GA"));
  CHECK(cg3.count("HA"));
  CHECK(cg3.count("BI_w"));
  CHECK(cg3.count("LGBI"));
  CHECK(!cg3.count("BA"));

  // N1 satisfies weakening (its unit is top)
  auto cn1 = classify(catalog_algebra("N1"));
  CHECK(cn1.count("GBI_w"));

  // S3 does not satisfy weakening: 1.top = top > 1
  auto cs3 = classify(catalog_algebra("S3"));
  CHECK(!cs3.count("GBI_w"));

  // Z2+ is the complex algebra of a group: a relation algebra
  CHECK(classify(catalog_algebra("Z2+")).count("RA"));
}

TEST_CASE("weakening is equivalent to unit = top on the enumerated corpus") {
  for (int n = 2; n <= 4; ++n)
    for (auto& a : enumerate_algebras(n, Variety::GBI)) {
      bool weak = classify(a).count("GBI_w") > 0;
      CHECK(weak == (a.unit == a.lat.top));
    }
}

TEST_CASE("ordinal sum and add-top reproduce the catalog constructions") {
  auto g4 = ordinal_sum(catalog_algebra("G3"), catalog_algebra("2"));
  CHECK(!check_algebra(g4));
  CHECK(isomorphic(g4, catalog_algebra("G4")));

  auto two_l3 = ordinal_sum(catalog_algebra("2"), catalog_algebra("L3"));
  CHECK(!check_algebra(two_l3));
  CHECK(isomorphic(two_l3, catalog_algebra("2[L3]")));

  auto l3_2 = ordinal_sum(catalog_algebra("L3"), catalog_algebra("2"));
  CHECK(isomorphic(l3_2, catalog_algebra("L3[2]")));

  auto l3t = add_top(catalog_algebra("L3"));
  CHECK(!check_algebra(l3t));
  CHECK(isomorphic(l3t, catalog_algebra("L3+top")));

  CHECK_THROWS_AS(ordinal_sum(catalog_algebra("S3"), catalog_algebra("2")),
                  std::invalid_argument);
  CHECK_THROWS_AS(add_top(catalog_algebra("S3")), std::invalid_argument);
}

TEST_CASE("json round-trip") {
  for (const char* name : {"N1", "S3", "2x2"}) {
    auto& a = catalog_algebra(name);
    auto b = algebra_from_json(algebra_to_json(a));
    CHECK(b.n() == a.n());
    CHECK(b.mult == a.mult);
    CHECK(b.unit == a.unit);
    CHECK(!check_algebra(b));
  }
}

TEST_CASE("enumeration is deterministic and thread-count independent") {
  auto a1 = enumerate_algebras(4, Variety::GBI, 1);
  auto a4 = enumerate_algebras(4, Variety::GBI, 4);
  REQUIRE(a1.size() == a4.size());
  for (std::size_t i = 0; i < a1.size(); ++i)
    CHECK(canonical_key(a1[i]) == canonical_key(a4[i]));
}
