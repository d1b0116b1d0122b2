#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bunchworks/finalg.hpp"
#include "bunchworks/hilbert.hpp"
#include "bunchworks/sequent.hpp"

using namespace bunchworks;
using namespace bunchworks::sequent;

namespace {

Sequent seq(const std::string& s, Mode m = Mode::GBI) { return parse_sequent(s, m); }

int tree_size(const ProofTree& t) {
  int n = 1;
  for (auto& c : t.children) n += tree_size(*c);
  return n;
}

}  // namespace

TEST_CASE("the weakening axiom has the 4-node derivation of the paper") {
  auto out = prove(seq("top <= x -> (y -> x)"), Mode::GBI);
  REQUIRE(out.verdict == Verdict::Proved);
  CHECK(tree_size(*out.tree) == 4);
  CHECK(!check_tree(*out.tree, Mode::GBI).has_value());
}

TEST_CASE("applicable rules on the weakening goal start with ->r") {
  auto insts = applicable_rules(seq("top <= x -> (y -> x)"), Mode::GBI);
  REQUIRE(!insts.empty());
  CHECK(insts[0].rule == "->r");
  REQUIRE(insts[0].premises.size() == 1);
  // premise x & top <= y -> x, read modulo normal form
  CHECK(sequent_key(insts[0].premises[0], Mode::GBI) ==
        sequent_key(seq("x & top <= y -> x"), Mode::GBI));
}

TEST_CASE("axiom closure instances on x & y <= x & y") {
  auto insts = applicable_rules(seq("x & y <= x & y"), Mode::GBI);
  bool has_id = false, has_andl = false;
  for (auto& i : insts) {
    if (i.rule == "id") has_id = true;
    if (i.rule == "&l") has_andl = true;
  }
  CHECK(has_id);
  CHECK(has_andl);
}

TEST_CASE("\\l instantiates the side premise from the decomposition") {
  // u = (x.(y\z)) & w: the correctly instantiated premises replace the
  // segment, they never force x <= y to be about the whole bunch
  auto insts = applicable_rules(seq("(x . (y \\ z)) & w <= r"), Mode::GBI);
  bool found = false;
  for (auto& i : insts) {
    if (i.rule != "\\l" || i.premises.size() != 2) continue;
    if (sequent_key(i.premises[0], Mode::GBI) == sequent_key(seq("x <= y"), Mode::GBI) &&
        sequent_key(i.premises[1], Mode::GBI) == sequent_key(seq("z & w <= r"), Mode::GBI))
      found = true;
  }
  CHECK(found);
}

TEST_CASE("commutativity is not provable in GBI and the countermodel is N1") {
  ProveOptions opts;
  opts.budget.max_depth = 12;
  auto out = prove(seq("x . y <= y . x"), Mode::GBI, opts);
  CHECK(out.verdict == Verdict::NotProvable);

  auto s = parse_formula("x . y", Dialect::CoreGBI);
  auto t = parse_formula("y . x", Dialect::CoreGBI);
  auto& n1 = finalg::catalog_algebra("N1");
  CHECK(!finalg::holds(n1, s, t));
}

TEST_CASE("commutativity is an axiom instance in BI mode") {
  auto out = prove(seq("x * y <= y * x", Mode::BI), Mode::BI);
  REQUIRE(out.verdict == Verdict::Proved);
  CHECK(out.tree->rule == "id");
}

TEST_CASE("proved trees re-check; mangled trees are rejected") {
  const char* goals[] = {
      "top <= x -> (y -> x)",
      "x . (x \\ y) <= y",
      "top <= (x -> (y -> z)) -> ((x -> y) -> (x -> z))",
      "x & (x -> y) <= y",
      "x <= top",
      "x & bot <= y",
      "x . y . z <= x . (y . z)",
      "1 \\ z <= z",
      "x <= x . (y \\ y)",
  };
  for (auto g : goals) {
    auto out = prove(seq(g), Mode::GBI);
    CAPTURE(g);
    REQUIRE(out.verdict == Verdict::Proved);
    CHECK(!check_tree(*out.tree, Mode::GBI).has_value());
  }

  // a tree with a wrong rule label must be rejected
  auto out = prove(seq("top <= x -> (y -> x)"), Mode::GBI);
  ProofTree bad = *out.tree;
  bad.rule = "|r";
  CHECK(check_tree(bad, Mode::GBI).has_value());

  // |r applied to an &-rooted rhs is not a legal instance
  ProofTree wrong;
  wrong.goal = seq("x <= x & x");
  wrong.rule = "|r";
  auto child = std::make_shared<ProofTree>();
  child->goal = seq("x <= x");
  child->rule = "id";
  wrong.children = {child};
  CHECK(check_tree(wrong, Mode::GBI).has_value());
}

TEST_CASE("all HGBI axioms bridged are cut-free provable") {
  for (auto& ax : hilbert::axioms(hilbert::System::HGBI)) {
    auto s = hilbert::theoremhood_bridge(ax.schema);
    ProveOptions opts;
    opts.budget.max_depth = 18;
    auto out = prove(s, Mode::GBI, opts);
    CAPTURE(ax.id);
    CHECK(out.verdict == Verdict::Proved);
  }
}

TEST_CASE("all HBI axioms bridged are cut-free provable in BI mode") {
  for (auto& ax : hilbert::axioms(hilbert::System::HBI)) {
    auto s = hilbert::theoremhood_bridge(ax.schema);
    ProveOptions opts;
    opts.budget.max_depth = 18;
    auto out = prove(s, Mode::BI, opts);
    CAPTURE(ax.id);
    CHECK(out.verdict == Verdict::Proved);
  }
}

TEST_CASE("nGBI mode proves non-associativity-free goals") {
  CHECK(prove(seq("x . z <= x . ((y \\ y) . z)", Mode::GBI), Mode::NGBI).verdict ==
        Verdict::Proved);
  CHECK(prove(seq("x \\ y <= x \\ (y | z)"), Mode::NGBI).verdict == Verdict::Proved);
  // reassociation is not available in nGBI mode
  ProveOptions opts;
  opts.budget.max_depth = 10;
  auto out = prove(seq("(x . y) . z <= x . (y . z)"), Mode::NGBI, opts);
  CHECK(out.verdict != Verdict::Proved);
  // but it is in GBI mode
  CHECK(prove(seq("(x . y) . z <= x . (y . z)"), Mode::GBI).verdict == Verdict::Proved);
}

TEST_CASE("determinism: identical inputs give identical outcomes") {
  auto a = prove(seq("x & (x -> y) <= y | z"), Mode::GBI);
  auto b = prove(seq("x & (x -> y) <= y | z"), Mode::GBI);
  REQUIRE(a.verdict == Verdict::Proved);
  REQUIRE(b.verdict == Verdict::Proved);
  CHECK(tree_to_json(*a.tree) == tree_to_json(*b.tree));
}

TEST_CASE("rule soundness: random instantiations on small algebras") {
  // premises-hold implies conclusion-holds, for every Table 2 rule viewed as
  // a quasiequation, on every enumerated algebra of size <= 3 here (the
  // acceptance suite runs size <= 4 with 1000 trials)
  std::mt19937 rng(7);
  for (int n = 2; n <= 3; ++n) {
    for (auto& alg : finalg::enumerate_algebras(n, finalg::Variety::GBI)) {
      for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> el(0, alg.n() - 1);
        int x = el(rng), y = el(rng), z = el(rng), w = el(rng);
        // a one-layer bunch u(_) = (_ . c) & d
        int c = el(rng), d = el(rng);
        auto u = [&](int v) { return alg.lat.meet[alg.mult[v][c]][d]; };
        // [\l]: x<=y and u(z)<=w imply u(x.(y\z))<=w
        if (alg.leq(x, y) && alg.leq(u(z), w))
          CHECK(alg.leq(u(alg.mult[x][alg.lres[y][z]]), w));
        // [->l]: x<=y and u(z)<=w imply u(x & (y->z))<=w
        if (alg.leq(x, y) && alg.leq(u(z), w))
          CHECK(alg.leq(u(alg.lat.meet[x][alg.imp[y][z]]), w));
        // [.lr]
        if (alg.leq(x, y) && alg.leq(z, w))
          CHECK(alg.leq(alg.mult[x][z], alg.mult[y][w]));
        // [->r]
        if (alg.leq(alg.lat.meet[x][y], z)) CHECK(alg.leq(y, alg.imp[x][z]));
        // [\r]
        if (alg.leq(alg.mult[x][y], z)) CHECK(alg.leq(y, alg.lres[x][z]));
        // [cut]
        if (alg.leq(x, y) && alg.leq(u(y), z)) CHECK(alg.leq(u(x), z));
      }
    }
  }
}

TEST_CASE("proof soundness on random provable goals") {
  // every Proved sequent holds in every algebra of size <= 3 (fast slice of
  // acceptance criterion 4)
  std::mt19937 rng(99);
  auto algs2 = finalg::enumerate_algebras(2, finalg::Variety::GBI);
  auto algs3 = finalg::enumerate_algebras(3, finalg::Variety::GBI);
  std::vector<const finalg::FiniteGBIAlgebra*> algs;
  for (auto& a : algs2) algs.push_back(&a);
  for (auto& a : algs3) algs.push_back(&a);

  std::function<FormulaPtr(int)> gen = [&](int depth) -> FormulaPtr {
    std::uniform_int_distribution<int> leaf(0, 4), node(0, 5);
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
    auto l = gen(depth - 1), r = gen(depth - 1);
    switch (node(rng)) {
      case 0: return f_and(l, r);
      case 1: return f_or(l, r);
      case 2: return f_imp(l, r);
      case 3: return f_fuse(l, r);
      case 4: return f_lres(l, r);
      default: return f_rres(l, r);
    }
  };

  int proved = 0;
  for (int i = 0; i < 150; ++i) {
    Sequent s{gen(2), gen(2)};
    ProveOptions opts;
    opts.budget.max_depth = 10;
    auto out = prove(s, Mode::GBI, opts);
    if (out.verdict != Verdict::Proved) continue;
    ++proved;
    for (auto* a : algs) {
      CAPTURE(render_sequent(s));
      CHECK(finalg::holds(*a, s.lhs, s.rhs));
    }
  }
  CHECK(proved > 10);
}

TEST_CASE("cut probe: bridged axioms are all cut-free provable") {
  std::vector<Sequent> corpus;
  for (auto& ax : hilbert::axioms(hilbert::System::HJ))
    corpus.push_back(hilbert::theoremhood_bridge(ax.schema));
  Budget b;
  b.max_depth = 18;
  auto report = cut_probe(corpus, Mode::GBI, b);
  for (auto& item : report) {
    CAPTURE(render_sequent(item.goal));
    CHECK(item.cutfree_proved);
    CHECK(item.with_cut_proved);
  }
}

TEST_CASE("NotProvable only under exhausted search, countermodel exists") {
  ProveOptions opts;
  opts.budget.max_depth = 12;
  auto out = prove(seq("x | y <= x & y"), Mode::GBI, opts);
  CHECK(out.verdict == Verdict::NotProvable);
  auto cm = finalg::find_countermodel(parse_formula("x | y", Dialect::CoreGBI),
                                      parse_formula("x & y", Dialect::CoreGBI), 3);
  CHECK(cm.has_value());
}
