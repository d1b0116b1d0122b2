#ifndef BUNCHWORKS_FINALG_HPP
#define BUNCHWORKS_FINALG_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bunchworks/formula.hpp"

namespace bunchworks::finalg {

using Table = std::vector<std::vector<int>>;
using BoolMat = std::vector<std::vector<bool>>;

struct FinitePoset {
  int n = 0;
  BoolMat leq;

  bool leq_at(int a, int b) const { return leq[a][b]; }
};

std::optional<std::string> check_poset(const FinitePoset& p);

struct FiniteDistLattice {
  FinitePoset poset;
  Table meet, join;
  int top = -1, bot = -1;
  // when built by upsets(): the upset bitmask of each lattice element
  std::vector<unsigned long> element_sets;
};

std::optional<std::string> check_lattice(const FiniteDistLattice& l);
bool lattice_distributive(const FiniteDistLattice& l);

struct FiniteGBIAlgebra {
  FiniteDistLattice lat;
  Table mult;
  int unit = -1;
  Table lres, rres, imp;  // derived: a\b, a/b, a->b

  int n() const { return lat.poset.n; }
  bool leq(int a, int b) const { return lat.poset.leq[a][b]; }
};

// Full axiom audit: lattice + distributivity, monoid laws, the residuation
// triple equivalence for \,/ and the Heyting residuation for ->.
std::optional<std::string> check_algebra(const FiniteGBIAlgebra& a);

// ---------------------------------------------------------------------------
// Birkhoff duality
// ---------------------------------------------------------------------------

FiniteDistLattice upsets(const FinitePoset& p);
// Poset of join-irreducible elements; throws std::invalid_argument when the
// input is not distributive.
FinitePoset join_irreducibles(const FiniteDistLattice& l);
bool posets_isomorphic(const FinitePoset& a, const FinitePoset& b);

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

struct ResidualFailure {
  int x, z;        // witnessing pair: max{y : x.y <= z} does not exist
  bool left;       // true: left residual failed, false: right
};

struct ResidualResult {
  bool ok = false;
  Table lres, rres;
  ResidualFailure failure{};
};

ResidualResult residuals_from_mult(const FiniteDistLattice& l, const Table& mult);
Table heyting_imp(const FiniteDistLattice& l);

// Assembles a full algebra from lattice + mult + unit, deriving the residual
// and implication tables. Throws when residuals do not exist.
FiniteGBIAlgebra make_algebra(FiniteDistLattice lat, Table mult, int unit);

// ---------------------------------------------------------------------------
// Enumeration up to isomorphism
// ---------------------------------------------------------------------------

enum class Variety { GBI, BI };

std::vector<FinitePoset> enumerate_posets(int p);
std::vector<FiniteDistLattice> enumerate_dist_lattices(int n);
std::vector<FiniteGBIAlgebra> enumerate_algebras(int n, Variety v, int jobs = 1);

std::string canonical_key(const FiniteGBIAlgebra& a);
bool isomorphic(const FiniteGBIAlgebra& a, const FiniteGBIAlgebra& b);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Term evaluation; formulas restricted to the core GBI signature.
int eval_formula(const FiniteGBIAlgebra& a, const FormulaPtr& f,
                 const std::vector<std::pair<std::string, int>>& assignment);

struct Countermodel {
  FiniteGBIAlgebra algebra;
  std::vector<std::pair<std::string, int>> assignment;
};

// s <= t under every assignment?
bool holds(const FiniteGBIAlgebra& a, const FormulaPtr& s, const FormulaPtr& t);
std::optional<std::vector<std::pair<std::string, int>>> failing_assignment(
    const FiniteGBIAlgebra& a, const FormulaPtr& s, const FormulaPtr& t);
std::optional<Countermodel> find_countermodel(const FormulaPtr& s, const FormulaPtr& t, int max_n);

// ---------------------------------------------------------------------------
// Congruences
// ---------------------------------------------------------------------------

struct CongruenceLattice {
  // each congruence as an element->class-id map; [0] is the diagonal,
  // the last is the full relation (after sorting by refinement order)
  std::vector<std::vector<int>> congruences;
  bool subdirectly_irreducible = false;
  bool simple = false;
  bool strictly_simple = false;
};

CongruenceLattice congruences(const FiniteGBIAlgebra& a);
FiniteGBIAlgebra quotient(const FiniteGBIAlgebra& a, const std::vector<int>& cls);
std::vector<std::vector<int>> subuniverses(const FiniteGBIAlgebra& a);

// ---------------------------------------------------------------------------
// Subvariety classification (identity-defined varieties of the catalog)
// ---------------------------------------------------------------------------

std::set<std::string> classify(const FiniteGBIAlgebra& a);

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

// requires a.unit == a.top
FiniteGBIAlgebra ordinal_sum(const FiniteGBIAlgebra& a, const FiniteGBIAlgebra& b);
FiniteGBIAlgebra add_top(const FiniteGBIAlgebra& a);

// ---------------------------------------------------------------------------
// Catalog of the named 2-, 3- and 4-element algebras
// ---------------------------------------------------------------------------

struct NamedAlgebra {
  std::string name;
  FiniteGBIAlgebra algebra;
};

const std::vector<NamedAlgebra>& catalog();
const FiniteGBIAlgebra& catalog_algebra(const std::string& name);

// ---------------------------------------------------------------------------
// JSON  {"n":4,"leq":[[...]],"mult":[[...]],"unit":1}
// ---------------------------------------------------------------------------

std::string algebra_to_json(const FiniteGBIAlgebra& a);
FiniteGBIAlgebra algebra_from_json(const std::string& text);

}  // namespace bunchworks::finalg

#endif
