#ifndef BUNCHWORKS_FORMULA_HPP
#define BUNCHWORKS_FORMULA_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bunchworks {

// ---------------------------------------------------------------------------
// Arithmetic expressions: program variables (uppercase), assertion variables
// (lowercase), numerals, and + (successor is e+1). PVar and AVar name spaces
// are disjoint by the case convention.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Num, ProgVar, LogVar, Add };
  Kind kind;
  long num = 0;
  std::string name;
  ExprPtr lhs, rhs;
};

ExprPtr e_num(long n);
ExprPtr e_pvar(const std::string& name);
ExprPtr e_avar(const std::string& name);
ExprPtr e_add(ExprPtr a, ExprPtr b);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
int expr_compare(const ExprPtr& a, const ExprPtr& b);
std::string render_expr(const ExprPtr& e);
void collect_pvars(const ExprPtr& e, std::vector<std::string>& out);
void collect_avars(const ExprPtr& e, std::vector<std::string>& out);
// Replaces every occurrence of variable `v` (PVar or AVar by name match on the
// right kind) by `g`.
ExprPtr expr_subst(const ExprPtr& e, bool prog_var, const std::string& v, const ExprPtr& g);

// ---------------------------------------------------------------------------
// Formulas over the GBI signature plus separation-logic atoms.
//   LRes(a,b) is a\b, RRes(a,b) is a/b; the BI wand a -* b is stored as
//   LRes(a,b).
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind {
    Var, Top, Bot, One,
    And, Or, Imp, Fuse, LRes, RRes,
    Emp, Eq, Neq, PointsTo, PointsToList, Exists, Forall,
    Hole  // bunch contexts only; never produced by the parser
  };
  Kind kind;
  std::string name;        // Var name, or the bound AVar of Exists/Forall
  FormulaPtr lhs, rhs;     // binary connectives; quantifier body in lhs
  ExprPtr e1, e2;          // Eq/Neq/PointsTo arguments; PointsToList base in e1
  std::vector<ExprPtr> elist;  // PointsToList cells
};

FormulaPtr f_var(const std::string& name);
FormulaPtr f_top();
FormulaPtr f_bot();
FormulaPtr f_one();
FormulaPtr f_and(FormulaPtr l, FormulaPtr r);
FormulaPtr f_or(FormulaPtr l, FormulaPtr r);
FormulaPtr f_imp(FormulaPtr l, FormulaPtr r);
FormulaPtr f_fuse(FormulaPtr l, FormulaPtr r);
FormulaPtr f_lres(FormulaPtr l, FormulaPtr r);
FormulaPtr f_rres(FormulaPtr l, FormulaPtr r);
FormulaPtr f_emp();
FormulaPtr f_eq(ExprPtr a, ExprPtr b);
FormulaPtr f_neq(ExprPtr a, ExprPtr b);
FormulaPtr f_points_to(ExprPtr a, ExprPtr b);
FormulaPtr f_points_to_list(ExprPtr base, std::vector<ExprPtr> cells);
FormulaPtr f_exists(const std::string& avar, FormulaPtr body);
FormulaPtr f_forall(const std::string& avar, FormulaPtr body);
FormulaPtr f_hole();

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);
int formula_compare(const FormulaPtr& a, const FormulaPtr& b);
std::size_t formula_size(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Parsing and rendering
// ---------------------------------------------------------------------------

enum class Dialect { CoreGBI, CoreBI, SLAssertion };

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg), position(pos) {}
};

FormulaPtr parse_formula(const std::string& text, Dialect dialect);
std::string render(const FormulaPtr& f, Dialect dialect = Dialect::CoreGBI);

// ---------------------------------------------------------------------------
// Normal form: fuse chains flattened to sequences (sorted multisets in BI
// mode), and/or chains to sorted multisets, units absorbed. Idempotent.
// ---------------------------------------------------------------------------

enum class NormMode { GBI, BI, NGBI };

FormulaPtr normalize(const FormulaPtr& f, NormMode mode = NormMode::GBI);
// Canonical key for memo tables; equal iff normalize(...) trees are equal.
std::string normal_key(const FormulaPtr& f, NormMode mode = NormMode::GBI);

// ---------------------------------------------------------------------------
// Bunches: contexts u(_) whose root-to-hole path uses only Fuse and And.
// Represented as a formula containing exactly one Hole node.
// ---------------------------------------------------------------------------

struct Bunch {
  FormulaPtr context;  // contains exactly one Hole on a Fuse/And-only path
};

bool bunch_valid(const Bunch& b);
FormulaPtr bunch_plug(const Bunch& b, const FormulaPtr& f);
// Every (u, s) with u(s) = f; includes the identity bunch.
std::vector<std::pair<Bunch, FormulaPtr>> bunch_decompositions(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

// Propositional substitution f[v := g]; v is a Var name.
FormulaPtr subst_var(const FormulaPtr& f, const std::string& v, const FormulaPtr& g);
// Expression substitution f[e/v]. prog_var selects the PVar or AVar name
// space; substitution for an AVar is capture-avoiding (bound AVars renamed
// fresh as needed).
FormulaPtr subst_expr(const FormulaPtr& f, bool prog_var, const std::string& v, const ExprPtr& g);

void collect_free_avars(const FormulaPtr& f, std::vector<std::string>& out);
void collect_pvars(const FormulaPtr& f, std::vector<std::string>& out);
void collect_prop_vars(const FormulaPtr& f, std::vector<std::string>& out);
bool avar_free_in(const FormulaPtr& f, const std::string& v);

}  // namespace bunchworks

#endif
