#include "bunchworks/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace bunchworks {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

ExprPtr e_num(long n) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Num;
  e->num = n;
  return e;
}

ExprPtr e_pvar(const std::string& name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::ProgVar;
  e->name = name;
  return e;
}

ExprPtr e_avar(const std::string& name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::LogVar;
  e->name = name;
  return e;
}

ExprPtr e_add(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Add;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

int expr_compare(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case Expr::Kind::Num:
      return a->num < b->num ? -1 : (a->num > b->num ? 1 : 0);
    case Expr::Kind::ProgVar:
    case Expr::Kind::LogVar:
      return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Expr::Kind::Add: {
      int c = expr_compare(a->lhs, b->lhs);
      if (c != 0) return c;
      return expr_compare(a->rhs, b->rhs);
    }
  }
  return 0;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) { return expr_compare(a, b) == 0; }

std::string render_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Num: return std::to_string(e->num);
    case Expr::Kind::ProgVar:
    case Expr::Kind::LogVar: return e->name;
    case Expr::Kind::Add: return render_expr(e->lhs) + "+" + render_expr(e->rhs);
  }
  return "?";
}

void collect_pvars(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::ProgVar) out.push_back(e->name);
  collect_pvars(e->lhs, out);
  collect_pvars(e->rhs, out);
}

void collect_avars(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::LogVar) out.push_back(e->name);
  collect_avars(e->lhs, out);
  collect_avars(e->rhs, out);
}

ExprPtr expr_subst(const ExprPtr& e, bool prog_var, const std::string& v, const ExprPtr& g) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Num: return e;
    case Expr::Kind::ProgVar:
      return (prog_var && e->name == v) ? g : e;
    case Expr::Kind::LogVar:
      return (!prog_var && e->name == v) ? g : e;
    case Expr::Kind::Add:
      return e_add(expr_subst(e->lhs, prog_var, v, g), expr_subst(e->rhs, prog_var, v, g));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Formula constructors
// ---------------------------------------------------------------------------

static FormulaPtr mk(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

static FormulaPtr mk2(Formula::Kind k, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

FormulaPtr f_var(const std::string& name) {
  auto f = mk(Formula::Kind::Var);
  const_cast<Formula*>(f.get())->name = name;
  return f;
}
FormulaPtr f_top() { return mk(Formula::Kind::Top); }
FormulaPtr f_bot() { return mk(Formula::Kind::Bot); }
FormulaPtr f_one() { return mk(Formula::Kind::One); }
FormulaPtr f_emp() { return mk(Formula::Kind::Emp); }
FormulaPtr f_hole() { return mk(Formula::Kind::Hole); }
FormulaPtr f_and(FormulaPtr l, FormulaPtr r) { return mk2(Formula::Kind::And, std::move(l), std::move(r)); }
FormulaPtr f_or(FormulaPtr l, FormulaPtr r) { return mk2(Formula::Kind::Or, std::move(l), std::move(r)); }
FormulaPtr f_imp(FormulaPtr l, FormulaPtr r) { return mk2(Formula::Kind::Imp, std::move(l), std::move(r)); }
FormulaPtr f_fuse(FormulaPtr l, FormulaPtr r) { return mk2(Formula::Kind::Fuse, std::move(l), std::move(r)); }
FormulaPtr f_lres(FormulaPtr l, FormulaPtr r) { return mk2(Formula::Kind::LRes, std::move(l), std::move(r)); }
FormulaPtr f_rres(FormulaPtr l, FormulaPtr r) { return mk2(Formula::Kind::RRes, std::move(l), std::move(r)); }

FormulaPtr f_eq(ExprPtr a, ExprPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Eq;
  f->e1 = std::move(a);
  f->e2 = std::move(b);
  return f;
}
FormulaPtr f_neq(ExprPtr a, ExprPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Neq;
  f->e1 = std::move(a);
  f->e2 = std::move(b);
  return f;
}
FormulaPtr f_points_to(ExprPtr a, ExprPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::PointsTo;
  f->e1 = std::move(a);
  f->e2 = std::move(b);
  return f;
}
FormulaPtr f_points_to_list(ExprPtr base, std::vector<ExprPtr> cells) {
  if (cells.empty()) throw std::invalid_argument("PointsToList needs at least one cell");
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::PointsToList;
  f->e1 = std::move(base);
  f->elist = std::move(cells);
  return f;
}
FormulaPtr f_exists(const std::string& avar, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Exists;
  f->name = avar;
  f->lhs = std::move(body);
  return f;
}
FormulaPtr f_forall(const std::string& avar, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Forall;
  f->name = avar;
  f->lhs = std::move(body);
  return f;
}

int formula_compare(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = a->name.compare(b->name); c != 0) return c < 0 ? -1 : 1;
  if (int c = expr_compare(a->e1, b->e1); c != 0) return c;
  if (int c = expr_compare(a->e2, b->e2); c != 0) return c;
  if (a->elist.size() != b->elist.size()) return a->elist.size() < b->elist.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->elist.size(); ++i)
    if (int c = expr_compare(a->elist[i], b->elist[i]); c != 0) return c;
  if (int c = formula_compare(a->lhs, b->lhs); c != 0) return c;
  return formula_compare(a->rhs, b->rhs);
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) { return formula_compare(a, b) == 0; }

std::size_t formula_size(const FormulaPtr& f) {
  if (!f) return 0;
  return 1 + formula_size(f->lhs) + formula_size(f->rhs);
}

// ---------------------------------------------------------------------------
// Parser. Precedence, loosest first:
//   quantifiers  ->  |  &  residuals (\ / -*)  fuse (. *)
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;
  Dialect dialect;

  Parser(const std::string& s, Dialect d) : src(s), dialect(d) {}

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (src.compare(pos, tok.size(), tok) == 0) {
      // keyword tokens must not run into identifier characters
      if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
        std::size_t end = pos + tok.size();
        if (end < src.size() &&
            (std::isalnum(static_cast<unsigned char>(src[end])) || src[end] == '_' || src[end] == '\''))
          return false;
      }
      pos += tok.size();
      return true;
    }
    return false;
  }

  bool peek(const std::string& tok) {
    std::size_t save = pos;
    bool ok = eat(tok);
    pos = save;
    return ok;
  }

  std::optional<std::string> ident() {
    skip_ws();
    if (pos >= src.size()) return std::nullopt;
    char c = src[pos];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return std::nullopt;
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' || src[pos] == '\''))
      ++pos;
    return src.substr(start, pos - start);
  }

  std::optional<long> number() {
    skip_ws();
    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos]))) return std::nullopt;
    std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    return std::stol(src.substr(start, pos - start));
  }

  bool is_keyword(const std::string& s) {
    return s == "top" || s == "bot" || s == "emp" || s == "E" || s == "A";
  }

  ExprPtr expr_atom() {
    if (auto n = number()) return e_num(*n);
    if (eat("(")) {
      auto e = expr();
      if (!eat(")")) fail("expected ')'");
      return e;
    }
    auto id = ident();
    if (!id) fail("expected arithmetic expression");
    if (is_keyword(*id)) fail("keyword '" + *id + "' in expression position");
    if (std::isupper(static_cast<unsigned char>((*id)[0]))) return e_pvar(*id);
    return e_avar(*id);
  }

  ExprPtr expr() {
    auto e = expr_atom();
    while (true) {
      skip_ws();
      if (pos < src.size() && src[pos] == '+') {
        ++pos;
        e = e_add(e, expr_atom());
      } else {
        break;
      }
    }
    return e;
  }

  // After an initial expression, look for an SL atom tail: = != |-> |->l
  FormulaPtr sl_atom_tail(ExprPtr e) {
    skip_ws();
    if (eat("|->l")) {
      if (!eat("[")) fail("expected '[' after |->l");
      std::vector<ExprPtr> cells;
      cells.push_back(expr());
      while (eat(",")) cells.push_back(expr());
      if (!eat("]")) fail("expected ']'");
      return f_points_to_list(std::move(e), std::move(cells));
    }
    if (eat("|->")) return f_points_to(std::move(e), expr());
    if (eat("!=")) return f_neq(std::move(e), expr());
    skip_ws();
    if (pos < src.size() && src[pos] == '=') {
      ++pos;
      return f_eq(std::move(e), expr());
    }
    fail("expected =, !=, |-> or |->l after expression");
  }

  FormulaPtr atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    if (eat("(")) {
      // Might be a parenthesised formula or a parenthesised expression that
      // starts an SL atom.  Try formula first, fall back to expression.
      std::size_t save = pos;
      try {
        auto f = formula();
        if (!eat(")")) fail("expected ')'");
        return f;
      } catch (const ParseError&) {
        if (dialect != Dialect::SLAssertion) throw;
        pos = save;
        auto e = expr();
        if (!eat(")")) fail("expected ')'");
        return sl_atom_tail(std::move(e));
      }
    }
    if (eat("top")) return f_top();
    if (eat("bot")) return f_bot();
    if (eat("emp")) {
      if (dialect != Dialect::SLAssertion) fail("'emp' is only available in the SL dialect");
      return f_emp();
    }
    skip_ws();
    if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      if (dialect == Dialect::SLAssertion) {
        // A numeral may begin an SL atom (e.g. "1 = x"); otherwise a lone "1"
        // is the multiplicative unit.
        std::size_t save = pos;
        (void)number();
        skip_ws();
        bool atom_tail = peek("=") || peek("!=") || peek("|->") ||
                         (pos < src.size() && src[pos] == '+');
        pos = save;
        if (atom_tail) return sl_atom_tail(expr());
      }
      if (src[pos] == '1' &&
          (pos + 1 >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
        ++pos;
        return f_one();
      }
      fail("numeral in formula position");
    }
    // quantifiers: E v. body / A v. body
    {
      std::size_t save = pos;
      if (eat("E") || (pos = save, eat("A"))) {
        bool is_exists = src[pos - 1] == 'E';
        auto v = ident();
        if (v && eat(".")) {
          if (dialect != Dialect::SLAssertion) fail("quantifiers are only available in the SL dialect");
          if (std::isupper(static_cast<unsigned char>((*v)[0])))
            fail("quantifiers bind AVar (lowercase) names only");
          auto body = formula();
          return is_exists ? f_exists(*v, body) : f_forall(*v, body);
        }
        pos = save;
      }
    }
    if (dialect == Dialect::SLAssertion) {
      // identifiers and numerals begin SL atoms
      return sl_atom_tail(expr());
    }
    auto id = ident();
    if (!id) fail("expected formula");
    return f_var(*id);
  }

  FormulaPtr fuse_level() {
    auto f = atom();
    while (true) {
      skip_ws();
      if (peek("-*")) break;  // '-*' must not be taken apart
      if (eat(".")) {
        f = f_fuse(f, atom());
      } else if (eat("*")) {
        f = f_fuse(f, atom());
      } else {
        break;
      }
    }
    return f;
  }

  FormulaPtr residual_level() {
    auto f = fuse_level();
    skip_ws();
    if (eat("-*")) {
      if (dialect == Dialect::CoreGBI)
        fail("'-*' is unavailable in the GBI dialect; use \\ or /");
      return f_lres(f, residual_level());  // wand is the left residual
    }
    if (eat("\\")) {
      if (dialect != Dialect::CoreGBI)
        fail("'\\' is only available in the GBI dialect");
      return f_lres(f, residual_level());
    }
    if (peek("/")) {
      if (dialect != Dialect::CoreGBI)
        fail("'/' is only available in the GBI dialect");
      // left-associative: a/b/c = (a/b)/c
      while (eat("/")) f = f_rres(f, fuse_level());
      return f;
    }
    return f;
  }

  FormulaPtr and_level() {
    auto f = residual_level();
    while (eat("&")) f = f_and(f, residual_level());
    return f;
  }

  FormulaPtr or_level() {
    auto f = and_level();
    while (true) {
      skip_ws();
      if (peek("|->")) break;
      if (eat("|")) {
        f = f_or(f, and_level());
      } else {
        break;
      }
    }
    return f;
  }

  FormulaPtr formula() {
    auto f = or_level();
    if (eat("->")) return f_imp(f, formula());
    return f;
  }

  FormulaPtr parse() {
    auto f = formula();
    skip_ws();
    if (pos != src.size()) fail("trailing input");
    return f;
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, Dialect dialect) {
  Parser p(text, dialect);
  return p.parse();
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

// precedence levels: 0 imp, 1 or, 2 and, 3 residual, 4 fuse, 5 atom
int level_of(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Imp: return 0;
    case Formula::Kind::Or: return 1;
    case Formula::Kind::And: return 2;
    case Formula::Kind::LRes:
    case Formula::Kind::RRes: return 3;
    case Formula::Kind::Fuse: return 4;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 0;
    default: return 5;
  }
}

void render_rec(const FormulaPtr& f, Dialect d, int parent_level, std::ostringstream& os) {
  int my = level_of(f->kind);
  bool paren = my < parent_level || ((f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) && parent_level > 0);
  if (paren) os << "(";
  switch (f->kind) {
    case Formula::Kind::Var: os << f->name; break;
    case Formula::Kind::Top: os << "top"; break;
    case Formula::Kind::Bot: os << "bot"; break;
    case Formula::Kind::One: os << "1"; break;
    case Formula::Kind::Emp: os << "emp"; break;
    case Formula::Kind::Hole: os << "[]"; break;
    case Formula::Kind::And:
      render_rec(f->lhs, d, 2, os);
      os << " & ";
      render_rec(f->rhs, d, 3, os);
      break;
    case Formula::Kind::Or:
      render_rec(f->lhs, d, 1, os);
      os << " | ";
      render_rec(f->rhs, d, 2, os);
      break;
    case Formula::Kind::Imp:
      render_rec(f->lhs, d, 1, os);
      os << " -> ";
      render_rec(f->rhs, d, 0, os);
      break;
    case Formula::Kind::Fuse:
      render_rec(f->lhs, d, 4, os);
      os << (d == Dialect::CoreGBI ? " . " : " * ");
      render_rec(f->rhs, d, 5, os);
      break;
    case Formula::Kind::LRes:
      render_rec(f->lhs, d, 4, os);
      os << (d == Dialect::CoreGBI ? " \\ " : " -* ");
      render_rec(f->rhs, d, 4, os);
      break;
    case Formula::Kind::RRes:
      render_rec(f->lhs, d, 4, os);
      os << " / ";
      render_rec(f->rhs, d, 4, os);
      break;
    case Formula::Kind::Eq:
      os << render_expr(f->e1) << " = " << render_expr(f->e2);
      break;
    case Formula::Kind::Neq:
      os << render_expr(f->e1) << " != " << render_expr(f->e2);
      break;
    case Formula::Kind::PointsTo:
      os << render_expr(f->e1) << " |-> " << render_expr(f->e2);
      break;
    case Formula::Kind::PointsToList: {
      os << render_expr(f->e1) << " |->l [";
      for (std::size_t i = 0; i < f->elist.size(); ++i) {
        if (i) os << ",";
        os << render_expr(f->elist[i]);
      }
      os << "]";
      break;
    }
    case Formula::Kind::Exists:
      os << "E " << f->name << ". ";
      render_rec(f->lhs, d, 0, os);
      break;
    case Formula::Kind::Forall:
      os << "A " << f->name << ". ";
      render_rec(f->lhs, d, 0, os);
      break;
  }
  if (paren) os << ")";
}

}  // namespace

std::string render(const FormulaPtr& f, Dialect d) {
  std::ostringstream os;
  render_rec(f, d, 0, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace {

void flatten(const FormulaPtr& f, Formula::Kind k, std::vector<FormulaPtr>& out) {
  if (f->kind == k) {
    flatten(f->lhs, k, out);
    flatten(f->rhs, k, out);
  } else {
    out.push_back(f);
  }
}

FormulaPtr rebuild(Formula::Kind k, const std::vector<FormulaPtr>& parts) {
  FormulaPtr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->lhs = parts[i];
    f->rhs = acc;
    acc = f;
  }
  return acc;
}

}  // namespace

FormulaPtr normalize(const FormulaPtr& f, NormMode mode) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Var: case K::Top: case K::Bot: case K::One: case K::Emp:
    case K::Eq: case K::Neq: case K::PointsTo: case K::PointsToList:
    case K::Hole:
      return f;
    case K::Exists: return f_exists(f->name, normalize(f->lhs, mode));
    case K::Forall: return f_forall(f->name, normalize(f->lhs, mode));
    case K::Imp: return f_imp(normalize(f->lhs, mode), normalize(f->rhs, mode));
    case K::LRes: return f_lres(normalize(f->lhs, mode), normalize(f->rhs, mode));
    case K::RRes:
      if (mode == NormMode::BI)  // a/b = b -* a when fusion is commutative
        return f_lres(normalize(f->rhs, mode), normalize(f->lhs, mode));
      return f_rres(normalize(f->lhs, mode), normalize(f->rhs, mode));
    case K::And: case K::Or: {
      auto l = normalize(f->lhs, mode);
      auto r = normalize(f->rhs, mode);
      std::vector<FormulaPtr> parts;
      auto joined = (f->kind == K::And) ? f_and(l, r) : f_or(l, r);
      flatten(joined, f->kind, parts);
      K unit = (f->kind == K::And) ? K::Top : K::Bot;
      std::vector<FormulaPtr> kept;
      for (auto& p : parts)
        if (p->kind != unit) kept.push_back(p);
      if (kept.empty()) return (f->kind == K::And) ? f_top() : f_bot();
      std::sort(kept.begin(), kept.end(),
                [](const FormulaPtr& a, const FormulaPtr& b) { return formula_compare(a, b) < 0; });
      if (kept.size() == 1) return kept[0];
      return rebuild(f->kind, kept);
    }
    case K::Fuse: {
      auto l = normalize(f->lhs, mode);
      auto r = normalize(f->rhs, mode);
      if (mode == NormMode::NGBI) {
        if (l->kind == K::One) return r;
        if (r->kind == K::One) return l;
        return f_fuse(l, r);
      }
      std::vector<FormulaPtr> parts;
      flatten(f_fuse(l, r), K::Fuse, parts);
      std::vector<FormulaPtr> kept;
      bool saw_emp = false;
      for (auto& p : parts) {
        if (p->kind == K::Emp) saw_emp = true;
        if (p->kind != K::One && p->kind != K::Emp) kept.push_back(p);
      }
      if (kept.empty()) return saw_emp ? f_emp() : f_one();
      if (mode == NormMode::BI)
        std::sort(kept.begin(), kept.end(),
                  [](const FormulaPtr& a, const FormulaPtr& b) { return formula_compare(a, b) < 0; });
      if (kept.size() == 1) return kept[0];
      return rebuild(K::Fuse, kept);
    }
  }
  return f;
}

std::string normal_key(const FormulaPtr& f, NormMode mode) {
  return render(normalize(f, mode));
}

// ---------------------------------------------------------------------------
// Bunches
// ---------------------------------------------------------------------------

namespace {

// counts holes; rejects holes below non-Fuse/And connectives
int count_holes(const FormulaPtr& f, bool on_path) {
  if (!f) return 0;
  if (f->kind == Formula::Kind::Hole) return on_path ? 1 : 1000;
  bool path = on_path && (f->kind == Formula::Kind::Fuse || f->kind == Formula::Kind::And);
  int n = 0;
  if (f->lhs) n += count_holes(f->lhs, path);
  if (f->rhs) n += count_holes(f->rhs, path);
  return n;
}

}  // namespace

bool bunch_valid(const Bunch& b) { return b.context && count_holes(b.context, true) == 1; }

namespace {

FormulaPtr plug_rec(const FormulaPtr& c, const FormulaPtr& f) {
  if (c->kind == Formula::Kind::Hole) return f;
  if (!c->lhs && !c->rhs) return c;
  auto g = std::make_shared<Formula>(*c);
  if (c->lhs) g->lhs = plug_rec(c->lhs, f);
  if (c->rhs) g->rhs = plug_rec(c->rhs, f);
  return g;
}

void decomp_rec(const FormulaPtr& f,
                const std::function<FormulaPtr(FormulaPtr)>& wrap,
                std::vector<std::pair<Bunch, FormulaPtr>>& out) {
  out.push_back({Bunch{wrap(f_hole())}, f});
  if (f->kind == Formula::Kind::Fuse || f->kind == Formula::Kind::And) {
    auto kind = f->kind;
    auto rhs = f->rhs;
    auto lhs = f->lhs;
    decomp_rec(lhs,
               [&, kind, rhs](FormulaPtr h) { return wrap(mk2(kind, std::move(h), rhs)); }, out);
    decomp_rec(rhs,
               [&, kind, lhs](FormulaPtr h) { return wrap(mk2(kind, lhs, std::move(h))); }, out);
  }
}

}  // namespace

FormulaPtr bunch_plug(const Bunch& b, const FormulaPtr& f) { return plug_rec(b.context, f); }

std::vector<std::pair<Bunch, FormulaPtr>> bunch_decompositions(const FormulaPtr& f) {
  std::vector<std::pair<Bunch, FormulaPtr>> out;
  decomp_rec(f, [](FormulaPtr h) { return h; }, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

FormulaPtr subst_var(const FormulaPtr& f, const std::string& v, const FormulaPtr& g) {
  using K = Formula::Kind;
  if (f->kind == K::Var) return f->name == v ? g : f;
  if (!f->lhs && !f->rhs) return f;
  auto h = std::make_shared<Formula>(*f);
  if (f->lhs) h->lhs = subst_var(f->lhs, v, g);
  if (f->rhs) h->rhs = subst_var(f->rhs, v, g);
  return h;
}

void collect_free_avars(const FormulaPtr& f, std::vector<std::string>& out) {
  using K = Formula::Kind;
  if (!f) return;
  if (f->kind == K::Exists || f->kind == K::Forall) {
    std::vector<std::string> inner;
    collect_free_avars(f->lhs, inner);
    for (auto& v : inner)
      if (v != f->name) out.push_back(v);
    return;
  }
  collect_avars(f->e1, out);
  collect_avars(f->e2, out);
  for (auto& e : f->elist) collect_avars(e, out);
  collect_free_avars(f->lhs, out);
  collect_free_avars(f->rhs, out);
}

void collect_pvars(const FormulaPtr& f, std::vector<std::string>& out) {
  if (!f) return;
  collect_pvars(f->e1, out);
  collect_pvars(f->e2, out);
  for (auto& e : f->elist) collect_pvars(e, out);
  collect_pvars(f->lhs, out);
  collect_pvars(f->rhs, out);
}

void collect_prop_vars(const FormulaPtr& f, std::vector<std::string>& out) {
  if (!f) return;
  if (f->kind == Formula::Kind::Var) out.push_back(f->name);
  collect_prop_vars(f->lhs, out);
  collect_prop_vars(f->rhs, out);
}

bool avar_free_in(const FormulaPtr& f, const std::string& v) {
  std::vector<std::string> fv;
  collect_free_avars(f, fv);
  return std::find(fv.begin(), fv.end(), v) != fv.end();
}

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  std::string cand = base + "'";
  while (used.count(cand)) cand += "'";
  return cand;
}

FormulaPtr subst_expr_rec(const FormulaPtr& f, bool prog_var, const std::string& v,
                          const ExprPtr& g, const std::vector<std::string>& g_avars) {
  using K = Formula::Kind;
  if (!f) return f;
  switch (f->kind) {
    case K::Exists:
    case K::Forall: {
      if (!prog_var && f->name == v) return f;  // v bound here; no free occurrences below
      bool captures =
          std::find(g_avars.begin(), g_avars.end(), f->name) != g_avars.end() &&
          avar_free_in(f->lhs, v);
      if (captures) {
        std::set<std::string> used(g_avars.begin(), g_avars.end());
        std::vector<std::string> body_vars;
        collect_free_avars(f->lhs, body_vars);
        used.insert(body_vars.begin(), body_vars.end());
        used.insert(v);
        std::string w = fresh_name(f->name, used);
        auto renamed = subst_expr_rec(f->lhs, false, f->name, e_avar(w), {});
        auto body = subst_expr_rec(renamed, prog_var, v, g, g_avars);
        return f->kind == K::Exists ? f_exists(w, body) : f_forall(w, body);
      }
      auto body = subst_expr_rec(f->lhs, prog_var, v, g, g_avars);
      return f->kind == K::Exists ? f_exists(f->name, body) : f_forall(f->name, body);
    }
    default: {
      if (!f->lhs && !f->rhs && !f->e1 && !f->e2 && f->elist.empty()) return f;
      auto h = std::make_shared<Formula>(*f);
      if (f->e1) h->e1 = expr_subst(f->e1, prog_var, v, g);
      if (f->e2) h->e2 = expr_subst(f->e2, prog_var, v, g);
      for (auto& e : h->elist) e = expr_subst(e, prog_var, v, g);
      if (f->lhs) h->lhs = subst_expr_rec(f->lhs, prog_var, v, g, g_avars);
      if (f->rhs) h->rhs = subst_expr_rec(f->rhs, prog_var, v, g, g_avars);
      return h;
    }
  }
}

}  // namespace

FormulaPtr subst_expr(const FormulaPtr& f, bool prog_var, const std::string& v, const ExprPtr& g) {
  std::vector<std::string> g_avars;
  collect_avars(g, g_avars);
  return subst_expr_rec(f, prog_var, v, g, g_avars);
}

}  // namespace bunchworks
