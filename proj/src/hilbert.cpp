#include "bunchworks/hilbert.hpp"

#include <json.hpp>

namespace bunchworks::hilbert {

namespace {

FormulaPtr V(const char* n) { return f_var(n); }

std::vector<AxiomSchema> hj_axioms() {
  auto x = V("x"), y = V("y"), z = V("z");
  return {
      {"efq", f_imp(f_bot(), x)},
      {"top", f_imp(x, f_top())},
      {"K", f_imp(x, f_imp(y, x))},
      {"S", f_imp(f_imp(x, f_imp(y, z)), f_imp(f_imp(x, y), f_imp(x, z)))},
      {"and-e1", f_imp(f_and(x, y), x)},
      {"and-e2", f_imp(f_and(x, y), y)},
      {"and-i", f_imp(x, f_imp(y, f_and(x, y)))},
      {"or-i1", f_imp(x, f_or(x, y))},
      {"or-i2", f_imp(x, f_or(y, x))},
      {"or-e", f_imp(f_imp(x, z), f_imp(f_imp(y, z), f_imp(f_or(x, y), z)))},
  };
}

std::vector<AxiomSchema> hgbi_axioms() {
  auto ax = hj_axioms();
  auto x = V("x"), y = V("y"), z = V("z");
  auto xyz_l = f_fuse(f_fuse(x, y), z);
  auto xyz_r = f_fuse(x, f_fuse(y, z));
  ax.push_back({"fuse-assoc-fwd", f_imp(xyz_l, xyz_r)});
  ax.push_back({"fuse-assoc-bwd", f_imp(xyz_r, xyz_l)});
  ax.push_back({"one-l-fwd", f_imp(f_fuse(f_one(), x), x)});
  ax.push_back({"one-l-bwd", f_imp(x, f_fuse(f_one(), x))});
  ax.push_back({"one-r-fwd", f_imp(f_fuse(x, f_one()), x)});
  ax.push_back({"one-r-bwd", f_imp(x, f_fuse(x, f_one()))});
  return ax;
}

std::vector<AxiomSchema> hbi_axioms() {
  auto ax = hj_axioms();
  auto x = V("x"), y = V("y"), z = V("z");
  auto xyz_l = f_fuse(f_fuse(x, y), z);
  auto xyz_r = f_fuse(x, f_fuse(y, z));
  ax.push_back({"star-assoc-fwd", f_imp(xyz_l, xyz_r)});
  ax.push_back({"star-assoc-bwd", f_imp(xyz_r, xyz_l)});
  ax.push_back({"star-comm", f_imp(f_fuse(x, y), f_fuse(y, x))});
  ax.push_back({"star-one-fwd", f_imp(f_fuse(x, f_one()), x)});
  ax.push_back({"star-one-bwd", f_imp(x, f_fuse(x, f_one()))});
  ax.push_back({"wand-mp", f_imp(f_fuse(x, f_lres(x, y)), y)});
  ax.push_back({"wand-curry-fwd",
                f_imp(f_lres(x, f_lres(y, z)), f_lres(f_fuse(x, y), z))});
  ax.push_back({"wand-curry-bwd",
                f_imp(f_lres(f_fuse(x, y), z), f_lres(x, f_lres(y, z)))});
  return ax;
}

}  // namespace

const std::vector<AxiomSchema>& axioms(System s) {
  static const std::vector<AxiomSchema> hj = hj_axioms();
  static const std::vector<AxiomSchema> hgbi = hgbi_axioms();
  static const std::vector<AxiomSchema> hbi = hbi_axioms();
  switch (s) {
    case System::HJ: return hj;
    case System::HGBI: return hgbi;
    case System::HBI: return hbi;
  }
  return hj;
}

namespace {

bool match(const FormulaPtr& schema, const FormulaPtr& f, Subst& binding) {
  using K = Formula::Kind;
  if (schema->kind == K::Var) {
    auto it = binding.find(schema->name);
    if (it == binding.end()) {
      binding[schema->name] = f;
      return true;
    }
    return formula_equal(it->second, f);
  }
  if (schema->kind != f->kind) return false;
  if (schema->lhs && !match(schema->lhs, f->lhs, binding)) return false;
  if (schema->rhs && !match(schema->rhs, f->rhs, binding)) return false;
  return true;
}

// simultaneous substitution of all bindings
FormulaPtr apply_subst(const FormulaPtr& schema, const Subst& subst) {
  using K = Formula::Kind;
  if (schema->kind == K::Var) {
    auto it = subst.find(schema->name);
    return it == subst.end() ? schema : it->second;
  }
  if (!schema->lhs && !schema->rhs) return schema;
  auto g = std::make_shared<Formula>(*schema);
  if (schema->lhs) g->lhs = apply_subst(schema->lhs, subst);
  if (schema->rhs) g->rhs = apply_subst(schema->rhs, subst);
  return g;
}

}  // namespace

std::optional<std::pair<std::string, Subst>> check_axiom_instance(const FormulaPtr& f, System s) {
  for (auto& ax : axioms(s)) {
    Subst b;
    if (match(ax.schema, f, b)) return std::make_pair(ax.id, b);
  }
  return std::nullopt;
}

namespace {

const AxiomSchema* find_axiom(System s, const std::string& id) {
  for (auto& ax : axioms(s))
    if (ax.id == id) return &ax;
  return nullptr;
}

}  // namespace

CheckResult check_proof(const std::vector<FormulaPtr>& gamma, const HilbertProof& p, System s) {
  using K = Justification::Kind;
  auto fail = [](int step, const std::string& reason) {
    return CheckResult{false, step, reason};
  };
  for (int i = 0; i < (int)p.steps.size(); ++i) {
    const auto& st = p.steps[i];
    const auto& by = st.by;
    if (by.kind != K::Hypothesis)  // hypothesis refs index Gamma, not steps
      for (int r : by.refs)
        if (r < 0 || r >= i) return fail(i, "justification references step " + std::to_string(r));
    auto ref = [&](int k) { return p.steps[by.refs[k]].formula; };
    switch (by.kind) {
      case K::Hypothesis: {
        if (by.refs.size() != 1 || by.refs[0] < 0) return fail(i, "hypothesis needs one index");
        int k = by.refs[0];
        if (k >= (int)gamma.size()) return fail(i, "hypothesis index out of range");
        if (!formula_equal(gamma[k], st.formula)) return fail(i, "formula differs from hypothesis");
        break;
      }
      case K::Axiom: {
        auto* ax = find_axiom(s, by.axiom_id);
        if (!ax) return fail(i, "unknown axiom '" + by.axiom_id + "' in this system");
        auto inst = apply_subst(ax->schema, by.subst);
        if (!formula_equal(inst, st.formula))
          return fail(i, "formula is not the stated instance of " + by.axiom_id);
        break;
      }
      case K::ModusPonens: {
        if (by.refs.size() != 2) return fail(i, "modus ponens needs two premises");
        auto a = ref(0), imp = ref(1);
        if (imp->kind != Formula::Kind::Imp) return fail(i, "second premise is not an implication");
        if (!formula_equal(imp->lhs, a)) return fail(i, "antecedent mismatch in modus ponens");
        if (!formula_equal(imp->rhs, st.formula)) return fail(i, "conclusion mismatch in modus ponens");
        break;
      }
      case K::ResidLFwd: case K::ResidLBwd: case K::ResidRFwd: case K::ResidRBwd: {
        if (s != System::HGBI) return fail(i, "residuation rules belong to HGBI");
        if (by.refs.size() != 1) return fail(i, "residuation rule needs one premise");
        auto prem = ref(0);
        auto cur = st.formula;
        if (cur->kind != Formula::Kind::Imp || prem->kind != Formula::Kind::Imp)
          return fail(i, "residuation rule acts on implications");
        FormulaPtr expected;
        if (by.kind == K::ResidLFwd) {
          // premise x.y -> z, current y -> x\z
          if (cur->rhs->kind != Formula::Kind::LRes) return fail(i, "conclusion is not y -> x\\z");
          expected = f_imp(f_fuse(cur->rhs->lhs, cur->lhs), cur->rhs->rhs);
        } else if (by.kind == K::ResidLBwd) {
          if (cur->lhs->kind != Formula::Kind::Fuse) return fail(i, "conclusion is not x.y -> z");
          expected = f_imp(cur->lhs->rhs, f_lres(cur->lhs->lhs, cur->rhs));
        } else if (by.kind == K::ResidRFwd) {
          if (cur->rhs->kind != Formula::Kind::RRes) return fail(i, "conclusion is not x -> z/y");
          expected = f_imp(f_fuse(cur->lhs, cur->rhs->rhs), cur->rhs->lhs);
        } else {
          if (cur->lhs->kind != Formula::Kind::Fuse) return fail(i, "conclusion is not x.y -> z");
          expected = f_imp(cur->lhs->lhs, f_rres(cur->rhs, cur->lhs->rhs));
        }
        if (!formula_equal(prem, expected)) return fail(i, "premise does not fit the rule shape");
        break;
      }
      case K::StarMono: {
        if (s != System::HBI) return fail(i, "star monotonicity belongs to HBI");
        if (by.refs.size() != 1) return fail(i, "rule needs one premise");
        auto prem = ref(0);
        auto cur = st.formula;
        if (cur->kind != Formula::Kind::Imp || cur->lhs->kind != Formula::Kind::Fuse ||
            cur->rhs->kind != Formula::Kind::Fuse)
          return fail(i, "conclusion is not x*z -> y*z");
        if (!formula_equal(cur->lhs->rhs, cur->rhs->rhs))
          return fail(i, "framed formulas differ");
        if (prem->kind != Formula::Kind::Imp ||
            !formula_equal(prem->lhs, cur->lhs->lhs) ||
            !formula_equal(prem->rhs, cur->rhs->lhs))
          return fail(i, "premise does not fit the rule shape");
        break;
      }
      case K::WandIntro: {
        if (s != System::HBI) return fail(i, "wand introduction belongs to HBI");
        if (by.refs.size() != 1) return fail(i, "rule needs one premise");
        auto prem = ref(0);
        auto cur = st.formula;
        if (cur->kind != Formula::Kind::Imp || cur->lhs->kind != Formula::Kind::One ||
            cur->rhs->kind != Formula::Kind::LRes)
          return fail(i, "conclusion is not 1 -> (x -* y)");
        if (prem->kind != Formula::Kind::Imp ||
            !formula_equal(prem->lhs, cur->rhs->lhs) ||
            !formula_equal(prem->rhs, cur->rhs->rhs))
          return fail(i, "premise does not fit the rule shape");
        break;
      }
    }
  }
  return CheckResult{};
}

sequent::Sequent theoremhood_bridge(const FormulaPtr& f) {
  return sequent::Sequent{f_top(), f};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

std::string kind_name(Justification::Kind k) {
  using K = Justification::Kind;
  switch (k) {
    case K::Hypothesis: return "hyp";
    case K::Axiom: return "axiom";
    case K::ModusPonens: return "mp";
    case K::ResidLFwd: return "residl-fwd";
    case K::ResidLBwd: return "residl-bwd";
    case K::ResidRFwd: return "residr-fwd";
    case K::ResidRBwd: return "residr-bwd";
    case K::StarMono: return "star-mono";
    case K::WandIntro: return "wand-intro";
  }
  return "?";
}

Justification::Kind kind_from_name(const std::string& s) {
  using K = Justification::Kind;
  if (s == "hyp") return K::Hypothesis;
  if (s == "axiom") return K::Axiom;
  if (s == "mp") return K::ModusPonens;
  if (s == "residl-fwd") return K::ResidLFwd;
  if (s == "residl-bwd") return K::ResidLBwd;
  if (s == "residr-fwd") return K::ResidRFwd;
  if (s == "residr-bwd") return K::ResidRBwd;
  if (s == "star-mono") return K::StarMono;
  if (s == "wand-intro") return K::WandIntro;
  throw std::invalid_argument("unknown justification kind " + s);
}

}  // namespace

std::string proof_to_json(const HilbertProof& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (auto& st : p.steps) {
    nlohmann::json by;
    by["kind"] = kind_name(st.by.kind);
    if (!st.by.refs.empty()) by["refs"] = st.by.refs;
    if (st.by.kind == Justification::Kind::Axiom) {
      by["axiom"] = st.by.axiom_id;
      nlohmann::json sub = nlohmann::json::object();
      for (auto& [v, g] : st.by.subst) sub[v] = render(g);
      by["subst"] = sub;
    }
    steps.push_back({{"formula", render(st.formula)}, {"by", by}});
  }
  return steps.dump(2);
}

HilbertProof proof_from_json(const std::string& text, System s) {
  Dialect d = (s == System::HBI) ? Dialect::CoreBI : Dialect::CoreGBI;
  auto j = nlohmann::json::parse(text);
  HilbertProof p;
  for (auto& step : j) {
    ProofStep st;
    st.formula = parse_formula(step.at("formula").get<std::string>(), d);
    auto& by = step.at("by");
    st.by.kind = kind_from_name(by.at("kind").get<std::string>());
    if (by.contains("refs")) st.by.refs = by.at("refs").get<std::vector<int>>();
    if (st.by.kind == Justification::Kind::Axiom) {
      st.by.axiom_id = by.at("axiom").get<std::string>();
      if (by.contains("subst"))
        for (auto& [v, g] : by.at("subst").items())
          st.by.subst[v] = parse_formula(g.get<std::string>(), d);
    }
    p.steps.push_back(std::move(st));
  }
  return p;
}

}  // namespace bunchworks::hilbert
