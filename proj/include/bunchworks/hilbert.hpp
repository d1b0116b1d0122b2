#ifndef BUNCHWORKS_HILBERT_HPP
#define BUNCHWORKS_HILBERT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bunchworks/formula.hpp"
#include "bunchworks/sequent.hpp"

namespace bunchworks::hilbert {

enum class System { HJ, HGBI, HBI };

using Subst = std::map<std::string, FormulaPtr>;

struct AxiomSchema {
  std::string id;
  FormulaPtr schema;
};

// The axiom schemata of a system; bidirectional axioms appear as -fwd/-bwd
// directional pairs.
const std::vector<AxiomSchema>& axioms(System s);

// One-way matching of f against the system's schemata.
std::optional<std::pair<std::string, Subst>> check_axiom_instance(const FormulaPtr& f, System s);

struct Justification {
  enum class Kind {
    Hypothesis,   // args: index into Gamma
    Axiom,        // axiom id + explicit substitution
    ModusPonens,  // args: step of X, step of X->Y
    ResidLFwd,    // from x.y -> z infer y -> x\z
    ResidLBwd,    // from y -> x\z infer x.y -> z
    ResidRFwd,    // from x.y -> z infer x -> z/y
    ResidRBwd,    // from x -> z/y infer x.y -> z
    StarMono,     // HBI: from x -> y infer x*z -> y*z
    WandIntro     // HBI: from x -> y infer 1 -> (x -* y)
  };
  Kind kind;
  std::vector<int> refs;
  std::string axiom_id;
  Subst subst;
};

struct ProofStep {
  FormulaPtr formula;
  Justification by;
};

struct HilbertProof {
  std::vector<ProofStep> steps;
};

struct CheckResult {
  bool ok = true;
  int step = -1;
  std::string reason;
};

CheckResult check_proof(const std::vector<FormulaPtr>& gamma, const HilbertProof& p, System s);

// Theorem bridge: phi is provable iff top <= phi holds in all GBI-algebras.
sequent::Sequent theoremhood_bridge(const FormulaPtr& f);

std::string proof_to_json(const HilbertProof& p);
HilbertProof proof_from_json(const std::string& text, System s);

}  // namespace bunchworks::hilbert

#endif
