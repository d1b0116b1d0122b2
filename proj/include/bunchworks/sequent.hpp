#ifndef BUNCHWORKS_SEQUENT_HPP
#define BUNCHWORKS_SEQUENT_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bunchworks/formula.hpp"

namespace bunchworks::sequent {

enum class Mode { GBI, BI, NGBI };

struct Sequent {
  FormulaPtr lhs, rhs;  // read modulo normal form
};

Sequent parse_sequent(const std::string& text, Mode mode = Mode::GBI);
std::string render_sequent(const Sequent& s);
NormMode norm_mode(Mode m);
Sequent normalize_sequent(const Sequent& s, Mode m);
std::string sequent_key(const Sequent& s, Mode m);

// One backward rule application: the rule name and the premises it requires.
struct RuleInstance {
  std::string rule;               // Table 2 label, e.g. "\\l", "&r", "cut"
  std::vector<Sequent> premises;  // empty for axioms
};

// Every backward-applicable rule instance at s (axioms included, listed first).
std::vector<RuleInstance> applicable_rules(const Sequent& s, Mode mode);

struct ProofTree {
  Sequent goal;
  std::string rule;
  std::vector<std::shared_ptr<const ProofTree>> children;
};
using ProofTreePtr = std::shared_ptr<const ProofTree>;

struct Budget {
  int max_depth = 24;
  int conjunct_multiplicity = 3;   // cap on identical conjuncts in a bunch
  long memo_limit = 200000;
};

struct SearchStats {
  long expanded = 0;
  bool depth_hit = false;
  bool memo_hit = false;
};

enum class Verdict { Proved, NotProvable, BudgetExhausted };

struct SearchOutcome {
  Verdict verdict;
  ProofTreePtr tree;  // set when Proved
  SearchStats stats;
};

struct ProveOptions {
  Budget budget{};
  bool allow_cut = false;  // analytic cut over the subformula closure
};

SearchOutcome prove(const Sequent& s, Mode mode, const ProveOptions& opts = {});

struct TreeError {
  std::string where;   // rendered goal of the offending node
  std::string reason;
};

// Independent validation: every node must be a legal instance of its rule.
std::optional<TreeError> check_tree(const ProofTree& t, Mode mode);

std::string render_tree(const ProofTree& t, int indent = 0);
std::string tree_to_json(const ProofTree& t);

struct CutProbeItem {
  Sequent goal;
  bool cutfree_proved = false;
  bool with_cut_proved = false;
};

// Empirical cut-admissibility evidence over a corpus of sequents.
std::vector<CutProbeItem> cut_probe(const std::vector<Sequent>& corpus, Mode mode,
                                    const Budget& budget = {});

}  // namespace bunchworks::sequent

#endif
