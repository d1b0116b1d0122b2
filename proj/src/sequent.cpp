#include "bunchworks/sequent.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bunchworks::sequent {

NormMode norm_mode(Mode m) {
  switch (m) {
    case Mode::GBI: return NormMode::GBI;
    case Mode::BI: return NormMode::BI;
    case Mode::NGBI: return NormMode::NGBI;
  }
  return NormMode::GBI;
}

namespace {

using K = Formula::Kind;

std::vector<FormulaPtr> members(const FormulaPtr& f, K kind) {
  std::vector<FormulaPtr> out;
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    if (g->kind == kind) {
      walk(g->lhs);
      walk(g->rhs);
    } else {
      out.push_back(g);
    }
  };
  walk(f);
  return out;
}

FormulaPtr join_members(K kind, const std::vector<FormulaPtr>& ms) {
  if (ms.empty()) {
    if (kind == K::And) return f_top();
    if (kind == K::Or) return f_bot();
    return f_one();
  }
  FormulaPtr acc = ms.back();
  for (std::size_t i = ms.size() - 1; i-- > 0;) {
    auto f = (kind == K::And)   ? f_and(ms[i], acc)
             : (kind == K::Or)  ? f_or(ms[i], acc)
                                : f_fuse(ms[i], acc);
    acc = f;
  }
  return acc;
}

// cap identical conjuncts inside every &-multiset ("3-reduced sequents")
FormulaPtr cap_conjuncts(const FormulaPtr& f, int cap) {
  if (!f->lhs && !f->rhs) return f;
  if (f->kind == K::And) {
    auto ms = members(f, K::And);
    for (auto& m : ms) m = cap_conjuncts(m, cap);
    std::vector<FormulaPtr> kept;
    for (auto& m : ms) {
      int count = 0;
      for (auto& k : kept)
        if (formula_equal(k, m)) ++count;
      if (count < cap) kept.push_back(m);
    }
    return join_members(K::And, kept);
  }
  auto g = std::make_shared<Formula>(*f);
  if (f->lhs) g->lhs = cap_conjuncts(f->lhs, cap);
  if (f->rhs) g->rhs = cap_conjuncts(f->rhs, cap);
  return g;
}

}  // namespace

Sequent normalize_sequent(const Sequent& s, Mode m) {
  return Sequent{normalize(s.lhs, norm_mode(m)), normalize(s.rhs, norm_mode(m))};
}

std::string sequent_key(const Sequent& s, Mode m) {
  return normal_key(s.lhs, norm_mode(m)) + " <= " + normal_key(s.rhs, norm_mode(m));
}

Sequent parse_sequent(const std::string& text, Mode mode) {
  auto pos = text.find("<=");
  if (pos == std::string::npos) throw ParseError("expected '<=' between the sides", 0);
  Dialect d = (mode == Mode::BI) ? Dialect::CoreBI : Dialect::CoreGBI;
  auto lhs = parse_formula(text.substr(0, pos), d);
  auto rhs = parse_formula(text.substr(pos + 2), d);
  return Sequent{lhs, rhs};
}

std::string render_sequent(const Sequent& s) {
  return render(s.lhs) + " <= " + render(s.rhs);
}

// ---------------------------------------------------------------------------
// Rule instance enumeration
// ---------------------------------------------------------------------------

namespace {

using Rebuild = std::function<FormulaPtr(FormulaPtr)>;

struct Collector {
  Mode mode;
  const Sequent& goal;  // normalized
  std::vector<RuleInstance> out;
  std::set<std::string> seen;

  void add(const std::string& rule, std::vector<Sequent> premises) {
    for (auto& p : premises) {
      p = normalize_sequent(p, mode);
      p.lhs = normalize(cap_conjuncts(p.lhs, 3), norm_mode(mode));
    }
    std::string key = rule + "#";
    std::vector<std::string> pk;
    for (auto& p : premises) pk.push_back(sequent_key(p, mode));
    std::sort(pk.begin(), pk.end());
    for (auto& k : pk) key += k + ";";
    if (seen.insert(key).second) out.push_back({rule, std::move(premises)});
  }

  // has bottom on a fuse/and path
  bool bot_position(const FormulaPtr& f) const {
    if (f->kind == K::Bot) return true;
    if (f->kind == K::And || f->kind == K::Fuse)
      return bot_position(f->lhs) || bot_position(f->rhs);
    return false;
  }

  void left_rules(const FormulaPtr& g, const Rebuild& rebuild) {
    const auto& rhs = goal.rhs;
    switch (g->kind) {
      case K::Or: {
        auto bs = members(g, K::Or);
        std::vector<Sequent> prems;
        for (auto& b : bs) prems.push_back({rebuild(b), rhs});
        add("|l", std::move(prems));
        break;
      }
      case K::Imp: {
        // top-view: u(top & (y -> z)) <= w
        add("->l", {{f_top(), g->lhs}, {rebuild(g->rhs), rhs}});
        add("->l+", {{f_top(), g->lhs}, {rebuild(f_and(g, g->rhs)), rhs}});
        break;
      }
      case K::LRes:
        // unit view: u(1 . (y \ z)) <= w
        add("\\l", {{f_one(), g->lhs}, {rebuild(g->rhs), rhs}});
        break;
      case K::RRes:
        add("/l", {{f_one(), g->rhs}, {rebuild(g->lhs), rhs}});
        break;
      case K::And: {
        auto ms = members(g, K::And);
        int n = (int)ms.size();
        auto rebuild_set = [&](const std::vector<FormulaPtr>& kept) {
          return rebuild(join_members(K::And, kept));
        };
        for (int i = 0; i < n; ++i) {
          std::vector<FormulaPtr> rest;
          for (int j = 0; j < n; ++j)
            if (j != i) rest.push_back(ms[j]);
          add("&l", {{rebuild_set(rest), rhs}});
          if (ms[i]->kind == K::Imp) {
            // u(x & (y->z)) <= w from x <= y and u(z) <= w, x a submultiset
            int r = (int)rest.size();
            for (unsigned long mask = 0; mask < (1ul << r); ++mask) {
              std::vector<FormulaPtr> xs, kept;
              for (int j = 0; j < r; ++j)
                (mask & (1ul << j) ? xs : kept).push_back(rest[j]);
              Sequent side{join_members(K::And, xs), ms[i]->lhs};
              kept.push_back(ms[i]->rhs);
              add("->l", {side, {rebuild_set(kept), rhs}});
              auto dup = ms;
              dup.push_back(ms[i]->rhs);
              add("->l+", {side, {rebuild_set(dup), rhs}});
            }
          }
          left_rules(ms[i], [&, i, ms](FormulaPtr h) {
            auto copy = ms;
            copy[i] = std::move(h);
            return rebuild(join_members(K::And, copy));
          });
        }
        break;
      }
      case K::Fuse: {
        if (mode == Mode::NGBI) {
          auto l = g->lhs, r = g->rhs;
          if (r->kind == K::LRes)
            add("\\l", {{l, r->lhs}, {rebuild(r->rhs), rhs}});
          if (l->kind == K::RRes)
            add("/l", {{r, l->rhs}, {rebuild(l->lhs), rhs}});
          left_rules(l, [&](FormulaPtr h) { return rebuild(f_fuse(h, r)); });
          left_rules(r, [&](FormulaPtr h) { return rebuild(f_fuse(l, h)); });
          break;
        }
        auto es = members(g, K::Fuse);
        int n = (int)es.size();
        auto rebuild_seq = [&](const std::vector<FormulaPtr>& seq) {
          return rebuild(join_members(K::Fuse, seq));
        };
        if (mode == Mode::GBI) {
          for (int j = 0; j < n; ++j) {
            if (es[j]->kind == K::LRes) {
              for (int i = 0; i < j; ++i) {
                std::vector<FormulaPtr> x(es.begin() + i, es.begin() + j);
                std::vector<FormulaPtr> seq(es.begin(), es.begin() + i);
                seq.push_back(es[j]->rhs);
                seq.insert(seq.end(), es.begin() + j + 1, es.end());
                add("\\l", {{join_members(K::Fuse, x), es[j]->lhs}, {rebuild_seq(seq), rhs}});
              }
            }
            if (es[j]->kind == K::RRes) {
              for (int k = j + 1; k <= n - 1; ++k) {
                std::vector<FormulaPtr> x(es.begin() + j + 1, es.begin() + k + 1);
                std::vector<FormulaPtr> seq(es.begin(), es.begin() + j);
                seq.push_back(es[j]->lhs);
                seq.insert(seq.end(), es.begin() + k + 1, es.end());
                add("/l", {{join_members(K::Fuse, x), es[j]->rhs}, {rebuild_seq(seq), rhs}});
              }
            }
          }
        } else {  // BI: fusion is a multiset
          for (int j = 0; j < n; ++j) {
            if (es[j]->kind != K::LRes) continue;
            std::vector<FormulaPtr> rest;
            for (int i = 0; i < n; ++i)
              if (i != j) rest.push_back(es[i]);
            int r = (int)rest.size();
            for (unsigned long mask = 1; mask < (1ul << r); ++mask) {
              std::vector<FormulaPtr> xs, kept;
              for (int i = 0; i < r; ++i)
                (mask & (1ul << i) ? xs : kept).push_back(rest[i]);
              kept.push_back(es[j]->rhs);
              add("\\l", {{join_members(K::Fuse, xs), es[j]->lhs},
                          {rebuild_seq(kept), rhs}});
            }
          }
        }
        for (int i = 0; i < n; ++i)
          left_rules(es[i], [&, i, es](FormulaPtr h) {
            auto copy = es;
            copy[i] = std::move(h);
            return rebuild(join_members(K::Fuse, copy));
          });
        break;
      }
      default:
        break;
    }
  }

  void fuse_split(const FormulaPtr& lhs, const FormulaPtr& rhs) {
    std::vector<FormulaPtr> ls, rs;
    if (mode == Mode::NGBI) {
      if (rhs->kind != K::Fuse) return;
      std::vector<std::pair<FormulaPtr, FormulaPtr>> lsplits;
      if (lhs->kind == K::Fuse) lsplits.push_back({lhs->lhs, lhs->rhs});
      lsplits.push_back({f_one(), lhs});
      lsplits.push_back({lhs, f_one()});
      for (auto& [l1, l2] : lsplits)
        add(".lr", {{l1, rhs->lhs}, {l2, rhs->rhs}});
      return;
    }
    ls = (lhs->kind == K::Fuse) ? members(lhs, K::Fuse) : std::vector<FormulaPtr>{lhs};
    rs = (rhs->kind == K::Fuse) ? members(rhs, K::Fuse) : std::vector<FormulaPtr>{rhs};
    if (rs.size() < 2 && ls.size() < 2) return;
    int k = (int)ls.size(), m = (int)rs.size();
    std::string goal_key = sequent_key(goal, mode);
    auto try_split = [&](const std::vector<FormulaPtr>& l1, const std::vector<FormulaPtr>& l2,
                         const std::vector<FormulaPtr>& r1, const std::vector<FormulaPtr>& r2) {
      if (l1.empty() && r1.empty()) return;
      if (l2.empty() && r2.empty()) return;
      Sequent p1{join_members(K::Fuse, l1), join_members(K::Fuse, r1)};
      Sequent p2{join_members(K::Fuse, l2), join_members(K::Fuse, r2)};
      if (sequent_key(normalize_sequent(p1, mode), mode) == goal_key) return;
      if (sequent_key(normalize_sequent(p2, mode), mode) == goal_key) return;
      add(".lr", {p1, p2});
    };
    auto piece = [&](const std::vector<FormulaPtr>& v, int from, int to) {
      return std::vector<FormulaPtr>(v.begin() + from, v.begin() + to);
    };
    if (mode == Mode::GBI) {
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= m; ++j)
          try_split(piece(ls, 0, i), piece(ls, i, k), piece(rs, 0, j), piece(rs, j, m));
    } else {  // BI: fusion is commutative, split into submultisets
      for (unsigned long lm = 0; lm < (1ul << k); ++lm)
        for (unsigned long rm = 0; rm < (1ul << m); ++rm) {
          std::vector<FormulaPtr> l1, l2, r1, r2;
          for (int i = 0; i < k; ++i) (lm & (1ul << i) ? l1 : l2).push_back(ls[i]);
          for (int j = 0; j < m; ++j) (rm & (1ul << j) ? r1 : r2).push_back(rs[j]);
          try_split(l1, l2, r1, r2);
        }
    }
  }

  void collect(bool with_cut, const std::vector<FormulaPtr>& cut_pool) {
    const auto& lhs = goal.lhs;
    const auto& rhs = goal.rhs;
    // axioms close the goal; no other instance is needed then
    if (formula_equal(lhs, rhs)) add("id", {});
    if (bot_position(lhs)) add("botl", {});
    if (rhs->kind == K::Top) add("topr", {});
    if (!out.empty()) return;

    // invertible right rules
    if (rhs->kind == K::And) {
      std::vector<Sequent> prems;
      for (auto& m : members(rhs, K::And)) prems.push_back({lhs, m});
      add("&r", std::move(prems));
    }
    if (rhs->kind == K::Imp) add("->r", {{f_and(rhs->lhs, lhs), rhs->rhs}});
    if (rhs->kind == K::LRes) add("\\r", {{f_fuse(rhs->lhs, lhs), rhs->rhs}});
    if (rhs->kind == K::RRes) add("/r", {{f_fuse(lhs, rhs->rhs), rhs->lhs}});

    // left rules over every bunch position
    left_rules(lhs, [](FormulaPtr h) { return h; });

    // branching rules
    if (rhs->kind == K::Or)
      for (auto& b : members(rhs, K::Or)) add("|r", {{lhs, b}});
    fuse_split(lhs, rhs);

    if (with_cut) {
      std::string goal_key = sequent_key(goal, mode);
      std::function<void(const FormulaPtr&, const Rebuild&)> walk =
          [&](const FormulaPtr& g, const Rebuild& rebuild) {
            for (auto& c : cut_pool) {
              if (formula_equal(c, g)) continue;
              Sequent p1{g, c};
              Sequent p2{rebuild(c), rhs};
              if (sequent_key(normalize_sequent(p2, mode), mode) == goal_key) continue;
              add("cut", {p1, p2});
            }
            if (g->kind == K::And || (g->kind == K::Fuse && mode != Mode::NGBI)) {
              auto ms = members(g, g->kind);
              for (std::size_t i = 0; i < ms.size(); ++i)
                walk(ms[i], [&, i, ms, kind = g->kind](FormulaPtr h) {
                  auto copy = ms;
                  copy[i] = std::move(h);
                  return rebuild(join_members(kind, copy));
                });
            } else if (g->kind == K::Fuse) {
              walk(g->lhs, [&](FormulaPtr h) { return rebuild(f_fuse(h, g->rhs)); });
              walk(g->rhs, [&](FormulaPtr h) { return rebuild(f_fuse(g->lhs, h)); });
            }
          };
      walk(lhs, [](FormulaPtr h) { return h; });
    }
  }
};

void subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  out.push_back(f);
  if (f->lhs) subformulas(f->lhs, out);
  if (f->rhs) subformulas(f->rhs, out);
}

std::vector<FormulaPtr> subformula_closure(const Sequent& s) {
  std::vector<FormulaPtr> all;
  subformulas(s.lhs, all);
  subformulas(s.rhs, all);
  std::sort(all.begin(), all.end(),
            [](const FormulaPtr& a, const FormulaPtr& b) { return formula_compare(a, b) < 0; });
  all.erase(std::unique(all.begin(), all.end(),
                        [](const FormulaPtr& a, const FormulaPtr& b) {
                          return formula_equal(a, b);
                        }),
            all.end());
  return all;
}

int rule_rank(const std::string& r) {
  if (r == "id" || r == "botl" || r == "topr") return 0;
  if (r == "&r" || r == "->r" || r == "\\r" || r == "/r") return 1;
  if (r == "|l") return 2;
  if (r == "->l" || r == "\\l" || r == "/l") return 3;
  if (r == "&l") return 4;
  if (r == "->l+") return 5;
  if (r == "|r") return 6;
  if (r == ".lr") return 7;
  return 8;  // cut
}

}  // namespace

std::vector<RuleInstance> applicable_rules(const Sequent& s, Mode mode) {
  Collector c{mode, normalize_sequent(s, mode)};
  c.collect(false, {});
  std::stable_sort(c.out.begin(), c.out.end(), [](const RuleInstance& a, const RuleInstance& b) {
    return rule_rank(a.rule) < rule_rank(b.rule);
  });
  return std::move(c.out);
}

namespace {

std::vector<RuleInstance> instances_with_cut(const Sequent& s, Mode mode,
                                             const std::vector<FormulaPtr>& pool) {
  Collector c{mode, normalize_sequent(s, mode)};
  c.collect(true, pool);
  std::stable_sort(c.out.begin(), c.out.end(), [](const RuleInstance& a, const RuleInstance& b) {
    return rule_rank(a.rule) < rule_rank(b.rule);
  });
  return std::move(c.out);
}

struct Searcher {
  Mode mode;
  Budget budget;
  bool allow_cut;
  std::vector<FormulaPtr> cut_pool;
  std::map<std::string, ProofTreePtr> proved;
  std::set<std::string> refuted;  // clean exhaustive failures
  SearchStats stats;
  bool aborted = false;

  struct Fail {
    bool exhausted = true;    // no depth cut below
    bool memoizable = true;   // no loop or depth cut below
  };

  using Result = std::pair<ProofTreePtr, Fail>;

  Result run(const Sequent& goal, int depth, std::vector<std::string>& path) {
    auto g = normalize_sequent(goal, mode);
    g.lhs = normalize(cap_conjuncts(g.lhs, budget.conjunct_multiplicity), norm_mode(mode));
    auto key = sequent_key(g, mode);
    if (auto it = proved.find(key); it != proved.end()) return {it->second, {}};
    if (refuted.count(key)) return {nullptr, Fail{true, true}};
    if (std::find(path.begin(), path.end(), key) != path.end())
      return {nullptr, Fail{true, false}};
    if (depth <= 0) {
      stats.depth_hit = true;
      return {nullptr, Fail{false, false}};
    }
    if (++stats.expanded > budget.memo_limit) aborted = true;
    if (aborted) return {nullptr, Fail{false, false}};

    auto insts = allow_cut ? instances_with_cut(g, mode, cut_pool)
                           : applicable_rules(g, mode);
    path.push_back(key);
    Fail agg{true, true};
    ProofTreePtr found;
    for (auto& inst : insts) {
      std::vector<ProofTreePtr> children;
      bool all = true;
      Fail worst{true, true};
      for (auto& prem : inst.premises) {
        auto [tree, fail] = run(prem, depth - 1, path);
        if (!tree) {
          worst.exhausted = worst.exhausted && fail.exhausted;
          worst.memoizable = worst.memoizable && fail.memoizable;
          all = false;
          break;
        }
        children.push_back(tree);
      }
      if (all) {
        auto node = std::make_shared<ProofTree>();
        node->goal = g;
        node->rule = inst.rule;
        node->children = std::move(children);
        found = node;
        break;
      }
      agg.exhausted = agg.exhausted && worst.exhausted;
      agg.memoizable = agg.memoizable && worst.memoizable;
    }
    path.pop_back();
    if (found) {
      proved[key] = found;
      return {found, {}};
    }
    if (agg.memoizable) refuted.insert(key);
    return {nullptr, agg};
  }
};

}  // namespace

SearchOutcome prove(const Sequent& s, Mode mode, const ProveOptions& opts) {
  Searcher se;
  se.mode = mode;
  se.budget = opts.budget;
  se.allow_cut = opts.allow_cut;
  if (opts.allow_cut) se.cut_pool = subformula_closure(normalize_sequent(s, mode));
  std::vector<std::string> path;
  auto [tree, fail] = se.run(s, opts.budget.max_depth, path);
  SearchOutcome out;
  out.stats = se.stats;
  if (tree) {
    out.verdict = Verdict::Proved;
    out.tree = tree;
  } else if (fail.exhausted && !se.aborted) {
    out.verdict = Verdict::NotProvable;
  } else {
    out.verdict = Verdict::BudgetExhausted;
  }
  return out;
}

std::optional<TreeError> check_tree(const ProofTree& t, Mode mode) {
  auto goal = normalize_sequent(t.goal, mode);
  auto insts = instances_with_cut(goal, mode, subformula_closure(goal));
  std::vector<std::string> child_keys;
  for (auto& c : t.children) child_keys.push_back(sequent_key(c->goal, mode));
  std::sort(child_keys.begin(), child_keys.end());
  bool matched = false;
  for (auto& inst : insts) {
    if (inst.rule != t.rule || inst.premises.size() != child_keys.size()) continue;
    std::vector<std::string> pk;
    for (auto& p : inst.premises) pk.push_back(sequent_key(p, mode));
    std::sort(pk.begin(), pk.end());
    if (pk == child_keys) { matched = true; break; }
  }
  if (!matched)
    return TreeError{render_sequent(goal), "no legal instance of rule '" + t.rule +
                                               "' yields these premises"};
  for (auto& c : t.children)
    if (auto e = check_tree(*c, mode)) return e;
  return std::nullopt;
}

std::string render_tree(const ProofTree& t, int indent) {
  std::ostringstream os;
  os << std::string(indent * 2, ' ') << render_sequent(t.goal) << "   [" << t.rule << "]\n";
  for (auto& c : t.children) os << render_tree(*c, indent + 1);
  return os.str();
}

std::string tree_to_json(const ProofTree& t) {
  nlohmann::json j;
  std::function<nlohmann::json(const ProofTree&)> conv = [&](const ProofTree& n) {
    nlohmann::json out;
    out["goal"] = render_sequent(n.goal);
    out["rule"] = n.rule;
    out["children"] = nlohmann::json::array();
    for (auto& c : n.children) out["children"].push_back(conv(*c));
    return out;
  };
  return conv(t).dump(2);
}

std::vector<CutProbeItem> cut_probe(const std::vector<Sequent>& corpus, Mode mode,
                                    const Budget& budget) {
  std::vector<CutProbeItem> out;
  for (auto& s : corpus) {
    CutProbeItem item{s, false, false};
    ProveOptions opts;
    opts.budget = budget;
    item.cutfree_proved = prove(s, mode, opts).verdict == Verdict::Proved;
    if (item.cutfree_proved) {
      // a cut-free proof is a proof in the calculus with cut
      item.with_cut_proved = true;
    } else {
      opts.allow_cut = true;
      item.with_cut_proved = prove(s, mode, opts).verdict == Verdict::Proved;
    }
    out.push_back(item);
  }
  return out;
}

}  // namespace bunchworks::sequent
