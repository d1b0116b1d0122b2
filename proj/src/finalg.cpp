#include "bunchworks/finalg.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace bunchworks::finalg {

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

std::optional<std::string> check_poset(const FinitePoset& p) {
  int n = p.n;
  if ((int)p.leq.size() != n) return "leq matrix size mismatch";
  for (int a = 0; a < n; ++a)
    if ((int)p.leq[a].size() != n) return "leq row size mismatch";
  for (int a = 0; a < n; ++a)
    if (!p.leq[a][a]) return "not reflexive at " + std::to_string(a);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && p.leq[a][b] && p.leq[b][a])
        return "not antisymmetric at " + std::to_string(a) + "," + std::to_string(b);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (p.leq[a][b])
        for (int c = 0; c < n; ++c)
          if (p.leq[b][c] && !p.leq[a][c]) return "not transitive";
  return std::nullopt;
}

std::optional<std::string> check_lattice(const FiniteDistLattice& l) {
  if (auto e = check_poset(l.poset)) return e;
  int n = l.poset.n;
  auto& leq = l.poset.leq;
  for (int a = 0; a < n; ++a) {
    if (l.top < 0 || !leq[a][l.top]) return "top is not greatest";
    if (l.bot < 0 || !leq[l.bot][a]) return "bot is not least";
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int m = l.meet[a][b], j = l.join[a][b];
      if (!leq[m][a] || !leq[m][b]) return "meet not a lower bound";
      if (!leq[a][j] || !leq[b][j]) return "join not an upper bound";
      for (int c = 0; c < n; ++c) {
        if (leq[c][a] && leq[c][b] && !leq[c][m]) return "meet not greatest lower bound";
        if (leq[a][c] && leq[b][c] && !leq[j][c]) return "join not least upper bound";
      }
    }
  return std::nullopt;
}

bool lattice_distributive(const FiniteDistLattice& l) {
  int n = l.poset.n;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (l.meet[x][l.join[y][z]] != l.join[l.meet[x][y]][l.meet[x][z]]) return false;
  return true;
}

std::optional<std::string> check_algebra(const FiniteGBIAlgebra& a) {
  if (auto e = check_lattice(a.lat)) return e;
  if (!lattice_distributive(a.lat)) return "lattice not distributive";
  int n = a.n();
  for (int x = 0; x < n; ++x) {
    if (a.mult[x][a.unit] != x || a.mult[a.unit][x] != x)
      return "unit law fails at " + std::to_string(x);
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (a.mult[a.mult[x][y]][z] != a.mult[x][a.mult[y][z]])
          return "associativity fails";
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        bool m = a.leq(a.mult[x][y], z);
        bool lr = a.leq(y, a.lres[x][z]);
        bool rr = a.leq(x, a.rres[z][y]);
        if (m != lr || m != rr) return "residuation fails";
        bool h = a.leq(a.lat.meet[x][y], z);
        bool hi = a.leq(y, a.imp[x][z]);
        if (h != hi) return "Heyting residuation fails";
      }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Birkhoff duality
// ---------------------------------------------------------------------------

FiniteDistLattice upsets(const FinitePoset& p) {
  int n = p.n;
  std::vector<unsigned long> ups;
  for (unsigned long s = 0; s < (1ul << n); ++s) {
    bool up = true;
    for (int a = 0; a < n && up; ++a)
      if (s & (1ul << a))
        for (int b = 0; b < n; ++b)
          if (p.leq[a][b] && !(s & (1ul << b))) { up = false; break; }
    if (up) ups.push_back(s);
  }
  std::sort(ups.begin(), ups.end(), [](unsigned long a, unsigned long b) {
    int pa = __builtin_popcountl(a), pb = __builtin_popcountl(b);
    return pa != pb ? pa < pb : a < b;
  });
  int m = (int)ups.size();
  std::map<unsigned long, int> index;
  for (int i = 0; i < m; ++i) index[ups[i]] = i;

  FiniteDistLattice l;
  l.poset.n = m;
  l.poset.leq.assign(m, std::vector<bool>(m, false));
  l.meet.assign(m, std::vector<int>(m, 0));
  l.join.assign(m, std::vector<int>(m, 0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      l.poset.leq[i][j] = (ups[i] & ~ups[j]) == 0;
      l.meet[i][j] = index[ups[i] & ups[j]];
      l.join[i][j] = index[ups[i] | ups[j]];
    }
  l.bot = index[0];
  l.top = index[(1ul << n) - 1];
  l.element_sets = ups;
  return l;
}

FinitePoset join_irreducibles(const FiniteDistLattice& l) {
  if (!lattice_distributive(l)) throw std::invalid_argument("lattice is not distributive");
  int n = l.poset.n;
  std::vector<int> ji;
  for (int x = 0; x < n; ++x) {
    if (x == l.bot) continue;
    int below = l.bot;
    for (int y = 0; y < n; ++y)
      if (y != x && l.poset.leq[y][x]) below = l.join[below][y];
    if (below != x) ji.push_back(x);
  }
  FinitePoset p;
  p.n = (int)ji.size();
  p.leq.assign(p.n, std::vector<bool>(p.n, false));
  // the dual order (principal filters under inclusion), so that
  // upsets(join_irreducibles(l)) is isomorphic to l
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) p.leq[i][j] = l.poset.leq[ji[j]][ji[i]];
  return p;
}

namespace {

std::string encode_poset(const FinitePoset& p, const std::vector<int>& perm) {
  std::string s;
  s.reserve(p.n * p.n);
  for (int a = 0; a < p.n; ++a)
    for (int b = 0; b < p.n; ++b) s.push_back(p.leq[perm[a]][perm[b]] ? '1' : '0');
  return s;
}

std::string poset_canonical_key(const FinitePoset& p) {
  std::vector<int> perm(p.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    auto s = encode_poset(p, perm);
    if (best.empty() || s < best) best = s;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

bool posets_isomorphic(const FinitePoset& a, const FinitePoset& b) {
  if (a.n != b.n) return false;
  return poset_canonical_key(a) == poset_canonical_key(b);
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

ResidualResult residuals_from_mult(const FiniteDistLattice& l, const Table& mult) {
  int n = l.poset.n;
  ResidualResult r;
  r.lres.assign(n, std::vector<int>(n, 0));
  r.rres.assign(n, std::vector<int>(n, 0));
  for (int x = 0; x < n; ++x)
    for (int z = 0; z < n; ++z) {
      int cand = l.bot;
      for (int y = 0; y < n; ++y)
        if (l.poset.leq[mult[x][y]][z]) cand = l.join[cand][y];
      if (!l.poset.leq[mult[x][cand]][z]) {
        r.ok = false;
        r.failure = {x, z, true};
        return r;
      }
      r.lres[x][z] = cand;
    }
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y) {
      int cand = l.bot;
      for (int x = 0; x < n; ++x)
        if (l.poset.leq[mult[x][y]][z]) cand = l.join[cand][x];
      if (!l.poset.leq[mult[cand][y]][z]) {
        r.ok = false;
        r.failure = {z, y, false};
        return r;
      }
      r.rres[z][y] = cand;
    }
  r.ok = true;
  return r;
}

Table heyting_imp(const FiniteDistLattice& l) {
  int n = l.poset.n;
  Table imp(n, std::vector<int>(n, 0));
  for (int x = 0; x < n; ++x)
    for (int z = 0; z < n; ++z) {
      int cand = l.bot;
      for (int y = 0; y < n; ++y)
        if (l.poset.leq[l.meet[x][y]][z]) cand = l.join[cand][y];
      imp[x][z] = cand;
    }
  return imp;
}

FiniteGBIAlgebra make_algebra(FiniteDistLattice lat, Table mult, int unit) {
  auto res = residuals_from_mult(lat, mult);
  if (!res.ok) throw std::invalid_argument("multiplication is not residuated");
  FiniteGBIAlgebra a;
  a.imp = heyting_imp(lat);
  a.lat = std::move(lat);
  a.mult = std::move(mult);
  a.unit = unit;
  a.lres = std::move(res.lres);
  a.rres = std::move(res.rres);
  return a;
}

// ---------------------------------------------------------------------------
// Poset / lattice enumeration
// ---------------------------------------------------------------------------

std::vector<FinitePoset> enumerate_posets(int p) {
  std::vector<FinitePoset> out;
  if (p == 0) {
    out.push_back(FinitePoset{0, {}});
    return out;
  }
  int pairs = p * (p - 1) / 2;
  std::vector<std::pair<int, int>> pair_at;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) pair_at.push_back({i, j});
  std::set<std::string> seen;
  for (unsigned long bits = 0; bits < (1ul << pairs); ++bits) {
    FinitePoset cand;
    cand.n = p;
    cand.leq.assign(p, std::vector<bool>(p, false));
    for (int i = 0; i < p; ++i) cand.leq[i][i] = true;
    for (int k = 0; k < pairs; ++k)
      if (bits & (1ul << k)) cand.leq[pair_at[k].first][pair_at[k].second] = true;
    bool transitive = true;
    for (int a = 0; a < p && transitive; ++a)
      for (int b = a + 1; b < p && transitive; ++b)
        if (cand.leq[a][b])
          for (int c = b + 1; c < p; ++c)
            if (cand.leq[b][c] && !cand.leq[a][c]) { transitive = false; break; }
    if (!transitive) continue;
    auto key = poset_canonical_key(cand);
    if (seen.insert(key).second) out.push_back(std::move(cand));
  }
  return out;
}

std::vector<FiniteDistLattice> enumerate_dist_lattices(int n) {
  std::vector<FiniteDistLattice> out;
  for (int p = 0; p < n; ++p) {
    if ((1 << p) < n) continue;  // a p-element poset has at most 2^p upsets
    for (auto& poset : enumerate_posets(p)) {
      auto lat = upsets(poset);
      if (lat.poset.n == n) out.push_back(std::move(lat));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Algebra enumeration
// ---------------------------------------------------------------------------

namespace {

std::string encode_algebra(const FiniteGBIAlgebra& a, const std::vector<int>& perm,
                           const std::vector<int>& inv) {
  std::string s;
  int n = a.n();
  s.reserve(n * n * 2 + 4);
  s.push_back(char('0' + inv[a.unit]));
  s.push_back('|');
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.push_back(a.leq(perm[i], perm[j]) ? '1' : '0');
  s.push_back('|');
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.push_back(char('0' + inv[a.mult[perm[i]][perm[j]]]));
  return s;
}

std::vector<std::vector<int>> lattice_automorphisms(const FiniteDistLattice& l) {
  int n = l.poset.n;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> autos;
  do {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      for (int b = 0; b < n; ++b)
        if (l.poset.leq[a][b] != l.poset.leq[perm[a]][perm[b]]) { ok = false; break; }
    if (ok) autos.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return autos;
}

// Backtracking fill of the multiplication on join-irreducible pairs; the
// join-preserving extension determines the operation everywhere else.
struct MultSearch {
  const FiniteDistLattice& lat;
  int n;
  std::vector<int> ji;
  int p;
  std::vector<std::vector<int>> ji_below;  // per lattice element: JI indices below it
  int unit = 0;
  Variety variety;
  std::vector<int> m;
  std::vector<int> order;
  std::vector<std::vector<int>> below_cells;
  std::vector<bool> row_unit_cell, col_unit_cell;
  std::vector<FiniteGBIAlgebra>* out = nullptr;
  std::set<std::string>* seen = nullptr;
  const std::vector<std::vector<int>>* autos = nullptr;

  MultSearch(const FiniteDistLattice& l, Variety v) : lat(l), variety(v) {
    n = l.poset.n;
    for (int x = 0; x < n; ++x) {
      if (x == l.bot) continue;
      int below = l.bot;
      for (int y = 0; y < n; ++y)
        if (y != x && l.poset.leq[y][x]) below = l.join[below][y];
      if (below != x) ji.push_back(x);
    }
    p = (int)ji.size();
    ji_below.assign(n, {});
    for (int x = 0; x < n; ++x)
      for (int i = 0; i < p; ++i)
        if (l.poset.leq[ji[i]][x]) ji_below[x].push_back(i);
  }

  int cell(int i, int j) const { return i * p + j; }

  // join over JI(x) x JI(y) of assigned cells; -1 when a needed cell is open
  int ext(int x, int y) const {
    int acc = lat.bot;
    for (int i : ji_below[x])
      for (int j : ji_below[y]) {
        int v = m[cell(i, j)];
        if (v < 0) return -1;
        acc = lat.join[acc][v];
      }
    return acc;
  }

  bool unit_laws_final() const {
    for (int i = 0; i < p; ++i) {
      if (ext(ji[i], unit) != ji[i]) return false;
      if (ext(unit, ji[i]) != ji[i]) return false;
    }
    return true;
  }

  bool assoc_ok_partial() const {
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        int ab = m[cell(a, b)];
        if (ab < 0) continue;
        for (int c = 0; c < p; ++c) {
          int bc = m[cell(b, c)];
          if (bc < 0) continue;
          int lhs = ext(ab, ji[c]);
          int rhs = ext(ji[a], bc);
          if (lhs >= 0 && rhs >= 0 && lhs != rhs) return false;
        }
      }
    return true;
  }

  void emit() {
    Table mult(n, std::vector<int>(n, 0));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) mult[x][y] = ext(x, y);
    for (int x = 0; x < n; ++x)
      if (mult[x][unit] != x || mult[unit][x] != x) return;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          if (mult[mult[x][y]][z] != mult[x][mult[y][z]]) return;
    if (variety == Variety::BI) {
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (mult[x][y] != mult[y][x]) return;
    }
    auto alg = make_algebra(lat, std::move(mult), unit);
    std::string best;
    std::vector<int> inv((std::size_t)n);
    for (auto& sigma : *autos) {
      for (int i = 0; i < n; ++i) inv[sigma[i]] = i;
      auto key = encode_algebra(alg, sigma, inv);
      if (best.empty() || key < best) best = key;
    }
    if (seen->insert(best).second) out->push_back(std::move(alg));
  }

  void search(std::size_t k) {
    if (k == order.size()) {
      if (unit_laws_final()) emit();
      return;
    }
    int c = order[k];
    int i = c / p, j = c % p;
    for (int v = 0; v < n; ++v) {
      bool ok = true;
      for (int b : below_cells[c])
        if (!lat.poset.leq[m[b]][v]) { ok = false; break; }
      if (!ok) continue;
      if (row_unit_cell[c] && !lat.poset.leq[v][ji[i]]) continue;
      if (col_unit_cell[c] && !lat.poset.leq[v][ji[j]]) continue;
      if (variety == Variety::BI) {
        int sym = m[cell(j, i)];
        if (sym >= 0 && sym != v) continue;
      }
      m[c] = v;
      if (assoc_ok_partial()) search(k + 1);
      m[c] = -1;
    }
  }

  void run(std::vector<FiniteGBIAlgebra>& results, std::set<std::string>& dedupe,
           const std::vector<std::vector<int>>& lattice_autos) {
    out = &results;
    seen = &dedupe;
    autos = &lattice_autos;
    auto rank = [&](int x) {
      int r = 0;
      for (int y = 0; y < n; ++y)
        if (lat.poset.leq[y][x]) ++r;
      return r;
    };
    order.clear();
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) order.push_back(cell(i, j));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      int ra = rank(ji[a / p]) + rank(ji[a % p]);
      int rb = rank(ji[b / p]) + rank(ji[b % p]);
      return ra < rb;
    });
    std::vector<int> pos(p * p);
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = (int)k;
    below_cells.assign(p * p, {});
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int a2 = 0; a2 < p; ++a2)
          for (int b2 = 0; b2 < p; ++b2) {
            if (a2 == a && b2 == b) continue;
            if (lat.poset.leq[ji[a2]][ji[a]] && lat.poset.leq[ji[b2]][ji[b]] &&
                pos[cell(a2, b2)] < pos[cell(a, b)])
              below_cells[cell(a, b)].push_back(cell(a2, b2));
          }
    for (unit = 0; unit < n; ++unit) {
      if (unit == lat.bot && n > 1) continue;  // x.bot = bot forces triviality
      row_unit_cell.assign(p * p, false);
      col_unit_cell.assign(p * p, false);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
          if (lat.poset.leq[ji[j]][unit]) row_unit_cell[cell(i, j)] = true;
          if (lat.poset.leq[ji[i]][unit]) col_unit_cell[cell(i, j)] = true;
        }
      m.assign(p * p, -1);
      search(0);
    }
  }
};

}  // namespace

std::vector<FiniteGBIAlgebra> enumerate_algebras(int n, Variety v, int jobs) {
  if (n < 1) return {};
  if (n == 1) {
    FinitePoset p{1, {{true}}};
    FiniteDistLattice l;
    l.poset = p;
    l.meet = {{0}};
    l.join = {{0}};
    l.top = l.bot = 0;
    return {make_algebra(std::move(l), {{0}}, 0)};
  }
  auto lattices = enumerate_dist_lattices(n);
  std::vector<std::vector<FiniteGBIAlgebra>> per_lattice(lattices.size());

  auto work = [&](std::size_t idx) {
    std::set<std::string> dedupe;
    auto autos = lattice_automorphisms(lattices[idx]);
    MultSearch ms(lattices[idx], v);
    ms.run(per_lattice[idx], dedupe, autos);
  };

  if (jobs <= 1 || lattices.size() <= 1) {
    for (std::size_t i = 0; i < lattices.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    int k = std::min<int>(jobs, (int)lattices.size());
    for (int t = 0; t < k; ++t)
      threads.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < lattices.size();) work(i);
      });
    for (auto& t : threads) t.join();
  }

  std::vector<FiniteGBIAlgebra> out;
  for (auto& chunk : per_lattice)
    for (auto& a : chunk) out.push_back(std::move(a));
  return out;
}

std::string canonical_key(const FiniteGBIAlgebra& a) {
  int n = a.n();
  std::vector<int> perm(n), inv(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    for (int i = 0; i < n; ++i) inv[perm[i]] = i;
    auto key = encode_algebra(a, perm, inv);
    if (best.empty() || key < best) best = key;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool isomorphic(const FiniteGBIAlgebra& a, const FiniteGBIAlgebra& b) {
  if (a.n() != b.n()) return false;
  return canonical_key(a) == canonical_key(b);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

int eval_formula(const FiniteGBIAlgebra& a, const FormulaPtr& f,
                 const std::vector<std::pair<std::string, int>>& assignment) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Var: {
      for (auto& [name, v] : assignment)
        if (name == f->name) return v;
      throw std::invalid_argument("unassigned variable " + f->name);
    }
    case K::Top: return a.lat.top;
    case K::Bot: return a.lat.bot;
    case K::One: return a.unit;
    case K::And: return a.lat.meet[eval_formula(a, f->lhs, assignment)][eval_formula(a, f->rhs, assignment)];
    case K::Or: return a.lat.join[eval_formula(a, f->lhs, assignment)][eval_formula(a, f->rhs, assignment)];
    case K::Imp: return a.imp[eval_formula(a, f->lhs, assignment)][eval_formula(a, f->rhs, assignment)];
    case K::Fuse: return a.mult[eval_formula(a, f->lhs, assignment)][eval_formula(a, f->rhs, assignment)];
    case K::LRes: return a.lres[eval_formula(a, f->lhs, assignment)][eval_formula(a, f->rhs, assignment)];
    case K::RRes: return a.rres[eval_formula(a, f->lhs, assignment)][eval_formula(a, f->rhs, assignment)];
    default:
      throw std::invalid_argument("formula outside the core GBI signature");
  }
}

namespace {

std::vector<std::string> vars_of(const FormulaPtr& s, const FormulaPtr& t) {
  std::vector<std::string> vars;
  collect_prop_vars(s, vars);
  collect_prop_vars(t, vars);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

}  // namespace

std::optional<std::vector<std::pair<std::string, int>>> failing_assignment(
    const FiniteGBIAlgebra& a, const FormulaPtr& s, const FormulaPtr& t) {
  auto vars = vars_of(s, t);
  int n = a.n();
  std::vector<int> idx(vars.size(), 0);
  while (true) {
    std::vector<std::pair<std::string, int>> assignment;
    for (std::size_t i = 0; i < vars.size(); ++i) assignment.push_back({vars[i], idx[i]});
    if (!a.leq(eval_formula(a, s, assignment), eval_formula(a, t, assignment))) return assignment;
    std::size_t i = 0;
    for (; i < idx.size(); ++i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
  return std::nullopt;
}

bool holds(const FiniteGBIAlgebra& a, const FormulaPtr& s, const FormulaPtr& t) {
  return !failing_assignment(a, s, t).has_value();
}

std::optional<Countermodel> find_countermodel(const FormulaPtr& s, const FormulaPtr& t, int max_n) {
  for (int n = 2; n <= max_n; ++n)
    for (auto& a : enumerate_algebras(n, Variety::GBI))
      if (auto w = failing_assignment(a, s, t)) return Countermodel{a, *w};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Congruences
// ---------------------------------------------------------------------------

namespace {

bool is_congruence(const FiniteGBIAlgebra& a, const std::vector<int>& cls) {
  int n = a.n();
  auto same = [&](int x, int y) { return cls[x] == cls[y]; };
  const Table* ops[] = {&a.lat.meet, &a.lat.join, &a.imp, &a.mult, &a.lres, &a.rres};
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (!same(x, y)) continue;
      for (int z = 0; z < n; ++z)
        for (auto* op : ops) {
          if (!same((*op)[x][z], (*op)[y][z])) return false;
          if (!same((*op)[z][x], (*op)[z][y])) return false;
        }
    }
  return true;
}

std::vector<int> classes_from_relation(int n, const std::vector<std::vector<bool>>& rel) {
  std::vector<int> cls(n, -1);
  int next = 0;
  for (int x = 0; x < n; ++x) {
    if (cls[x] >= 0) continue;
    cls[x] = next;
    for (int y = x + 1; y < n; ++y)
      if (rel[x][y]) cls[y] = next;
    ++next;
  }
  return cls;
}

int num_classes(const std::vector<int>& cls) {
  return cls.empty() ? 0 : 1 + *std::max_element(cls.begin(), cls.end());
}

}  // namespace

CongruenceLattice congruences(const FiniteGBIAlgebra& a) {
  int n = a.n();
  CongruenceLattice con;
  // top-congruence classes are the lattice filters; keep those filters whose
  // induced relation respects every operation
  for (unsigned long s = 0; s < (1ul << n); ++s) {
    if (!(s & (1ul << a.lat.top))) continue;
    bool filter = true;
    for (int x = 0; x < n && filter; ++x) {
      if (!(s & (1ul << x))) continue;
      for (int y = 0; y < n; ++y) {
        if (a.leq(x, y) && !(s & (1ul << y))) { filter = false; break; }
        if ((s & (1ul << y)) && !(s & (1ul << a.lat.meet[x][y]))) { filter = false; break; }
      }
    }
    if (!filter) continue;
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        rel[x][y] = (s & (1ul << a.imp[x][y])) && (s & (1ul << a.imp[y][x]));
    auto cls = classes_from_relation(n, rel);
    if (is_congruence(a, cls)) con.congruences.push_back(cls);
  }
  std::sort(con.congruences.begin(), con.congruences.end(),
            [](const std::vector<int>& x, const std::vector<int>& y) {
              return num_classes(x) > num_classes(y);
            });
  std::vector<std::vector<bool>> meet_rel(n, std::vector<bool>(n, true));
  bool any_nontrivial = false;
  for (auto& cls : con.congruences) {
    if (num_classes(cls) == n) continue;
    any_nontrivial = true;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (cls[x] != cls[y]) meet_rel[x][y] = false;
  }
  bool meet_nontrivial = false;
  if (any_nontrivial) {
    for (int x = 0; x < n && !meet_nontrivial; ++x)
      for (int y = 0; y < n; ++y)
        if (x != y && meet_rel[x][y]) { meet_nontrivial = true; break; }
  }
  con.subdirectly_irreducible = any_nontrivial && meet_nontrivial;
  con.simple = con.congruences.size() == 2;
  if (con.simple) {
    con.strictly_simple = true;
    for (auto& sub : subuniverses(a))
      if ((int)sub.size() < n) { con.strictly_simple = false; break; }
  }
  return con;
}

std::vector<std::vector<int>> subuniverses(const FiniteGBIAlgebra& a) {
  int n = a.n();
  std::vector<std::vector<int>> out;
  const Table* ops[] = {&a.lat.meet, &a.lat.join, &a.imp, &a.mult, &a.lres, &a.rres};
  for (unsigned long s = 0; s < (1ul << n); ++s) {
    if (!(s & (1ul << a.lat.top)) || !(s & (1ul << a.lat.bot)) || !(s & (1ul << a.unit))) continue;
    bool closed = true;
    for (int x = 0; x < n && closed; ++x) {
      if (!(s & (1ul << x))) continue;
      for (int y = 0; y < n && closed; ++y) {
        if (!(s & (1ul << y))) continue;
        for (auto* op : ops)
          if (!(s & (1ul << (*op)[x][y]))) { closed = false; break; }
      }
    }
    if (!closed) continue;
    std::vector<int> elems;
    for (int x = 0; x < n; ++x)
      if (s & (1ul << x)) elems.push_back(x);
    out.push_back(std::move(elems));
  }
  return out;
}

FiniteGBIAlgebra quotient(const FiniteGBIAlgebra& a, const std::vector<int>& cls) {
  int n = a.n();
  int k = num_classes(cls);
  std::vector<int> rep(k, -1);
  for (int x = 0; x < n; ++x)
    if (rep[cls[x]] < 0) rep[cls[x]] = x;
  FiniteDistLattice lat;
  lat.poset.n = k;
  lat.poset.leq.assign(k, std::vector<bool>(k, false));
  lat.meet.assign(k, std::vector<int>(k, 0));
  lat.join.assign(k, std::vector<int>(k, 0));
  for (int c = 0; c < k; ++c)
    for (int d = 0; d < k; ++d) {
      lat.poset.leq[c][d] = cls[a.lat.meet[rep[c]][rep[d]]] == c;
      lat.meet[c][d] = cls[a.lat.meet[rep[c]][rep[d]]];
      lat.join[c][d] = cls[a.lat.join[rep[c]][rep[d]]];
    }
  lat.top = cls[a.lat.top];
  lat.bot = cls[a.lat.bot];
  Table mult(k, std::vector<int>(k, 0));
  for (int c = 0; c < k; ++c)
    for (int d = 0; d < k; ++d) mult[c][d] = cls[a.mult[rep[c]][rep[d]]];
  return make_algebra(std::move(lat), std::move(mult), cls[a.unit]);
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

std::set<std::string> classify(const FiniteGBIAlgebra& a) {
  int n = a.n();
  auto all2 = [&](auto pred) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (!pred(x, y)) return false;
    return true;
  };
  auto neg = [&](int x) { return a.imp[x][a.lat.bot]; };

  bool commutative = all2([&](int x, int y) { return a.mult[x][y] == a.mult[y][x]; });
  bool weakening = all2([&](int x, int y) { return a.leq(a.mult[x][y], x); });
  bool boolean = [&] {
    for (int x = 0; x < n; ++x)
      if (neg(neg(x)) != x) return false;
    return true;
  }();
  bool prelinear = all2([&](int x, int y) {
    return a.lat.join[a.imp[x][y]][a.imp[y][x]] == a.lat.top;
  });
  bool divisible = all2([&](int x, int y) {
    return a.lat.meet[x][y] == a.mult[a.rres[x][y]][y];
  });
  bool heyting = all2([&](int x, int y) { return a.mult[x][y] == a.lat.meet[x][y]; });
  bool blbi = commutative && divisible;
  bool mv = blbi && [&] {
    for (int x = 0; x < n; ++x)
      if (a.lres[a.lres[x][a.lat.bot]][a.lat.bot] != x) return false;
    return true;
  }();
  auto tri = [&](int x, int y) { return neg(a.lres[x][neg(y)]); };  // x |> y
  bool sea = boolean && [&] {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          if (!a.leq(a.mult[tri(x, y)][z], tri(x, a.mult[y][z]))) return false;
    return true;
  }();
  bool ra = sea && all2([&](int x, int y) {
    return tri(x, y) == a.mult[tri(x, a.unit)][y];
  });
  bool sra = ra && [&] {
    for (int x = 0; x < n; ++x)
      if (tri(x, a.unit) != x) return false;
    return true;
  }();

  std::set<std::string> out = {"GBI"};
  if (commutative) out.insert("BI");
  if (weakening) out.insert("GBI_w");
  if (boolean) out.insert("BGBI");
  if (prelinear) out.insert("LGBI");
  if (commutative && weakening) out.insert("BI_w");
  if (commutative && boolean) out.insert("BBI");
  if (commutative && prelinear) out.insert("LBI");
  if (prelinear && weakening) out.insert("LGBI_w");
  if (commutative && prelinear && weakening) out.insert("LBI_w");
  if (blbi) out.insert("BLBI");
  if (mv) out.insert("MVBI");
  if (heyting) out.insert("HA");
  if (heyting && prelinear) out.insert("GA");
  if (heyting && boolean) out.insert("BA");
  if (sea) out.insert("SeA");
  if (ra) out.insert("RA");
  if (ra && commutative) out.insert("CRA");
  if (sra) out.insert("SRA");
  return out;
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

namespace {

FiniteDistLattice lattice_from_leq(int n, const BoolMat& leq) {
  FiniteDistLattice l;
  l.poset.n = n;
  l.poset.leq = leq;
  l.meet.assign(n, std::vector<int>(n, -1));
  l.join.assign(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (leq[c][a] && leq[c][b] && (l.meet[a][b] < 0 || leq[l.meet[a][b]][c]))
          l.meet[a][b] = c;
        if (leq[a][c] && leq[b][c] && (l.join[a][b] < 0 || leq[c][l.join[a][b]]))
          l.join[a][b] = c;
      }
    }
  l.top = l.bot = 0;
  for (int a = 0; a < n; ++a) {
    if (l.poset.leq[l.top][a]) l.top = a;
    if (l.poset.leq[a][l.bot]) l.bot = a;
  }
  return l;
}

}  // namespace

FiniteGBIAlgebra ordinal_sum(const FiniteGBIAlgebra& a, const FiniteGBIAlgebra& b) {
  if (a.unit != a.lat.top)
    throw std::invalid_argument("ordinal_sum requires 1 = top in the lower summand");
  int na = a.n(), nb = b.n();
  int n = na + nb - 1;
  // a's elements keep their indices; a.top doubles as b's bottom; the other
  // elements of b are appended
  std::vector<int> bmap(nb, -1);
  bmap[b.lat.bot] = a.lat.top;
  int next = na;
  for (int y = 0; y < nb; ++y)
    if (y != b.lat.bot) bmap[y] = next++;
  BoolMat leq(n, std::vector<bool>(n, false));
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < na; ++y) leq[x][y] = a.leq(x, y);
  for (int x = 0; x < nb; ++x)
    for (int y = 0; y < nb; ++y)
      if (b.leq(x, y)) leq[bmap[x]][bmap[y]] = true;
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < nb; ++y)
      if (y != b.lat.bot) leq[x][bmap[y]] = true;
  auto lat = lattice_from_leq(n, leq);
  Table mult(n, std::vector<int>(n, -1));
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < na; ++y) mult[x][y] = a.mult[x][y];
  for (int x = 0; x < nb; ++x)
    for (int y = 0; y < nb; ++y) mult[bmap[x]][bmap[y]] = bmap[b.mult[x][y]];
  for (int x = 0; x < na; ++x) {
    if (x == a.lat.top) continue;
    for (int y = 0; y < nb; ++y) {
      if (y == b.lat.bot) continue;
      mult[x][bmap[y]] = x;
      mult[bmap[y]][x] = x;
    }
  }
  return make_algebra(std::move(lat), std::move(mult), bmap[b.unit]);
}

FiniteGBIAlgebra add_top(const FiniteGBIAlgebra& a) {
  if (a.unit != a.lat.top)
    throw std::invalid_argument("add_top requires 1 = top");
  int na = a.n();
  int n = na + 1;
  int t = na;
  BoolMat leq(n, std::vector<bool>(n, false));
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < na; ++y) leq[x][y] = a.leq(x, y);
  for (int x = 0; x < n; ++x) leq[x][t] = true;
  auto lat = lattice_from_leq(n, leq);
  Table mult(n, std::vector<int>(n, -1));
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < na; ++y) mult[x][y] = a.mult[x][y];
  for (int x = 0; x < na; ++x) {
    mult[t][x] = (x == a.unit) ? t : x;
    mult[x][t] = (x == a.unit) ? t : x;
  }
  mult[t][t] = t;
  return make_algebra(std::move(lat), std::move(mult), a.unit);
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace {

Table chain_mult(int n, const std::vector<std::vector<int>>& upper) {
  Table m(n, std::vector<int>(n, 0));
  for (int x = 1; x < n; ++x)
    for (int y = 1; y < n; ++y) m[x][y] = upper[x - 1][y - 1];
  return m;
}

FiniteGBIAlgebra chain_algebra(int n, int unit, const Table& mult) {
  BoolMat leq(n, std::vector<bool>(n, false));
  for (int x = 0; x < n; ++x)
    for (int y = x; y < n; ++y) leq[x][y] = true;
  return make_algebra(lattice_from_leq(n, leq), mult, unit);
}

std::vector<NamedAlgebra> build_catalog() {
  std::vector<NamedAlgebra> cat;
  auto add = [&](const std::string& name, FiniteGBIAlgebra a) {
    if (auto e = check_algebra(a))
      throw std::logic_error("catalog algebra " + name + " invalid: " + *e);
    cat.push_back({name, std::move(a)});
  };

  add("2", chain_algebra(2, 1, chain_mult(2, {{1}})));

  // 3-element chains bot=0, a=1, top=2
  add("L3", chain_algebra(3, 2, chain_mult(3, {{0, 1}, {1, 2}})));
  add("G3", chain_algebra(3, 2, chain_mult(3, {{1, 1}, {1, 2}})));
  add("S3", chain_algebra(3, 1, chain_mult(3, {{1, 2}, {2, 2}})));

  // 4-element chains with unit on top: bot=0, a=1, b=2, 1=3
  add("L4", chain_algebra(4, 3, chain_mult(4, {{0, 0, 1}, {0, 1, 2}, {1, 2, 3}})));
  add("L3[2]", chain_algebra(4, 3, chain_mult(4, {{0, 1, 1}, {1, 2, 2}, {1, 2, 3}})));
  add("2[L3]", chain_algebra(4, 3, chain_mult(4, {{1, 1, 1}, {1, 1, 2}, {1, 2, 3}})));
  add("C4bot", chain_algebra(4, 3, chain_mult(4, {{0, 0, 1}, {0, 0, 2}, {1, 2, 3}})));
  add("C4bot'", chain_algebra(4, 3, chain_mult(4, {{0, 0, 1}, {0, 2, 2}, {1, 2, 3}})));
  add("G4", chain_algebra(4, 3, chain_mult(4, {{1, 1, 1}, {1, 2, 2}, {1, 2, 3}})));
  add("N1", chain_algebra(4, 3, chain_mult(4, {{0, 0, 1}, {1, 2, 2}, {1, 2, 3}})));
  add("N1op", chain_algebra(4, 3, chain_mult(4, {{0, 1, 1}, {0, 2, 2}, {1, 2, 3}})));

  // chains bot=0, 1=1, a=2, top=3
  add("C4vee", chain_algebra(4, 1, chain_mult(4, {{1, 2, 3}, {2, 2, 3}, {3, 3, 3}})));
  add("C4top", chain_algebra(4, 1, chain_mult(4, {{1, 2, 3}, {2, 3, 3}, {3, 3, 3}})));

  // chains bot=0, a=1, 1=2, top=3
  add("S3[2]", chain_algebra(4, 2, chain_mult(4, {{1, 1, 3}, {1, 2, 3}, {3, 3, 3}})));
  add("2[S3]", chain_algebra(4, 2, chain_mult(4, {{1, 1, 1}, {1, 2, 3}, {1, 3, 3}})));
  add("N2", chain_algebra(4, 2, chain_mult(4, {{1, 1, 1}, {1, 2, 3}, {3, 3, 3}})));
  add("N2op", chain_algebra(4, 2, chain_mult(4, {{1, 1, 3}, {1, 2, 3}, {1, 3, 3}})));
  add("L3+top", chain_algebra(4, 2, chain_mult(4, {{0, 1, 1}, {1, 2, 3}, {1, 3, 3}})));

  // Boolean diamonds bot=0, atoms 1 and 2, top=3; these are complex algebras
  // of two-element (partial) monoids and groups, with the unit a bottom atom
  auto diamond_algebra = [&](int unit, const Table& mult) {
    int n = 4;
    BoolMat leq(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) leq[i][i] = true;
    leq[0][1] = leq[0][2] = leq[0][3] = true;
    leq[1][3] = leq[2][3] = true;
    return make_algebra(lattice_from_leq(n, leq), mult, unit);
  };
  // entries over (bot, 1, z, top) where z is the element the paper names 0
  add("P2+", diamond_algebra(1, {{0, 0, 0, 0},   // complex algebra of {e,p}, pp undefined
                                 {0, 1, 2, 3},
                                 {0, 2, 0, 2},
                                 {0, 3, 2, 3}}));
  add("Z2+", diamond_algebra(1, {{0, 0, 0, 0},   // complex algebra of the group Z2
                                 {0, 1, 2, 3},
                                 {0, 2, 1, 3},
                                 {0, 3, 3, 3}}));
  add("Z3+s", diamond_algebra(1, {{0, 0, 0, 0},  // symmetric subalgebra of Cm(Z3)
                                  {0, 1, 2, 3},
                                  {0, 2, 3, 3},
                                  {0, 3, 3, 3}}));
  add("M2+", diamond_algebra(1, {{0, 0, 0, 0},   // complex algebra of {e,m}, mm=m
                                 {0, 1, 2, 3},
                                 {0, 2, 2, 2},
                                 {0, 3, 2, 3}}));

  // 2x2: Boolean square, fusion = meet, unit = top
  {
    int n = 4;
    BoolMat leq(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) leq[i][i] = true;
    leq[0][1] = leq[0][2] = leq[0][3] = true;
    leq[1][3] = leq[2][3] = true;
    auto lat = lattice_from_leq(n, leq);
    Table mult(n, std::vector<int>(n, 0));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) mult[x][y] = lat.meet[x][y];
    add("2x2", make_algebra(std::move(lat), std::move(mult), 3));
  }
  return cat;
}

}  // namespace

const std::vector<NamedAlgebra>& catalog() {
  static const std::vector<NamedAlgebra> cat = build_catalog();
  return cat;
}

const FiniteGBIAlgebra& catalog_algebra(const std::string& name) {
  for (auto& e : catalog())
    if (e.name == name) return e.algebra;
  throw std::invalid_argument("no catalog algebra named " + name);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string algebra_to_json(const FiniteGBIAlgebra& a) {
  nlohmann::json j;
  j["n"] = a.n();
  j["leq"] = nlohmann::json::array();
  for (int x = 0; x < a.n(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (int y = 0; y < a.n(); ++y) row.push_back(a.leq(x, y) ? 1 : 0);
    j["leq"].push_back(row);
  }
  j["mult"] = a.mult;
  j["unit"] = a.unit;
  return j.dump();
}

FiniteGBIAlgebra algebra_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  int n = j.at("n").get<int>();
  BoolMat leq(n, std::vector<bool>(n, false));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) leq[x][y] = j.at("leq")[x][y].get<int>() != 0;
  Table mult = j.at("mult").get<Table>();
  int unit = j.at("unit").get<int>();
  auto lat = lattice_from_leq(n, leq);
  return make_algebra(std::move(lat), std::move(mult), unit);
}

}  // namespace bunchworks::finalg
