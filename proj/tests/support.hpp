// Shared fixtures and independent oracles for the test binaries. Nothing here
// calls the library's cycle, classification or intersection code.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "dstab/dsr.hpp"
#include "dstab/network.hpp"
#include "dstab/parser.hpp"

namespace testsupport {

using dstab::Complex;
using dstab::Rational;
using dstab::Reaction;
using dstab::ReactionNetwork;

// ---------------------------------------------------------------------------
// Networks

inline const char* kDnaText = R"(# duplex formation
2 S <-> D : k+=k1, k-=k2, tau+=t1, tau-=t2
D -> 0 : k=k3
0 <-> S : k+=k4, k-=k5
)";

// Species x, y, z; rate constants numbered as in the three-species example.
inline const char* kThreeSpeciesText = R"(species: x, y, z
x -> 0 : k=k1
y -> 0 : k=k2
z -> 0 : k=k3
0 -> x : k=k4
x + y -> z : k=k5, tau=t1
x -> y : k=k6, tau=t2
)";

inline const char* kSplitText = R"(species: X, Y, Z, W
X + Y <-> 2 Z : k+=k1, k-=k2
X + 2 Y + Z -> W : k=k3
W -> 0 : k=k4
)";

inline const char* kThreeCyclesText = R"(species: X, Y, Z
X + Y -> 2 Z
Z -> X
X <-> Y
0 -> X
0 -> Y
X -> 0
)";

// Two-step loop with a bispecies production edge, opened with flows.
inline const char* kLoopText = R"(species: X, Y, Z
X + Y -> Z
Z -> X
0 <-> X
0 <-> Y
0 <-> Z
)";

inline ReactionNetwork parse(const char* text) { return dstab::parse_network(text); }

// Random network satisfying N2-N4: at most two reactant species, disjoint
// reactant and product supports, reversible pairs only between complexes of
// at most one species. Coefficients are mostly 1.
struct NetworkGenerator {
  std::mt19937_64 rng;
  std::size_t max_species = 5;
  std::size_t max_reactions = 8;

  explicit NetworkGenerator(std::uint64_t seed) : rng(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng); }

  Rational coefficient() {
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    if (u < 0.7) return 1;
    if (u < 0.88) return 2;
    if (u < 0.94) return 3;
    return Rational(1, 2);
  }

  Complex complex_over(const std::vector<std::size_t>& pool, std::size_t max_support) {
    Complex c;
    std::vector<std::size_t> p = pool;
    std::shuffle(p.begin(), p.end(), rng);
    const std::size_t k = std::min(uniform(0, max_support), p.size());
    for (std::size_t i = 0; i < k; ++i) c.add(p[i], coefficient());
    return c;
  }

  ReactionNetwork operator()() {
    ReactionNetwork net;
    const std::size_t n = uniform(2, max_species);
    for (std::size_t i = 0; i < n; ++i) net.add_species(std::string(1, static_cast<char>('A' + i)));
    const std::size_t m = uniform(1, max_reactions);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    while (net.num_reactions() < m) {
      Reaction r;
      r.reactant = complex_over(all, 2);
      std::vector<std::size_t> rest;
      for (std::size_t i : all) {
        if (!r.reactant.contains(i)) rest.push_back(i);
      }
      r.product = complex_over(rest, 2);
      if (r.reactant == r.product) continue;
      const bool small = r.reactant.support_size() <= 1 && r.product.support_size() <= 1;
      const bool reversible = small && coin(0.3) && net.num_reactions() + 2 <= m;
      Reaction back;
      back.reactant = r.product;
      back.product = r.reactant;
      const std::size_t a = net.add_reaction(std::move(r));
      if (reversible) {
        const std::size_t b = net.add_reaction(std::move(back));
        net.pair_reversible(a, b);
      }
    }
    return net;
  }
};

// ---------------------------------------------------------------------------
// Cycle oracle: plain DFS over vertex sequences.

struct OracleCycle {
  std::vector<std::size_t> vertices;  // rotated to start at the smallest vertex
  std::vector<std::size_t> edges;     // edges[i] joins vertices[i] and vertices[i+1]
  std::vector<bool> s_to_r;
};

inline std::optional<std::size_t> oracle_edge(const dstab::DsrGraph& g, std::size_t a, std::size_t b) {
  const std::size_t n = g.num_snodes();
  const bool a_is_s = a < n;
  const std::size_t s = a_is_s ? a : b;
  const std::size_t r = (a_is_s ? b : a) - n;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.edges[e].snode == s && g.edges[e].rnode == r) return e;
  }
  return std::nullopt;
}

// Can the walk go a -> b?
inline bool oracle_step(const dstab::DsrGraph& g, std::size_t a, std::size_t b) {
  const std::size_t n = g.num_snodes();
  if ((a < n) == (b < n)) return false;
  auto e = oracle_edge(g, a, b);
  if (!e) return false;
  if (!g.edges[*e].directed) return true;
  return a >= n;  // directed edges run from the R-node to the S-node
}

inline std::vector<OracleCycle> oracle_cycles(const dstab::DsrGraph& g) {
  const std::size_t V = g.num_snodes() + g.rnodes.size();
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> path;
  std::vector<bool> on(V, false);
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    for (std::size_t w = 0; w < V; ++w) {
      if (!oracle_step(g, v, w)) continue;
      if (w == path.front() && path.size() >= 4) {
        std::vector<std::size_t> c = path;
        std::rotate(c.begin(), std::min_element(c.begin(), c.end()), c.end());
        seen.insert(c);
      }
      if (on[w]) continue;
      on[w] = true;
      path.push_back(w);
      dfs(w);
      path.pop_back();
      on[w] = false;
    }
  };
  for (std::size_t s = 0; s < V; ++s) {
    path = {s};
    on.assign(V, false);
    on[s] = true;
    dfs(s);
  }
  std::vector<OracleCycle> out;
  for (const auto& vs : seen) {
    OracleCycle c;
    c.vertices = vs;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::size_t a = vs[i];
      const std::size_t b = vs[(i + 1) % vs.size()];
      c.edges.push_back(*oracle_edge(g, a, b));
      c.s_to_r.push_back(a < g.num_snodes());
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline Rational oracle_product(const dstab::DsrGraph& g, const OracleCycle& c) {
  Rational num = 1, den = 1;
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    // Starting from an S-node, odd-numbered edges (1st, 3rd, ...) multiply.
    const std::size_t from = c.vertices[i];
    const bool leaves_s = from < g.num_snodes();
    (leaves_s ? num : den) *= g.edges[c.edges[i]].label;
  }
  return num / den;
}

inline std::size_t oracle_c_pairs(const dstab::DsrGraph& g, const OracleCycle& c) {
  const std::size_t n = g.num_snodes();
  const std::size_t L = c.vertices.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t v = c.vertices[i];
    if (v < n) continue;
    const auto& node = g.rnodes[v - n];
    const std::size_t a = c.vertices[(i + L - 1) % L];
    const std::size_t b = c.vertices[(i + 1) % L];
    const bool both_in = node.reactants.contains(a) && node.reactants.contains(b);
    const bool both_out = node.reversible && node.products.contains(a) && node.products.contains(b);
    if (both_in || both_out) ++count;
  }
  return count;
}

inline bool oracle_has_bpe(const dstab::DsrGraph& g, const OracleCycle& c) {
  for (std::size_t e : c.edges) {
    const auto& ed = g.edges[e];
    const auto& node = g.rnodes[ed.rnode];
    if (ed.directed && !node.reversible && node.reactants.support_size() == 2 &&
        node.products.contains(ed.snode)) {
      return true;
    }
  }
  return false;
}

// true: shared edges traversed in opposite senses rule the pair out.
// false: such edges are dropped and the rest is examined.
inline bool oracle_s_to_r(const OracleCycle& c1, const OracleCycle& c2, bool strict = true) {
  std::set<std::size_t> e1(c1.edges.begin(), c1.edges.end());
  std::set<std::size_t> e2(c2.edges.begin(), c2.edges.end());
  if (e1 == e2) return false;
  std::map<std::size_t, bool> dir1;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> ends;
  for (std::size_t i = 0; i < c1.edges.size(); ++i) {
    dir1[c1.edges[i]] = c1.s_to_r[i];
    ends[c1.edges[i]] = {c1.vertices[i], c1.vertices[(i + 1) % c1.vertices.size()]};
  }
  std::vector<std::size_t> shared;
  for (std::size_t i = 0; i < c2.edges.size(); ++i) {
    auto it = dir1.find(c2.edges[i]);
    if (it == dir1.end()) continue;
    if (it->second != c2.s_to_r[i]) {
      if (strict) return false;
      continue;
    }
    shared.push_back(c2.edges[i]);
  }
  if (shared.empty()) return false;
  // Walk components by repeated edge adjacency.
  std::set<std::size_t> left(shared.begin(), shared.end());
  while (!left.empty()) {
    std::set<std::size_t> comp{*left.begin()};
    left.erase(left.begin());
    bool grew = true;
    while (grew) {
      grew = false;
      for (auto it = left.begin(); it != left.end();) {
        bool touches = false;
        for (std::size_t f : comp) {
          auto [a, b] = ends[*it];
          auto [c, d] = ends[f];
          if (a == c || a == d || b == c || b == d) touches = true;
        }
        if (touches) {
          comp.insert(*it);
          it = left.erase(it);
          grew = true;
        } else {
          ++it;
        }
      }
    }
    std::map<std::size_t, int> deg;
    for (std::size_t f : comp) {
      ++deg[ends[f].first];
      ++deg[ends[f].second];
    }
    for (const auto& [v, d] : deg) {
      if (d > 2) return false;
    }
    if (deg.size() != comp.size() + 1) return false;  // closed up into a cycle
    if (comp.size() % 2 == 0) return false;
  }
  return true;
}

inline bool oracle_any_s_to_r(const std::vector<OracleCycle>& cs, bool strict = true) {
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if (i != j && oracle_s_to_r(cs[i], cs[j], strict)) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Numeric oracles

// Determinant by cofactor expansion along the first row.
inline double cofactor_det(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::MatrixXd sub(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index cc = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c != j) sub(r - 1, cc++) = m(r, c);
      }
    }
    s += ((j % 2) ? -1.0 : 1.0) * m(0, j) * cofactor_det(sub);
  }
  return s;
}

template <class F>
double bisect(F f, double lo, double hi, double tol = 1e-15) {
  double flo = f(lo);
  for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

}  // namespace testsupport
