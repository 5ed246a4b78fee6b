#include "doctest.h"

#include <algorithm>

#include "dstab/dsr.hpp"
#include "dstab/modified.hpp"
#include "support.hpp"

using namespace dstab;
using namespace testsupport;

namespace {

std::set<std::vector<std::size_t>> vertex_sequences(const std::vector<OrientedCycle>& cs) {
  std::set<std::vector<std::size_t>> out;
  for (const auto& c : cs) out.insert(c.vertices);
  return out;
}

std::set<std::vector<std::size_t>> vertex_sequences(const std::vector<OracleCycle>& cs) {
  std::set<std::vector<std::size_t>> out;
  for (const auto& c : cs) out.insert(c.vertices);
  return out;
}

const OrientedCycle* find_cycle(const std::vector<OrientedCycle>& cs, const std::vector<std::size_t>& vs) {
  for (const auto& c : cs) {
    if (c.vertices == vs) return &c;
  }
  return nullptr;
}

std::size_t count_substr(const std::string& s, const std::string& sub) {
  std::size_t n = 0;
  for (auto p = s.find(sub); p != std::string::npos; p = s.find(sub, p + 1)) ++n;
  return n;
}

// Modified-graph side with oracles only: all modified cycles are
// s-cycles and no two intersect S-to-R.
bool oracle_modified_side(const ReactionNetwork& net) {
  const auto mg = build_dsr(build_modified_network(net).network);
  const auto cs = oracle_cycles(mg);
  for (const auto& c : cs) {
    if (oracle_product(mg, c) != 1) return false;
  }
  return !oracle_any_s_to_r(cs);
}

}  // namespace

TEST_CASE("worked example graph") {
  const auto net = parse(kThreeCyclesText);
  const auto g = build_dsr(net);
  CHECK(g.num_snodes() == 3);
  REQUIRE(g.rnodes.size() == 3);
  CHECK(g.edges.size() == 7);
  CHECK(g.rnodes[2].reversible);
  CHECK(g.rnodes[2].reactions == std::vector<std::size_t>{2, 3});
  CHECK(g.rnode_of_reaction[3] == 2u);
  CHECK_FALSE(g.rnode_of_reaction[4]);
  CHECK_FALSE(g.rnode_of_reaction[6]);

  std::size_t directed = 0;
  for (const auto& e : g.edges) directed += e.directed;
  CHECK(directed == 2);
  const auto z_edge = g.edge_between(2, 0);
  REQUIRE(z_edge);
  CHECK(g.edges[*z_edge].directed);
  CHECK(g.edges[*z_edge].label == 2);

  const auto cycles = enumerate_cycles(g);
  CHECK(cycles.size() == 4);  // the X-Y cycle in both orientations
  const auto groups = group_by_edge_set(cycles);
  REQUIRE(groups.size() == 3);

  // X=0, Y=1, Z=2; R-nodes 3, 4, 5.
  const auto* c1 = find_cycle(cycles, {0, 3, 1, 5});
  const auto* c2 = find_cycle(cycles, {0, 3, 2, 4});
  const auto* c3 = find_cycle(cycles, {0, 5, 1, 3, 2, 4});
  REQUIRE(c1);
  REQUIRE(c2);
  REQUIRE(c3);
  CHECK(find_cycle(cycles, {0, 5, 1, 3}));

  CHECK(c1->o_cycle());
  CHECK(c1->s_cycle());
  CHECK(c2->e_cycle());
  CHECK_FALSE(c2->s_cycle());
  CHECK(c2->alternating_product == Rational(1, 2));
  CHECK(c3->e_cycle());
  CHECK_FALSE(c3->s_cycle());
  CHECK(c2->has_bpe);
  CHECK(c3->has_bpe);
  CHECK_FALSE(c1->has_bpe);

  auto any_orientation = [&](const std::vector<std::size_t>& es1, const std::vector<std::size_t>& es2) {
    for (const auto& a : cycles) {
      for (const auto& b : cycles) {
        if (a.edge_set() == es1 && b.edge_set() == es2 && s_to_r_intersection(a, b)) return true;
      }
    }
    return false;
  };
  CHECK(any_orientation(c1->edge_set(), c2->edge_set()));
  CHECK(any_orientation(c1->edge_set(), c3->edge_set()));
  CHECK(any_orientation(c2->edge_set(), c3->edge_set()));

  const auto inj = check_injectivity_conditions(g, cycles);
  CHECK_FALSE(inj.all_cycles_o_or_s);
  CHECK_FALSE(inj.no_e_cycle_s_to_r);

  const auto cond = check_delay_stability_conditions(g, cycles);
  CHECK_FALSE(cond.no_bpe_cycle);
  CHECK_FALSE(cond.all_s_cycles);
  CHECK_FALSE(cond.no_s_to_r);
  CHECK_FALSE(cond.all());
  REQUIRE(cond.bpe_cycle);
  CHECK(cycles[*cond.bpe_cycle].has_bpe);

  const std::string dot = export_dot(g);
  CHECK(count_substr(dot, "shape=circle") == 3);
  CHECK(count_substr(dot, "shape=box") == 3);
  CHECK(count_substr(dot, " -> s") == 7);
  CHECK(count_substr(dot, "dir=none") == 5);
  CHECK(dot == export_dot(build_dsr(parse(kThreeCyclesText))));
}

TEST_CASE("duplex graph has no cycle") {
  const auto g = build_dsr(parse(kDnaText));
  CHECK(g.species_names == std::vector<std::string>{"S", "D"});
  REQUIRE(g.rnodes.size() == 1);
  CHECK(g.rnodes[0].reversible);
  REQUIRE(g.edges.size() == 2);
  CHECK_FALSE(g.edges[0].directed);
  CHECK_FALSE(g.edges[1].directed);
  std::multiset<Rational> labels{g.edges[0].label, g.edges[1].label};
  CHECK(labels == std::multiset<Rational>{1, 2});
  const auto cycles = enumerate_cycles(g);
  CHECK(cycles.empty());
  CHECK(bispecies_production_edges(g).empty());
  const auto inj = check_injectivity_conditions(g, cycles);
  CHECK(inj.all_cycles_o_or_s);
  CHECK(inj.no_e_cycle_s_to_r);
  CHECK(check_delay_stability_conditions(g, cycles).all());

  const std::string dot = export_dot(g);
  CHECK(count_substr(dot, "shape=") == 3);
  CHECK(count_substr(dot, " -> s") == 2);
  CHECK(count_substr(dot, "dir=none") == 2);
}

TEST_CASE("one-step catalysis is rejected") {
  const auto net = parse("0 -> X\nX + Y -> 2 X\nX -> 0\n");
  try {
    build_dsr(net);
    FAIL("expected OneStepCatalysisError");
  } catch (const OneStepCatalysisError& e) {
    CHECK(e.reaction() == 1);
  }
}

TEST_CASE("bispecies production edge in a loop") {
  const auto net = parse(kLoopText);
  const auto g = build_dsr(net);
  const auto bpe = bispecies_production_edges(g);
  REQUIRE(bpe.size() == 1);
  CHECK(g.edges[bpe[0]].snode == 2);
  CHECK(g.edges[bpe[0]].rnode == 0);
  const auto cycles = enumerate_cycles(g);
  const auto cond = check_delay_stability_conditions(g, cycles);
  CHECK_FALSE(cond.no_bpe_cycle);

  // The modified graph carries the problem as an S-to-R intersection along
  // a single edge.
  const auto mg = build_dsr(build_modified_network(net).network);
  const auto mcycles = enumerate_cycles(mg);
  const auto mcond = check_modified_graph_conditions(mcycles);
  CHECK_FALSE(mcond.no_s_to_r);
  bool single = false;
  for (const auto& a : mcycles) {
    for (const auto& b : mcycles) {
      auto shared = s_to_r_shared_edges(a, b);
      if (shared && shared->size() == 1) single = true;
    }
  }
  CHECK(single);
}

TEST_CASE("CST graphs have a single cycle") {
  std::mt19937_64 rng(4);
  for (std::size_t n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<CstKind> kinds;
      std::vector<Rational> a, b;
      bool any_seq = false;
      for (std::size_t i = 0; i < n; ++i) {
        kinds.push_back(rng() % 2 ? CstKind::Sequestration : CstKind::Transmutation);
        any_seq = any_seq || kinds.back() == CstKind::Sequestration;
        a.emplace_back(1 + rng() % 4);
        b.emplace_back(1 + rng() % 4);
      }
      if (trial == 0) b = a;
      const auto net = make_cst_network(kinds, a, b, true);
      const auto g = build_dsr(net);
      const auto cycles = enumerate_cycles(g);
      CHECK(group_by_edge_set(cycles).size() == 1);
      if (any_seq) CHECK(bispecies_production_edges(g).empty());
      Rational pa = 1, pb = 1;
      for (std::size_t i = 0; i < n; ++i) {
        pa *= a[i];
        pb *= b[i];
      }
      const auto inj = check_injectivity_conditions(g, cycles);
      if (pa == pb) {
        CHECK(inj.all_cycles_o_or_s);
        CHECK(inj.no_e_cycle_s_to_r);
      }
      CHECK(cycles.front().s_cycle() == (pa == pb));
    }
  }
}

TEST_CASE("cycle enumeration matches the DFS oracle") {
  NetworkGenerator gen(17);
  gen.max_species = 6;
  int nonempty = 0;
  for (int it = 0; it < 300; ++it) {
    const auto net = gen();
    const auto g = build_dsr(net);
    if (g.num_vertices() > 12) continue;
    const auto cycles = enumerate_cycles(g);
    const auto oracle = oracle_cycles(g);
    CHECK(vertex_sequences(cycles) == vertex_sequences(oracle));
    CHECK(cycles.size() == oracle.size());
    nonempty += !oracle.empty();
    for (const auto& oc : oracle) {
      const auto* c = find_cycle(cycles, oc.vertices);
      REQUIRE(c);
      CHECK(c->vertices.size() % 2 == 0);
      CHECK(g.is_snode(c->vertices[0]));
      CHECK(c->c_pairs == oracle_c_pairs(g, oc));
      CHECK(c->alternating_product == oracle_product(g, oc));
      CHECK(c->has_bpe == oracle_has_bpe(g, oc));
      const auto cls = classify_cycle(*c);
      CHECK(cls.e_cycle == (oracle_c_pairs(g, oc) % 2 == 0));
      CHECK(cls.o_cycle != cls.e_cycle);
      CHECK(cls.s_cycle == (oracle_product(g, oc) == 1));
    }
  }
  CHECK(nonempty > 30);
}

TEST_CASE("classification is invariant under reversal") {
  NetworkGenerator gen(23);
  for (int it = 0; it < 300; ++it) {
    const auto g = build_dsr(gen());
    const auto cycles = enumerate_cycles(g);
    for (const auto& group : group_by_edge_set(cycles)) {
      for (std::size_t idx : group) {
        CHECK(cycles[idx].c_pairs == cycles[group[0]].c_pairs);
        CHECK(cycles[idx].s_cycle() == cycles[group[0]].s_cycle());
      }
      if (group.size() == 2) {
        CHECK(cycles[group[0]].alternating_product * cycles[group[1]].alternating_product == 1);
      }
    }
  }
}

TEST_CASE("S-to-R intersection matches the oracle") {
  NetworkGenerator gen(29);
  int positives = 0;
  for (int it = 0; it < 300; ++it) {
    const auto g = build_dsr(gen());
    const auto cycles = enumerate_cycles(g);
    const auto oracle = oracle_cycles(g);
    for (const auto& o1 : oracle) {
      for (const auto& o2 : oracle) {
        const auto* c1 = find_cycle(cycles, o1.vertices);
        const auto* c2 = find_cycle(cycles, o2.vertices);
        REQUIRE(c1);
        REQUIRE(c2);
        const bool expected = oracle_s_to_r(o1, o2);
        CHECK(s_to_r_intersection(*c1, *c2) == expected);
        positives += expected;
      }
    }
  }
  CHECK(positives > 10);
}

TEST_CASE("intersection corner cases") {
  const auto g = build_dsr(parse(kThreeCyclesText));
  const auto cycles = enumerate_cycles(g);
  for (const auto& c : cycles) CHECK_FALSE(s_to_r_intersection(c, c));
  // A cycle and its reverse share every edge but have the same edge set.
  const auto* fwd = find_cycle(cycles, {0, 3, 1, 5});
  const auto* rev = find_cycle(cycles, {0, 5, 1, 3});
  REQUIRE(fwd);
  REQUIRE(rev);
  CHECK_FALSE(s_to_r_intersection(*fwd, *rev));

  // Two cycles sharing only a vertex.
  const auto bow = build_dsr(parse("X <-> Y\nY <-> X : k+=2, k-=3\nY <-> Z\nZ <-> Y : k+=2, k-=3\n"));
  const auto bc = enumerate_cycles(bow);
  REQUIRE(group_by_edge_set(bc).size() == 2);
  for (const auto& a : bc) {
    for (const auto& b : bc) CHECK_FALSE(s_to_r_intersection(a, b));
  }
}

TEST_CASE("cycle budget is enforced") {
  const auto g = build_dsr(parse(kThreeCyclesText));
  CHECK_THROWS_AS(enumerate_cycles(g, 2), CycleBudgetExceeded);
  CHECK_NOTHROW(enumerate_cycles(g, 4));
}

TEST_CASE("modified graphs have no c-pairs") {
  NetworkGenerator gen(37);
  for (int it = 0; it < 300; ++it) {
    const auto mg = build_dsr(build_modified_network(gen()).network);
    for (const auto& c : enumerate_cycles(mg)) {
      CHECK(c.c_pairs == 0);
      CHECK(c.e_cycle());
    }
  }
}

TEST_CASE("phi on a single three-reactant-unit reaction") {
  const auto net = parse("2 X + Y -> Z");
  const auto mod = build_modified_network(net);
  const auto g = build_dsr(net);
  const auto mg = build_dsr(mod.network);
  REQUIRE(g.rnodes.size() == 1);
  REQUIRE(mg.rnodes.size() == 2);
  CHECK(g.edges.size() == 3);
  CHECK(mg.edges.size() == 6);
  const auto phi = build_phi(g, mg, mod);
  CHECK(phi.vertex[mg.rnode_vertex(0)] == g.rnode_vertex(0));
  CHECK(phi.vertex[mg.rnode_vertex(1)] == g.rnode_vertex(0));
  for (std::size_t s = 0; s < 3; ++s) CHECK(phi.vertex[s] == s);
  CHECK(std::set<std::size_t>(phi.edge.begin(), phi.edge.end()).size() == 3);
  for (std::size_t e = 0; e < mg.edges.size(); ++e) {
    CHECK(mg.edges[e].label == g.edges[phi.edge[e]].label);
  }
}

TEST_CASE("phi is an isomorphism without bispecies reactions") {
  const auto net = parse(kDnaText);
  const auto mod = build_modified_network(net);
  const auto g = build_dsr(net);
  const auto phi = build_phi(g, build_dsr(mod.network), mod);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) CHECK(phi.vertex[v] == v);
  for (std::size_t e = 0; e < g.edges.size(); ++e) CHECK(phi.edge[e] == e);
}

TEST_CASE("phi validation rejects a mismatched graph") {
  const auto net = parse("X + Y -> Z\nZ -> X");
  const auto mod = build_modified_network(net);
  const auto other = build_dsr(parse("X + Y -> 2 Z\nZ -> X"));
  CHECK_THROWS_AS(build_phi(other, build_dsr(mod.network), mod), StructuralMismatch);
}

TEST_CASE("random networks: phi, cycle correspondence and c-pair preimages") {
  NetworkGenerator gen(41);
  int checked = 0;
  for (int it = 0; it < 300; ++it) {
    const auto net = gen();
    const auto mod = build_modified_network(net);
    const auto g = build_dsr(net);
    const auto mg = build_dsr(mod.network);
    const auto phi = build_phi(g, mg, mod);
    const auto ocycles = oracle_cycles(g);
    bool bpe_cycle = false;
    for (const auto& c : ocycles) bpe_cycle = bpe_cycle || oracle_has_bpe(g, c);
    if (bpe_cycle) continue;
    ++checked;

    // Oriented cycles of the original graph plus one entry per c-pair,
    // against the images of the oriented modified cycles.
    std::set<std::vector<std::size_t>> original;
    for (const auto& c : ocycles) original.insert(c.vertices);
    std::size_t c_pairs = 0;
    for (const auto& node : g.rnodes) {
      c_pairs += !node.reversible && node.reactants.support_size() == 2;
    }

    std::set<std::vector<std::size_t>> images;
    std::size_t onto_c_pairs = 0;
    const auto mcycles = oracle_cycles(mg);
    for (const auto& c : mcycles) {
      std::vector<std::size_t> image;
      for (std::size_t v : c.vertices) image.push_back(phi.vertex[v]);
      std::set<std::size_t> distinct(image.begin(), image.end());
      if (distinct.size() == 3 && image.size() == 4) {
        // Maps onto a c-pair: must be an s-cycle.
        ++onto_c_pairs;
        CHECK(oracle_product(mg, c) == 1);
        continue;
      }
      CHECK(distinct.size() == image.size());
      std::rotate(image.begin(), std::min_element(image.begin(), image.end()), image.end());
      CHECK(images.insert(image).second);
    }
    CHECK(images == original);
    CHECK(onto_c_pairs == c_pairs);
    CHECK(mcycles.size() == original.size() + c_pairs);
  }
  CHECK(checked > 100);
}

TEST_CASE("equivalence of the modified-graph and original-graph conditions") {
  NetworkGenerator gen(43);
  for (int it = 0; it < 300; ++it) {
    const auto net = gen();
    const auto g = build_dsr(net);
    const auto cond = check_delay_stability_conditions(g, enumerate_cycles(g));
    CHECK(oracle_modified_side(net) == cond.all());

    // S-to-R transfer: modified graph intersection iff original has one or
    // has a cycle through a bispecies production edge.
    const auto mg = build_dsr(build_modified_network(net).network);
    const bool lhs = oracle_any_s_to_r(oracle_cycles(mg));
    CHECK(lhs == (!cond.no_s_to_r || !cond.no_bpe_cycle));
  }
}

TEST_CASE("witness rendering") {
  const auto g = build_dsr(parse(kThreeCyclesText));
  const auto cycles = enumerate_cycles(g);
  const auto* c2 = find_cycle(cycles, {0, 3, 2, 4});
  REQUIRE(c2);
  const std::string s = cycle_string(g, *c2);
  CHECK(s.rfind("X -> [", 0) == 0);
  CHECK(s.size() > 2);
  CHECK(s.substr(s.size() - 1) == "X");

  DotOptions opts;
  opts.name = "ex";
  opts.highlight_edges = {c2->steps[0].edge};
  const std::string dot = export_dot(g, opts);
  CHECK(dot.rfind("digraph \"ex\"", 0) == 0);
  CHECK(count_substr(dot, "color=red") == 1);
}
