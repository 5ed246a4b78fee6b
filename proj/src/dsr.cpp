#include "dstab/dsr.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/hawick_circuits.hpp>

namespace dstab {

std::optional<std::size_t> DsrGraph::edge_between(std::size_t snode, std::size_t rnode) const {
  auto it = edge_index_.find({snode, rnode});
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::string DsrGraph::vertex_name(std::size_t v) const {
  if (is_snode(v)) return species_names.at(v);
  return "[" + rnode_names.at(v - num_snodes()) + "]";
}

DsrGraph build_dsr(const ReactionNetwork& net) {
  DsrGraph g;
  for (const auto& s : net.species()) g.species_names.push_back(s.name);
  g.rnode_of_reaction.assign(net.num_reactions(), std::nullopt);
  g.edges_at_snode.assign(net.num_species(), {});

  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    if (is_one_step_catalysis(rx)) {
      throw OneStepCatalysisError(
          r, "reaction " + std::to_string(r + 1) + " (" + net.reaction_string(r) +
                 ") has a species on both sides; its DSR graph would be a multigraph");
    }
    if (classify_flow(rx) != FlowClass::Interior) continue;
    auto partner = net.partner(r);
    if (partner && *partner < r) {
      const std::size_t k = *g.rnode_of_reaction[*partner];
      g.rnodes[k].reactions.push_back(r);
      g.rnode_of_reaction[r] = k;
      continue;
    }
    const std::size_t k = g.rnodes.size();
    RNode node{{r}, partner.has_value(), rx.reactant, rx.product};
    g.rnodes.push_back(node);
    g.rnode_of_reaction[r] = k;
    g.rnode_names.push_back(net.complex_string(rx.reactant) + (node.reversible ? " <-> " : " -> ") +
                            net.complex_string(rx.product));
    g.edges_at_rnode.emplace_back();
    auto add_edge = [&](std::size_t s, const Rational& label, bool directed) {
      const std::size_t e = g.edges.size();
      g.edges.push_back({s, k, directed, label});
      g.edges_at_snode[s].push_back(e);
      g.edges_at_rnode[k].push_back(e);
      g.edge_index_[{s, k}] = e;
    };
    for (const auto& [s, c] : rx.reactant.terms()) add_edge(s, c, false);
    for (const auto& [s, c] : rx.product.terms()) add_edge(s, c, !node.reversible);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Cycles

std::vector<std::size_t> OrientedCycle::edge_set() const {
  std::vector<std::size_t> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.edge);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool is_bpe(const DsrGraph& g, const Edge& e) {
  const RNode& r = g.rnodes[e.rnode];
  return e.directed && !r.reversible && r.reactants.support_size() == 2;
}

// Both species are reactants of the R-node; for a reversible node, both sit
// in the same complex.
bool forms_c_pair(const RNode& r, std::size_t a, std::size_t b) {
  if (r.reactants.contains(a) && r.reactants.contains(b)) return true;
  return r.reversible && r.products.contains(a) && r.products.contains(b);
}

}  // namespace

void annotate_cycle(const DsrGraph& g, OrientedCycle& c) {
  const std::size_t len = c.vertices.size();
  if (len % 2 != 0 || len < 4) throw std::logic_error("DSR cycle must have even length >= 4");
  c.c_pairs = 0;
  c.alternating_product = 1;
  c.has_bpe = false;
  for (std::size_t i = 0; i < len; ++i) {
    const Edge& e = g.edges[c.steps[i].edge];
    if (i % 2 == 0) c.alternating_product *= e.label;
    else c.alternating_product /= e.label;
    if (is_bpe(g, e)) c.has_bpe = true;
    const std::size_t v = c.vertices[i];
    if (!g.is_snode(v)) {
      const RNode& r = g.rnodes[v - g.num_snodes()];
      if (forms_c_pair(r, c.vertices[(i + len - 1) % len], c.vertices[(i + 1) % len])) ++c.c_pairs;
    }
  }
}

CycleClassification classify_cycle(const OrientedCycle& c) {
  return {c.c_pairs, c.e_cycle(), c.o_cycle(), c.s_cycle()};
}

namespace {

struct CircuitCollector {
  const DsrGraph* g;
  std::vector<OrientedCycle>* out;
  std::uint64_t budget;

  template <class Path, class Graph>
  void cycle(const Path& path, const Graph&) {
    if (path.size() <= 2) return;  // an arc and its own reverse
    if (out->size() >= budget) throw CycleBudgetExceeded(budget);
    OrientedCycle c;
    c.vertices.assign(path.begin(), path.end());
    const std::size_t len = c.vertices.size();
    // Rotate so the cycle starts at its smallest S-node (the smallest vertex
    // overall, since S-nodes are numbered first).
    auto first = std::min_element(c.vertices.begin(), c.vertices.end());
    std::rotate(c.vertices.begin(), first, c.vertices.end());
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t a = c.vertices[i];
      const std::size_t b = c.vertices[(i + 1) % len];
      const bool s_to_r = g->is_snode(a);
      const std::size_t s = s_to_r ? a : b;
      const std::size_t r = (s_to_r ? b : a) - g->num_snodes();
      c.steps.push_back({*g->edge_between(s, r), s_to_r});
    }
    annotate_cycle(*g, c);
    out->push_back(std::move(c));
  }
};

}  // namespace

std::vector<OrientedCycle> enumerate_cycles(const DsrGraph& g, std::uint64_t budget) {
  using Digraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
  Digraph d(g.num_vertices());
  for (const Edge& e : g.edges) {
    const std::size_t s = e.snode;
    const std::size_t r = g.rnode_vertex(e.rnode);
    boost::add_edge(r, s, d);
    if (!e.directed) boost::add_edge(s, r, d);
  }
  std::vector<OrientedCycle> cycles;
  boost::hawick_circuits(d, CircuitCollector{&g, &cycles, budget});
  std::sort(cycles.begin(), cycles.end(), [](const OrientedCycle& a, const OrientedCycle& b) {
    return a.vertices < b.vertices;
  });
  return cycles;
}

std::vector<std::vector<std::size_t>> group_by_edge_set(const std::vector<OrientedCycle>& cycles) {
  std::map<std::vector<std::size_t>, std::size_t> index;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    auto [it, inserted] = index.emplace(cycles[i].edge_set(), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

std::vector<std::size_t> bispecies_production_edges(const DsrGraph& g) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (is_bpe(g, g.edges[e])) out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// S-to-R intersections

std::optional<std::vector<std::size_t>> s_to_r_shared_edges(const OrientedCycle& c1,
                                                            const OrientedCycle& c2) {
  if (c1.edge_set() == c2.edge_set()) return std::nullopt;

  std::map<std::size_t, bool> dir1;
  for (const auto& s : c1.steps) dir1[s.edge] = s.s_to_r;

  // Shared edges with their endpoints, taken from c2's traversal.
  std::vector<std::size_t> shared;
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  const std::size_t len = c2.steps.size();
  for (std::size_t i = 0; i < len; ++i) {
    auto it = dir1.find(c2.steps[i].edge);
    if (it == dir1.end()) continue;
    if (it->second != c2.steps[i].s_to_r) return std::nullopt;  // traversed in opposite senses
    shared.push_back(c2.steps[i].edge);
    ends.emplace_back(c2.vertices[i], c2.vertices[(i + 1) % len]);
  }
  if (shared.empty()) return std::nullopt;

  // Components of the shared subgraph must all be paths with an odd number
  // of edges.
  std::map<std::size_t, std::size_t> parent;
  std::map<std::size_t, std::size_t> degree;
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& [a, b] : ends) {
    parent.emplace(a, a);
    parent.emplace(b, b);
    ++degree[a];
    ++degree[b];
  }
  for (const auto& [a, b] : ends) parent[find(a)] = find(b);
  std::map<std::size_t, std::size_t> comp_vertices;
  std::map<std::size_t, std::size_t> comp_edges;
  for (const auto& [v, p] : parent) {
    if (degree[v] > 2) return std::nullopt;
    ++comp_vertices[find(v)];
  }
  for (const auto& [a, b] : ends) ++comp_edges[find(a)];
  for (const auto& [root, ne] : comp_edges) {
    if (ne + 1 != comp_vertices[root]) return std::nullopt;  // a cycle, not a path
    if (ne % 2 == 0) return std::nullopt;
  }
  std::sort(shared.begin(), shared.end());
  return shared;
}

bool s_to_r_intersection(const OrientedCycle& c1, const OrientedCycle& c2) {
  return s_to_r_shared_edges(c1, c2).has_value();
}

InjectivityConditions check_injectivity_conditions(const DsrGraph&,
                                                   const std::vector<OrientedCycle>& cycles) {
  InjectivityConditions out;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (!cycles[i].o_cycle() && !cycles[i].s_cycle()) {
      out.all_cycles_o_or_s = false;
      out.bad_cycle = i;
      break;
    }
  }
  out.bad_pair = find_s_to_r_pair(cycles, [](const OrientedCycle& c) { return c.e_cycle(); });
  out.no_e_cycle_s_to_r = !out.bad_pair;
  return out;
}

DelayStabilityConditions check_delay_stability_conditions(const DsrGraph&,
                                                          const std::vector<OrientedCycle>& cycles) {
  DelayStabilityConditions out;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (out.no_bpe_cycle && cycles[i].has_bpe) {
      out.no_bpe_cycle = false;
      out.bpe_cycle = i;
    }
    if (out.all_s_cycles && !cycles[i].s_cycle()) {
      out.all_s_cycles = false;
      out.non_s_cycle = i;
    }
  }
  out.s_to_r_pair = find_s_to_r_pair(cycles, [](const OrientedCycle&) { return true; });
  out.no_s_to_r = !out.s_to_r_pair;
  return out;
}

ModifiedGraphConditions check_modified_graph_conditions(const std::vector<OrientedCycle>& cycles) {
  ModifiedGraphConditions out;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (!cycles[i].s_cycle()) {
      out.all_s_cycles = false;
      out.non_s_cycle = i;
      break;
    }
  }
  out.s_to_r_pair = find_s_to_r_pair(cycles, [](const OrientedCycle&) { return true; });
  out.no_s_to_r = !out.s_to_r_pair;
  return out;
}

// ---------------------------------------------------------------------------
// Homomorphism onto the original graph

PhiMap build_phi(const DsrGraph& orig, const DsrGraph& mod_g, const ModifiedNetwork& mod) {
  if (orig.num_snodes() != mod_g.num_snodes()) {
    throw StructuralMismatch("species sets differ between original and modified graphs");
  }
  const std::size_t n = orig.num_snodes();
  PhiMap phi;
  phi.vertex.resize(mod_g.num_vertices());
  for (std::size_t i = 0; i < n; ++i) phi.vertex[i] = i;
  for (std::size_t k = 0; k < mod_g.rnodes.size(); ++k) {
    std::optional<std::size_t> target;
    for (std::size_t r : mod_g.rnodes[k].reactions) {
      const std::size_t parent = mod.network.reaction(r).origin.parent;
      auto t = orig.rnode_of_reaction.at(parent);
      if (!t) throw StructuralMismatch("modified R-node has a parent outside the original R-nodes");
      if (target && *target != *t) throw StructuralMismatch("modified R-node maps to two R-nodes");
      target = t;
    }
    phi.vertex[n + k] = n + *target;
  }

  std::vector<bool> vertex_hit(orig.num_vertices(), false);
  for (std::size_t v : phi.vertex) vertex_hit[v] = true;
  std::vector<bool> edge_hit(orig.edges.size(), false);
  phi.edge.resize(mod_g.edges.size());
  for (std::size_t e = 0; e < mod_g.edges.size(); ++e) {
    const Edge& me = mod_g.edges[e];
    const std::size_t target_r = phi.vertex[n + me.rnode] - n;
    auto oe = orig.edge_between(me.snode, target_r);
    if (!oe) throw StructuralMismatch("modified edge has no image");
    const Edge& o = orig.edges[*oe];
    if (o.label != me.label) throw StructuralMismatch("edge label not preserved");
    if (o.directed && !me.directed) throw StructuralMismatch("undirected edge mapped onto a directed one");
    phi.edge[e] = *oe;
    edge_hit[*oe] = true;
  }
  if (std::find(vertex_hit.begin(), vertex_hit.end(), false) != vertex_hit.end()) {
    throw StructuralMismatch("vertex map is not surjective");
  }
  if (std::find(edge_hit.begin(), edge_hit.end(), false) != edge_hit.end()) {
    throw StructuralMismatch("edge map is not surjective");
  }
  return phi;
}

// ---------------------------------------------------------------------------
// Output

std::string export_dot(const DsrGraph& g, const DotOptions& opts) {
  std::ostringstream os;
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  os << "digraph " << quote(opts.name) << " {\n";
  for (std::size_t i = 0; i < g.num_snodes(); ++i) {
    os << "  s" << i << " [label=" << quote(g.species_names[i]) << ", shape=circle];\n";
  }
  for (std::size_t k = 0; k < g.rnodes.size(); ++k) {
    os << "  r" << k << " [label=" << quote(g.rnode_names[k]) << ", shape=box];\n";
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& ed = g.edges[e];
    os << "  r" << ed.rnode << " -> s" << ed.snode << " [label=" << quote(to_string(ed.label));
    if (!ed.directed) os << ", dir=none";
    if (opts.highlight_edges.count(e)) os << ", color=red, penwidth=2";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string cycle_string(const DsrGraph& g, const OrientedCycle& c) {
  std::string out;
  for (std::size_t v : c.vertices) out += g.vertex_name(v) + " -> ";
  return out + g.vertex_name(c.vertices.front());
}

}  // namespace dstab
