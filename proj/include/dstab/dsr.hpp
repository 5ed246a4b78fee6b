#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dstab/modified.hpp"
#include "dstab/network.hpp"

namespace dstab {

class OneStepCatalysisError : public NetworkError {
 public:
  OneStepCatalysisError(std::size_t reaction, const std::string& what)
      : NetworkError(what), reaction_(reaction) {}
  std::size_t reaction() const { return reaction_; }

 private:
  std::size_t reaction_;
};

class CycleBudgetExceeded : public std::runtime_error {
 public:
  explicit CycleBudgetExceeded(std::uint64_t budget)
      : std::runtime_error("cycle enumeration exceeded budget of " + std::to_string(budget)),
        budget_(budget) {}
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t budget_;
};

// Validation failure of the homomorphism onto the original graph. Always a
// bug, never bad input.
class StructuralMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RNode {
  std::vector<std::size_t> reactions;  // one, or two for a reversible pair (lower index first)
  bool reversible = false;
  Complex reactants;  // of reactions[0]
  Complex products;
};

// Between S-node `snode` and R-node `rnode`. Directed edges point toward the
// S-node.
struct Edge {
  std::size_t snode = 0;
  std::size_t rnode = 0;
  bool directed = false;
  Rational label;
};

// Vertex ids: S-node i is i, R-node k is num_snodes() + k.
class DsrGraph {
 public:
  std::size_t num_snodes() const { return species_names.size(); }
  std::size_t num_vertices() const { return species_names.size() + rnodes.size(); }
  bool is_snode(std::size_t v) const { return v < num_snodes(); }
  std::size_t rnode_vertex(std::size_t k) const { return num_snodes() + k; }
  std::optional<std::size_t> edge_between(std::size_t snode, std::size_t rnode) const;
  std::string vertex_name(std::size_t v) const;

  std::vector<std::string> species_names;
  std::vector<std::string> rnode_names;
  std::vector<RNode> rnodes;
  std::vector<Edge> edges;
  std::vector<std::optional<std::size_t>> rnode_of_reaction;
  std::vector<std::vector<std::size_t>> edges_at_snode;
  std::vector<std::vector<std::size_t>> edges_at_rnode;

 private:
  friend DsrGraph build_dsr(const ReactionNetwork& net);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index_;
};

// Throws OneStepCatalysisError when some reaction has a species on both sides.
DsrGraph build_dsr(const ReactionNetwork& net);

struct CycleStep {
  std::size_t edge = 0;
  bool s_to_r = false;  // traversal direction
};

// steps[i] leads from vertices[i] to vertices[(i + 1) % size]. vertices[0] is
// the smallest S-node on the cycle.
struct OrientedCycle {
  std::vector<std::size_t> vertices;
  std::vector<CycleStep> steps;
  std::size_t c_pairs = 0;
  Rational alternating_product = 1;  // sigma_1 / sigma_2 * sigma_3 / ...
  bool has_bpe = false;

  bool e_cycle() const { return c_pairs % 2 == 0; }
  bool o_cycle() const { return c_pairs % 2 == 1; }
  bool s_cycle() const { return alternating_product == 1; }
  std::vector<std::size_t> edge_set() const;  // sorted
};

struct CycleClassification {
  std::size_t c_pairs = 0;
  bool e_cycle = false;
  bool o_cycle = false;
  bool s_cycle = false;
};

// Fills c_pairs, alternating_product and has_bpe from the graph.
void annotate_cycle(const DsrGraph& g, OrientedCycle& c);
CycleClassification classify_cycle(const OrientedCycle& c);

// All oriented simple cycles, both orientations of every cycle without a
// directed edge. Throws CycleBudgetExceeded past `budget` cycles.
std::vector<OrientedCycle> enumerate_cycles(const DsrGraph& g, std::uint64_t budget = 1'000'000);

// Indices into `cycles` grouped by edge set; the first index of each group is
// its representative. Groups are ordered by first appearance.
std::vector<std::vector<std::size_t>> group_by_edge_set(const std::vector<OrientedCycle>& cycles);

// Directed edges from an irreversible R-node with exactly two reactant species.
std::vector<std::size_t> bispecies_production_edges(const DsrGraph& g);

// Shared edges traversed the same way by both cycles, when they form an
// S-to-R intersection; nullopt otherwise. Cycles with equal edge sets never
// intersect this way.
std::optional<std::vector<std::size_t>> s_to_r_shared_edges(const OrientedCycle& c1,
                                                            const OrientedCycle& c2);
bool s_to_r_intersection(const OrientedCycle& c1, const OrientedCycle& c2);

struct CyclePair {
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<std::size_t> shared_edges;
};

// First S-to-R intersecting pair (first < second as edge-set groups, any
// orientations) among cycles accepted by `filter`.
template <class Filter>
std::optional<CyclePair> find_s_to_r_pair(const std::vector<OrientedCycle>& cycles, Filter filter) {
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (!filter(cycles[i])) continue;
    for (std::size_t j = 0; j < cycles.size(); ++j) {
      if (i == j || !filter(cycles[j])) continue;
      if (auto shared = s_to_r_shared_edges(cycles[i], cycles[j])) {
        return CyclePair{std::min(i, j), std::max(i, j), std::move(*shared)};
      }
    }
  }
  return std::nullopt;
}

struct InjectivityConditions {
  bool all_cycles_o_or_s = true;
  bool no_e_cycle_s_to_r = true;
  std::optional<std::size_t> bad_cycle;
  std::optional<CyclePair> bad_pair;
};
InjectivityConditions check_injectivity_conditions(const DsrGraph& g,
                                                   const std::vector<OrientedCycle>& cycles);

struct DelayStabilityConditions {
  bool no_bpe_cycle = true;  // (a)
  bool all_s_cycles = true;  // (b)
  bool no_s_to_r = true;     // (c)
  std::optional<std::size_t> bpe_cycle;
  std::optional<std::size_t> non_s_cycle;
  std::optional<CyclePair> s_to_r_pair;

  bool all() const { return no_bpe_cycle && all_s_cycles && no_s_to_r; }
};
DelayStabilityConditions check_delay_stability_conditions(const DsrGraph& g,
                                                          const std::vector<OrientedCycle>& cycles);

// Conditions on the modified graph: every cycle an s-cycle, no S-to-R
// intersection.
struct ModifiedGraphConditions {
  bool all_s_cycles = true;
  bool no_s_to_r = true;
  std::optional<std::size_t> non_s_cycle;
  std::optional<CyclePair> s_to_r_pair;

  bool all() const { return all_s_cycles && no_s_to_r; }
};
ModifiedGraphConditions check_modified_graph_conditions(const std::vector<OrientedCycle>& cycles);

struct PhiMap {
  std::vector<std::size_t> vertex;  // modified vertex -> original vertex
  std::vector<std::size_t> edge;    // modified edge -> original edge
};

// Identity on S-nodes, modified R-nodes to the R-node of their parent
// reaction. Throws StructuralMismatch unless the map is a label- and
// orientation-preserving surjection.
PhiMap build_phi(const DsrGraph& orig, const DsrGraph& mod_g, const ModifiedNetwork& mod);

struct DotOptions {
  std::string name = "dsr";
  std::set<std::size_t> highlight_edges;
};
std::string export_dot(const DsrGraph& g, const DotOptions& opts = {});

std::string cycle_string(const DsrGraph& g, const OrientedCycle& c);

}  // namespace dstab
