#include "dstab/report.hpp"

#include <random>
#include <sstream>

#include "json.hpp"

namespace dstab {

std::string_view to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::DelayStable: return "DelayStable";
    case VerdictKind::NotDecided: return "NotDecided";
    case VerdictKind::PreconditionFailed: return "PreconditionFailed";
  }
  return "?";
}

namespace {

std::string edge_string(const DsrGraph& g, std::size_t e) {
  const Edge& ed = g.edges[e];
  return g.vertex_name(g.rnode_vertex(ed.rnode)) + (ed.directed ? " -> " : " -- ") +
         g.species_names[ed.snode];
}

std::string pair_string(const DsrGraph& g, const std::vector<OrientedCycle>& cycles, const CyclePair& p) {
  std::string out = cycle_string(g, cycles[p.first]) + "  and  " + cycle_string(g, cycles[p.second]) +
                    "  share";
  for (std::size_t e : p.shared_edges) out += "  " + edge_string(g, e);
  return out;
}

void run_numeric_checks(const ReactionNetwork& net, const AnalysisOptions& opts, StabilityReport& rep) {
  if (opts.numeric_samples > 0) {
    P0Options p0;
    p0.samples = opts.numeric_samples;
    p0.seed = opts.seed;
    rep.p0_jacobian = is_p0_sampled(net, false, p0);
    rep.p0_modified = is_p0_sampled(net, true, p0);
    if (rep.verdict == VerdictKind::DelayStable &&
        (!rep.p0_modified->consistent || !(rep.p0_modified->min_det > 0.0))) {
      rep.warnings.push_back("sampled -J~ is not P0 with positive determinant despite the graph verdict");
    }
  }
  if (opts.simulate_runs == 0) return;
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> logk(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> utau(0.0, 5.0);
  const auto n = static_cast<Eigen::Index>(net.num_species());
  const auto m = static_cast<Eigen::Index>(net.num_reactions());
  for (std::size_t run = 0; run < opts.simulate_runs; ++run) {
    SpotCheck sc;
    sc.kappa.resize(m);
    sc.tau.resize(m);
    for (Eigen::Index r = 0; r < m; ++r) sc.kappa(r) = std::exp(logk(rng));
    for (Eigen::Index r = 0; r < m; ++r) sc.tau(r) = utau(rng);
    try {
      sc.x_star = find_equilibrium(net, sc.kappa, Eigen::VectorXd::Ones(n));
      const Eigen::MatrixXd J = jacobian(net, {sc.x_star, sc.kappa, {}, {}});
      const double rho = J.eigenvalues().cwiseAbs().maxCoeff();
      const double dt = std::min(0.01, 0.5 / std::max(rho, 1e-12));
      const Eigen::VectorXd start = 1.1 * sc.x_star;
      sc.convergence = converge_to(net, sc.kappa, sc.tau, [start](double) { return start; }, sc.x_star, dt);
      sc.winding = scan_characteristic_roots(net, sc.x_star, sc.kappa, sc.tau, {0.0, 50.0, 0.0, 200.0}).winding;
      if (rep.verdict == VerdictKind::DelayStable && (!sc.convergence.converged || sc.winding != 0)) {
        rep.warnings.push_back("numeric spot check " + std::to_string(run + 1) +
                               " disagrees with the graph verdict");
      }
    } catch (const std::exception& e) {
      sc.error = e.what();
    }
    rep.spot_checks.push_back(std::move(sc));
  }
}

}  // namespace

StabilityReport analyze_network(const ReactionNetwork& net, const AnalysisOptions& opts) {
  StabilityReport rep;
  for (const auto& s : net.species()) rep.species.push_back(s.name);
  for (std::size_t r = 0; r < net.num_reactions(); ++r) rep.reactions.push_back(net.reaction_string(r));
  rep.stoichiometric_rank = stoichiometric_subspace_rank(net);
  if (rep.stoichiometric_rank < net.num_species()) {
    rep.warnings.push_back("stoichiometric subspace has rank " + std::to_string(rep.stoichiometric_rank) +
                           " < " + std::to_string(net.num_species()) + " species");
  }
  StructuralOptions sopts;
  sopts.n1_prime_budget = opts.n1_prime_budget;
  rep.structural = check_structural_conditions(net, sopts);
  const ConditionReport& sc = rep.structural;

  auto decide = [&](VerdictKind v, std::string why) {
    rep.verdict = v;
    rep.reason = std::move(why);
  };

  if (!sc.n2) {
    decide(VerdictKind::PreconditionFailed,
           "N2: reaction " + std::to_string(*sc.one_step_catalysis_witness + 1) + " (" +
               net.reaction_string(*sc.one_step_catalysis_witness) + ") is one-step catalysis");
    run_numeric_checks(net, opts, rep);
    return rep;
  }

  const DsrGraph g = build_dsr(net);
  rep.rnodes = g.rnodes.size();
  rep.edges = g.edges.size();
  for (std::size_t e : bispecies_production_edges(g)) rep.bpe_edges.push_back(edge_string(g, e));

  std::vector<OrientedCycle> cycles;
  try {
    cycles = enumerate_cycles(g, opts.cycle_budget);
  } catch (const CycleBudgetExceeded& e) {
    decide(VerdictKind::NotDecided, std::string("CycleBudget: ") + e.what());
    return rep;
  }
  rep.graph_analyzed = true;
  rep.oriented_cycles = cycles.size();
  for (const auto& group : group_by_edge_set(cycles)) {
    const OrientedCycle& c = cycles[group.front()];
    rep.cycles.push_back({cycle_string(g, c), c.edge_set(), c.c_pairs, c.s_cycle(), c.has_bpe,
                          to_string(c.alternating_product)});
  }
  rep.conditions = check_delay_stability_conditions(g, cycles);
  rep.injectivity = check_injectivity_conditions(g, cycles);
  if (rep.conditions.bpe_cycle) rep.bpe_cycle_witness = cycle_string(g, cycles[*rep.conditions.bpe_cycle]);
  if (rep.conditions.non_s_cycle) {
    const auto& c = cycles[*rep.conditions.non_s_cycle];
    rep.non_s_cycle_witness = cycle_string(g, c) + "  (product " + to_string(c.alternating_product) + ")";
  }
  if (rep.conditions.s_to_r_pair) rep.s_to_r_witness = pair_string(g, cycles, *rep.conditions.s_to_r_pair);

  // Modified graph, evaluated independently of conditions (a)-(c).
  const ModifiedNetwork mod = build_modified_network(net);
  rep.modified_reactions = mod.network.num_reactions();
  try {
    const DsrGraph mg = build_dsr(mod.network);
    rep.modified_rnodes = mg.rnodes.size();
    build_phi(g, mg, mod);
    const auto mcycles = enumerate_cycles(mg, opts.cycle_budget);
    rep.modified_cycles = mcycles.size();
    rep.modified_conditions = check_modified_graph_conditions(mcycles);
    rep.modified_analyzed = true;
  } catch (const CycleBudgetExceeded& e) {
    rep.warnings.push_back(std::string("modified graph not analyzed: ") + e.what());
  } catch (const StructuralMismatch& e) {
    rep.internal_error = std::string("homomorphism check failed: ") + e.what();
  } catch (const OneStepCatalysisError& e) {
    rep.internal_error = std::string("modified network has one-step catalysis: ") + e.what();
  }
  rep.cross_check_applicable = rep.modified_analyzed && sc.n3 && sc.n4;
  if (rep.cross_check_applicable) {
    rep.cross_check_agrees = rep.modified_conditions.all() == rep.conditions.all();
    if (!rep.cross_check_agrees) {
      rep.internal_error = "modified-graph conditions disagree with conditions (a)-(c)";
    }
  }

  if (sc.n1_prime == Verdict3::Undecided && !sc.n1) {
    decide(VerdictKind::NotDecided, "N1': subset search budget exhausted");
  } else if (!sc.n1 && sc.n1_prime == Verdict3::False) {
    std::string names;
    for (std::size_t i : sc.species_without_outflow) names += (names.empty() ? "" : ", ") + net.species()[i].name;
    decide(VerdictKind::PreconditionFailed, "N1 and N1': no generalized outflow for " + names +
                                                " and no reaction subset with positive determinant product");
  } else if (!sc.n3) {
    decide(VerdictKind::PreconditionFailed,
           "N3: reaction " + std::to_string(*sc.too_many_reactants_witness + 1) + " (" +
               net.reaction_string(*sc.too_many_reactants_witness) + ") has more than two reactant species");
  } else if (!sc.n4) {
    decide(VerdictKind::PreconditionFailed,
           "N4: reaction " + std::to_string(*sc.reversible_bispecies_witness + 1) + " (" +
               net.reaction_string(*sc.reversible_bispecies_witness) + ") is bispecies and reversible");
  } else if (!rep.conditions.no_bpe_cycle) {
    decide(VerdictKind::NotDecided, "(a) cycle with a bispecies production edge: " + rep.bpe_cycle_witness);
  } else if (!rep.conditions.all_s_cycles) {
    decide(VerdictKind::NotDecided, "(b) cycle that is not an s-cycle: " + rep.non_s_cycle_witness);
  } else if (!rep.conditions.no_s_to_r) {
    decide(VerdictKind::NotDecided, "(c) S-to-R intersection: " + rep.s_to_r_witness);
  } else {
    decide(VerdictKind::DelayStable, sc.n1 ? "N1-N4 and (a)-(c) hold" : "N1', N2-N4 and (a)-(c) hold");
  }

  run_numeric_checks(net, opts, rep);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json p0_json(const P0Result& p) {
  return {{"consistent", p.consistent},
          {"samples", p.samples},
          {"worst_scaled_minor", p.worst_scaled_minor},
          {"worst_subset_mask", p.worst_subset},
          {"worst_x", vec(p.worst_x)},
          {"worst_kappa", vec(p.worst_kappa)},
          {"diagonal_negative", p.diagonal_negative},
          {"min_det", p.min_det}};
}

json optional_index(const std::optional<std::size_t>& i) {
  return i ? json(*i + 1) : json(nullptr);
}

}  // namespace

std::string report_to_json(const StabilityReport& rep, int indent) {
  const ConditionReport& sc = rep.structural;
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["network"] = {{"species", rep.species},
                  {"reactions", rep.reactions},
                  {"stoichiometric_rank", rep.stoichiometric_rank}};
  j["structural"] = {{"N1", sc.n1},
                     {"N2", sc.n2},
                     {"N3", sc.n3},
                     {"N4", sc.n4},
                     {"N1_prime", std::string(to_string(sc.n1_prime))},
                     {"non_autocatalytic", sc.non_autocatalytic},
                     {"species_without_outflow", sc.species_without_outflow},
                     {"one_step_catalysis_reaction", optional_index(sc.one_step_catalysis_witness)},
                     {"too_many_reactants_reaction", optional_index(sc.too_many_reactants_witness)},
                     {"reversible_bispecies_reaction", optional_index(sc.reversible_bispecies_witness)},
                     {"N1_prime_subset", sc.n1_prime_subset},
                     {"N1_prime_product", to_string(sc.n1_prime_product)},
                     {"N1_prime_subsets_checked", sc.n1_prime_subsets_checked}};
  if (rep.graph_analyzed) {
    json cycles = json::array();
    for (const auto& c : rep.cycles) {
      cycles.push_back({{"path", c.path},
                        {"edges", c.edges},
                        {"c_pairs", c.c_pairs},
                        {"e_cycle", c.c_pairs % 2 == 0},
                        {"s_cycle", c.s_cycle},
                        {"alternating_product", c.product},
                        {"bispecies_production_edge", c.has_bpe}});
    }
    j["dsr"] = {{"rnodes", rep.rnodes},
                {"edges", rep.edges},
                {"oriented_cycles", rep.oriented_cycles},
                {"cycles", cycles},
                {"bispecies_production_edges", rep.bpe_edges},
                {"a_no_bpe_cycle", rep.conditions.no_bpe_cycle},
                {"b_all_s_cycles", rep.conditions.all_s_cycles},
                {"c_no_s_to_r", rep.conditions.no_s_to_r},
                {"witness_a", rep.bpe_cycle_witness},
                {"witness_b", rep.non_s_cycle_witness},
                {"witness_c", rep.s_to_r_witness},
                {"injectivity_all_o_or_s", rep.injectivity.all_cycles_o_or_s},
                {"injectivity_no_e_cycle_s_to_r", rep.injectivity.no_e_cycle_s_to_r}};
  }
  if (rep.modified_analyzed) {
    j["modified"] = {{"reactions", rep.modified_reactions},
                     {"rnodes", rep.modified_rnodes},
                     {"oriented_cycles", rep.modified_cycles},
                     {"all_s_cycles", rep.modified_conditions.all_s_cycles},
                     {"no_s_to_r", rep.modified_conditions.no_s_to_r},
                     {"cross_check_applicable", rep.cross_check_applicable},
                     {"cross_check_agrees", rep.cross_check_agrees}};
  }
  if (rep.p0_jacobian) j["p0_jacobian"] = p0_json(*rep.p0_jacobian);
  if (rep.p0_modified) j["p0_modified_jacobian"] = p0_json(*rep.p0_modified);
  if (!rep.spot_checks.empty()) {
    json runs = json::array();
    for (const auto& s : rep.spot_checks) {
      runs.push_back({{"kappa", vec(s.kappa)},
                      {"tau", vec(s.tau)},
                      {"x_star", vec(s.x_star)},
                      {"converged", s.convergence.converged},
                      {"horizon", s.convergence.horizon},
                      {"final_error", s.convergence.final_error},
                      {"winding", s.winding},
                      {"error", s.error}});
    }
    j["spot_checks"] = runs;
  }
  j["verdict"] = std::string(to_string(rep.verdict));
  j["reason"] = rep.reason;
  j["warnings"] = rep.warnings;
  if (!rep.internal_error.empty()) j["internal_error"] = rep.internal_error;
  return j.dump(indent);
}

std::string report_to_text(const StabilityReport& rep) {
  const ConditionReport& sc = rep.structural;
  auto mark = [](bool b) { return b ? "yes" : "no"; };
  std::ostringstream os;
  os << rep.species.size() << " species, " << rep.reactions.size() << " reactions, rank "
     << rep.stoichiometric_rank << "\n";
  os << "N1 " << mark(sc.n1) << "  N1' " << to_string(sc.n1_prime) << "  N2 " << mark(sc.n2) << "  N3 "
     << mark(sc.n3) << "  N4 " << mark(sc.n4) << "\n";
  if (rep.graph_analyzed) {
    os << "DSR graph: " << rep.rnodes << " R-nodes, " << rep.edges << " edges, " << rep.cycles.size()
       << " cycles\n";
    for (const auto& c : rep.cycles) {
      os << "  " << c.path << "  [" << (c.c_pairs % 2 ? "o" : "e") << (c.s_cycle ? ", s" : "")
         << (c.has_bpe ? ", bpe" : "") << "]\n";
    }
    os << "(a) " << mark(rep.conditions.no_bpe_cycle) << "  (b) " << mark(rep.conditions.all_s_cycles)
       << "  (c) " << mark(rep.conditions.no_s_to_r) << "\n";
  }
  if (rep.modified_analyzed) {
    os << "modified graph: " << rep.modified_rnodes << " R-nodes, " << rep.modified_cycles
       << " oriented cycles, s-cycles " << mark(rep.modified_conditions.all_s_cycles) << ", no S-to-R "
       << mark(rep.modified_conditions.no_s_to_r) << "\n";
  }
  if (rep.p0_jacobian) {
    os << "P0 sampling: -J " << (rep.p0_jacobian->consistent ? "consistent" : "refuted") << ", -J~ "
       << (rep.p0_modified->consistent ? "consistent" : "refuted") << " (" << rep.p0_jacobian->samples
       << " samples)\n";
  }
  for (std::size_t i = 0; i < rep.spot_checks.size(); ++i) {
    const auto& s = rep.spot_checks[i];
    os << "spot check " << i + 1 << ": ";
    if (!s.error.empty()) os << "failed: " << s.error << "\n";
    else
      os << (s.convergence.converged ? "converged" : "not converged") << " by t = " << s.convergence.horizon
         << ", winding " << s.winding << "\n";
  }
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
  if (!rep.internal_error.empty()) os << "internal error: " << rep.internal_error << "\n";
  os << "verdict: " << to_string(rep.verdict) << " (" << rep.reason << ")\n";
  return os.str();
}

}  // namespace dstab
