#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dstab/ddesim.hpp"
#include "dstab/dsr.hpp"
#include "dstab/jacobian.hpp"
#include "dstab/modified.hpp"
#include "dstab/network.hpp"

namespace dstab {

inline constexpr int kReportSchemaVersion = 1;

enum class VerdictKind { DelayStable, NotDecided, PreconditionFailed };
std::string_view to_string(VerdictKind v);

struct AnalysisOptions {
  std::uint64_t cycle_budget = 1'000'000;
  std::uint64_t n1_prime_budget = 1'000'000;
  std::size_t numeric_samples = 0;  // P0 sampling of -J and -J~ when > 0
  std::size_t simulate_runs = 0;    // DDE and root-scan spot checks
  std::uint64_t seed = 1;
};

struct CycleSummary {
  std::string path;
  std::vector<std::size_t> edges;
  std::size_t c_pairs = 0;
  bool s_cycle = false;
  bool has_bpe = false;
  std::string product;
};

struct SpotCheck {
  Eigen::VectorXd kappa;
  Eigen::VectorXd tau;
  Eigen::VectorXd x_star;
  ConvergenceResult convergence;
  int winding = 0;
  std::string error;  // numeric failure, if any
};

struct StabilityReport {
  std::vector<std::string> species;
  std::vector<std::string> reactions;
  std::size_t stoichiometric_rank = 0;
  ConditionReport structural;

  bool graph_analyzed = false;
  std::size_t rnodes = 0;
  std::size_t edges = 0;
  std::vector<CycleSummary> cycles;  // one per edge set
  std::size_t oriented_cycles = 0;
  DelayStabilityConditions conditions;
  InjectivityConditions injectivity;
  std::vector<std::string> bpe_edges;
  // Witnesses rendered as text.
  std::string bpe_cycle_witness;
  std::string non_s_cycle_witness;
  std::string s_to_r_witness;

  bool modified_analyzed = false;
  std::size_t modified_reactions = 0;
  std::size_t modified_rnodes = 0;
  std::size_t modified_cycles = 0;
  ModifiedGraphConditions modified_conditions;
  bool cross_check_applicable = false;  // needs N2-N4
  bool cross_check_agrees = true;

  std::optional<P0Result> p0_jacobian;
  std::optional<P0Result> p0_modified;
  std::vector<SpotCheck> spot_checks;

  VerdictKind verdict = VerdictKind::NotDecided;
  std::string reason;
  std::vector<std::string> warnings;
  std::string internal_error;  // nonempty when a self-check failed
};

// Structural conditions, DSR cycle analysis and verdict, with the
// modified-graph equivalence checked on the side.
StabilityReport analyze_network(const ReactionNetwork& net, const AnalysisOptions& opts = {});

std::string report_to_json(const StabilityReport& rep, int indent = 2);
std::string report_to_text(const StabilityReport& rep);

}  // namespace dstab
