#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dstab/network.hpp"

namespace dstab {

// kappa_parent * prod_k (x*_k)^{exponents_k}. Copies have no pivot and an
// all-zero exponent vector.
struct RateFormula {
  std::size_t parent = 0;
  std::optional<std::size_t> pivot;
  std::vector<Rational> exponents;
};

struct ModifiedNetwork {
  ReactionNetwork network;
  std::vector<RateFormula> rate_formulas;  // one per modified reaction
  // Pairs of modified reactions with identical complexes. Informational only:
  // duplicates are kept as separate reactions.
  std::vector<std::pair<std::size_t, std::size_t>> duplicates;
};

// Reactions with at most one reactant species are copied. A reaction with
// reactant y, |supp y| >= 2, becomes one reaction per i in supp y:
//   y_i X_i -> y' + y - y_i X_i
// Order: parent order, then species index.
ModifiedNetwork build_modified_network(const ReactionNetwork& net);

// Numeric modified rate constants. kappa is indexed by parent reaction.
Eigen::VectorXd evaluate_modified_rates(const ModifiedNetwork& mod, const Eigen::VectorXd& kappa,
                                        const Eigen::VectorXd& x_star);

}  // namespace dstab
