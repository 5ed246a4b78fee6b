#include "dstab/modified.hpp"

#include <cmath>
#include <string>

namespace dstab {

ModifiedNetwork build_modified_network(const ReactionNetwork& net) {
  ModifiedNetwork mod;
  const std::size_t n = net.num_species();
  for (const auto& s : net.species()) mod.network.add_species(s.name);

  std::vector<std::optional<std::size_t>> copy_of(net.num_reactions());
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    if (rx.reactant.support_size() <= 1) {
      Reaction c = rx;
      c.origin = {Origin::Kind::ModifiedCopy, r, 0};
      copy_of[r] = mod.network.add_reaction(std::move(c));
      mod.rate_formulas.push_back({r, std::nullopt, std::vector<Rational>(n, 0)});
      continue;
    }
    const std::string base = rx.rate.name.empty() ? "r" + std::to_string(r + 1) : rx.rate.name;
    for (const auto& [i, yi] : rx.reactant.terms()) {
      Reaction s;
      s.reactant.add(i, yi);
      for (const auto& [k, c] : rx.product.terms()) s.product.add(k, c);
      for (const auto& [k, c] : rx.reactant.terms()) {
        if (k != i) s.product.add(k, c);
      }
      s.rate.name = base + "__" + net.species()[i].name;
      s.delay = rx.delay;
      s.origin = {Origin::Kind::ModifiedSplit, r, i};
      mod.network.add_reaction(std::move(s));

      RateFormula f{r, i, std::vector<Rational>(n, 0)};
      for (const auto& [k, c] : rx.reactant.terms()) {
        if (k != i) f.exponents[k] = c;
      }
      mod.rate_formulas.push_back(std::move(f));
    }
  }

  // Copies of paired reactions stay paired; splits never pair.
  for (const auto& [a, b] : net.reversible_pairs()) {
    if (copy_of[a] && copy_of[b]) mod.network.pair_reversible(*copy_of[a], *copy_of[b]);
  }

  const auto& rs = mod.network.reactions();
  for (std::size_t a = 0; a < rs.size(); ++a) {
    for (std::size_t b = a + 1; b < rs.size(); ++b) {
      if (rs[a].reactant == rs[b].reactant && rs[a].product == rs[b].product) {
        mod.duplicates.emplace_back(a, b);
      }
    }
  }
  return mod;
}

Eigen::VectorXd evaluate_modified_rates(const ModifiedNetwork& mod, const Eigen::VectorXd& kappa,
                                        const Eigen::VectorXd& x_star) {
  if (!(kappa.array() > 0.0).all()) throw NetworkError("rate constants must be positive");
  if (!(x_star.array() > 0.0).all()) throw NetworkError("state must be positive");
  const std::size_t m = mod.rate_formulas.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < m; ++r) {
    const RateFormula& f = mod.rate_formulas[r];
    if (f.parent >= static_cast<std::size_t>(kappa.size())) {
      throw NetworkError("rate vector is shorter than the parent network");
    }
    if (f.exponents.size() != static_cast<std::size_t>(x_star.size())) {
      throw NetworkError("state vector has wrong size");
    }
    double v = kappa(static_cast<Eigen::Index>(f.parent));
    for (std::size_t k = 0; k < f.exponents.size(); ++k) {
      if (f.exponents[k] != 0) v *= std::pow(x_star(static_cast<Eigen::Index>(k)), to_double(f.exponents[k]));
    }
    out(static_cast<Eigen::Index>(r)) = v;
  }
  return out;
}

}  // namespace dstab
