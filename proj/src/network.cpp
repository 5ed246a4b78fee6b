#include "dstab/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dstab/exact.hpp"

namespace dstab {

// ---------------------------------------------------------------------------
// Complex

void Complex::add(std::size_t species, const Rational& coeff) {
  if (coeff <= 0) throw NetworkError("stoichiometric coefficient must be positive");
  coeffs_[species] += coeff;
}

Rational Complex::coeff(std::size_t species) const {
  auto it = coeffs_.find(species);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

std::vector<std::size_t> Complex::support() const {
  std::vector<std::size_t> out;
  out.reserve(coeffs_.size());
  for (const auto& [s, c] : coeffs_) out.push_back(s);
  return out;
}

Eigen::VectorXd Complex::dense(std::size_t n) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [s, c] : coeffs_) v(static_cast<Eigen::Index>(s)) = to_double(c);
  return v;
}

// ---------------------------------------------------------------------------
// ReactionNetwork

std::size_t ReactionNetwork::add_species(std::string name) {
  if (find_species(name)) throw NetworkError("duplicate species '" + name + "'");
  std::size_t id = species_.size();
  species_.push_back({id, std::move(name)});
  return id;
}

std::size_t ReactionNetwork::species_index(std::string_view name) {
  if (auto s = find_species(name)) return *s;
  return add_species(std::string(name));
}

std::optional<std::size_t> ReactionNetwork::find_species(std::string_view name) const {
  for (const auto& s : species_) {
    if (s.name == name) return s.id;
  }
  return std::nullopt;
}

std::size_t ReactionNetwork::add_reaction(Reaction r) {
  for (const Complex* c : {&r.reactant, &r.product}) {
    for (const auto& [s, coeff] : c->terms()) {
      if (s >= species_.size()) throw NetworkError("reaction references unknown species");
    }
  }
  if (r.reactant == r.product) throw NetworkError("reactant complex equals product complex");
  if (r.rate.value && !(*r.rate.value > 0.0 && std::isfinite(*r.rate.value))) {
    throw NetworkError("rate constant must be positive");
  }
  if (r.delay.value && !(*r.delay.value >= 0.0 && std::isfinite(*r.delay.value))) {
    throw NetworkError("delay must be nonnegative");
  }
  reactions_.push_back(std::move(r));
  partner_.emplace_back();
  return reactions_.size() - 1;
}

void ReactionNetwork::pair_reversible(std::size_t r, std::size_t s) {
  if (r >= reactions_.size() || s >= reactions_.size() || r == s) {
    throw NetworkError("invalid reversible pair");
  }
  if (partner_[r] || partner_[s]) throw NetworkError("reaction already belongs to a reversible pair");
  const auto& a = reactions_[r];
  const auto& b = reactions_[s];
  if (a.reactant != b.product || a.product != b.reactant) {
    throw NetworkError("reversible pair members are not mutual reverses");
  }
  partner_[r] = s;
  partner_[s] = r;
  pairs_.emplace_back(std::min(r, s), std::max(r, s));
  std::sort(pairs_.begin(), pairs_.end());
}

void ReactionNetwork::detect_reversible_pairs() {
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    if (partner_[r]) continue;
    for (std::size_t s = r + 1; s < reactions_.size(); ++s) {
      if (partner_[s]) continue;
      if (reactions_[r].reactant == reactions_[s].product &&
          reactions_[r].product == reactions_[s].reactant) {
        pair_reversible(r, s);
        break;
      }
    }
  }
}

std::optional<std::size_t> ReactionNetwork::partner(std::size_t r) const { return partner_.at(r); }

std::string ReactionNetwork::complex_string(const Complex& c) const {
  if (c.empty()) return "0";
  std::string out;
  for (const auto& [s, coeff] : c.terms()) {
    if (!out.empty()) out += " + ";
    if (coeff != 1) out += to_string(coeff) + " ";
    out += species_.at(s).name;
  }
  return out;
}

std::string ReactionNetwork::reaction_string(std::size_t r) const {
  const auto& rx = reactions_.at(r);
  return complex_string(rx.reactant) + " -> " + complex_string(rx.product);
}

bool structurally_equal(const ReactionNetwork& a, const ReactionNetwork& b) {
  if (a.num_species() != b.num_species() || a.num_reactions() != b.num_reactions()) return false;
  for (std::size_t i = 0; i < a.num_species(); ++i) {
    if (a.species()[i].name != b.species()[i].name) return false;
  }
  for (std::size_t r = 0; r < a.num_reactions(); ++r) {
    const auto& x = a.reaction(r);
    const auto& y = b.reaction(r);
    if (x.reactant != y.reactant || x.product != y.product || !(x.rate == y.rate) ||
        !(x.delay == y.delay)) {
      return false;
    }
  }
  return a.reversible_pairs() == b.reversible_pairs();
}

// ---------------------------------------------------------------------------
// Numeric helpers

void EvalContext::validate(const ReactionNetwork& net) const {
  const auto n = static_cast<Eigen::Index>(net.num_species());
  const auto m = static_cast<Eigen::Index>(net.num_reactions());
  if (x.size() != n) throw NetworkError("state vector has wrong size");
  if (kappa.size() != m) throw NetworkError("rate vector has wrong size");
  if (tau.size() != 0 && tau.size() != m) throw NetworkError("delay vector has wrong size");
  if (!(x.array() > 0.0).all()) throw NetworkError("state must be positive");
  if (!(kappa.array() > 0.0).all()) throw NetworkError("rate constants must be positive");
  if (tau.size() != 0 && !(tau.array() >= 0.0).all()) throw NetworkError("delays must be nonnegative");
}

Stoichiometry stoichiometry(const ReactionNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.num_species());
  const auto m = static_cast<Eigen::Index>(net.num_reactions());
  Stoichiometry s{Eigen::MatrixXd::Zero(n, m), Eigen::MatrixXd::Zero(n, m)};
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& rx = net.reaction(static_cast<std::size_t>(r));
    s.reactant.col(r) = rx.reactant.dense(net.num_species());
    s.product.col(r) = rx.product.dense(net.num_species());
  }
  return s;
}

double monomial(const Eigen::VectorXd& x, const Eigen::Ref<const Eigen::VectorXd>& exponents) {
  double v = 1.0;
  for (Eigen::Index i = 0; i < exponents.size(); ++i) {
    const double e = exponents(i);
    if (e == 0.0) continue;
    v *= (e == 1.0) ? x(i) : std::pow(x(i), e);
  }
  return v;
}

double monomial_derivative(const Eigen::VectorXd& x,
                           const Eigen::Ref<const Eigen::VectorXd>& exponents, Eigen::Index j) {
  const double ej = exponents(j);
  if (ej == 0.0) return 0.0;
  double v = ej * ((ej == 1.0) ? 1.0 : std::pow(x(j), ej - 1.0));
  for (Eigen::Index i = 0; i < exponents.size(); ++i) {
    if (i == j || exponents(i) == 0.0) continue;
    v *= (exponents(i) == 1.0) ? x(i) : std::pow(x(i), exponents(i));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Reaction predicates

bool is_autocatalytic(const Reaction& r) {
  for (const auto& [s, c] : r.reactant.terms()) {
    if (r.product.contains(s) && r.product.coeff(s) > c) return true;
  }
  return false;
}

bool is_one_step_catalysis(const Reaction& r) {
  for (const auto& [s, c] : r.reactant.terms()) {
    if (r.product.contains(s)) return true;
  }
  return false;
}

FlowClass classify_flow(const Reaction& r) {
  if (r.reactant.empty() && r.product.support_size() == 1) return FlowClass::GeneralizedInflow;
  if (r.product.empty() && r.reactant.support_size() == 1) return FlowClass::GeneralizedOutflow;
  return FlowClass::Interior;
}

std::string_view to_string(FlowClass f) {
  switch (f) {
    case FlowClass::GeneralizedInflow: return "generalized-inflow";
    case FlowClass::GeneralizedOutflow: return "generalized-outflow";
    case FlowClass::Interior: return "interior";
  }
  return "?";
}

std::string_view to_string(Verdict3 v) {
  switch (v) {
    case Verdict3::True: return "true";
    case Verdict3::False: return "false";
    case Verdict3::Undecided: return "undecided";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Structural conditions

namespace {

RationalMatrix reactant_columns(const ReactionNetwork& net, const std::vector<std::size_t>& subset,
                                bool difference) {
  const auto n = static_cast<Eigen::Index>(net.num_species());
  RationalMatrix m = RationalMatrix::Zero(n, static_cast<Eigen::Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const auto& rx = net.reaction(subset[k]);
    for (const auto& [s, c] : rx.reactant.terms()) m(static_cast<Eigen::Index>(s), k) += c;
    if (difference) {
      for (const auto& [s, c] : rx.product.terms()) m(static_cast<Eigen::Index>(s), k) -= c;
    }
  }
  return m;
}

// Advances `idx` (strictly increasing, values < m) to the next combination.
bool next_combination(std::vector<std::size_t>& idx, std::size_t m) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < m - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

Rational n1_prime_product(const ReactionNetwork& net, const std::vector<std::size_t>& subset) {
  if (subset.size() != net.num_species()) {
    throw NetworkError("N1' product needs exactly one reaction per species");
  }
  Rational d1 = exact_determinant(reactant_columns(net, subset, false));
  if (d1 == 0) return 0;
  return d1 * exact_determinant(reactant_columns(net, subset, true));
}

ConditionReport check_structural_conditions(const ReactionNetwork& net,
                                            const StructuralOptions& opts) {
  ConditionReport rep;
  const std::size_t n = net.num_species();

  std::vector<bool> has_outflow(n, false);
  for (const auto& rx : net.reactions()) {
    if (classify_flow(rx) == FlowClass::GeneralizedOutflow) has_outflow[rx.reactant.support()[0]] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_outflow[i]) rep.species_without_outflow.push_back(i);
  }
  rep.n1 = rep.species_without_outflow.empty();

  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    const auto& rx = net.reaction(r);
    if (!rep.one_step_catalysis_witness && is_one_step_catalysis(rx)) rep.one_step_catalysis_witness = r;
    if (!rep.autocatalytic_witness && is_autocatalytic(rx)) rep.autocatalytic_witness = r;
    if (!rep.too_many_reactants_witness && rx.reactant.support_size() > 2) {
      rep.too_many_reactants_witness = r;
    }
    const bool bispecies_reversible =
        net.partner(r) && (rx.reactant.support_size() == 2 ||
                           net.reaction(*net.partner(r)).reactant.support_size() == 2);
    if (!rep.reversible_bispecies_witness && bispecies_reversible && rx.reactant.support_size() == 2) {
      rep.reversible_bispecies_witness = r;
    }
  }
  rep.n2 = !rep.one_step_catalysis_witness;
  rep.n3 = !rep.too_many_reactants_witness;
  rep.n4 = !rep.reversible_bispecies_witness;
  rep.non_autocatalytic = !rep.autocatalytic_witness;

  // N1': exhaustive search over n-subsets of reactions with a nonzero
  // reactant complex (a zero column kills det(Y)).
  std::vector<std::size_t> candidates;
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    if (!net.reaction(r).reactant.empty()) candidates.push_back(r);
  }
  if (n == 0) {
    rep.n1_prime = Verdict3::True;
    rep.n1_prime_product = 1;
    return rep;
  }
  if (candidates.size() < n) {
    rep.n1_prime = Verdict3::False;
    return rep;
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rep.n1_prime = Verdict3::False;
  std::vector<std::size_t> subset(n);
  do {
    if (rep.n1_prime_subsets_checked >= opts.n1_prime_budget) {
      rep.n1_prime = Verdict3::Undecided;
      break;
    }
    ++rep.n1_prime_subsets_checked;
    for (std::size_t k = 0; k < n; ++k) subset[k] = candidates[idx[k]];
    Rational p = n1_prime_product(net, subset);
    if (p > 0) {
      rep.n1_prime = Verdict3::True;
      rep.n1_prime_subset = subset;
      rep.n1_prime_product = p;
      break;
    }
  } while (next_combination(idx, candidates.size()));
  return rep;
}

std::size_t stoichiometric_subspace_rank(const ReactionNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.num_species());
  const auto m = static_cast<Eigen::Index>(net.num_reactions());
  RationalMatrix s = RationalMatrix::Zero(n, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& rx = net.reaction(static_cast<std::size_t>(r));
    for (const auto& [i, c] : rx.product.terms()) s(static_cast<Eigen::Index>(i), r) += c;
    for (const auto& [i, c] : rx.reactant.terms()) s(static_cast<Eigen::Index>(i), r) -= c;
  }
  return static_cast<std::size_t>(exact_rank(std::move(s)));
}

// ---------------------------------------------------------------------------
// Dynamics

Eigen::VectorXd mass_action_rhs(const ReactionNetwork& net, const EvalContext& ctx) {
  ctx.validate(net);
  const auto st = stoichiometry(net);
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(ctx.x.size());
  for (Eigen::Index r = 0; r < st.reactant.cols(); ++r) {
    dx += ctx.kappa(r) * monomial(ctx.x, st.reactant.col(r)) * (st.product.col(r) - st.reactant.col(r));
  }
  return dx;
}

Eigen::VectorXd delay_rhs(const ReactionNetwork& net, const History& history, double t,
                          const EvalContext& ctx) {
  const auto st = stoichiometry(net);
  const Eigen::VectorXd now = history(t);
  if (now.size() != static_cast<Eigen::Index>(net.num_species())) {
    throw NetworkError("history returned a vector of the wrong size");
  }
  if (ctx.kappa.size() != st.reactant.cols()) throw NetworkError("rate vector has wrong size");
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(now.size());
  for (Eigen::Index r = 0; r < st.reactant.cols(); ++r) {
    const double tau = ctx.tau.size() ? ctx.tau(r) : 0.0;
    if (tau < 0.0) throw NetworkError("delays must be nonnegative");
    const double produced = tau == 0.0 ? monomial(now, st.reactant.col(r))
                                       : monomial(history(t - tau), st.reactant.col(r));
    dx += ctx.kappa(r) * (produced * st.product.col(r) - monomial(now, st.reactant.col(r)) * st.reactant.col(r));
  }
  return dx;
}

// ---------------------------------------------------------------------------
// CST family

ReactionNetwork make_cst_network(const std::vector<CstKind>& kinds, const std::vector<Rational>& a,
                                 const std::vector<Rational>& b, bool fully_open) {
  const std::size_t n = kinds.size();
  if (a.size() != n || b.size() != n) throw NetworkError("CST: kinds, a and b must have equal length");
  if (n < 2) throw NetworkError("CST: need at least two species");
  ReactionNetwork net;
  for (std::size_t i = 0; i < n; ++i) net.add_species("X" + std::to_string(i + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = (i + 1) % n;
    Reaction r;
    r.reactant.add(i, a[i]);
    if (kinds[i] == CstKind::Sequestration) {
      r.reactant.add(next, b[next]);
    } else {
      r.product.add(next, b[next]);
    }
    r.rate.name = "k" + std::to_string(i + 1);
    net.add_reaction(std::move(r));
  }
  if (fully_open) {
    for (std::size_t i = 0; i < n; ++i) {
      Reaction in, out;
      in.product.add(i, 1);
      out.reactant.add(i, 1);
      in.rate.name = "kin" + std::to_string(i + 1);
      out.rate.name = "kout" + std::to_string(i + 1);
      auto ri = net.add_reaction(std::move(in));
      auto ro = net.add_reaction(std::move(out));
      net.pair_reversible(ri, ro);
    }
  }
  return net;
}

}  // namespace dstab
