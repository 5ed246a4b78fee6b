#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dstab/rational.hpp"

namespace dstab {

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Species {
  std::size_t id = 0;
  std::string name;
};

// Nonnegative combination of species, stored sparsely. Zero coefficients are
// never stored, so support() is exactly the set of keys.
class Complex {
 public:
  Complex() = default;

  // Adds `coeff` (> 0) to the coefficient of `species`.
  void add(std::size_t species, const Rational& coeff);

  Rational coeff(std::size_t species) const;
  bool contains(std::size_t species) const { return coeffs_.count(species) != 0; }
  std::vector<std::size_t> support() const;
  std::size_t support_size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  const std::map<std::size_t, Rational>& terms() const { return coeffs_; }

  Eigen::VectorXd dense(std::size_t n) const;

  friend bool operator==(const Complex& a, const Complex& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

 private:
  std::map<std::size_t, Rational> coeffs_;
};

// Symbol name plus an optional numeric value. An empty name is an anonymous
// parameter (a literal in the source, or an unnamed free rate).
struct RateBinding {
  std::string name;
  std::optional<double> value;
  friend bool operator==(const RateBinding&, const RateBinding&) = default;
};

struct DelayBinding {
  std::string name;
  std::optional<double> value;
  friend bool operator==(const DelayBinding&, const DelayBinding&) = default;
};

struct Origin {
  enum class Kind { Parsed, ModifiedCopy, ModifiedSplit };
  Kind kind = Kind::Parsed;
  std::size_t parent = 0;  // reaction index in the parent network
  std::size_t pivot = 0;   // species index, ModifiedSplit only
  friend bool operator==(const Origin&, const Origin&) = default;
};

struct Reaction {
  Complex reactant;
  Complex product;
  RateBinding rate;
  DelayBinding delay;
  Origin origin;
};

class ReactionNetwork {
 public:
  ReactionNetwork() = default;

  // Throws NetworkError on a duplicate name.
  std::size_t add_species(std::string name);
  // Existing index, or a new species appended at the end.
  std::size_t species_index(std::string_view name);
  std::optional<std::size_t> find_species(std::string_view name) const;

  // Validates reactant != product, known species, rate > 0 and delay >= 0
  // when numeric. Returns the new reaction index.
  std::size_t add_reaction(Reaction r);

  // Records r and s as the two directions of one reversible reaction.
  void pair_reversible(std::size_t r, std::size_t s);
  // Pairs every still-unpaired reaction with the first later unpaired
  // reaction that is its exact reverse.
  void detect_reversible_pairs();
  std::optional<std::size_t> partner(std::size_t r) const;

  std::size_t num_species() const { return species_.size(); }
  std::size_t num_reactions() const { return reactions_.size(); }
  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t r) const { return reactions_.at(r); }
  Reaction& reaction(std::size_t r) { return reactions_.at(r); }
  const std::vector<std::pair<std::size_t, std::size_t>>& reversible_pairs() const {
    return pairs_;
  }

  std::string complex_string(const Complex& c) const;
  std::string reaction_string(std::size_t r) const;

 private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::optional<std::size_t>> partner_;
};

// Species names and order, reaction order, complexes, bindings and pairings.
// Reaction provenance is not compared.
bool structurally_equal(const ReactionNetwork& a, const ReactionNetwork& b);

struct EvalContext {
  Eigen::VectorXd x;
  Eigen::VectorXd kappa;
  Eigen::VectorXd tau;
  std::optional<std::complex<double>> lambda;

  // Sizes match the network; x > 0, kappa > 0, tau >= 0 (tau may be empty).
  void validate(const ReactionNetwork& net) const;
};

// Dense copies of the stoichiometry, one column per reaction.
struct Stoichiometry {
  Eigen::MatrixXd reactant;
  Eigen::MatrixXd product;
};
Stoichiometry stoichiometry(const ReactionNetwork& net);

// x^y for one column of exponents.
double monomial(const Eigen::VectorXd& x, const Eigen::Ref<const Eigen::VectorXd>& exponents);
// d(x^y)/dx_j, zero when y_j == 0.
double monomial_derivative(const Eigen::VectorXd& x,
                           const Eigen::Ref<const Eigen::VectorXd>& exponents, Eigen::Index j);

// ---------------------------------------------------------------------------
// Reaction-level predicates

bool is_autocatalytic(const Reaction& r);
bool is_one_step_catalysis(const Reaction& r);

enum class FlowClass { GeneralizedInflow, GeneralizedOutflow, Interior };
FlowClass classify_flow(const Reaction& r);
std::string_view to_string(FlowClass f);

// ---------------------------------------------------------------------------
// Structural conditions

enum class Verdict3 { True, False, Undecided };
std::string_view to_string(Verdict3 v);

struct ConditionReport {
  bool n1 = false;  // every species has a generalized outflow
  bool n2 = false;  // no one-step catalysis
  bool n3 = false;  // at most two reactant species per reaction
  bool n4 = false;  // every bispecies reaction is irreversible
  Verdict3 n1_prime = Verdict3::Undecided;
  bool non_autocatalytic = false;

  std::vector<std::size_t> species_without_outflow;
  std::optional<std::size_t> one_step_catalysis_witness;
  std::optional<std::size_t> too_many_reactants_witness;
  std::optional<std::size_t> reversible_bispecies_witness;
  std::optional<std::size_t> autocatalytic_witness;

  std::vector<std::size_t> n1_prime_subset;  // satisfying choice of n reactions
  Rational n1_prime_product;                 // det(Y) det(Y - Y') for that subset
  std::uint64_t n1_prime_subsets_checked = 0;
};

struct StructuralOptions {
  std::uint64_t n1_prime_budget = 1'000'000;
};

ConditionReport check_structural_conditions(const ReactionNetwork& net,
                                            const StructuralOptions& opts = {});

// det(y_1..y_n) * det(y_1 - y'_1, .., y_n - y'_n) for the given n reactions.
Rational n1_prime_product(const ReactionNetwork& net, const std::vector<std::size_t>& subset);

// Exact rank of span{y'_r - y_r}.
std::size_t stoichiometric_subspace_rank(const ReactionNetwork& net);

// ---------------------------------------------------------------------------
// Dynamics

// sum_r kappa_r x^{y_r} (y'_r - y_r)
Eigen::VectorXd mass_action_rhs(const ReactionNetwork& net, const EvalContext& ctx);

using History = std::function<Eigen::VectorXd(double)>;

// sum_r kappa_r x(t - tau_r)^{y_r} y'_r - sum_r kappa_r x(t)^{y_r} y_r.
// ctx.x is ignored; the state at t is history(t).
Eigen::VectorXd delay_rhs(const ReactionNetwork& net, const History& history, double t,
                          const EvalContext& ctx);

// ---------------------------------------------------------------------------
// Cyclic sequestration-transmutation family

enum class CstKind { Sequestration, Transmutation };

// R_i is a_i X_i + b_{i+1} X_{i+1} -> 0 or a_i X_i -> b_{i+1} X_{i+1}, with
// X_{n+1} = X_1. When fully_open, every species also gets 0 -> X_i and
// X_i -> 0 (paired as a reversible reaction).
ReactionNetwork make_cst_network(const std::vector<CstKind>& kinds, const std::vector<Rational>& a,
                                 const std::vector<Rational>& b, bool fully_open);

}  // namespace dstab
