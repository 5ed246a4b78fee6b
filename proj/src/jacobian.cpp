#include "dstab/jacobian.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dstab/modified.hpp"

namespace dstab {

Eigen::MatrixXd jacobian(const ReactionNetwork& net, const EvalContext& ctx) {
  ctx.validate(net);
  const auto st = stoichiometry(net);
  const auto n = st.reactant.rows();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < st.reactant.cols(); ++r) {
    const Eigen::VectorXd v = st.product.col(r) - st.reactant.col(r);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = monomial_derivative(ctx.x, st.reactant.col(r), j);
      if (d != 0.0) J.col(j) += ctx.kappa(r) * d * v;
    }
  }
  return J;
}

Eigen::MatrixXcd jlambda(const ReactionNetwork& net, const EvalContext& ctx) {
  ctx.validate(net);
  const auto st = stoichiometry(net);
  const auto n = st.reactant.rows();
  const std::complex<double> lambda = ctx.lambda.value_or(0.0);
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index r = 0; r < st.reactant.cols(); ++r) {
    const double tau = ctx.tau.size() ? ctx.tau(r) : 0.0;
    const std::complex<double> delay = tau == 0.0 ? 1.0 : std::exp(-lambda * tau);
    const Eigen::VectorXcd v =
        delay * st.product.col(r).cast<std::complex<double>>() - st.reactant.col(r).cast<std::complex<double>>();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = monomial_derivative(ctx.x, st.reactant.col(r), j);
      if (d != 0.0) J.col(j) += (ctx.kappa(r) * d) * v;
    }
  }
  return J;
}

Eigen::MatrixXd modified_jacobian(const ReactionNetwork& net, const EvalContext& ctx) {
  ctx.validate(net);
  const auto st = stoichiometry(net);
  const auto n = st.reactant.rows();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < st.reactant.cols(); ++r) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = monomial_derivative(ctx.x, st.reactant.col(r), j);
      if (d == 0.0) continue;
      Eigen::VectorXd ytilde = st.reactant.col(r);
      ytilde(j) = -ytilde(j);
      J.col(j) += ctx.kappa(r) * d * (st.product.col(r) + ytilde);
    }
  }
  return J;
}

double verify_modified_correspondence(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                                      const Eigen::VectorXd& x_star) {
  const ModifiedNetwork mod = build_modified_network(net);
  const Eigen::MatrixXd lhs = modified_jacobian(net, {x_star, kappa, {}, {}});
  const Eigen::MatrixXd rhs =
      jacobian(mod.network, {x_star, evaluate_modified_rates(mod, kappa, x_star), {}, {}});
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

P0Result is_p0_sampled(const ReactionNetwork& net, bool use_modified, const P0Options& opts) {
  if (opts.samples < 1) throw std::invalid_argument("is_p0_sampled: need at least one sample");
  if (!(opts.lo > 0.0 && opts.hi >= opts.lo)) throw std::invalid_argument("is_p0_sampled: bad range");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(std::log(opts.lo), std::log(opts.hi));
  const auto n = static_cast<Eigen::Index>(net.num_species());
  const auto m = static_cast<Eigen::Index>(net.num_reactions());

  P0Result res;
  res.min_det = std::numeric_limits<double>::infinity();
  res.worst_scaled_minor = std::numeric_limits<double>::infinity();
  EvalContext ctx{Eigen::VectorXd(n), Eigen::VectorXd(m), {}, {}};
  for (std::size_t s = 0; s < opts.samples; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) ctx.x(i) = std::exp(u(rng));
    for (Eigen::Index r = 0; r < m; ++r) ctx.kappa(r) = std::exp(u(rng));
    const Eigen::MatrixXd A = -(use_modified ? modified_jacobian(net, ctx) : jacobian(net, ctx));
    ++res.samples;
    if (n == 0) continue;
    if (!(A.diagonal().array() > 0.0).all()) res.diagonal_negative = false;
    const double scale = std::max(A.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const auto minors = principal_minors(A);
    for (std::uint32_t mask = 1; mask < minors.size(); ++mask) {
      const double scaled = minors[mask] / std::pow(scale, std::popcount(mask));
      if (scaled < res.worst_scaled_minor) {
        res.worst_scaled_minor = scaled;
        res.worst_subset = mask;
        res.worst_x = ctx.x;
        res.worst_kappa = ctx.kappa;
      }
    }
    res.min_det = std::min(res.min_det, minors.back());
  }
  res.consistent = !(res.worst_scaled_minor < -opts.tol);
  return res;
}

std::complex<double> char_fn(const ReactionNetwork& net, const Eigen::VectorXd& x_star,
                             const Eigen::VectorXd& kappa, const Eigen::VectorXd& tau,
                             std::complex<double> lambda) {
  const Eigen::MatrixXcd J = jlambda(net, {x_star, kappa, tau, lambda});
  const Eigen::MatrixXcd M = J - lambda * Eigen::MatrixXcd::Identity(J.rows(), J.cols());
  if (M.rows() == 0) return 1.0;
  return M.partialPivLu().determinant();
}

}  // namespace dstab
