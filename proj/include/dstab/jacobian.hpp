#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dstab/network.hpp"

namespace dstab {

// Column j: sum_r kappa_r d(x^{y_r})/dx_j (y'_r - y_r).
Eigen::MatrixXd jacobian(const ReactionNetwork& net, const EvalContext& ctx);

// Column j: sum_r kappa_r d(x^{y_r})/dx_j (exp(-lambda tau_r) y'_r - y_r).
// An empty ctx.tau means no delays; a missing ctx.lambda means lambda = 0.
Eigen::MatrixXcd jlambda(const ReactionNetwork& net, const EvalContext& ctx);

// Column j: sum_r kappa_r d(x^{y_r})/dx_j (y'_r + y_r with its j-th entry
// negated). Agrees with the Jacobian on the diagonal.
Eigen::MatrixXd modified_jacobian(const ReactionNetwork& net, const EvalContext& ctx);

// max |modified_jacobian(net) - jacobian(modified net, modified rates)| at x*.
double verify_modified_correspondence(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                                      const Eigen::VectorXd& x_star);

class MatrixTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Determinants of all principal submatrices, indexed by the bitmask of the
// retained rows/columns. Entry 0 (the empty minor) is 1.
template <class Derived>
std::vector<typename Derived::Scalar> principal_minors(const Eigen::MatrixBase<Derived>& m,
                                                       std::size_t limit = 16) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() != m.cols()) throw std::invalid_argument("principal_minors: matrix is not square");
  const auto n = static_cast<std::size_t>(m.rows());
  if (n > limit) throw MatrixTooLarge("principal_minors: dimension exceeds limit");
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<Scalar> out(count);
  out[0] = Scalar(1);
  std::vector<Eigen::Index> idx;
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    idx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint32_t{1} << i)) idx.push_back(static_cast<Eigen::Index>(i));
    }
    Mat sub = m(idx, idx);
    out[mask] = sub.rows() == 1 ? sub(0, 0) : Scalar(sub.partialPivLu().determinant());
  }
  return out;
}

struct P0Options {
  std::size_t samples = 1000;
  double lo = 1e-2;  // log-uniform range for every x_i and kappa_r
  double hi = 1e2;
  double tol = 1e-9;  // a k x k minor may dip to -tol * max|a_ij|^k
  std::uint64_t seed = 1;
};

struct P0Result {
  bool consistent = true;  // no sampled violation; sampling proves nothing
  std::size_t samples = 0;
  double worst_scaled_minor = 0.0;  // min over samples and subsets of minor / max|a_ij|^k
  std::uint32_t worst_subset = 0;
  Eigen::VectorXd worst_x;
  Eigen::VectorXd worst_kappa;
  bool diagonal_negative = true;  // every sampled matrix (J or J~) had a strictly negative diagonal
  double min_det = 0.0;           // smallest det(-A) seen
};

// Samples (x, kappa) and tests -J (or -J~ when use_modified) for P0.
P0Result is_p0_sampled(const ReactionNetwork& net, bool use_modified, const P0Options& opts = {});

// det(J_lambda - lambda I).
std::complex<double> char_fn(const ReactionNetwork& net, const Eigen::VectorXd& x_star,
                             const Eigen::VectorXd& kappa, const Eigen::VectorXd& tau,
                             std::complex<double> lambda);

}  // namespace dstab
