#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dstab/network.hpp"

namespace dstab {

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class JacobianSingular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
// Integration left the nonnegative orthant (beyond tolerance) or blew up.
class IntegrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BoundaryZero : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class WindingInconsistent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Equilibria

struct EquilibriumOptions {
  int max_iterations = 200;
  double tol = 1e-12;  // relative to the largest reaction flux
};

// Damped Newton on the mass-action right-hand side, never leaving x > 0.
Eigen::VectorXd find_equilibrium(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                                 const Eigen::VectorXd& x0, const EquilibriumOptions& opts = {});

// max_r kappa_r x^{y_r}, floored at the smallest normal double.
double flux_scale(const ReactionNetwork& net, const Eigen::VectorXd& kappa, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Delay integration

// Grid, states and right-hand sides; cubic Hermite between grid points.
struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> dx;
  double dt = 0.0;
  std::string method = "rk4 method of steps, cubic Hermite history";

  // Interpolated state for t.front() <= s <= t.back().
  Eigen::VectorXd at(double s) const;
  double min_state() const;
};

struct DdeOptions {
  double dt = 0.01;
  double positivity_tol = 1e-9;
  int breakpoint_depth = 4;  // sums of up to this many delays are mesh points
  bool keep_history = true;  // false: drop grid points older than the largest delay
};

class DdeIntegrator {
 public:
  // history(s) for s <= 0; tau empty means no delays.
  DdeIntegrator(const ReactionNetwork& net, Eigen::VectorXd kappa, Eigen::VectorXd tau,
                History history, DdeOptions opts = {});

  void advance_to(double t_end);
  double time() const { return traj_.t.back(); }
  const Eigen::VectorXd& state() const { return traj_.x.back(); }
  const Trajectory& trajectory() const { return traj_; }
  // history(s) for s <= 0, otherwise the interpolant.
  Eigen::VectorXd value_at(double s) const;
  std::size_t steps_taken() const { return steps_; }

 private:
  Eigen::VectorXd rhs(double t, const Eigen::VectorXd& x) const;
  void step(double h);

  Eigen::MatrixXd reactant_;
  Eigen::MatrixXd product_;
  Eigen::VectorXd kappa_;
  Eigen::VectorXd tau_;
  History history_;
  DdeOptions opts_;
  double h_max_ = 0.0;
  double tau_max_ = 0.0;
  std::vector<double> breakpoints_;
  std::size_t next_break_ = 0;
  std::size_t steps_ = 0;
  Trajectory traj_;
};

Trajectory simulate_dde(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                        const Eigen::VectorXd& tau, const History& history, double t_end, double dt);

struct ConvergenceResult {
  bool converged = false;
  double horizon = 0.0;
  double final_error = 0.0;     // |x(horizon) - x*|_2
  bool monotone_tail = false;   // error nonincreasing over the last half, sampled
  std::size_t steps = 0;
};

// Integrates until |x(T) - x*| < tol, doubling T from t0 up to t_cap.
ConvergenceResult converge_to(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                              const Eigen::VectorXd& tau, const History& history,
                              const Eigen::VectorXd& x_star, double dt, double tol = 1e-6,
                              double t0 = 50.0, double t_cap = 1e4);

// max over grid times of <d, x(t) - theta(0) + sum_r kappa_r (int_{t-tau_r}^t x^{y_r}
// - int_{-tau_r}^0 theta^{y_r}) y_r>. Throws std::invalid_argument when d is
// not orthogonal to every reaction vector or no such d can exist.
double conservation_residual(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                             const Eigen::VectorXd& tau, const Trajectory& traj,
                             const History& history, const Eigen::VectorXd& direction);

// ---------------------------------------------------------------------------
// Root scanning

struct Rect {
  double re_min = 0.0;
  double re_max = 1.0;
  double im_min = 0.0;
  double im_max = 1.0;
};

struct ScanOptions {
  int points_per_edge = 256;
  double max_phase_step = 0.3;  // radians between accepted boundary samples
  int max_refine_depth = 40;
  int max_retries = 3;
  double zero_rel_tol = 1e-10;  // |f| below this times the median boundary |f| counts as a zero
  // A rectangle starting at im = 0 is extended down to -axis_shift so roots
  // on the real axis are enclosed.
  double axis_shift = 1e-3;
  double min_cell = 1e-6;       // subdivision stops at this cell diameter
  double newton_tol = 1e-12;
};

struct RootScanResult {
  Rect rect;  // as actually scanned
  int winding = 0;
  std::vector<std::complex<double>> roots;
  std::vector<double> residuals;  // |f(root)|
  std::size_t boundary_points = 0;
  int retries = 0;
};

using ComplexFn = std::function<std::complex<double>(std::complex<double>)>;

// Winding number of f around the rectangle; when positive, roots are
// localized by subdivision and polished by Newton. Throws BoundaryZero or
// WindingInconsistent.
RootScanResult scan_roots(const ComplexFn& f, Rect rect, const ScanOptions& opts = {});

// Winding number along the boundary only.
int winding_number(const ComplexFn& f, const Rect& rect, const ScanOptions& opts = {},
                   std::size_t* points = nullptr);

RootScanResult scan_characteristic_roots(const ReactionNetwork& net, const Eigen::VectorXd& x_star,
                                         const Eigen::VectorXd& kappa, const Eigen::VectorXd& tau,
                                         const Rect& rect, const ScanOptions& opts = {});

}  // namespace dstab
