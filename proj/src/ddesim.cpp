#include "dstab/ddesim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dstab/exact.hpp"
#include "dstab/jacobian.hpp"

namespace dstab {

// ---------------------------------------------------------------------------
// Equilibria

double flux_scale(const ReactionNetwork& net, const Eigen::VectorXd& kappa, const Eigen::VectorXd& x) {
  const auto st = stoichiometry(net);
  double s = std::numeric_limits<double>::min();
  for (Eigen::Index r = 0; r < st.reactant.cols(); ++r) {
    s = std::max(s, kappa(r) * monomial(x, st.reactant.col(r)));
  }
  return s;
}

Eigen::VectorXd find_equilibrium(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                                 const Eigen::VectorXd& x0, const EquilibriumOptions& opts) {
  EvalContext ctx{x0, kappa, {}, {}};
  ctx.validate(net);
  auto residual = [&](const Eigen::VectorXd& x) {
    return mass_action_rhs(net, {x, kappa, {}, {}});
  };
  Eigen::VectorXd x = x0;
  Eigen::VectorXd F = residual(x);
  for (int it = 0; it <= opts.max_iterations; ++it) {
    if (F.lpNorm<Eigen::Infinity>() < opts.tol * flux_scale(net, kappa, x)) return x;
    if (it == opts.max_iterations) break;

    const Eigen::MatrixXd J = jacobian(net, {x, kappa, {}, {}});
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) {
      std::ostringstream os;
      os << "Jacobian is singular at iteration " << it << " (rank " << lu.rank() << " of "
         << J.rows() << ")";
      throw JacobianSingular(os.str());
    }
    Eigen::VectorXd dx = lu.solve(-F);

    // Never shrink a coordinate by more than 90% in one step.
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (dx(i) < 0.0) alpha = std::min(alpha, 0.9 * x(i) / -dx(i));
    }
    const double f0 = F.norm();
    bool accepted = false;
    for (; alpha > 1e-12; alpha *= 0.5) {
      Eigen::VectorXd xn = x + alpha * dx;
      Eigen::VectorXd Fn = residual(xn);
      if (Fn.allFinite() && Fn.norm() < (1.0 - 1e-4 * alpha) * f0) {
        x = std::move(xn);
        F = std::move(Fn);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Pseudo-transient step: follows the flow when Newton stalls.
      const double delta = 1.0 / std::max(J.cwiseAbs().maxCoeff(), 1e-300);
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(J.rows(), J.cols()) / delta - J;
      Eigen::VectorXd step = A.partialPivLu().solve(F);
      double beta = 1.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (step(i) < 0.0) beta = std::min(beta, 0.5 * x(i) / -step(i));
      }
      x += beta * step;
      F = residual(x);
    }
  }
  std::ostringstream os;
  os << "Newton did not converge in " << opts.max_iterations << " iterations (residual "
     << F.lpNorm<Eigen::Infinity>() << ")";
  throw NonConvergence(os.str());
}

// ---------------------------------------------------------------------------
// Trajectory

Eigen::VectorXd Trajectory::at(double s) const {
  if (t.empty()) throw std::out_of_range("empty trajectory");
  const double slack = 1e-12 * std::max(1.0, std::abs(t.back()));
  if (s < t.front() - slack || s > t.back() + slack) {
    throw std::out_of_range("trajectory evaluated outside [" + std::to_string(t.front()) + ", " +
                            std::to_string(t.back()) + "]");
  }
  if (t.size() == 1) return x.front();
  auto it = std::upper_bound(t.begin(), t.end(), s);
  std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
  i = std::min(i, t.size() - 2);
  const double h = t[i + 1] - t[i];
  const double th = std::clamp((s - t[i]) / h, 0.0, 1.0);
  const double th2 = th * th;
  const double th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * x[i] + (th3 - 2 * th2 + th) * h * dx[i] +
         (-2 * th3 + 3 * th2) * x[i + 1] + (th3 - th2) * h * dx[i + 1];
}

double Trajectory::min_state() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : x) {
    if (v.size()) m = std::min(m, v.minCoeff());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Integrator

DdeIntegrator::DdeIntegrator(const ReactionNetwork& net, Eigen::VectorXd kappa, Eigen::VectorXd tau,
                             History history, DdeOptions opts)
    : kappa_(std::move(kappa)), tau_(std::move(tau)), history_(std::move(history)), opts_(opts) {
  const auto st = stoichiometry(net);
  reactant_ = st.reactant;
  product_ = st.product;
  const auto m = reactant_.cols();
  if (kappa_.size() != m) throw std::invalid_argument("rate vector has wrong size");
  if (tau_.size() == 0) tau_ = Eigen::VectorXd::Zero(m);
  if (tau_.size() != m) throw std::invalid_argument("delay vector has wrong size");
  if (!(kappa_.array() > 0.0).all()) throw std::invalid_argument("rate constants must be positive");
  if (!(tau_.array() >= 0.0).all()) throw std::invalid_argument("delays must be nonnegative");
  if (!(opts_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!history_) throw std::invalid_argument("missing history");

  h_max_ = opts_.dt;
  std::vector<double> delays;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tau_(r) > 0.0) {
      h_max_ = std::min(h_max_, tau_(r));
      tau_max_ = std::max(tau_max_, tau_(r));
      delays.push_back(tau_(r));
    }
  }
  std::sort(delays.begin(), delays.end());
  delays.erase(std::unique(delays.begin(), delays.end()), delays.end());

  // Derivative discontinuities propagate to sums of delays.
  std::vector<double> level{0.0};
  for (int d = 0; d < opts_.breakpoint_depth && !delays.empty(); ++d) {
    std::vector<double> next;
    for (double b : level) {
      for (double tau : delays) next.push_back(b + tau);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    breakpoints_.insert(breakpoints_.end(), next.begin(), next.end());
    level = std::move(next);
  }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  std::vector<double> merged;
  for (double b : breakpoints_) {
    if (merged.empty() || b - merged.back() > 1e-12 * std::max(1.0, b)) merged.push_back(b);
  }
  breakpoints_ = std::move(merged);

  const Eigen::VectorXd x0 = history_(0.0);
  if (x0.size() != reactant_.rows()) throw std::invalid_argument("history has wrong dimension");
  if (!x0.allFinite() || (x0.size() && x0.minCoeff() < 0.0)) {
    throw std::invalid_argument("initial state must be finite and nonnegative");
  }
  traj_.dt = opts_.dt;
  traj_.t.push_back(0.0);
  traj_.x.push_back(x0);
  traj_.dx.push_back(rhs(0.0, x0));
}

Eigen::VectorXd DdeIntegrator::value_at(double s) const {
  if (s <= 0.0) return history_(s);
  return traj_.at(s);
}

Eigen::VectorXd DdeIntegrator::rhs(double t, const Eigen::VectorXd& x) const {
  const Eigen::VectorXd xc = x.cwiseMax(0.0);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index r = 0; r < reactant_.cols(); ++r) {
    const double now = kappa_(r) * monomial(xc, reactant_.col(r));
    double produced = now;
    if (tau_(r) > 0.0) {
      produced = kappa_(r) * monomial(value_at(t - tau_(r)).cwiseMax(0.0), reactant_.col(r));
    }
    out += produced * product_.col(r) - now * reactant_.col(r);
  }
  return out;
}

void DdeIntegrator::step(double t_new) {
  const double t = traj_.t.back();
  const double h = t_new - t;
  const Eigen::VectorXd& x = traj_.x.back();
  const Eigen::VectorXd k1 = traj_.dx.back();
  const Eigen::VectorXd k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = rhs(t_new, x + h * k3);
  Eigen::VectorXd xn = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!xn.allFinite()) {
    throw IntegrationFailure("non-finite state at t = " + std::to_string(t_new));
  }
  if (xn.size() && xn.minCoeff() < -opts_.positivity_tol) {
    Eigen::Index i = 0;
    const double v = xn.minCoeff(&i);
    std::ostringstream os;
    os << "state left the nonnegative orthant at t = " << t_new << " (component " << i << " = " << v
       << ")";
    throw IntegrationFailure(os.str());
  }
  // Delayed arguments at t_new are at most t, so the derivative can be
  // evaluated before the new point is stored.
  Eigen::VectorXd dxn = rhs(t_new, xn);
  traj_.t.push_back(t_new);
  traj_.x.push_back(std::move(xn));
  traj_.dx.push_back(std::move(dxn));
  ++steps_;

  if (!opts_.keep_history && traj_.t.size() > 8192) {
    const double keep_from = t_new - tau_max_ - 2.0 * h_max_;
    auto it = std::lower_bound(traj_.t.begin(), traj_.t.end(), keep_from);
    std::size_t drop = static_cast<std::size_t>(it - traj_.t.begin());
    drop = drop > 0 ? drop - 1 : 0;
    if (drop > traj_.t.size() / 2) {
      traj_.t.erase(traj_.t.begin(), traj_.t.begin() + static_cast<std::ptrdiff_t>(drop));
      traj_.x.erase(traj_.x.begin(), traj_.x.begin() + static_cast<std::ptrdiff_t>(drop));
      traj_.dx.erase(traj_.dx.begin(), traj_.dx.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
}

void DdeIntegrator::advance_to(double t_end) {
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  while (time() < t_end - eps) {
    const double t = time();
    while (next_break_ < breakpoints_.size() && breakpoints_[next_break_] <= t + eps) ++next_break_;
    double target = t_end;
    if (next_break_ < breakpoints_.size() && breakpoints_[next_break_] < target) {
      target = breakpoints_[next_break_];
    }
    const auto n = static_cast<long>(std::ceil((target - t) / h_max_ - 1e-9));
    const double h = (target - t) / static_cast<double>(std::max(n, 1L));
    for (long k = 1; k < n; ++k) step(t + static_cast<double>(k) * h);
    step(target);
  }
}

Trajectory simulate_dde(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                        const Eigen::VectorXd& tau, const History& history, double t_end, double dt) {
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  DdeOptions opts;
  opts.dt = dt;
  DdeIntegrator integ(net, kappa, tau, history, opts);
  integ.advance_to(t_end);
  return integ.trajectory();
}

ConvergenceResult converge_to(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                              const Eigen::VectorXd& tau, const History& history,
                              const Eigen::VectorXd& x_star, double dt, double tol, double t0,
                              double t_cap) {
  DdeOptions opts;
  opts.dt = dt;
  opts.keep_history = false;
  DdeIntegrator integ(net, kappa, tau, history, opts);
  ConvergenceResult res;
  constexpr int kChunks = 32;
  double T = t0;
  std::vector<double> errors;
  while (true) {
    errors.clear();
    const double start = integ.time();
    for (int c = 1; c <= kChunks; ++c) {
      integ.advance_to(start + (T - start) * c / kChunks);
      errors.push_back((integ.state() - x_star).norm());
    }
    res.horizon = T;
    res.final_error = errors.back();
    // The error envelope over the last quarter must not exceed the one over
    // the quarter before it.
    const auto q = errors.size() / 4;
    const double late = *std::max_element(errors.end() - static_cast<std::ptrdiff_t>(q), errors.end());
    const double mid = *std::max_element(errors.end() - static_cast<std::ptrdiff_t>(2 * q),
                                         errors.end() - static_cast<std::ptrdiff_t>(q));
    res.monotone_tail = late <= mid;
    const bool settled =
        std::all_of(errors.end() - 4, errors.end(), [&](double e) { return e < tol; });
    if (settled) {
      res.converged = true;
      break;
    }
    if (T >= t_cap) break;
    T = std::min(2.0 * T, t_cap);
  }
  res.steps = integ.steps_taken();
  return res;
}

// ---------------------------------------------------------------------------
// Conservation residual

namespace {

constexpr double kGaussNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

template <class F>
double gauss3(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += kGaussWeights[i] * f(c + h * kGaussNodes[i]);
  return s * h;
}

template <class F>
double composite(const F& f, double a, double b, double width) {
  if (b <= a) return 0.0;
  const auto n = static_cast<int>(std::max(1.0, std::ceil((b - a) / width)));
  const double h = (b - a) / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += gauss3(f, a + k * h, a + (k + 1) * h);
  return s;
}

}  // namespace

double conservation_residual(const ReactionNetwork& net, const Eigen::VectorXd& kappa,
                             const Eigen::VectorXd& tau_in, const Trajectory& traj,
                             const History& history, const Eigen::VectorXd& direction) {
  const auto st = stoichiometry(net);
  const auto n = st.reactant.rows();
  const auto m = st.reactant.cols();
  if (direction.size() != n) throw std::invalid_argument("direction has wrong size");
  if (stoichiometric_subspace_rank(net) == static_cast<std::size_t>(n)) {
    throw std::invalid_argument("stoichiometric subspace is everything; no conserved direction exists");
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::VectorXd v = st.product.col(r) - st.reactant.col(r);
    if (std::abs(direction.dot(v)) > 1e-12 * direction.norm() * std::max(1.0, v.norm())) {
      throw std::invalid_argument("direction is not orthogonal to reaction " + std::to_string(r + 1));
    }
  }
  const Eigen::VectorXd tau = tau_in.size() ? tau_in : Eigen::VectorXd::Zero(m);
  if (traj.t.empty() || traj.t.front() != 0.0) {
    throw std::invalid_argument("trajectory must start at t = 0");
  }
  const double width = traj.dt > 0.0 ? traj.dt : 0.01;
  const std::size_t N = traj.t.size();
  const Eigen::VectorXd theta0 = history(0.0);

  Eigen::VectorXd residual = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), direction.dot(-theta0));
  for (std::size_t k = 0; k < N; ++k) residual(static_cast<Eigen::Index>(k)) += direction.dot(traj.x[k]);

  for (Eigen::Index r = 0; r < m; ++r) {
    const double weight = direction.dot(st.reactant.col(r));
    if (tau(r) == 0.0 || weight == 0.0) continue;
    const auto y = st.reactant.col(r);
    auto traj_integrand = [&](double s) { return monomial(traj.at(s).cwiseMax(0.0), y); };
    auto hist_integrand = [&](double s) { return monomial(history(s), y); };

    // Cumulative integral over the trajectory grid.
    std::vector<double> cum(N, 0.0);
    for (std::size_t k = 1; k < N; ++k) cum[k] = cum[k - 1] + gauss3(traj_integrand, traj.t[k - 1], traj.t[k]);
    auto integral_to = [&](double s) {  // int_0^s along the trajectory, s >= 0
      auto it = std::upper_bound(traj.t.begin(), traj.t.end(), s);
      std::size_t j = static_cast<std::size_t>(it - traj.t.begin()) - 1;
      return cum[j] + (s > traj.t[j] ? gauss3(traj_integrand, traj.t[j], s) : 0.0);
    };
    const double hist_full = composite(hist_integrand, -tau(r), 0.0, width);
    for (std::size_t k = 0; k < N; ++k) {
      const double t = traj.t[k];
      const double a = t - tau(r);
      double window = 0.0;
      if (a < 0.0) window = composite(hist_integrand, a, 0.0, width) + cum[k];
      else window = cum[k] - integral_to(a);
      residual(static_cast<Eigen::Index>(k)) += kappa(r) * weight * (window - hist_full);
    }
  }
  return residual.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Root scanning

namespace {

struct BoundaryScan {
  const ComplexFn& f;
  const ScanOptions& opts;
  double zero_level = 0.0;
  std::size_t points = 0;

  std::complex<double> eval(std::complex<double> z) {
    ++points;
    const std::complex<double> v = f(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw BoundaryZero("function is not finite on the boundary");
    }
    if (std::abs(v) <= zero_level) throw BoundaryZero("function vanishes on the boundary");
    return v;
  }

  double segment(std::complex<double> a, std::complex<double> b, std::complex<double> fa,
                 std::complex<double> fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) <= opts.max_phase_step) return d;
    if (depth >= opts.max_refine_depth) throw BoundaryZero("phase does not resolve on the boundary");
    const std::complex<double> mid = 0.5 * (a + b);
    const std::complex<double> fm = eval(mid);
    return segment(a, mid, fa, fm, depth + 1) + segment(mid, b, fm, fb, depth + 1);
  }
};

}  // namespace

int winding_number(const ComplexFn& f, const Rect& rect, const ScanOptions& opts, std::size_t* points) {
  if (!(rect.re_max > rect.re_min && rect.im_max > rect.im_min)) {
    throw std::invalid_argument("degenerate rectangle");
  }
  using C = std::complex<double>;
  const C corners[4] = {{rect.re_min, rect.im_min},
                        {rect.re_max, rect.im_min},
                        {rect.re_max, rect.im_max},
                        {rect.re_min, rect.im_max}};
  const int N = std::max(4, opts.points_per_edge);
  std::vector<C> z;
  z.reserve(static_cast<std::size_t>(4 * N));
  for (int e = 0; e < 4; ++e) {
    for (int k = 0; k < N; ++k) z.push_back(corners[e] + (corners[(e + 1) % 4] - corners[e]) * (double(k) / N));
  }
  BoundaryScan scan{f, opts};
  std::vector<C> fz(z.size());
  std::vector<double> mags(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    fz[i] = scan.eval(z[i]);
    mags[i] = std::abs(fz[i]);
  }
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2), mags.end());
  scan.zero_level = opts.zero_rel_tol * mags[mags.size() / 2];
  for (const auto& v : fz) {
    if (std::abs(v) <= scan.zero_level) throw BoundaryZero("function vanishes on the boundary");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::size_t j = (i + 1) % z.size();
    total += scan.segment(z[i], z[j], fz[i], fz[j], 0);
  }
  if (points) *points = scan.points;
  const double w = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(w);
  if (std::abs(w - rounded) > 0.25) throw BoundaryZero("winding number did not come out integral");
  return static_cast<int>(rounded);
}

namespace {

std::optional<std::complex<double>> newton(const ComplexFn& f, std::complex<double> z, double tol) {
  for (int it = 0; it < 100; ++it) {
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    const std::complex<double> d = (f(z + h) - f(z - h)) / (2.0 * h);
    if (d == 0.0) return std::nullopt;
    const std::complex<double> step = f(z) / d;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    if (std::abs(step) < tol * (1.0 + std::abs(z))) return z;
  }
  return std::nullopt;
}

bool inside(const Rect& r, std::complex<double> z, double slack) {
  return z.real() >= r.re_min - slack && z.real() <= r.re_max + slack && z.imag() >= r.im_min - slack &&
         z.imag() <= r.im_max + slack;
}

struct Localizer {
  const ComplexFn& f;
  const ScanOptions& opts;
  std::vector<std::complex<double>> roots;

  void run(const Rect& r, int w) {
    if (w <= 0) return;
    const double diam = std::hypot(r.re_max - r.re_min, r.im_max - r.im_min);
    const std::complex<double> center{0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max)};
    if (w == 1 || diam < opts.min_cell) {
      if (auto z = newton(f, center, opts.newton_tol); z && inside(r, *z, 1e-9 * std::max(1.0, diam))) {
        if (w == 1) {
          roots.push_back(*z);
          return;
        }
      }
      if (diam < opts.min_cell) {
        for (int k = 0; k < w; ++k) roots.push_back(center);
        return;
      }
    }
    static constexpr double kSplits[3] = {0.5123, 0.4629, 0.5371};
    for (double frac : kSplits) {
      const double xm = r.re_min + frac * (r.re_max - r.re_min);
      const double ym = r.im_min + (1.0 - frac) * (r.im_max - r.im_min);
      const Rect kids[4] = {{r.re_min, xm, r.im_min, ym},
                            {xm, r.re_max, r.im_min, ym},
                            {xm, r.re_max, ym, r.im_max},
                            {r.re_min, xm, ym, r.im_max}};
      int ws[4];
      try {
        for (int k = 0; k < 4; ++k) ws[k] = winding_number(f, kids[k], opts);
      } catch (const BoundaryZero&) {
        continue;
      }
      for (int k = 0; k < 4; ++k) run(kids[k], ws[k]);
      return;
    }
    throw BoundaryZero("could not split a cell away from zeros");
  }
};

}  // namespace

RootScanResult scan_roots(const ComplexFn& f, Rect rect, const ScanOptions& opts) {
  if (rect.im_min == 0.0) rect.im_min = -opts.axis_shift;
  RootScanResult res;
  bool done = false;
  for (int attempt = 0; attempt <= opts.max_retries && !done; ++attempt) {
    try {
      res.winding = winding_number(f, rect, opts, &res.boundary_points);
      done = true;
    } catch (const BoundaryZero&) {
      if (attempt == opts.max_retries) throw;
      const double wr = rect.re_max - rect.re_min;
      const double wi = rect.im_max - rect.im_min;
      const double d = 1e-5 * (attempt + 1);
      rect.re_min -= 0.37 * d * wr;
      rect.re_max += 0.53 * d * wr;
      rect.im_min -= 0.29 * d * wi;
      rect.im_max += 0.71 * d * wi;
      ++res.retries;
    }
  }
  res.rect = rect;
  if (res.winding < 0) throw WindingInconsistent("negative winding number for an analytic function");
  Localizer loc{f, opts, {}};
  loc.run(rect, res.winding);
  res.roots = std::move(loc.roots);
  if (static_cast<int>(res.roots.size()) != res.winding) {
    throw WindingInconsistent("found " + std::to_string(res.roots.size()) + " roots for winding " +
                              std::to_string(res.winding));
  }
  for (const auto& z : res.roots) res.residuals.push_back(std::abs(f(z)));
  return res;
}

RootScanResult scan_characteristic_roots(const ReactionNetwork& net, const Eigen::VectorXd& x_star,
                                         const Eigen::VectorXd& kappa, const Eigen::VectorXd& tau,
                                         const Rect& rect, const ScanOptions& opts) {
  EvalContext{x_star, kappa, tau, {}}.validate(net);
  return scan_roots([&](std::complex<double> z) { return char_fn(net, x_star, kappa, tau, z); }, rect,
                    opts);
}

}  // namespace dstab
