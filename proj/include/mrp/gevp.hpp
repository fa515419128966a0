#pragma once

// min x'Nx  s.t.  x'N0x = nu, by steepest descent on the Rayleigh quotient
// with an exact line search.

#include <cmath>
#include <limits>
#include <random>
#include <span>

#include "mrp/linalg.hpp"
#include "mrp/problem.hpp"

namespace mrp {

struct GevpProblem {
  SymMatrix n;
  SymMatrix n0;
  double nu = 1.0;
  NullspaceBasis f;
};

/// Eliminates 1'w = 0 through w = Fx.
inline GevpProblem reduce_to_gevp(const SymMatrix& h, const SymMatrix& m0, double nu) {
  if (h.dim() != m0.dim()) throw Error(ErrorCode::DimensionMismatch, "H and M0 sizes differ");
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  NullspaceBasis f = nullspace_basis(h.dim());
  GevpProblem g{congruence(f.cols, h), congruence(f.cols, m0), nu, std::move(f)};
  (void)cholesky(g.n0);
  return g;
}

namespace detail {

struct RayleighStep {
  Vector x;
  double r;
};

/// Minimizes R(x + tau*d) over tau in R u {inf}, with x'N0x = 1 and |d| = 1.
/// Setting dR/dtau = 0 gives A tau^2 + B tau + C = 0.
inline RayleighStep rayleigh_line_search(const SymMatrix& n, const SymMatrix& n0, const Vector& x, double r,
                                         const Vector& d, double dnorm_raw) {
  const Vector nd = n * d;
  const Vector n0d = n0 * d;
  const double b = dot(n * x, d);
  const double c = dot(d, nd);
  const double f = dot(n0 * x, d);
  const double g = dot(d, n0d);
  const double qa = c * f - b * g;
  const double qb = c - r * g;
  // b - r f = d'(N - R N0)x = |d_raw|, computed without cancellation.
  const double qc = dnorm_raw;

  auto r_at = [&](double tau) {
    const double num = r + 2.0 * b * tau + c * tau * tau;
    const double den = 1.0 + 2.0 * f * tau + g * tau * tau;
    return num / den;
  };

  double best_tau = std::numeric_limits<double>::quiet_NaN();
  double best_r = r;
  auto consider = [&](double tau) {
    if (!std::isfinite(tau)) return;
    const double rv = r_at(tau);
    if (rv < best_r) best_r = rv, best_tau = tau;
  };

  if (qa == 0.0 || std::abs(qa) <= 1e-14 * (std::abs(qb) + std::abs(qc))) {
    if (qb != 0.0) consider(-qc / qb);
  } else {
    const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    consider(q / qa);
    if (q != 0.0) consider(qc / q);
  }
  bool at_infinity = false;
  if (g > 0.0 && c / g < best_r) best_r = c / g, at_infinity = true;

  Vector xn;
  if (at_infinity) {
    xn = d;
  } else if (std::isnan(best_tau)) {
    return {x, r};
  } else {
    xn = x;
    axpy(best_tau, d, xn);
  }
  const double s = std::sqrt(n0.quad(xn));
  for (auto& v : xn) v /= s;
  const double rn = n.quad(xn);
  return {std::move(xn), rn};
}

struct DescentResult {
  Vector x;  ///< x'N0x = 1
  double r;
  int iterations;
  bool converged;
  bool stationary_at_start;
};

inline DescentResult rayleigh_descent(const SymMatrix& n, const SymMatrix& n0, Vector x, double tol, int max_iter) {
  {
    const double s = std::sqrt(n0.quad(x));
    for (auto& v : x) v /= s;
  }
  double r = n.quad(x);
  double res = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    const Vector nx = n * x;
    const Vector n0x = n0 * x;
    Vector d = nx;
    axpy(-r, n0x, d);
    const double dn = norm2(d);
    const double scale = norm2(nx) + std::abs(r) * norm2(n0x);
    res = scale > 0.0 ? dn / scale : 0.0;
    if (res <= tol) return {std::move(x), r, k, true, k == 0};
    for (auto& v : d) v /= dn;
    RayleighStep step = rayleigh_line_search(n, n0, x, r, d, dn);
    if (!(step.r < r)) {
      // No further decrease representable: accept if the residual is small enough.
      return {std::move(x), r, k, res <= std::sqrt(tol), false};
    }
    x = std::move(step.x);
    r = step.r;
  }
  return {std::move(x), r, max_iter, false, false};
}

}  // namespace detail

/// Returns the reduced x with x'N0x = nu and w = Fx. `x0` (optional) is a
/// starting point; otherwise the first unit vector is used. A start that is
/// already stationary is retried from a seeded random point and the lower of
/// the two results is kept.
inline Solution solve_gevp(const GevpProblem& prob, const SolverOptions& opts, std::span<const double> x0 = {}) {
  const std::size_t n = prob.n.dim();
  if (prob.n0.dim() != n || prob.f.dim() != n) throw Error(ErrorCode::DimensionMismatch, "GEVP sizes differ");
  if (!(prob.nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");

  Vector start(n, 0.0);
  if (!x0.empty()) {
    if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "GEVP start has wrong size");
    start.assign(x0.begin(), x0.end());
  }
  if (x0.empty() || !(prob.n0.quad(start) > 0.0)) {
    std::fill(start.begin(), start.end(), 0.0);
    start[0] = 1.0;
  }

  detail::DescentResult best = detail::rayleigh_descent(prob.n, prob.n0, start, opts.tol, opts.max_iter);
  int total_iter = best.iterations;
  if (best.stationary_at_start && n > 1) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    Vector rnd(n);
    for (auto& v : rnd) v = normal(rng);
    detail::DescentResult alt = detail::rayleigh_descent(prob.n, prob.n0, rnd, opts.tol, opts.max_iter);
    total_iter += alt.iterations;
    if (alt.r < best.r) best = std::move(alt);
  }

  Solution sol;
  const double root_nu = std::sqrt(prob.nu);
  sol.x = root_nu * best.x;
  sol.w = prob.f.lift(sol.x);
  sol.multiplier = best.r;
  sol.objective = prob.nu * best.r;
  sol.iterations = total_iter;
  sol.converged = best.converged;
  sol.objective_trace = {sol.objective};
  sol.method = "gevp";
  return sol;
}

}  // namespace mrp
