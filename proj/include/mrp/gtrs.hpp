#pragma once

// min x'Nx + 2p'x + b  s.t.  x'N0x + 2p0'x + b0 = nu, which is the budget
// problem 1'w = 1 written in w = w0 + Fx. Solved through the secular equation
// phi(xi) = 0 on the interval where N + xi N0 is positive definite.

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrp/linalg.hpp"
#include "mrp/problem.hpp"

namespace mrp {

struct GtrsProblem {
  SymMatrix n;
  SymMatrix n0;
  Vector p_vec;
  Vector p0_vec;
  double b = 0.0;   ///< w0'Hw0, only shifts the objective
  double b0 = 0.0;  ///< w0'M0w0
  double nu = 1.0;
  NullspaceBasis f;
  Vector w0;
};

inline GtrsProblem reduce_to_gtrs(const SymMatrix& h, const SymMatrix& m0, double nu) {
  const std::size_t dim = h.dim();
  if (m0.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "H and M0 sizes differ");
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  NullspaceBasis f = nullspace_basis(dim);
  Vector w0(dim, 1.0 / static_cast<double>(dim));
  const Vector hw0 = h * w0;
  const Vector m0w0 = m0 * w0;
  GtrsProblem g{congruence(f.cols, h), congruence(f.cols, m0), f.project(hw0), f.project(m0w0), dot(w0, hw0),
                dot(w0, m0w0), nu, std::move(f), std::move(w0)};
  (void)cholesky(g.n0);
  return g;
}

/// x(xi) = -(N + xi N0)^{-1} (p + xi p0)
inline Vector gtrs_x_of_xi(const GtrsProblem& prob, double xi) {
  const std::size_t n = prob.n.dim();
  Matrix a = prob.n.matrix();
  a += xi * prob.n0.matrix();
  CholeskyFactor l;
  try {
    l = cholesky(SymMatrix(std::move(a)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    throw Error(ErrorCode::OutsideInterval, "N + xi N0 is not positive definite at xi = " + std::to_string(xi));
  }
  Vector rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -(prob.p_vec[i] + xi * prob.p0_vec[i]);
  return l.solve(rhs);
}

/// Constraint residual x'N0x + 2p0'x + b0 - nu.
inline double gtrs_constraint(const GtrsProblem& prob, std::span<const double> x) {
  return prob.n0.quad(x) + 2.0 * dot(prob.p0_vec, x) + prob.b0 - prob.nu;
}

inline double gtrs_phi(const GtrsProblem& prob, double xi) { return gtrs_constraint(prob, gtrs_x_of_xi(prob, xi)); }

/// Smallest value of w'M0w reachable on the affine set.
inline double gtrs_nu_min(const GtrsProblem& prob) {
  const CholeskyFactor r = cholesky(prob.n0);
  return prob.b0 - dot(prob.p0_vec, r.solve(prob.p0_vec));
}

/// ||(N + xi N0)x + p + xi p0||
inline double gtrs_kkt_residual(const GtrsProblem& prob, std::span<const double> x, double xi) {
  Vector r = prob.n * x;
  axpy(xi, prob.n0 * x, r);
  axpy(1.0, prob.p_vec, r);
  axpy(xi, prob.p0_vec, r);
  return norm2(r);
}

inline Solution solve_gtrs(const GtrsProblem& prob, const SolverOptions& opts) {
  const std::size_t n = prob.n.dim();
  if (prob.n0.dim() != n || prob.p_vec.size() != n || prob.p0_vec.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "GTRS sizes differ");
  if (!(prob.nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");

  auto finish = [&](Vector x, double xi, int iters, bool converged) {
    Solution sol;
    sol.w = prob.w0;
    axpy(1.0, prob.f.lift(x), sol.w);
    sol.objective = prob.n.quad(x) + 2.0 * dot(prob.p_vec, x) + prob.b;
    sol.x = std::move(x);
    sol.multiplier = xi;
    sol.iterations = iters;
    sol.converged = converged;
    sol.objective_trace = {sol.objective};
    sol.method = "gtrs";
    return sol;
  };

  const double nu_min = gtrs_nu_min(prob);
  // |phi| <= tol and |w'M0w - nu| <= tol * nu both hold.
  const double target_tol = opts.tol * std::min(1.0, prob.nu);
  if (prob.nu < nu_min) throw InfeasibleError(prob.nu, nu_min);
  if (prob.nu - nu_min <= target_tol) {
    // The feasible set collapses to a single point; the multiplier is unbounded.
    const CholeskyFactor r = cholesky(prob.n0);
    Vector x = r.solve(prob.p0_vec);
    for (auto& v : x) v = -v;
    return finish(std::move(x), std::numeric_limits<double>::infinity(), 0, true);
  }

  const double lam = min_gen_eig(prob.n, prob.n0);
  const double scale = std::max(1.0, std::abs(lam));
  int iters = 0;

  // Left end: phi blows up as xi -> -lambda_min unless the pencil is degenerate.
  double offset = scale * 1e-6;
  double lo = -lam + offset;
  double phi_lo = gtrs_phi(prob, lo);
  while (phi_lo < 0.0 && offset > scale * 1e-8) {
    offset *= 0.1;
    lo = -lam + offset;
    phi_lo = gtrs_phi(prob, lo);
    ++iters;
  }
  if (phi_lo < -target_tol)
    throw Error(ErrorCode::NearSingularPencil,
                "secular root lies within 1e-8 of -lambda_min = " + std::to_string(-lam));
  if (std::abs(phi_lo) <= target_tol) return finish(gtrs_x_of_xi(prob, lo), lo, iters, true);

  double width = scale;
  double hi = lo + width;
  double phi_hi = gtrs_phi(prob, hi);
  for (int k = 0; phi_hi > 0.0; ++k) {
    if (k > 2000 || !std::isfinite(hi)) throw Error(ErrorCode::MaxIterExceeded, "could not bracket the secular root");
    lo = hi;
    phi_lo = phi_hi;
    width *= 2.0;
    hi = lo + width;
    phi_hi = gtrs_phi(prob, hi);
    ++iters;
  }
  if (std::abs(phi_hi) <= target_tol) return finish(gtrs_x_of_xi(prob, hi), hi, iters, true);

  // Bisection; phi is decreasing on the interval.
  double best_xi = std::abs(phi_lo) < std::abs(phi_hi) ? lo : hi;
  double best_abs = std::min(std::abs(phi_lo), std::abs(phi_hi));
  bool converged = false;
  for (int k = 0; k < opts.max_iter; ++k) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) {
      converged = best_abs <= std::max(target_tol, 1e-12 * prob.nu);
      break;
    }
    const double phi_mid = gtrs_phi(prob, mid);
    ++iters;
    if (std::abs(phi_mid) < best_abs) best_abs = std::abs(phi_mid), best_xi = mid;
    if (std::abs(phi_mid) <= target_tol) {
      converged = true;
      break;
    }
    if (phi_mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return finish(gtrs_x_of_xi(prob, best_xi), best_xi, iters, converged);
}

}  // namespace mrp
