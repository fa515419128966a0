#pragma once

// Majorization-minimization for the quartic criteria (por, pcro). Each step
// replaces the quartic part by a quadratic upper bound that touches it at the
// current iterate, leaving a GEVP (1'w = 0) or a GTRS (1'w = 1) to solve.

#include <cmath>
#include <string>
#include <vector>

#include "mrp/criteria.hpp"
#include "mrp/gevp.hpp"
#include "mrp/gtrs.hpp"
#include "mrp/linalg.hpp"
#include "mrp/problem.hpp"

namespace mrp {

/// Mbar = sum_i c_i vec(Mbar_i) vec(Mbar_i)', Mbar_i = L^{-1} M_i L^{-T}, over lags 1..p.
inline SymMatrix build_mbar(const AutocovSet& acv, const CriterionParams& params, const CholeskyFactor& l) {
  const std::size_t n = acv.dim();
  if (l.dim() != n) throw Error(ErrorCode::DimensionMismatch, "Cholesky factor size differs from spreads");
  if (params.p > acv.max_lag()) throw Error(ErrorCode::LagTooLarge, "criterion lag exceeds estimated lags");
  const std::size_t nn = n * n;
  Matrix mbar(nn, nn);
  for (std::size_t i = 1; i <= params.p; ++i) {
    const double c = params.quartic_weight(i);
    if (c == 0.0) continue;
    const SymMatrix mi = l.whiten(acv[i]);
    const auto& v = mi.matrix().data();
    for (std::size_t a = 0; a < nn; ++a)
      for (std::size_t b = 0; b < nn; ++b) mbar(a, b) += c * v[a] * v[b];
  }
  return SymMatrix(std::move(mbar));
}

/// H_k = xi H + 2 sum_i c_i (w_k'M_i w_k) M_i - 2 psi M0 w_k w_k' M0
inline SymMatrix build_hk(std::span<const double> wk, const AutocovSet& acv, const CriterionParams& params,
                          double psi) {
  const std::size_t n = acv.dim();
  if (wk.size() != n) throw Error(ErrorCode::DimensionMismatch, "iterate size differs from spreads");
  Matrix h(n, n);
  if (params.xi != 0.0) h += params.xi * params.h.matrix();
  for (std::size_t i = 1; i <= params.p; ++i) {
    const double c = params.quartic_weight(i);
    if (c == 0.0) continue;
    h += (2.0 * c * acv[i].quad(wk)) * acv[i].matrix();
  }
  if (psi != 0.0) {
    const Vector m0w = acv[0] * wk;
    h -= (2.0 * psi) * outer(m0w, m0w);
  }
  return SymMatrix(std::move(h));
}

/// Quadratic majorizer of the objective expanded at wk; exact at w = wk and an
/// upper bound everywhere when psi_m >= ||Mbar||_2.
inline double surrogate_u1(std::span<const double> w, std::span<const double> wk, const AutocovSet& acv,
                           const CriterionParams& params, double psi_m) {
  const SymMatrix& m0 = acv[0];
  double u = params.xi != 0.0 ? params.xi * params.h.quad(w) : 0.0;
  for (std::size_t i = 1; i <= params.p; ++i) {
    const double c = params.quartic_weight(i);
    if (c == 0.0) continue;
    u += 2.0 * c * acv[i].quad(wk) * acv[i].quad(w);
  }
  const double vw = m0.quad(w);
  const double cross = m0.bilinear(wk, w);
  const double vk = m0.quad(wk);
  u += psi_m * vw * vw - 2.0 * psi_m * cross * cross + psi_m * vk * vk - quartic_part(wk, params, acv);
  return u;
}

/// Linear majorizer used by the closed-form update, valid on
/// {1'w = 0, w'M0w = nu}: it bounds surrogate_u1 there when psi_n >= ||Nbar_k||_2.
inline double surrogate_u2(std::span<const double> w, std::span<const double> wk, const AutocovSet& acv,
                           const CriterionParams& params, double psi_m, double psi_n, double nu) {
  const SymMatrix hk = build_hk(wk, acv, params, psi_m);
  Vector g = hk * wk;
  axpy(-psi_n, acv[0] * wk, g);
  return 2.0 * dot(g, w) + 2.0 * psi_n * nu - hk.quad(wk) + 2.0 * psi_m * nu * nu - quartic_part(wk, params, acv);
}

namespace detail {

inline SolverOptions inner_options(const SolverOptions& opts) {
  SolverOptions in = opts;
  in.tol = std::max(1e-15, std::min(opts.tol, 1e-12));
  in.record_iterates = false;
  return in;
}

/// Minimizes xi w'M1w under the problem's constraint; the MM starting point.
inline Solution cro_start(const DesignProblem& prob, const SolverOptions& opts) {
  const SymMatrix& m1 = prob.acv[1];
  if (prob.constraint == Constraint::DollarNeutral) return solve_gevp(reduce_to_gevp(m1, prob.acv[0], prob.nu), opts);
  return solve_gtrs(reduce_to_gtrs(m1, prob.acv[0], prob.nu), opts);
}

/// Relative change of the true objective. Once f has fallen far below its
/// starting value (e.g. towards an exact zero) the change is measured against
/// a floor of 1e-6 |f_start| instead.
inline bool small_change(double f_new, double f_old, double f_start, double tol) {
  return std::abs(f_new - f_old) <= tol * std::max(std::abs(f_old), 1e-6 * std::abs(f_start));
}

}  // namespace detail

/// psi for the whitened quartic, computed once per solve.
inline double mm_psi(const AutocovSet& acv, const CriterionParams& params, NormRule rule) {
  if (!params.has_quartic()) return 0.0;
  return spectral_norm_bound(build_mbar(acv, params, cholesky(acv[0])), rule);
}

/// IRGEVP for 1'w = 0, IRGTRS for 1'w = 1.
inline Solution solve_mm(const DesignProblem& prob, const SolverOptions& opts) {
  prob.validate();
  const SolverOptions inner = detail::inner_options(opts);
  const double psi = mm_psi(prob.acv, prob.params, opts.psi_rule);
  const bool neutral = prob.constraint == Constraint::DollarNeutral;

  Solution cur = detail::cro_start(prob, inner);
  double f = eval_objective(cur.w, prob.params, prob.acv);
  Solution out;
  out.method = neutral ? "irgevp" : "irgtrs";
  out.objective_trace.push_back(f);
  if (opts.record_iterates) out.iterates.push_back(cur.w);

  bool converged = false;
  int k = 0;
  for (; k < opts.max_outer_iter && !converged; ++k) {
    const SymMatrix hk = build_hk(cur.w, prob.acv, prob.params, psi);
    Solution next;
    if (neutral) {
      const GevpProblem g = reduce_to_gevp(hk, prob.acv[0], prob.nu);
      const Vector x0 = g.f.project(cur.w);
      next = solve_gevp(g, inner, x0);
    } else {
      next = solve_gtrs(reduce_to_gtrs(hk, prob.acv[0], prob.nu), inner);
    }
    const double f_next = eval_objective(next.w, prob.params, prob.acv);
    converged = detail::small_change(f_next, f, out.objective_trace.front(), opts.tol);
    cur = std::move(next);
    f = f_next;
    out.objective_trace.push_back(f);
    if (opts.record_iterates) out.iterates.push_back(cur.w);
  }
  out.w = std::move(cur.w);
  out.x = std::move(cur.x);
  out.multiplier = cur.multiplier;
  out.objective = f;
  out.iterations = k;
  out.converged = converged;
  return out;
}

/// Closed-form variant for 1'w = 0: one normalized step per iteration in the
/// whitened coordinates xbar = R'x, N0 = RR', which keep |xbar|^2 = nu.
inline Solution solve_eirgevp(const DesignProblem& prob, const SolverOptions& opts) {
  prob.validate();
  if (prob.constraint != Constraint::DollarNeutral)
    throw Error(ErrorCode::InvalidArgument, "the closed-form MM variant needs the dollar-neutral constraint");
  const SolverOptions inner = detail::inner_options(opts);
  const double psi = mm_psi(prob.acv, prob.params, opts.psi_rule);
  const NullspaceBasis fb = nullspace_basis(prob.acv.dim());
  const SymMatrix n0 = congruence(fb.cols, prob.acv[0]);
  const CholeskyFactor r = cholesky(n0);
  const double root_nu = std::sqrt(prob.nu);

  const Solution start = detail::cro_start(prob, inner);
  // xbar = R' x
  Vector xbar = transpose_times(r.lower, start.x);
  auto weights_of = [&](const Vector& xb) { return fb.lift(r.solve_upper(xb)); };

  Vector w = start.w;
  double f = eval_objective(w, prob.params, prob.acv);
  Solution out;
  out.method = "eirgevp";
  out.objective_trace.push_back(f);
  if (opts.record_iterates) out.iterates.push_back(w);

  bool converged = false;
  int k = 0;
  for (; k < opts.max_outer_iter && !converged; ++k) {
    const SymMatrix hk = build_hk(w, prob.acv, prob.params, psi);
    const SymMatrix nbar = r.whiten(congruence(fb.cols, hk));
    const double psi_n = spectral_norm_bound(nbar, opts.psi_rule);
    Vector e = nbar * xbar;
    axpy(-psi_n, xbar, e);
    for (auto& v : e) v *= 2.0;
    const double en = norm2(e);
    if (en <= 1e-14 * std::max(1.0, psi_n * root_nu)) {
      converged = true;  // the update direction vanished: stationary point
      break;
    }
    for (std::size_t i = 0; i < e.size(); ++i) xbar[i] = -root_nu * e[i] / en;
    w = weights_of(xbar);
    const double f_next = eval_objective(w, prob.params, prob.acv);
    converged = detail::small_change(f_next, f, out.objective_trace.front(), opts.tol);
    f = f_next;
    out.objective_trace.push_back(f);
    if (opts.record_iterates) out.iterates.push_back(w);
  }
  out.w = std::move(w);
  out.x = r.solve_upper(xbar);
  out.objective = f;
  out.iterations = k;
  out.converged = converged;
  return out;
}

}  // namespace mrp
