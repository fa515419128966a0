#pragma once

#include "mrp/gevp.hpp"
#include "mrp/gtrs.hpp"
#include "mrp/mm.hpp"
#include "mrp/problem.hpp"

namespace mrp {

/// Picks the solver for a problem. Purely quadratic criteria (pre, cro, and
/// pcro with eta = 0) go to GEVP or GTRS; quartic ones to MM.
inline SolverKind route(const DesignProblem& prob, const SolverOptions& opts) {
  const bool neutral = prob.constraint == Constraint::DollarNeutral;
  const bool quartic = prob.params.has_quartic();
  switch (opts.solver) {
    case SolverKind::automatic:
      if (!quartic) return neutral ? SolverKind::gevp : SolverKind::gtrs;
      return neutral && opts.use_closed_form ? SolverKind::eirgevp : SolverKind::mm;
    case SolverKind::gevp:
      if (quartic || !neutral)
        throw Error(ErrorCode::InvalidArgument, "gevp solves quadratic criteria under dollar_neutral only");
      return SolverKind::gevp;
    case SolverKind::gtrs:
      if (quartic || neutral)
        throw Error(ErrorCode::InvalidArgument, "gtrs solves quadratic criteria under net_budget only");
      return SolverKind::gtrs;
    case SolverKind::mm: return SolverKind::mm;
    case SolverKind::eirgevp:
      if (!neutral) throw Error(ErrorCode::InvalidArgument, "eirgevp needs the dollar_neutral constraint");
      return SolverKind::eirgevp;
  }
  return SolverKind::mm;
}

/// Solves a design problem; `objective` is always the denominator-free criterion at w.
inline Solution design(const DesignProblem& prob, const SolverOptions& opts) {
  prob.validate();
  Solution sol;
  switch (route(prob, opts)) {
    case SolverKind::gevp:
      sol = solve_gevp(reduce_to_gevp(prob.params.h, prob.acv[0], prob.nu), opts);
      break;
    case SolverKind::gtrs:
      sol = solve_gtrs(reduce_to_gtrs(prob.params.h, prob.acv[0], prob.nu), opts);
      break;
    case SolverKind::eirgevp:
      sol = solve_eirgevp(prob, opts);
      break;
    case SolverKind::mm:
    case SolverKind::automatic:
      sol = solve_mm(prob, opts);
      break;
  }
  sol.objective = eval_objective(sol.w, prob.params, prob.acv);
  if (sol.objective_trace.size() == 1) sol.objective_trace.front() = sol.objective;
  return sol;
}

struct FeasibilityResiduals {
  double variance;  ///< |w'M0w - nu| / nu
  double budget;    ///< |1'w - target|
};

inline FeasibilityResiduals feasibility(const DesignProblem& prob, std::span<const double> w) {
  return {std::abs(prob.acv[0].quad(w) - prob.nu) / prob.nu, std::abs(sum(w) - budget_target(prob.constraint))};
}

}  // namespace mrp
