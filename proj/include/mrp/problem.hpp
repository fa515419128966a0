#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mrp/criteria.hpp"
#include "mrp/linalg.hpp"

namespace mrp {

/// DollarNeutral: 1'w = 0. NetBudget: 1'w = 1.
enum class Constraint { DollarNeutral, NetBudget };

inline constexpr std::string_view to_string(Constraint c) noexcept {
  return c == Constraint::DollarNeutral ? "dollar_neutral" : "net_budget";
}

inline Constraint parse_constraint(std::string_view s) {
  if (s == "dollar_neutral") return Constraint::DollarNeutral;
  if (s == "net_budget") return Constraint::NetBudget;
  throw Error(ErrorCode::InvalidArgument, "unknown constraint '" + std::string(s) + "'");
}

inline double budget_target(Constraint c) noexcept { return c == Constraint::DollarNeutral ? 0.0 : 1.0; }

struct DesignProblem {
  AutocovSet acv;
  CriterionParams params;
  Constraint constraint = Constraint::NetBudget;
  double nu = 1.0;

  void validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorCode::InvalidArgument, "variance level nu must be positive");
    if (acv.dim() < 2) throw Error(ErrorCode::DimensionTooSmall, "need at least two spreads");
    if (params.h.dim() != acv.dim()) throw Error(ErrorCode::DimensionMismatch, "criterion matrix size differs");
    if (params.p > acv.max_lag()) throw Error(ErrorCode::LagTooLarge, "criterion lag exceeds estimated lags");
  }
};

enum class SolverKind { automatic, gevp, gtrs, mm, eirgevp };

inline constexpr std::string_view to_string(SolverKind s) noexcept {
  switch (s) {
    case SolverKind::automatic: return "auto";
    case SolverKind::gevp: return "gevp";
    case SolverKind::gtrs: return "gtrs";
    case SolverKind::mm: return "mm";
    case SolverKind::eirgevp: return "eirgevp";
  }
  return "auto";
}

inline SolverKind parse_solver(std::string_view s) {
  for (auto k : {SolverKind::automatic, SolverKind::gevp, SolverKind::gtrs, SolverKind::mm, SolverKind::eirgevp})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown solver '" + std::string(s) + "'");
}

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 10000;        ///< inner iterations (GEVP descent steps, GTRS bisections)
  int max_outer_iter = 1000;   ///< MM iterations
  NormRule psi_rule = NormRule::exact;
  std::uint64_t seed = 0;
  bool use_closed_form = false;  ///< por/pcro under dollar neutrality: EIRGEVP instead of IRGEVP
  SolverKind solver = SolverKind::automatic;
  bool record_iterates = false;  ///< keep every MM iterate in Solution::iterates
};

struct Solution {
  Vector w;               ///< weights on the spreads
  Vector x;               ///< reduced coordinates (null-space or anchored)
  double multiplier = 0;  ///< Rayleigh quotient (GEVP) or secular root xi* (GTRS)
  double objective = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  std::vector<Vector> iterates;
  std::string method;
};

}  // namespace mrp
