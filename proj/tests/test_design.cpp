#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace mrp;
using namespace testutil;

namespace {

DesignProblem make(const AutocovSet& acv, CriterionKind k, Constraint c, double nu = 1.0) {
  return DesignProblem{acv, make_params(k, acv, 3, 0.5), c, nu};
}

}  // namespace

TEST(Design, PreDollarNeutralIsGevpOnT) {
  std::mt19937_64 g(1);
  const AutocovSet acv = var_acv(4, 3, g);
  const DesignProblem d = make(acv, CriterionKind::pre, Constraint::DollarNeutral);
  const Solution s = design(d, {});
  EXPECT_EQ(s.method, "gevp");
  const Solution direct = solve_gevp(reduce_to_gevp(predictability_matrix(acv[0], acv[1]), acv[0], 1.0), {});
  EXPECT_NEAR(s.objective, direct.objective, 1e-12);
}

TEST(Design, CroNetBudgetIsGtrsOnM1) {
  std::mt19937_64 g(2);
  const AutocovSet acv = var_acv(4, 3, g);
  const DesignProblem d = make(acv, CriterionKind::cro, Constraint::NetBudget, 5.0);
  const Solution s = design(d, {});
  EXPECT_EQ(s.method, "gtrs");
  const Solution direct = solve_gtrs(reduce_to_gtrs(acv[1], acv[0], 5.0), {});
  EXPECT_NEAR(s.objective, direct.objective, 1e-12);
  EXPECT_EQ(s.w, direct.w);
}

TEST(Design, ClosedFormRouting) {
  std::mt19937_64 g(3);
  const AutocovSet acv = var_acv(3, 3, g);
  SolverOptions o;
  o.use_closed_form = true;
  EXPECT_EQ(design(make(acv, CriterionKind::por, Constraint::DollarNeutral), o).method, "eirgevp");
  EXPECT_EQ(design(make(acv, CriterionKind::por, Constraint::DollarNeutral), {}).method, "irgevp");
  EXPECT_EQ(design(make(acv, CriterionKind::pcro, Constraint::NetBudget, 10.0), o).method, "irgtrs");
}

TEST(Design, ExplicitSolverChoices) {
  std::mt19937_64 g(4);
  const AutocovSet acv = var_acv(3, 3, g);
  SolverOptions o;
  o.solver = SolverKind::gtrs;
  EXPECT_THROW(design(make(acv, CriterionKind::pre, Constraint::DollarNeutral), o), Error);
  EXPECT_THROW(design(make(acv, CriterionKind::por, Constraint::NetBudget, 10.0), o), Error);
  o.solver = SolverKind::eirgevp;
  EXPECT_THROW(design(make(acv, CriterionKind::por, Constraint::NetBudget, 10.0), o), Error);
  o.solver = SolverKind::mm;
  EXPECT_EQ(design(make(acv, CriterionKind::cro, Constraint::DollarNeutral), o).method, "irgevp");
  for (auto k : {SolverKind::automatic, SolverKind::gevp, SolverKind::gtrs, SolverKind::mm, SolverKind::eirgevp})
    EXPECT_EQ(parse_solver(to_string(k)), k);
}

TEST(Design, ObjectiveIsTrueCriterion) {
  std::mt19937_64 g(5);
  const AutocovSet acv = var_acv(4, 3, g);
  for (auto k : {CriterionKind::pre, CriterionKind::por, CriterionKind::cro, CriterionKind::pcro}) {
    const DesignProblem d = make(acv, k, Constraint::DollarNeutral);
    const Solution s = design(d, {});
    EXPECT_DOUBLE_EQ(s.objective, eval_objective(s.w, d.params, acv));
  }
}

TEST(Design, FeasibilityAndSignSymmetry) {
  std::mt19937_64 g(6);
  for (int rep = 0; rep < 5; ++rep) {
    const AutocovSet acv = var_acv(3 + rep % 3, 3, g);
    for (auto k : {CriterionKind::pre, CriterionKind::por, CriterionKind::cro, CriterionKind::pcro}) {
      for (auto c : {Constraint::DollarNeutral, Constraint::NetBudget}) {
        DesignProblem d = make(acv, k, c);
        if (c == Constraint::NetBudget) d.nu = 2 * acv[0](0, 0);
        const Solution s = design(d, {});
        const auto res = feasibility(d, s.w);
        EXPECT_LE(res.variance, 1e-8);
        EXPECT_LE(res.budget, 1e-10);
        if (c == Constraint::DollarNeutral) {
          const Vector neg = -1.0 * s.w;
          EXPECT_DOUBLE_EQ(eval_objective(neg, d.params, acv), s.objective);
          EXPECT_LE(feasibility(d, neg).variance, 1e-8);
        }
      }
    }
  }
}

TEST(Design, InfeasibleNetBudgetPropagates) {
  std::mt19937_64 g(7);
  const AutocovSet acv = var_acv(3, 3, g);
  const double nu_min = gtrs_nu_min(reduce_to_gtrs(acv[1], acv[0], 1.0));
  EXPECT_THROW(design(make(acv, CriterionKind::cro, Constraint::NetBudget, 0.5 * nu_min), {}), InfeasibleError);
}

TEST(Design, ValidatesProblem) {
  std::mt19937_64 g(8);
  const AutocovSet acv = var_acv(3, 3, g);
  EXPECT_THROW(design(make(acv, CriterionKind::cro, Constraint::DollarNeutral, -1.0), {}), Error);
  EXPECT_EQ(parse_constraint("net_budget"), Constraint::NetBudget);
  EXPECT_THROW(parse_constraint("long_only"), Error);
}
