#include <gtest/gtest.h>

#include <numbers>

#include "helpers.hpp"

using namespace mrp;
using namespace testutil;

namespace {

AutocovSet scalar_acv(double m0, double m1) {
  return AutocovSet(std::vector<SymMatrix>{SymMatrix{{m0}}, SymMatrix{{m1}}});
}

DesignProblem problem(const AutocovSet& acv, CriterionKind k, std::size_t p, Constraint c, double eta = 0.5) {
  DesignProblem d{acv, make_params(k, acv, p, eta), c, 1.0};
  if (c == Constraint::NetBudget) d.nu = std::max(1.0, 2 * gtrs_nu_min(reduce_to_gtrs(acv[1], acv[0], 1.0)));
  return d;
}

void expect_monotone(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-12) << i;
}

}  // namespace

TEST(BuildMbar, Examples) {
  const AutocovSet acv = scalar_acv(1.0, 0.5);
  const auto por = make_params(CriterionKind::por, acv, 1);
  const SymMatrix mbar = build_mbar(acv, por, cholesky(acv[0]));
  ASSERT_EQ(mbar.dim(), 1u);
  EXPECT_NEAR(mbar(0, 0), 0.25, 1e-15);
  const SymMatrix zero = build_mbar(acv, make_params(CriterionKind::cro, acv), cholesky(acv[0]));
  EXPECT_EQ(zero(0, 0), 0.0);
}

TEST(BuildMbar, PsdAndQuadraticIdentity) {
  std::mt19937_64 g(1);
  const AutocovSet acv = var_acv(3, 3, g);
  const auto c = make_params(CriterionKind::pcro, acv, 3, 0.8);
  const CholeskyFactor l = cholesky(acv[0]);
  const SymMatrix mbar = build_mbar(acv, c, l);
  EXPECT_EQ(mbar.dim(), 9u);
  EXPECT_GE(sym_eigen(mbar).values.front(), -1e-10);
  // vec(wbar wbar')' Mbar vec(wbar wbar') reproduces the quartic part, wbar = L'w.
  const Vector w = random_vector(3, g);
  const Vector wb = transpose_times(l.lower, w);
  const Matrix ww = outer(wb, wb);
  EXPECT_NEAR(mbar.quad(ww.data()), quartic_part(w, c, acv), 1e-10);
}

TEST(BuildHk, Examples) {
  const AutocovSet acv = scalar_acv(1.0, 0.5);
  const auto cro = make_params(CriterionKind::cro, acv);
  EXPECT_NEAR(build_hk(Vector{3.0}, acv, cro, 0.0)(0, 0), 0.5, 1e-15);
  const auto por = make_params(CriterionKind::por, acv, 1);
  EXPECT_NEAR(build_hk(Vector{1.0}, acv, por, 0.25)(0, 0), 0.0, 1e-15);
}

TEST(BuildHk, Symmetric) {
  std::mt19937_64 g(2);
  const AutocovSet acv = var_acv(4, 3, g);
  const SymMatrix h = build_hk(random_vector(4, g), acv, make_params(CriterionKind::por, acv, 3), 1.3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(h(i, j), h(j, i));
}

TEST(Surrogates, ContactAndDomination) {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 5; ++rep) {
    const AutocovSet acv = var_acv(4, 3, g);
    for (auto k : {CriterionKind::por, CriterionKind::pcro}) {
      const auto c = make_params(k, acv, 3, 0.6);
      const double psi = mm_psi(acv, c, NormRule::exact);
      const auto gp = reduce_to_gevp(acv[1], acv[0], 1.0);
      const CholeskyFactor r = cholesky(gp.n0);
      auto feasible = [&] {
        Vector x = random_vector(3, g);
        const double s = std::sqrt(gp.n0.quad(x));
        for (auto& v : x) v /= s;
        return gp.f.lift(x);
      };
      const Vector wk = feasible();
      const double f = eval_objective(wk, c, acv);
      const SymMatrix nbar = r.whiten(congruence(gp.f.cols, build_hk(wk, acv, c, psi)));
      const double psi_n = spectral_norm_bound(nbar, NormRule::exact);
      EXPECT_NEAR(surrogate_u1(wk, wk, acv, c, psi), f, 1e-10);
      EXPECT_NEAR(surrogate_u2(wk, wk, acv, c, psi, psi_n, 1.0), f, 1e-10);
      for (int i = 0; i < 100; ++i) {
        const Vector w = feasible();
        const double fw = eval_objective(w, c, acv);
        const double u1 = surrogate_u1(w, wk, acv, c, psi);
        EXPECT_GE(u1, fw - 1e-10);
        EXPECT_GE(surrogate_u2(w, wk, acv, c, psi, psi_n, 1.0), u1 - 1e-10);
        // u1 bounds f off the constraint too
        const Vector any = random_vector(4, g);
        EXPECT_GE(surrogate_u1(any, wk, acv, c, psi), eval_objective(any, c, acv) - 1e-10);
      }
    }
  }
}

TEST(SolveMm, PcroWithoutPenaltyIsCro) {
  std::mt19937_64 g(4);
  const AutocovSet acv = var_acv(4, 3, g);
  for (auto c : {Constraint::DollarNeutral, Constraint::NetBudget}) {
    DesignProblem d = problem(acv, CriterionKind::pcro, 3, c, 0.0);
    const Solution mm = solve_mm(d, {});
    DesignProblem cro = d;
    cro.params = make_params(CriterionKind::cro, acv);
    SolverOptions o;
    const Solution direct = design(cro, o);
    EXPECT_EQ(mm.iterations, 1);
    EXPECT_NEAR(mm.objective, direct.objective, 1e-9);
  }
}

TEST(SolveMm, PorDollarNeutralMonotoneAndFeasible) {
  std::mt19937_64 g(5);
  const AutocovSet acv = var_acv(3, 3, g);
  const DesignProblem d = problem(acv, CriterionKind::por, 3, Constraint::DollarNeutral);
  const Solution s = solve_mm(d, {});
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(s.method, "irgevp");
  expect_monotone(s.objective_trace);
  EXPECT_LE(std::abs(acv[0].quad(s.w) - d.nu), 1e-8 * d.nu);
  EXPECT_LE(std::abs(sum(s.w)), 1e-10);
  EXPECT_NEAR(s.objective, s.objective_trace.back(), 0.0);
}

TEST(SolveMm, TwoAssetNetBudgetLandsOnFeasiblePoint) {
  std::mt19937_64 g(6);
  for (int rep = 0; rep < 5; ++rep) {
    const AutocovSet acv = var_acv(2, 3, g);
    const DesignProblem d = problem(acv, CriterionKind::por, 3, Constraint::NetBudget);
    const Solution s = solve_mm(d, {});
    EXPECT_EQ(s.method, "irgtrs");
    expect_monotone(s.objective_trace);
    // 1'w = 1 meets the variance ellipse in two points w = (a, 1 - a).
    // MM is local, so it need not pick the better of the two; it must land on one.
    double nearest = std::numeric_limits<double>::infinity();
    const double m00 = acv[0](0, 0), m01 = acv[0](0, 1), m11 = acv[0](1, 1);
    const double qa = m00 - 2 * m01 + m11, qb = 2 * (m01 - m11), qc = m11 - d.nu;
    const double disc = std::sqrt(qb * qb - 4 * qa * qc);
    for (double a : {(-qb + disc) / (2 * qa), (-qb - disc) / (2 * qa)})
      nearest = std::min(nearest, std::abs(s.w[0] - a));
    EXPECT_LE(nearest, 1e-8);
    EXPECT_LE(s.objective, s.objective_trace.front() * (1 + 1e-12));
  }
}

TEST(SolveMm, MonotoneAcrossFamilies) {
  std::mt19937_64 g(7);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t n = rep % 2 ? 3 : 5;
    const std::size_t p = rep % 4 < 2 ? 3 : 5;
    const AutocovSet acv = var_acv(n, p, g);
    for (auto k : {CriterionKind::por, CriterionKind::pcro})
      for (auto c : {Constraint::DollarNeutral, Constraint::NetBudget}) {
        const DesignProblem d = problem(acv, k, p, c);
        const Solution s = solve_mm(d, {});
        expect_monotone(s.objective_trace);
        const auto res = feasibility(d, s.w);
        EXPECT_LE(res.variance, 1e-8);
        EXPECT_LE(res.budget, 1e-10);
      }
  }
}

TEST(SolveMm, FrobeniusRuleAlsoDescends) {
  std::mt19937_64 g(8);
  const AutocovSet acv = var_acv(3, 3, g);
  SolverOptions o;
  o.psi_rule = NormRule::frobenius;
  const DesignProblem d = problem(acv, CriterionKind::pcro, 3, Constraint::NetBudget);
  const Solution s = solve_mm(d, o);
  expect_monotone(s.objective_trace);
  const Solution exact = solve_mm(d, {});
  EXPECT_NEAR(s.objective, exact.objective, 1e-5 * std::max(1.0, std::abs(exact.objective)));
}

TEST(SolveMm, IterationCap) {
  std::mt19937_64 g(9);
  const AutocovSet acv = var_acv(5, 3, g);
  SolverOptions o;
  o.max_outer_iter = 2;
  o.tol = 1e-15;
  const Solution s = solve_mm(problem(acv, CriterionKind::por, 3, Constraint::DollarNeutral), o);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 2);
  EXPECT_EQ(s.objective_trace.size(), 3u);
}

TEST(SolveEirgevp, KeepsSphereAndDescends) {
  std::mt19937_64 g(10);
  const AutocovSet acv = var_acv(4, 3, g);
  const DesignProblem d = problem(acv, CriterionKind::pcro, 3, Constraint::DollarNeutral);
  SolverOptions o;
  o.record_iterates = true;
  const Solution s = solve_eirgevp(d, o);
  EXPECT_EQ(s.method, "eirgevp");
  expect_monotone(s.objective_trace);
  ASSERT_EQ(s.iterates.size(), s.objective_trace.size());
  for (const auto& w : s.iterates) {
    EXPECT_NEAR(acv[0].quad(w), 1.0, 1e-12);
    EXPECT_NEAR(sum(w), 0.0, 1e-12);
  }
}

TEST(SolveEirgevp, AgreesWithIrgevp) {
  std::mt19937_64 g(11);
  SolverOptions o;
  o.tol = 1e-13;
  o.max_outer_iter = 200000;
  for (int rep = 0; rep < 4; ++rep) {
    const AutocovSet acv = var_acv(3, 3, g);
    for (auto k : {CriterionKind::por, CriterionKind::pcro}) {
      const DesignProblem d = problem(acv, k, 3, Constraint::DollarNeutral);
      const Solution a = solve_mm(d, o);
      const Solution b = solve_eirgevp(d, o);
      EXPECT_NEAR(a.objective, b.objective, 1e-6 * std::abs(a.objective));
    }
  }
}

TEST(SolveEirgevp, NeedsDollarNeutral) {
  std::mt19937_64 g(12);
  const AutocovSet acv = var_acv(3, 3, g);
  EXPECT_THROW(solve_eirgevp(problem(acv, CriterionKind::por, 3, Constraint::NetBudget), {}), Error);
}
