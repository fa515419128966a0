#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace mrp;
using namespace testutil;

TEST(ReduceToGevp, ScalarPencilForTwoAssets) {
  const auto g = reduce_to_gevp(SymMatrix::identity(2), SymMatrix::identity(2), 1.0);
  ASSERT_EQ(g.n.dim(), 1u);
  EXPECT_NEAR(g.n(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(g.n0(0, 0), 1.0, 1e-15);
}

TEST(ReduceToGevp, ReducedMatricesAreCongruences) {
  std::mt19937_64 r(1);
  const SymMatrix h = random_sym(5, r);
  const SymMatrix m0 = random_spd(5, r);
  const auto g = reduce_to_gevp(h, m0, 2.0);
  for (int k = 0; k < 10; ++k) {
    const Vector x = random_vector(4, r);
    const Vector w = g.f.lift(x);
    EXPECT_NEAR(sum(w), 0.0, 1e-13);
    EXPECT_NEAR(g.n.quad(x), h.quad(w), 1e-10);
    EXPECT_NEAR(g.n0.quad(x), m0.quad(w), 1e-10);
  }
  EXPECT_GT(sym_eigen(g.n0).values.front(), 0.0);
}

TEST(ReduceToGevp, Errors) {
  EXPECT_THROW(reduce_to_gevp(SymMatrix::identity(2), SymMatrix::identity(3), 1.0), Error);
  EXPECT_THROW(reduce_to_gevp(SymMatrix::identity(2), SymMatrix::identity(2), 0.0), Error);
  EXPECT_THROW(reduce_to_gevp(SymMatrix::identity(3), SymMatrix{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}, 1.0), Error);
}

TEST(SolveGevp, DiagonalPencilRestartsFromSaddle) {
  const double d[] = {2, 1};
  GevpProblem p{SymMatrix::diagonal(d), SymMatrix::identity(2), 1.0, nullspace_basis(3)};
  const Solution s = solve_gevp(p, {});
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(s.x[1]), 1.0, 1e-6);
  EXPECT_NEAR(s.x[0], 0.0, 1e-6);
}

TEST(SolveGevp, PencilIdentityGivesNu) {
  std::mt19937_64 r(2);
  const SymMatrix a = random_spd(4, r);
  GevpProblem p{a, a, 2.0, nullspace_basis(5)};
  const Solution s = solve_gevp(p, {});
  EXPECT_NEAR(s.objective, 2.0, 1e-10);
  EXPECT_NEAR(a.quad(s.x), 2.0, 1e-10);
}

TEST(SolveGevp, MatchesEigenOracle) {
  std::mt19937_64 r(3);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + k % 12;
    const SymMatrix nm = random_sym(n, r);
    const SymMatrix n0 = random_spd(n, r);
    const double nu = 0.5 + k % 3;
    GevpProblem p{nm, n0, nu, nullspace_basis(n + 1)};
    SolverOptions o;
    o.seed = k;
    const Solution s = solve_gevp(p, o);
    const double ref = nu * eigen_min_gen(nm, n0);
    EXPECT_NEAR(s.objective, ref, 1e-6 * std::max(1.0, std::abs(ref))) << k;
    EXPECT_NEAR(n0.quad(s.x), nu, 1e-10 * nu);
    EXPECT_NEAR(sum(s.w), 0.0, 1e-10);
    EXPECT_NEAR(nm.quad(s.x), s.objective, 1e-9 * std::max(1.0, std::abs(s.objective)));
  }
}

TEST(SolveGevp, WarmStartNeverIncreasesQuotient) {
  std::mt19937_64 r(4);
  const SymMatrix nm = random_sym(6, r);
  const SymMatrix n0 = random_spd(6, r);
  GevpProblem p{nm, n0, 1.0, nullspace_basis(7)};
  const Vector x0 = random_vector(6, r);
  const double r0 = nm.quad(x0) / n0.quad(x0);
  SolverOptions o;
  o.max_iter = 3;
  const Solution s = solve_gevp(p, o, x0);
  EXPECT_LE(s.multiplier, r0 + 1e-15);
}

TEST(SolveGevp, IterationCapReportsNotConverged) {
  std::mt19937_64 r(5);
  GevpProblem p{random_sym(10, r), random_spd(10, r), 1.0, nullspace_basis(11)};
  SolverOptions o;
  o.max_iter = 2;
  o.tol = 1e-14;
  const Solution s = solve_gevp(p, o);
  EXPECT_FALSE(s.converged);
  EXPECT_NEAR(p.n0.quad(s.x), 1.0, 1e-12);
}
