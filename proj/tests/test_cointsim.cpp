#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace mrp;
using namespace testutil;

namespace {

double lag1_autocorr(const Vector& x) {
  Matrix m(x.size(), 1);
  m.data() = x;
  const auto s = center(m);
  return autocov(s, 1)(0, 0) / autocov(s, 0)(0, 0);
}

CointSpec pair_spec(double phi) {
  CointSpec s;
  s.M = 2;
  s.r = 1;
  s.beta = Matrix{{1.0}};
  s.ar_phi = {phi};
  return s;
}

}  // namespace

TEST(CointSpec, DefaultShape) {
  const CointSpec s = default_spec();
  EXPECT_EQ(s.M, 6u);
  EXPECT_EQ(s.r, 5u);
  EXPECT_NO_THROW(s.validate());
}

TEST(CointSpec, JsonRoundTrip) {
  const CointSpec s = default_spec();
  const CointSpec back = coint_spec_from_json(to_json(s));
  EXPECT_EQ(back.beta, s.beta);
  EXPECT_EQ(back.ar_phi, s.ar_phi);
  EXPECT_EQ(back.y0, s.y0);
  const auto flat = nlohmann::json::parse(
      R"({"M":3,"r":2,"beta":[0.5,2.0],"ar_phi":[0.1,0.2],"sigma_u":0.01,"sigma_rw":0.02,"y0":4.0})");
  EXPECT_EQ(coint_spec_from_json(flat).beta(1, 0), 2.0);
}

TEST(CointSpec, BadSpecs) {
  auto j = to_json(default_spec());
  j["r"] = 6;
  EXPECT_THROW(coint_spec_from_json(j), Error);
  j = to_json(default_spec());
  j["ar_phi"] = std::vector<double>{0.5, 0.6, 0.7, 0.8, 1.0};
  EXPECT_THROW(coint_spec_from_json(j), Error);
  j = to_json(default_spec());
  j["extra"] = 1;
  EXPECT_THROW(coint_spec_from_json(j), Error);
  EXPECT_THROW(generate(default_spec(), 10, 1), Error);
}

TEST(Generate, SpreadIsAr1WithSpecCoefficient) {
  const LogPriceSeries y = generate(pair_spec(0.6), 100000, 3);
  Vector spread(y.length());
  for (std::size_t t = 0; t < y.length(); ++t) spread[t] = y.values(t, 0) - y.values(t, 1);
  EXPECT_NEAR(lag1_autocorr(spread), 0.6, 0.02);
}

TEST(Generate, TrendDifferencesUncorrelated) {
  const LogPriceSeries y = generate(default_spec(), 100000, 4);
  Vector d(y.length() - 1);
  for (std::size_t t = 1; t < y.length(); ++t) d[t - 1] = y.values(t, 5) - y.values(t - 1, 5);
  EXPECT_NEAR(lag1_autocorr(d), 0.0, 0.02);
}

TEST(Generate, TrueVectorsGiveSpecAutocorrelation) {
  const CointSpec spec = default_spec();
  const LogPriceSeries y = generate(spec, 100000, 5);
  const Matrix v = true_cointegration_vectors(spec);
  const Matrix s = y.values * v;
  for (std::size_t i = 0; i < spec.r; ++i) EXPECT_NEAR(lag1_autocorr(s.col(i)), spec.ar_phi[i], 0.03) << i;
}

TEST(Generate, Deterministic) {
  const auto a = generate(default_spec(), 500, 42);
  const auto b = generate(default_spec(), 500, 42);
  const auto c = generate(default_spec(), 500, 43);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.dates, b.dates);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.tickers.size(), 6u);
  EXPECT_TRUE(std::is_sorted(a.dates.begin(), a.dates.end()));
  EXPECT_EQ(a.dates.front(), "2000-01-03");
  EXPECT_EQ(a.dates[5], "2000-01-10");
}

TEST(Ols, NoiselessExactRelation) {
  LogPriceSeries y;
  y.tickers = {"A", "B", "C"};
  y.values = Matrix(50, 3);
  std::mt19937_64 g(6);
  std::normal_distribution<double> nd;
  for (std::size_t t = 0; t < 50; ++t) {
    y.values(t, 1) = nd(g);
    y.values(t, 2) = nd(g);
    y.values(t, 0) = 2.0 * y.values(t, 2) + 3.0;
  }
  const SpreadBasis b = estimate_spreads_ols(y, {0}, {1, 2});
  ASSERT_EQ(b.count(), 1u);
  EXPECT_NEAR(b.w_s(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(b.w_s(1, 0), 0.0, 1e-8);
  EXPECT_NEAR(b.w_s(2, 0), -2.0, 1e-8);
  EXPECT_NEAR(b.intercepts[0], 3.0, 1e-8);
}

TEST(Ols, RecoversBetaAndShape) {
  const CointSpec spec = default_spec();
  const LogPriceSeries y = generate(spec, 100000, 7);
  const SpreadBasis b = estimate_spreads_ols(y, spec.r);
  ASSERT_EQ(b.count(), spec.r);
  for (std::size_t i = 0; i < spec.r; ++i) EXPECT_NEAR(-b.w_s(5, i), spec.beta(i, 0), 0.05);
}

TEST(Ols, RankDeficient) {
  LogPriceSeries y;
  y.tickers = {"A", "B"};
  y.values = Matrix(20, 2, 1.0);
  try {
    estimate_spreads_ols(y, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficientRegression);
  }
}

TEST(ComposeSpreads, IdentityAndPair) {
  const LogPriceSeries y = generate(pair_spec(0.3), 100, 8);
  const SpreadBasis eye{Matrix::identity(2), {0, 0}};
  EXPECT_EQ(compose_spreads(y, eye).values, y.values);
  const SpreadBasis pair{Matrix{{1}, {-1}}, {0}};
  const auto s = compose_spreads(y, pair);
  EXPECT_FALSE(s.centered);
  for (std::size_t t = 0; t < 100; ++t) EXPECT_DOUBLE_EQ(s.values(t, 0), y.values(t, 0) - y.values(t, 1));
  const SpreadBasis bad{Matrix::identity(3), {0, 0, 0}};
  EXPECT_THROW(compose_spreads(y, bad), Error);
}

TEST(ComposeSpreads, Linearity) {
  std::mt19937_64 g(9);
  const LogPriceSeries y = generate(default_spec(), 200, 9);
  const SpreadBasis b{random_matrix(6, 3, g), {0, 0, 0}};
  const SpreadBasis b2{b.w_s * 2.5, {0, 0, 0}};
  const auto s1 = compose_spreads(y, b);
  const auto s2 = compose_spreads(y, b2);
  for (std::size_t k = 0; k < s1.values.data().size(); ++k)
    EXPECT_NEAR(s2.values.data()[k], 2.5 * s1.values.data()[k], 1e-12 * std::abs(s2.values.data()[k]) + 1e-12);
}

TEST(PortfolioOnAssets, Basics) {
  std::mt19937_64 g(10);
  const SpreadBasis b{random_matrix(6, 3, g), {0, 0, 0}};
  EXPECT_EQ(portfolio_on_assets(b, Vector{1, 0, 0}), b.w_s.col(0));
  EXPECT_EQ(portfolio_on_assets(b, Vector{0, 0, 0}), Vector(6, 0.0));
  EXPECT_THROW(portfolio_on_assets(b, Vector{1, 0}), Error);
  const LogPriceSeries y = generate(default_spec(), 200, 10);
  const Vector w = random_vector(3, g);
  const Vector wp = portfolio_on_assets(b, w);
  const auto s = compose_spreads(y, b);
  for (std::size_t t = 0; t < y.length(); ++t)
    EXPECT_NEAR(dot(wp, y.values.row(t)), dot(w, s.values.row(t)), 1e-12 * 100);
}
