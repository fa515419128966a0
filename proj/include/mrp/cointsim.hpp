#pragma once

// Synthetic cointegrated log-prices in triangular form: the last M - r series
// are independent random walks ("trends"), each of the first r series is a
// loading of the trends plus stationary AR(1) noise.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrp/criteria.hpp"
#include "mrp/errors.hpp"
#include "mrp/linalg.hpp"
#include "mrp/series.hpp"

namespace mrp {

struct CointSpec {
  std::size_t M = 6;
  std::size_t r = 5;
  Matrix beta;  ///< r x (M - r)
  Vector ar_phi;
  double sigma_u = 0.01;
  double sigma_rw = 0.015;
  double y0 = std::log(100.0);

  std::size_t trends() const noexcept { return M - r; }

  void validate() const {
    if (r < 1 || r >= M) throw Error(ErrorCode::BadSpec, "need 1 <= r < M");
    if (beta.rows() != r || beta.cols() != M - r) throw Error(ErrorCode::BadSpec, "beta must be r x (M - r)");
    if (ar_phi.size() != r) throw Error(ErrorCode::BadSpec, "ar_phi needs one entry per relation");
    for (double phi : ar_phi)
      if (!(std::abs(phi) < 1.0)) throw Error(ErrorCode::BadSpec, "ar_phi entries must lie in (-1, 1)");
    if (!(sigma_u > 0.0) || !(sigma_rw > 0.0)) throw Error(ErrorCode::BadSpec, "sigmas must be positive");
    if (!all_finite(beta.data()) || !std::isfinite(y0)) throw Error(ErrorCode::BadSpec, "non-finite parameter");
  }
};

/// Six assets, five relations on one common trend.
inline CointSpec default_spec() {
  CointSpec s;
  s.M = 6;
  s.r = 5;
  s.beta = Matrix{{0.5}, {0.8}, {1.0}, {1.2}, {1.5}};
  s.ar_phi = {0.5, 0.6, 0.7, 0.8, 0.9};
  return s;
}

inline nlohmann::json to_json(const CointSpec& s) {
  nlohmann::json beta = nlohmann::json::array();
  for (std::size_t i = 0; i < s.beta.rows(); ++i) {
    const auto row = s.beta.row(i);
    beta.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"M", s.M}, {"r", s.r},           {"beta", beta},         {"ar_phi", s.ar_phi},
          {"sigma_u", s.sigma_u}, {"sigma_rw", s.sigma_rw}, {"y0", s.y0}};
}

/// `beta` may be a list of rows, or a flat list when there is a single trend.
inline CointSpec coint_spec_from_json(const nlohmann::json& j) {
  try {
    for (const auto& [key, _] : j.items())
      if (key != "M" && key != "r" && key != "beta" && key != "ar_phi" && key != "sigma_u" && key != "sigma_rw" &&
          key != "y0")
        throw Error(ErrorCode::BadSpec, "unknown field '" + key + "'");
    CointSpec s;
    s.M = j.at("M").get<std::size_t>();
    s.r = j.at("r").get<std::size_t>();
    if (s.r < 1 || s.r >= s.M) throw Error(ErrorCode::BadSpec, "need 1 <= r < M");
    const auto& b = j.at("beta");
    s.beta = Matrix(s.r, s.M - s.r);
    if (b.size() != s.r) throw Error(ErrorCode::BadSpec, "beta needs r rows");
    for (std::size_t i = 0; i < s.r; ++i) {
      if (b[i].is_number()) {
        if (s.M - s.r != 1) throw Error(ErrorCode::BadSpec, "flat beta only allowed with one trend");
        s.beta(i, 0) = b[i].get<double>();
      } else {
        if (b[i].size() != s.M - s.r) throw Error(ErrorCode::BadSpec, "beta rows need M - r entries");
        for (std::size_t k = 0; k < s.M - s.r; ++k) s.beta(i, k) = b[i][k].get<double>();
      }
    }
    s.ar_phi = j.at("ar_phi").get<Vector>();
    if (j.contains("sigma_u")) s.sigma_u = j.at("sigma_u").get<double>();
    if (j.contains("sigma_rw")) s.sigma_rw = j.at("sigma_rw").get<double>();
    if (j.contains("y0")) s.y0 = j.at("y0").get<double>();
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadSpec, e.what());
  }
}

/// Weekday dates from 2000-01-03 onwards, ISO-8601.
inline std::vector<std::string> synthetic_dates(std::size_t count) {
  using namespace std::chrono;
  std::vector<std::string> out;
  out.reserve(count);
  sys_days day = year{2000} / January / 3;
  char buf[16];
  while (out.size() < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) {
      const year_month_day ymd{day};
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                    static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
      out.emplace_back(buf);
    }
    day += days{1};
  }
  return out;
}

inline LogPriceSeries generate(const CointSpec& spec, std::size_t t_len, std::uint64_t seed) {
  spec.validate();
  if (t_len < 10 * spec.M) throw Error(ErrorCode::BadSpec, "need T >= 10 M observations");
  const std::size_t r = spec.r;
  const std::size_t k = spec.trends();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  Vector trend(k, 0.0);
  Vector u(r);
  for (std::size_t i = 0; i < r; ++i)
    u[i] = spec.sigma_u / std::sqrt(1.0 - spec.ar_phi[i] * spec.ar_phi[i]) * normal(rng);

  LogPriceSeries out;
  for (std::size_t i = 0; i < spec.M; ++i) out.tickers.push_back("S" + std::to_string(i + 1));
  out.dates = synthetic_dates(t_len);
  out.values = Matrix(t_len, spec.M);
  for (std::size_t t = 0; t < t_len; ++t) {
    if (t > 0) {
      for (std::size_t j = 0; j < k; ++j) trend[j] += spec.sigma_rw * normal(rng);
      for (std::size_t i = 0; i < r; ++i) u[i] = spec.ar_phi[i] * u[i] + spec.sigma_u * normal(rng);
    }
    for (std::size_t i = 0; i < r; ++i) {
      double level = spec.y0 + u[i];
      for (std::size_t j = 0; j < k; ++j) level += spec.beta(i, j) * trend[j];
      out.values(t, i) = level;
    }
    for (std::size_t j = 0; j < k; ++j) out.values(t, r + j) = spec.y0 + trend[j];
  }
  return out;
}

/// Column i is (e_i, -beta_i): it removes the trends from series i.
inline Matrix true_cointegration_vectors(const CointSpec& spec) {
  spec.validate();
  Matrix v(spec.M, spec.r);
  for (std::size_t i = 0; i < spec.r; ++i) {
    v(i, i) = 1.0;
    for (std::size_t j = 0; j < spec.trends(); ++j) v(spec.r + j, i) = -spec.beta(i, j);
  }
  return v;
}

/// M x N hedge weights, one column per spread, with the fitted intercepts.
struct SpreadBasis {
  Matrix w_s;
  Vector intercepts;

  std::size_t assets() const noexcept { return w_s.rows(); }
  std::size_t count() const noexcept { return w_s.cols(); }
};

/// Regresses each dependent series on the regressor series plus an intercept.
inline SpreadBasis estimate_spreads_ols(const LogPriceSeries& y, const std::vector<std::size_t>& dependents,
                                        const std::vector<std::size_t>& regressors) {
  const std::size_t t_len = y.length();
  const std::size_t m = y.assets();
  if (dependents.empty() || regressors.empty()) throw Error(ErrorCode::InvalidArgument, "need dependents and regressors");
  for (std::size_t idx : dependents)
    if (idx >= m) throw Error(ErrorCode::IndexOutOfRange, "dependent index out of range");
  for (std::size_t idx : regressors)
    if (idx >= m) throw Error(ErrorCode::IndexOutOfRange, "regressor index out of range");
  if (t_len <= m) throw Error(ErrorCode::RankDeficientRegression, "need more observations than assets");

  Matrix x(t_len, regressors.size() + 1);
  for (std::size_t t = 0; t < t_len; ++t) {
    x(t, 0) = 1.0;
    for (std::size_t j = 0; j < regressors.size(); ++j) x(t, j + 1) = y.values(t, regressors[j]);
  }
  SpreadBasis basis{Matrix(m, dependents.size()), Vector(dependents.size())};
  for (std::size_t n = 0; n < dependents.size(); ++n) {
    const Vector coef = least_squares(x, y.values.col(dependents[n]));
    basis.intercepts[n] = coef[0];
    basis.w_s(dependents[n], n) = 1.0;
    for (std::size_t j = 0; j < regressors.size(); ++j) basis.w_s(regressors[j], n) -= coef[j + 1];
  }
  return basis;
}

/// First r series regressed on the remaining M - r.
inline SpreadBasis estimate_spreads_ols(const LogPriceSeries& y, std::size_t r) {
  const std::size_t m = y.assets();
  if (r < 1 || r >= m) throw Error(ErrorCode::InvalidArgument, "need 1 <= r < M");
  std::vector<std::size_t> dep(r), reg(m - r);
  for (std::size_t i = 0; i < r; ++i) dep[i] = i;
  for (std::size_t j = 0; j < m - r; ++j) reg[j] = r + j;
  return estimate_spreads_ols(y, dep, reg);
}

/// s_t = W_s' y_t, not centered.
inline SpreadSeries compose_spreads(const LogPriceSeries& y, const SpreadBasis& basis) {
  if (basis.assets() != y.assets()) throw Error(ErrorCode::DimensionMismatch, "spread basis and panel differ in assets");
  return SpreadSeries{y.values * basis.w_s, false};
}

/// w_p = W_s w
inline Vector portfolio_on_assets(const SpreadBasis& basis, std::span<const double> w) {
  if (w.size() != basis.count()) throw Error(ErrorCode::DimensionMismatch, "weights and spread basis differ");
  return basis.w_s * w;
}

}  // namespace mrp
