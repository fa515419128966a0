#pragma once

// Sample autocovariances of a spread panel and the mean-reversion criteria
// built on them.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "mrp/errors.hpp"
#include "mrp/linalg.hpp"

namespace mrp {

/// T x N panel of spreads, one column per spread.
struct SpreadSeries {
  Matrix values;
  bool centered = false;

  std::size_t length() const noexcept { return values.rows(); }
  std::size_t count() const noexcept { return values.cols(); }
};

inline SpreadSeries center(const Matrix& series) {
  const std::size_t t_len = series.rows();
  const std::size_t n = series.cols();
  if (t_len < 2 || n == 0) throw Error(ErrorCode::EmptySeries, "need at least two observations");
  SpreadSeries s{series, true};
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (std::size_t t = 0; t < t_len; ++t) mean += series(t, j);
    mean /= static_cast<double>(t_len);
    for (std::size_t t = 0; t < t_len; ++t) s.values(t, j) -= mean;
  }
  return s;
}

/// Lag-i sample autocovariance (1/(T-i)) sum_t s_t s_{t+i}^T, symmetrized.
inline SymMatrix autocov(const SpreadSeries& s, std::size_t lag) {
  const std::size_t t_len = s.length();
  const std::size_t n = s.count();
  if (t_len < 2 || lag + 1 >= t_len)
    throw Error(ErrorCode::LagTooLarge, "lag " + std::to_string(lag) + " needs more than " + std::to_string(lag + 1) +
                                            " observations, have " + std::to_string(t_len));
  Matrix m(n, n);
  for (std::size_t t = 0; t + lag < t_len; ++t) {
    const auto a = s.values.row(t);
    const auto b = s.values.row(t + lag);
    for (std::size_t i = 0; i < n; ++i) {
      const double ai = a[i];
      for (std::size_t j = 0; j < n; ++j) m(i, j) += ai * b[j];
    }
  }
  m *= 1.0 / static_cast<double>(t_len - lag);
  return SymMatrix(std::move(m));
}

/// M_0 .. M_p for one spread panel. M_0 is checked to be positive definite.
class AutocovSet {
 public:
  AutocovSet() = default;

  explicit AutocovSet(std::vector<SymMatrix> mats) : mats_(std::move(mats)) {
    if (mats_.size() < 2) throw Error(ErrorCode::InvalidArgument, "autocovariance set needs lags 0 and 1");
    for (const auto& m : mats_)
      if (m.dim() != mats_.front().dim()) throw Error(ErrorCode::DimensionMismatch, "autocovariance sizes differ");
    (void)cholesky(mats_.front());
  }

  std::size_t max_lag() const noexcept { return mats_.size() - 1; }
  std::size_t dim() const noexcept { return mats_.front().dim(); }
  const SymMatrix& operator[](std::size_t i) const { return mats_.at(i); }
  const std::vector<SymMatrix>& mats() const noexcept { return mats_; }

 private:
  std::vector<SymMatrix> mats_;
};

inline AutocovSet autocov_set(const SpreadSeries& s, std::size_t max_lag) {
  if (max_lag < 1) throw Error(ErrorCode::InvalidArgument, "max lag must be at least 1");
  std::vector<SymMatrix> mats;
  mats.reserve(max_lag + 1);
  for (std::size_t i = 0; i <= max_lag; ++i) mats.push_back(autocov(s, i));
  return AutocovSet(std::move(mats));
}

/// T = M1 M0^{-1} M1^T, via Cholesky solves.
inline SymMatrix predictability_matrix(const SymMatrix& m0, const SymMatrix& m1) {
  if (m0.dim() != m1.dim()) throw Error(ErrorCode::DimensionMismatch, "M0 and M1 sizes differ");
  const CholeskyFactor l = cholesky(m0);
  const std::size_t n = m0.dim();
  // Y = L^{-1} M1^T; T = Y^T Y.
  Matrix y(n, n);
  const Matrix m1t = m1.matrix().transpose();
  for (std::size_t j = 0; j < n; ++j) y.set_col(j, l.solve_lower(m1t.col(j)));
  return SymMatrix(y.transpose() * y);
}

enum class CriterionKind { pre, por, cro, pcro };

inline constexpr std::string_view to_string(CriterionKind k) noexcept {
  switch (k) {
    case CriterionKind::pre: return "pre";
    case CriterionKind::por: return "por";
    case CriterionKind::cro: return "cro";
    case CriterionKind::pcro: return "pcro";
  }
  return "pre";
}

inline CriterionKind parse_criterion(std::string_view s) {
  for (auto k : {CriterionKind::pre, CriterionKind::por, CriterionKind::cro, CriterionKind::pcro})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown criterion '" + std::string(s) + "'");
}

/// F(w) = xi wHw/wM0w + zeta (wM1w/wM0w)^2 + eta sum_{i=2..p} (wMiw/wM0w)^2
struct CriterionParams {
  CriterionKind kind = CriterionKind::pre;
  double xi = 1.0;
  double zeta = 0.0;
  double eta = 0.0;
  std::size_t p = 1;
  SymMatrix h;

  /// Weight on (w'M_i w)^2 in the quartic part: zeta for lag 1, eta beyond.
  double quartic_weight(std::size_t lag) const noexcept { return lag == 1 ? zeta : eta; }
  bool has_quartic() const noexcept { return zeta != 0.0 || (eta != 0.0 && p >= 2); }
};

/// Resolves the coefficients and H for a criterion. `p` is used by por and pcro
/// (and must not exceed the lags in `acv`); `eta` only by pcro.
inline CriterionParams make_params(CriterionKind kind, const AutocovSet& acv, std::size_t p = 1, double eta = 0.0) {
  CriterionParams c;
  c.kind = kind;
  switch (kind) {
    case CriterionKind::pre:
      c.xi = 1.0, c.zeta = 0.0, c.eta = 0.0, c.p = 1;
      c.h = predictability_matrix(acv[0], acv[1]);
      break;
    case CriterionKind::cro:
      c.xi = 1.0, c.zeta = 0.0, c.eta = 0.0, c.p = 1;
      c.h = acv[1];
      break;
    case CriterionKind::por:
      if (p < 1) throw Error(ErrorCode::InvalidArgument, "por needs p >= 1");
      c.xi = 0.0, c.zeta = 1.0, c.eta = 1.0, c.p = p;
      c.h = acv[1];
      break;
    case CriterionKind::pcro:
      if (p < 2) throw Error(ErrorCode::InvalidArgument, "pcro needs p >= 2");
      if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::InvalidArgument, "pcro needs eta >= 0");
      c.xi = 1.0, c.zeta = 0.0, c.eta = eta, c.p = p;
      c.h = acv[1];
      break;
  }
  if (c.p > acv.max_lag())
    throw Error(ErrorCode::LagTooLarge, "criterion needs lag " + std::to_string(c.p) + " but only " +
                                            std::to_string(acv.max_lag()) + " lags were estimated");
  return c;
}

/// sum_i c_i (w'M_i w)^2
inline double quartic_part(std::span<const double> w, const CriterionParams& c, const AutocovSet& acv) {
  double s = 0.0;
  for (std::size_t i = 1; i <= c.p; ++i) {
    const double wt = c.quartic_weight(i);
    if (wt == 0.0) continue;
    const double q = acv[i].quad(w);
    s += wt * q * q;
  }
  return s;
}

/// Ratio form: invariant to the scale and sign of w.
inline double eval_criterion(std::span<const double> w, const CriterionParams& c, const AutocovSet& acv) {
  if (w.size() != acv.dim()) throw Error(ErrorCode::DimensionMismatch, "weight size differs from spread count");
  const double v = acv[0].quad(w);
  if (!(v > 0.0)) throw Error(ErrorCode::ZeroVector, "weight vector has zero variance");
  double f = 0.0;
  if (c.xi != 0.0) f += c.xi * c.h.quad(w) / v;
  for (std::size_t i = 1; i <= c.p; ++i) {
    const double wt = c.quartic_weight(i);
    if (wt == 0.0) continue;
    const double r = acv[i].quad(w) / v;
    f += wt * r * r;
  }
  return f;
}

/// Denominator-free form minimized under w'M0w = nu.
inline double eval_objective(std::span<const double> w, const CriterionParams& c, const AutocovSet& acv) {
  if (w.size() != acv.dim()) throw Error(ErrorCode::DimensionMismatch, "weight size differs from spread count");
  double f = quartic_part(w, c, acv);
  if (c.xi != 0.0) f += c.xi * c.h.quad(w);
  return f;
}

/// Portmanteau statistic with its sample-size factor: T sum_{i=1..p} rho_i^2.
inline double portmanteau(std::span<const double> w, const AutocovSet& acv, std::size_t p, std::size_t sample_size) {
  if (p < 1 || p > acv.max_lag()) throw Error(ErrorCode::LagTooLarge, "portmanteau lag out of range");
  const double v = acv[0].quad(w);
  if (!(v > 0.0)) throw Error(ErrorCode::ZeroVector, "weight vector has zero variance");
  double s = 0.0;
  for (std::size_t i = 1; i <= p; ++i) {
    const double r = acv[i].quad(w) / v;
    s += r * r;
  }
  return static_cast<double>(sample_size) * s;
}

/// Zero-crossing rate of a stationary Gaussian process with lag-1 autocorrelation rho1.
inline double crossing_rate_gaussian(double rho1) {
  if (!(std::abs(rho1) <= 1.0)) throw Error(ErrorCode::OutOfRange, "autocorrelation must lie in [-1, 1]");
  return std::acos(rho1) / std::numbers::pi;
}

/// Fraction of steps t = 1..T-1 with z_t z_{t-1} <= 0.
inline double empirical_crossing_rate(std::span<const double> z) {
  if (z.size() < 2) throw Error(ErrorCode::SeriesTooShort, "need at least two observations");
  std::size_t crossings = 0;
  for (std::size_t t = 1; t < z.size(); ++t)
    if (z[t] * z[t - 1] <= 0.0) ++crossings;
  return static_cast<double>(crossings) / static_cast<double>(z.size() - 1);
}

}  // namespace mrp
