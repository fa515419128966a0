#pragma once

// Threshold trading on a standardized spread, and its P&L accounting.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrp/errors.hpp"
#include "mrp/linalg.hpp"

namespace mrp {

struct ZScoreParams {
  double mu_z = 0.0;
  double sigma_z = 1.0;
};

struct TradingRule {
  double d = 1.0;
  double cost_bps = 0.0;  ///< charged on gross investment per traded leg; 0 disables
};

enum class Position : int { Short = -1, Flat = 0, Long = 1 };

enum class Action { NoAction, OpenLong, OpenShort, CloseLong, CloseShort, CloseLongOpenShort, CloseShortOpenLong };

inline constexpr std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::NoAction: return "NoAction";
    case Action::OpenLong: return "OpenLong";
    case Action::OpenShort: return "OpenShort";
    case Action::CloseLong: return "CloseLong";
    case Action::CloseShort: return "CloseShort";
    case Action::CloseLongOpenShort: return "CloseLongOpenShort";
    case Action::CloseShortOpenLong: return "CloseShortOpenLong";
  }
  return "NoAction";
}

inline int sign(Position p) noexcept { return static_cast<int>(p); }

inline double zscore(double z, const ZScoreParams& p) { return (z - p.mu_z) / p.sigma_z; }

/// Mean and population standard deviation of an in-sample spread.
inline ZScoreParams fit_zscore(std::span<const double> z) {
  if (z.size() < 2) throw Error(ErrorCode::SeriesTooShort, "need at least two observations");
  const double n = static_cast<double>(z.size());
  const double mu = sum(z) / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mu) * (v - mu);
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) throw Error(ErrorCode::ZeroVariance, "in-sample spread is constant");
  return {mu, sigma};
}

struct Transition {
  Position next;
  Action action;
};

inline Transition next_position(Position pos, double zt, const TradingRule& rule) {
  const double d = rule.d;
  switch (pos) {
    case Position::Long:
      if (zt >= d) return {Position::Short, Action::CloseLongOpenShort};
      if (zt >= 0.0) return {Position::Flat, Action::CloseLong};
      return {Position::Long, Action::NoAction};
    case Position::Flat:
      if (zt >= d) return {Position::Short, Action::OpenShort};
      if (zt <= -d) return {Position::Long, Action::OpenLong};
      return {Position::Flat, Action::NoAction};
    case Position::Short:
      if (zt > 0.0) return {Position::Short, Action::NoAction};
      if (zt > -d) return {Position::Flat, Action::CloseShort};
      return {Position::Long, Action::CloseShortOpenLong};
  }
  return {pos, Action::NoAction};
}

/// Per-asset simple return over tau periods ending at t; zero for tau = 0.
inline double simple_return(const Matrix& prices, std::size_t asset, std::size_t t, std::size_t tau) {
  if (tau == 0) return 0.0;
  const double base = prices(t - tau, asset);
  return (prices(t, asset) - base) / base;
}

/// Change over (t - tau, t] of the open trade's P&L, the trade opened at open_t.
inline double pnl_exact(std::span<const double> w_p, const Matrix& prices, std::size_t open_t, int pos_sign,
                        std::size_t t, std::size_t tau) {
  if (w_p.size() != prices.cols()) throw Error(ErrorCode::DimensionMismatch, "weights and prices differ in assets");
  if (t >= prices.rows() || tau > t || t - tau < open_t)
    throw Error(ErrorCode::IndexOutOfRange, "P&L window must lie inside one trade and the price panel");
  if (tau == 0) return 0.0;
  double now = 0.0, before = 0.0;
  for (std::size_t m = 0; m < w_p.size(); ++m) {
    now += w_p[m] * simple_return(prices, m, t, t - open_t);
    before += w_p[m] * simple_return(prices, m, t - tau, t - tau - open_t);
  }
  return static_cast<double>(pos_sign) * (now - before);
}

/// First-order approximation: the change of the log-price spread.
inline double pnl_log_approx(std::span<const double> z, int pos_sign, std::size_t t, std::size_t tau) {
  if (t >= z.size() || tau > t) throw Error(ErrorCode::IndexOutOfRange, "P&L window outside the spread series");
  return static_cast<double>(pos_sign) * (z[t] - z[t - tau]);
}

inline double roi(double pnl_t, std::span<const double> w_p) {
  const double gross = norm1(w_p);
  if (!(gross > 0.0)) throw Error(ErrorCode::ZeroInvestment, "portfolio has no gross investment");
  return pnl_t / gross;
}

/// Mean over population standard deviation, zero risk-free rate.
inline double sharpe(std::span<const double> series) {
  if (series.size() < 2) throw Error(ErrorCode::SeriesTooShort, "need at least two returns");
  const double n = static_cast<double>(series.size());
  const double mu = sum(series) / n;
  double ss = 0.0;
  for (double v : series) ss += (v - mu) * (v - mu);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 1e-300) || sd <= 1e-14 * std::abs(mu)) throw Error(ErrorCode::ZeroVariance, "returns have no variance");
  return mu / sd;
}

struct BacktestReport {
  std::vector<Position> positions;  ///< held during each period; positions[0] is flat
  std::vector<Action> actions;      ///< decided from the signal at each period
  Vector z;
  Vector ztilde;
  Vector pnl;
  Vector pnl_log;  ///< spread-change approximation of pnl
  Vector roi;
  Vector cum_pnl;
  std::optional<double> sharpe_roi;
  std::string sharpe_note;  ///< reason when sharpe_roi is empty
  int trade_count = 0;
  double gross_investment = 0.0;
  bool force_closed = false;
};

/// Runs the strategy over an aligned window. The signal at t sets the position
/// for t + 1, entered at the price of t; P&L of period t comes from the
/// position held over (t - 1, t].
inline BacktestReport run_backtest(std::span<const double> spread, const Matrix& prices, std::span<const double> w_p,
                                   const ZScoreParams& zp, const TradingRule& rule) {
  const std::size_t n = spread.size();
  if (n < 2) throw Error(ErrorCode::SeriesTooShort, "trading window needs at least two periods");
  if (prices.rows() != n) throw Error(ErrorCode::DimensionMismatch, "spread and prices are not aligned");
  if (w_p.size() != prices.cols()) throw Error(ErrorCode::DimensionMismatch, "weights and prices differ in assets");
  if (!(zp.sigma_z > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_z must be positive");
  if (!(rule.d > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold d must be positive");
  for (double p : prices.data())
    if (!(p > 0.0)) throw Error(ErrorCode::NonPositivePrice, "prices must be positive");

  BacktestReport rep;
  rep.gross_investment = norm1(w_p);
  if (!(rep.gross_investment > 0.0)) throw Error(ErrorCode::ZeroInvestment, "portfolio has no gross investment");
  rep.positions.assign(n, Position::Flat);
  rep.actions.assign(n, Action::NoAction);
  rep.z.assign(spread.begin(), spread.end());
  rep.ztilde.resize(n);
  rep.pnl.assign(n, 0.0);
  rep.pnl_log.assign(n, 0.0);
  rep.roi.assign(n, 0.0);
  rep.cum_pnl.assign(n, 0.0);

  const double leg_cost = rule.cost_bps * 1e-4 * rep.gross_investment;
  std::size_t open_t = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const Position held = rep.positions[t];
    if (t > 0 && held != Position::Flat) {
      rep.pnl[t] = pnl_exact(w_p, prices, open_t, sign(held), t, 1);
      rep.pnl_log[t] = pnl_log_approx(spread, sign(held), t, 1);
    }
    rep.ztilde[t] = zscore(spread[t], zp);
    const Transition tr = next_position(held, rep.ztilde[t], rule);
    rep.actions[t] = tr.action;
    if (t + 1 < n) {
      rep.positions[t + 1] = tr.next;
      if (tr.next != held && tr.next != Position::Flat) {
        open_t = t;
        ++rep.trade_count;
      }
      // Costs land in the period whose price executes the trade.
      if (leg_cost > 0.0 && tr.next != held) {
        const int legs = (held != Position::Flat) + (tr.next != Position::Flat);
        rep.pnl[t] -= legs * leg_cost;
      }
    }
  }
  rep.force_closed = rep.positions[n - 1] != Position::Flat;
  if (rep.force_closed) rep.pnl[n - 1] -= leg_cost;

  double running = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    running += rep.pnl[t];
    rep.cum_pnl[t] = running;
    rep.roi[t] = rep.pnl[t] / rep.gross_investment;
  }
  try {
    rep.sharpe_roi = sharpe(rep.roi);
  } catch (const Error& e) {
    rep.sharpe_note = e.what();
  }
  return rep;
}

}  // namespace mrp
