#pragma once

// The pipeline behind the command-line tool: simulate -> estimate spreads ->
// design -> backtest -> report. Each cmd_* returns a process exit code:
// 0 success, 1 error, 3 outputs written but a solver did not converge.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrp/cointsim.hpp"
#include "mrp/criteria.hpp"
#include "mrp/dataio.hpp"
#include "mrp/design.hpp"
#include "mrp/trading.hpp"

namespace mrp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 3;

struct GlobalArgs {
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

namespace detail {

inline nlohmann::json matrix_rows(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

inline Matrix matrix_from_rows(const nlohmann::json& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows[0].size() : 0;
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) throw Error(ErrorCode::ParseError, "ragged matrix in JSON");
    for (std::size_t j = 0; j < m; ++j) out(i, j) = rows[i][j].get<double>();
  }
  return out;
}

inline void log(const GlobalArgs& g, const std::string& msg) {
  if (g.verbose) std::cerr << "[mrp] " << msg << "\n";
}

inline Vector unit(std::size_t n, std::size_t i) {
  Vector e(n, 0.0);
  e[i] = 1.0;
  return e;
}

}  // namespace detail

/// Everything the design step produces on a training window.
struct DesignOutcome {
  SpreadBasis basis;
  DesignProblem problem;
  Solution solution;
  Vector w_p;
  double criterion_value = 0.0;  ///< ratio form at the solution
  bool nu_auto = false;
  std::size_t baseline_index = 0;          ///< single spread with the lowest criterion
  std::vector<double> baseline_criteria;   ///< criterion of each single spread
  FeasibilityResiduals residuals{};
};

/// Spread basis plus lagged autocovariances of the centered training spreads.
struct TrainingStats {
  SpreadBasis basis;
  AutocovSet acv;
};

inline TrainingStats training_stats(const LogPriceSeries& train, const RunConfig& cfg) {
  const std::size_t m = train.assets();
  if (m < 3) throw Error(ErrorCode::DimensionTooSmall, "need at least three assets to form two spreads");
  const std::size_t r = cfg.r.value_or(m - 1);
  if (r < 2 || r >= m) throw Error(ErrorCode::InvalidArgument, "r must satisfy 2 <= r < M");
  SpreadBasis basis = estimate_spreads_ols(train, r);
  const SpreadSeries s = center(compose_spreads(train, basis).values);
  const std::size_t lags = std::max<std::size_t>(cfg.p, 2);
  return {std::move(basis), autocov_set(s, lags)};
}

/// Variance level: the configured value, or the variance of the single spread
/// scoring best on the criterion, so that spread is itself feasible.
inline DesignOutcome design_with_stats(const TrainingStats& st, const RunConfig& cfg, CriterionKind kind) {
  DesignOutcome out;
  out.basis = st.basis;
  const AutocovSet& acv = st.acv;
  const CriterionParams params = make_params(kind, acv, cfg.p, cfg.eta);
  const std::size_t n = acv.dim();
  out.baseline_criteria.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.baseline_criteria[i] = eval_criterion(detail::unit(n, i), params, acv);
  out.baseline_index = static_cast<std::size_t>(
      std::min_element(out.baseline_criteria.begin(), out.baseline_criteria.end()) - out.baseline_criteria.begin());
  out.nu_auto = !cfg.nu.has_value();
  const double nu = cfg.nu.value_or(acv[0](out.baseline_index, out.baseline_index));

  out.problem = DesignProblem{acv, params, cfg.constraint, nu};
  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.psi_rule = cfg.psi_rule;
  opts.seed = cfg.seed;
  opts.solver = cfg.solver;
  out.solution = design(out.problem, opts);
  out.w_p = portfolio_on_assets(out.basis, out.solution.w);
  out.criterion_value = eval_criterion(out.solution.w, params, acv);
  out.residuals = feasibility(out.problem, out.solution.w);
  return out;
}

inline DesignOutcome design_on_window(const LogPriceSeries& train, const RunConfig& cfg, CriterionKind kind) {
  return design_with_stats(training_stats(train, cfg), cfg, kind);
}

inline nlohmann::json design_json(const DesignOutcome& d, const LogPriceSeries& y, const RunConfig& cfg) {
  const Solution& s = d.solution;
  nlohmann::json j;
  j["tickers"] = y.tickers;
  j["criterion"] = to_string(d.problem.params.kind);
  j["constraint"] = to_string(d.problem.constraint);
  j["nu"] = d.problem.nu;
  j["nu_rule"] = d.nu_auto ? "auto" : "config";
  j["w"] = s.w;
  j["w_p"] = d.w_p;
  j["objective"] = s.objective;
  j["criterion_value"] = d.criterion_value;
  j["objective_trace"] = s.objective_trace;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["method"] = s.method;
  j["multiplier"] = std::isfinite(s.multiplier) ? nlohmann::json(s.multiplier) : nlohmann::json(nullptr);
  j["residuals"] = {{"variance", d.residuals.variance}, {"budget", d.residuals.budget}};
  j["spread_basis"] = detail::matrix_rows(d.basis.w_s);
  j["intercepts"] = d.basis.intercepts;
  j["baseline_criteria"] = d.baseline_criteria;
  j["baseline_best"] = d.baseline_index;
  j["config"] = to_json(cfg);
  j["seed"] = cfg.seed;
  return j;
}

/// z-score fitted on the training spread, strategy run on the trading window.
inline BacktestReport backtest_window(const LogPriceSeries& train, const LogPriceSeries& trade,
                                      std::span<const double> w_p, const RunConfig& cfg) {
  if (w_p.size() != train.assets()) throw Error(ErrorCode::DimensionMismatch, "weights do not match the price panel");
  const Vector z_train = train.values * w_p;
  const Vector z_trade = trade.values * w_p;
  const ZScoreParams zp = fit_zscore(z_train);
  return run_backtest(z_trade, price_levels(trade), w_p, zp, TradingRule{cfg.d, cfg.cost_bps});
}

// --- commands -------------------------------------------------------------------

struct SimulateArgs {
  std::optional<std::filesystem::path> spec;
  std::size_t t_len = 5 * 12 * 22 + 12 * 22;
  std::filesystem::path out;
};

inline int cmd_simulate(const SimulateArgs& a, const GlobalArgs& g, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  try {
    const CointSpec spec = a.spec ? coint_spec_from_json(read_json(*a.spec)) : default_spec();
    const std::uint64_t seed = g.seed.value_or(0);
    detail::log(g, "simulating M=" + std::to_string(spec.M) + " r=" + std::to_string(spec.r) +
                       " T=" + std::to_string(a.t_len) + " seed=" + std::to_string(seed));
    const LogPriceSeries y = generate(spec, a.t_len, seed);
    write_prices(a.out, y);
    nlohmann::json j;
    j["seed"] = seed;
    j["T"] = a.t_len;
    j["spec"] = to_json(spec);
    j["cointegration_vectors"] = detail::matrix_rows(true_cointegration_vectors(spec).transpose());
    out << j.dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << "\n";
    return kExitError;
  }
}

struct DesignArgs {
  std::filesystem::path prices;
  std::filesystem::path config;
  std::filesystem::path out;
};

inline RunConfig config_with_seed(const std::filesystem::path& path, const GlobalArgs& g) {
  RunConfig cfg = load_run_config(path);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

inline int cmd_design(const DesignArgs& a, const GlobalArgs& g, std::ostream& err = std::cerr) {
  try {
    const RunConfig cfg = config_with_seed(a.config, g);
    const LogPriceSeries y = load_prices(a.prices);
    const auto [train, trade] = split(y, cfg.train_len, cfg.trade_len);
    DesignOutcome d;
    try {
      d = design_on_window(train, cfg, cfg.criterion);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("design of ") + std::string(to_string(cfg.criterion)) +
                                                  " under " + std::string(to_string(cfg.constraint)) + " failed: " +
                                                  e.what());
    }
    detail::log(g, "method " + d.solution.method + ", objective " + format_double(d.solution.objective) + ", " +
                       std::to_string(d.solution.iterations) + " iterations");
    write_json(a.out, design_json(d, y, cfg));
    if (!d.solution.converged) {
      err << "design: solver did not converge; best iterate written\n";
      return kExitNotConverged;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "design: " << e.what() << "\n";
    return kExitError;
  }
}

struct BacktestArgs {
  std::filesystem::path prices;
  std::filesystem::path weights;
  std::filesystem::path config;
  std::filesystem::path out;
  std::filesystem::path equity;
};

inline int cmd_backtest(const BacktestArgs& a, const GlobalArgs& g, std::ostream& err = std::cerr) {
  try {
    const RunConfig cfg = config_with_seed(a.config, g);
    const LogPriceSeries y = load_prices(a.prices);
    const nlohmann::json wj = read_json(a.weights);
    if (!wj.contains("w_p")) throw Error(ErrorCode::ParseError, "weights file has no w_p field");
    const Vector w_p = wj["w_p"].get<Vector>();
    if (wj.contains("tickers") && wj["tickers"].get<std::vector<std::string>>() != y.tickers)
      throw Error(ErrorCode::DimensionMismatch, "weights were designed for different tickers");
    const auto [train, trade] = split(y, cfg.train_len, cfg.trade_len);
    const BacktestReport rep = backtest_window(train, trade, w_p, cfg);
    nlohmann::json meta;
    meta["config"] = to_json(cfg);
    meta["seed"] = cfg.seed;
    meta["w_p"] = w_p;
    nlohmann::json design;
    for (const char* key : {"criterion", "constraint", "nu", "objective", "criterion_value", "objective_trace",
                            "method", "converged", "iterations"})
      if (wj.contains(key)) design[key] = wj[key];
    meta["design"] = design;
    write_report(rep, meta, a.out, a.equity);
    detail::log(g, "trades " + std::to_string(rep.trade_count) + ", cum_pnl " + format_double(rep.cum_pnl.back()));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "backtest: " << e.what() << "\n";
    return kExitError;
  }
}

struct CompareArgs {
  std::filesystem::path prices;
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::filesystem::path> equity_dir;
};

/// One comparison row.
struct StrategyResult {
  std::string name;
  std::string kind;  ///< "optimized" or "single_spread"
  Vector w;
  Vector w_p;
  nlohmann::json criteria;  ///< ratio-form value of every criterion at w
  bool budget_satisfied = true;
  bool converged = true;
  std::optional<BacktestReport> report;
  std::string error;
};

inline nlohmann::json criteria_at(std::span<const double> w, const AutocovSet& acv, const RunConfig& cfg) {
  nlohmann::json j;
  for (auto k : {CriterionKind::pre, CriterionKind::por, CriterionKind::cro, CriterionKind::pcro}) {
    try {
      j[std::string(to_string(k))] = eval_criterion(w, make_params(k, acv, cfg.p, cfg.eta), acv);
    } catch (const Error&) {
      j[std::string(to_string(k))] = nullptr;
    }
  }
  return j;
}

inline std::vector<StrategyResult> compare_strategies(const LogPriceSeries& y, const RunConfig& cfg) {
  const auto [train, trade] = split(y, cfg.train_len, cfg.trade_len);
  const TrainingStats st = training_stats(train, cfg);
  std::vector<StrategyResult> rows;
  auto run = [&](StrategyResult& row) {
    try {
      row.report = backtest_window(train, trade, row.w_p, cfg);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  for (auto k : cfg.compare) {
    StrategyResult row;
    row.name = std::string(to_string(k));
    row.kind = "optimized";
    try {
      const DesignOutcome d = design_with_stats(st, cfg, k);
      row.w = d.solution.w;
      row.w_p = d.w_p;
      row.converged = d.solution.converged;
      row.criteria = criteria_at(row.w, st.acv, cfg);
      run(row);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.converged = false;
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = st.acv.dim();
  for (std::size_t i = 0; i < n; ++i) {
    StrategyResult row;
    row.name = "spread_" + std::to_string(i + 1);
    row.kind = "single_spread";
    row.w = detail::unit(n, i);
    row.w_p = portfolio_on_assets(st.basis, row.w);
    row.budget_satisfied = cfg.constraint == Constraint::NetBudget;
    row.criteria = criteria_at(row.w, st.acv, cfg);
    run(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline int cmd_compare(const CompareArgs& a, const GlobalArgs& g, std::ostream& err = std::cerr) {
  try {
    const RunConfig cfg = config_with_seed(a.config, g);
    const LogPriceSeries y = load_prices(a.prices);
    const std::vector<StrategyResult> rows = compare_strategies(y, cfg);
    if (a.equity_dir) std::filesystem::create_directories(*a.equity_dir);
    nlohmann::json table = nlohmann::json::array();
    bool all_ok = true;
    for (const auto& row : rows) {
      nlohmann::json r;
      r["name"] = row.name;
      r["kind"] = row.kind;
      r["w"] = row.w;
      r["w_p"] = row.w_p;
      r["criteria"] = row.criteria;
      r["budget_constraint_satisfied"] = row.budget_satisfied;
      r["converged"] = row.converged;
      if (row.report) {
        const nlohmann::json sum = report_summary(*row.report);
        r["sharpe_roi"] = sum["sharpe_roi"];
        if (sum.contains("sharpe_roi_reason")) r["sharpe_roi_reason"] = sum["sharpe_roi_reason"];
        r["cum_pnl"] = sum["cum_pnl"];
        r["trade_count"] = sum["trade_count"];
        if (a.equity_dir) {
          const auto path = *a.equity_dir / (row.name + ".csv");
          detail::write_file_atomically(path, format_equity_csv(*row.report));
          r["equity_csv"] = path.filename().string();
        }
      }
      if (!row.error.empty()) {
        r["error"] = row.error;
        all_ok = false;
      }
      if (!row.converged) all_ok = false;
      detail::log(g, row.name + (row.error.empty() ? " ok" : " failed: " + row.error));
      table.push_back(std::move(r));
    }
    nlohmann::json j;
    j["config"] = to_json(cfg);
    j["seed"] = cfg.seed;
    j["strategies"] = table;
    j["tickers"] = y.tickers;
    write_json(a.out, j);
    return all_ok ? kExitOk : kExitNotConverged;
  } catch (const std::exception& e) {
    err << "compare: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace mrp
