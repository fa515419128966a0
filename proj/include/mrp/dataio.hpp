#pragma once

// Price CSV ingestion, run configuration, and report output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrp/criteria.hpp"
#include "mrp/errors.hpp"
#include "mrp/linalg.hpp"
#include "mrp/problem.hpp"
#include "mrp/series.hpp"
#include "mrp/trading.hpp"

namespace mrp {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move output into '" + path.string() + "': " + ec.message());
}

}  // namespace detail

/// Parses `date,T1,...,TM` rows of positive prices and takes logs. Line
/// numbers in errors are 1-based and count the header.
inline LogPriceSeries parse_prices(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptySeries, "price file is empty");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::split_csv_line(line);
  if (header.size() < 2) throw DataError(ErrorCode::ParseError, line_no, std::nullopt, "header needs date and tickers");
  LogPriceSeries out;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto name = detail::trim(header[c]);
    if (name.empty()) throw DataError(ErrorCode::ParseError, line_no, c + 1, "empty ticker name");
    out.tickers.emplace_back(name);
  }
  const std::size_t m = out.tickers.size();
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != m + 1)
      throw DataError(ErrorCode::ParseError, line_no, std::nullopt,
                      "expected " + std::to_string(m + 1) + " fields, found " + std::to_string(fields.size()));
    const auto date = detail::trim(fields[0]);
    if (date.empty()) throw DataError(ErrorCode::ParseError, line_no, 1, "missing date");
    if (!out.dates.empty() && !(out.dates.back() < date))
      throw DataError(ErrorCode::ParseError, line_no, 1, "dates must be strictly increasing");
    out.dates.emplace_back(date);
    for (std::size_t c = 1; c <= m; ++c) {
      const auto field = detail::trim(fields[c]);
      if (field.empty()) throw DataError(ErrorCode::ParseError, line_no, c + 1, "missing price");
      const auto v = detail::parse_double(field);
      if (!v || !std::isfinite(*v))
        throw DataError(ErrorCode::ParseError, line_no, c + 1, "cannot parse '" + std::string(field) + "'");
      if (!(*v > 0.0)) throw DataError(ErrorCode::NonPositivePrice, line_no, c + 1, "price must be positive");
      values.push_back(std::log(*v));
    }
  }
  if (out.dates.empty()) throw Error(ErrorCode::EmptySeries, "price file has no data rows");
  out.values = Matrix(out.dates.size(), m);
  out.values.data() = std::move(values);
  return out;
}

inline LogPriceSeries load_prices(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return parse_prices(in);
}

/// Writes exp(values) as a price CSV.
inline std::string format_prices(const LogPriceSeries& y) {
  std::string out = "date";
  for (const auto& t : y.tickers) out += "," + t;
  out += "\n";
  for (std::size_t t = 0; t < y.length(); ++t) {
    out += y.dates.at(t);
    for (std::size_t m = 0; m < y.assets(); ++m) out += "," + format_double(std::exp(y.values(t, m)));
    out += "\n";
  }
  return out;
}

inline void write_prices(const std::filesystem::path& path, const LogPriceSeries& y) {
  detail::write_file_atomically(path, format_prices(y));
}

/// Raw prices, exp of the stored log-prices.
inline Matrix price_levels(const LogPriceSeries& y) {
  Matrix p = y.values;
  for (auto& v : p.data()) v = std::exp(v);
  return p;
}

inline std::pair<LogPriceSeries, LogPriceSeries> split(const LogPriceSeries& y, std::size_t train_len,
                                                       std::size_t trade_len) {
  if (train_len + trade_len > y.length())
    throw Error(ErrorCode::WindowTooLong, "train " + std::to_string(train_len) + " + trade " + std::to_string(trade_len) +
                                               " exceeds " + std::to_string(y.length()) + " observations");
  return {y.slice(0, train_len), y.slice(train_len, trade_len)};
}

struct RunConfig {
  CriterionKind criterion = CriterionKind::pre;
  std::size_t p = 3;
  double eta = 0.5;
  std::optional<double> nu;  ///< empty: choose automatically (see README)
  Constraint constraint = Constraint::NetBudget;
  double d = 1.0;
  std::size_t train_len = 5 * 12 * 22;
  std::size_t trade_len = 12 * 22;
  SolverKind solver = SolverKind::automatic;
  NormRule psi_rule = NormRule::exact;
  std::uint64_t seed = 0;
  // optional extras
  std::optional<std::size_t> r;  ///< dependent series count; default M - 1
  std::vector<CriterionKind> compare{CriterionKind::pre, CriterionKind::por, CriterionKind::cro, CriterionKind::pcro};
  double cost_bps = 0.0;
  double tol = 1e-9;

  void validate() const {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be at least 1");
    if (!(eta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be nonnegative");
    if (nu && !(*nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
    if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "d must be positive");
    if (train_len < 2 || trade_len < 2) throw Error(ErrorCode::InvalidArgument, "windows need at least two periods");
    if (r && *r < 1) throw Error(ErrorCode::InvalidArgument, "r must be at least 1");
    if (!(cost_bps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cost_bps must be nonnegative");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["criterion"] = to_string(c.criterion);
  j["p"] = c.p;
  j["eta"] = c.eta;
  j["nu"] = c.nu ? nlohmann::json(*c.nu) : nlohmann::json("auto");
  j["constraint"] = to_string(c.constraint);
  j["d"] = c.d;
  j["train_len"] = c.train_len;
  j["trade_len"] = c.trade_len;
  j["solver"] = to_string(c.solver);
  j["psi_rule"] = to_string(c.psi_rule);
  j["seed"] = c.seed;
  if (c.r) j["r"] = *c.r;
  nlohmann::json cmp = nlohmann::json::array();
  for (auto k : c.compare) cmp.push_back(to_string(k));
  j["compare"] = cmp;
  j["cost_bps"] = c.cost_bps;
  j["tol"] = c.tol;
  return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"criterion", "p",   "eta",     "nu",       "constraint", "d",
                                              "train_len", "trade_len", "solver", "psi_rule", "seed", "r",
                                              "compare",   "cost_bps",  "tol"};
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, _] : j.items())
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw Error(ErrorCode::ParseError, "unknown config field '" + key + "'");
    if (j.contains("criterion")) c.criterion = parse_criterion(j["criterion"].get<std::string>());
    if (j.contains("p")) c.p = j["p"].get<std::size_t>();
    if (j.contains("eta")) c.eta = j["eta"].get<double>();
    if (j.contains("nu")) {
      const auto& v = j["nu"];
      if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto"))
        c.nu.reset();
      else if (v.is_number())
        c.nu = v.get<double>();
      else
        throw Error(ErrorCode::ParseError, "nu must be a number, \"auto\" or null");
    }
    if (j.contains("constraint")) c.constraint = parse_constraint(j["constraint"].get<std::string>());
    if (j.contains("d")) c.d = j["d"].get<double>();
    if (j.contains("train_len")) c.train_len = j["train_len"].get<std::size_t>();
    if (j.contains("trade_len")) c.trade_len = j["trade_len"].get<std::size_t>();
    if (j.contains("solver")) c.solver = parse_solver(j["solver"].get<std::string>());
    if (j.contains("psi_rule")) c.psi_rule = parse_norm_rule(j["psi_rule"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("r")) c.r = j["r"].get<std::size_t>();
    if (j.contains("compare")) {
      c.compare.clear();
      for (const auto& k : j["compare"]) c.compare.push_back(parse_criterion(k.get<std::string>()));
    }
    if (j.contains("cost_bps")) c.cost_bps = j["cost_bps"].get<double>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

inline RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(read_json(path)); }

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  detail::write_file_atomically(path, j.dump(2) + "\n");
}

/// Scalars of a backtest; the per-period series go to the equity CSV.
inline nlohmann::json report_summary(const BacktestReport& rep) {
  nlohmann::json j;
  j["periods"] = rep.pnl.size();
  j["cum_pnl"] = rep.cum_pnl.empty() ? 0.0 : rep.cum_pnl.back();
  j["sharpe_roi"] = rep.sharpe_roi ? nlohmann::json(*rep.sharpe_roi) : nlohmann::json(nullptr);
  if (!rep.sharpe_roi) j["sharpe_roi_reason"] = rep.sharpe_note;
  j["trade_count"] = rep.trade_count;
  j["gross_investment"] = rep.gross_investment;
  j["force_closed"] = rep.force_closed;
  j["total_roi"] = rep.cum_pnl.empty() ? 0.0 : rep.cum_pnl.back() / rep.gross_investment;
  double max_gap = 0.0;
  for (std::size_t t = 0; t < rep.pnl.size(); ++t) max_gap = std::max(max_gap, std::abs(rep.pnl[t] - rep.pnl_log[t]));
  j["max_pnl_log_gap"] = max_gap;
  return j;
}

/// Columns: t, position, z, ztilde, pnl, roi, cum_pnl.
inline std::string format_equity_csv(const BacktestReport& rep) {
  std::string out = "t,position,z,ztilde,pnl,roi,cum_pnl\n";
  for (std::size_t t = 0; t < rep.pnl.size(); ++t) {
    out += std::to_string(t) + "," + std::to_string(sign(rep.positions[t])) + "," + format_double(rep.z[t]) + "," +
           format_double(rep.ztilde[t]) + "," + format_double(rep.pnl[t]) + "," + format_double(rep.roi[t]) + "," +
           format_double(rep.cum_pnl[t]) + "\n";
  }
  return out;
}

/// Report JSON (summary merged into `meta`) plus the equity CSV.
inline void write_report(const BacktestReport& rep, const nlohmann::json& meta, const std::filesystem::path& json_path,
                         const std::filesystem::path& equity_path) {
  nlohmann::json j = meta;
  j["report"] = report_summary(rep);
  write_json(json_path, j);
  detail::write_file_atomically(equity_path, format_equity_csv(rep));
}

}  // namespace mrp
