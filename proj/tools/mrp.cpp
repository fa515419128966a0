#include <CLI11.hpp>

#include "mrp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Build and trade mean-reverting combinations of cointegrated spreads"};
  app.fallthrough();
  app.require_subcommand(1);

  mrp::GlobalArgs global;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed; overrides the config seed");
  app.add_flag("--verbose,-v", global.verbose, "Progress messages on stderr");

  mrp::SimulateArgs sim;
  std::string spec_path;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cointegrated price panel");
  auto* spec_opt = simulate->add_option("--spec", spec_path, "CointSpec JSON (default: built-in six-asset spec)");
  simulate->add_option("--T", sim.t_len, "Number of observations")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output price CSV")->required();

  mrp::DesignArgs des;
  auto* design = app.add_subcommand("design", "Estimate spreads on the training window and design an MRP");
  design->add_option("--prices", des.prices, "Price CSV")->required()->check(CLI::ExistingFile);
  design->add_option("--config", des.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  design->add_option("--out", des.out, "Output design JSON")->required();

  mrp::BacktestArgs bt;
  auto* backtest = app.add_subcommand("backtest", "Trade a designed MRP over the trading window");
  backtest->add_option("--prices", bt.prices, "Price CSV")->required()->check(CLI::ExistingFile);
  backtest->add_option("--weights", bt.weights, "Design JSON from `design`")->required()->check(CLI::ExistingFile);
  backtest->add_option("--config", bt.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  backtest->add_option("--out", bt.out, "Output report JSON")->required();
  backtest->add_option("--equity", bt.equity, "Output equity CSV")->required();

  mrp::CompareArgs cmp;
  std::string equity_dir;
  auto* compare = app.add_subcommand("compare", "Design and backtest every criterion and single-spread baseline");
  compare->add_option("--prices", cmp.prices, "Price CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("--config", cmp.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", cmp.out, "Output comparison JSON")->required();
  auto* eq_opt = compare->add_option("--equity-dir", equity_dir, "Directory for per-strategy equity CSVs");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) global.seed = seed;

  if (*simulate) {
    if (*spec_opt) sim.spec = spec_path;
    return mrp::cmd_simulate(sim, global);
  }
  if (*design) return mrp::cmd_design(des, global);
  if (*backtest) return mrp::cmd_backtest(bt, global);
  if (*compare) {
    if (*eq_opt) cmp.equity_dir = equity_dir;
    return mrp::cmd_compare(cmp, global);
  }
  return mrp::kExitError;
}
