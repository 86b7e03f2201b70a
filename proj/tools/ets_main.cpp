// Command-line front end: calibrate, solve, diagnose, compare.

#include <CLI11.hpp>
#include <iostream>

#include "ets/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"12-region climate-economy model with a global emission trading system"};
  app.require_subcommand(1);

  // calibrate
  std::string data_dir, out_params = "params.cfg";
  auto* calibrate = app.add_subcommand("calibrate", "fit parameters from a dataset directory");
  calibrate->add_option("--data-dir", data_dir, "dataset directory")->required();
  calibrate->add_option("--out", out_params, "output parameter file");

  // solve
  std::string config_path, out_dir, cap_scenario;
  double tol = -1, omega = -1;
  int horizon = -1;
  bool no_ets = false;
  auto* solve = app.add_subcommand("solve", "solve the open-loop Nash equilibrium");
  solve->add_option("--config", config_path, "scenario configuration file")->required();
  solve->add_option("--out", out_dir, "output archive directory (overrides config)");
  solve->add_option("--data-dir", data_dir, "data directory (overrides config)");
  solve->add_option("--horizon", horizon, "horizon override, years");
  solve->add_option("--tol", tol, "KKT tolerance override");
  solve->add_option("--omega", omega, "damping weight override");
  solve->add_option("--cap-scenario", cap_scenario,
                    "baseline|netzero2050|netzero2070|netzero2090|custom");
  solve->add_flag("--no-ets", no_ets, "disable permit trading");

  // diagnose
  std::vector<std::string> diag_archives;
  std::string diag_out = "diagnostics";
  auto* diagnose = app.add_subcommand("diagnose", "MAC/SCC/tax report and welfare comparison");
  diagnose->add_option("archives", diag_archives, "solution archive (optionally + no-ETS archive)")
      ->expected(1, 2);
  diagnose->add_option("--out", diag_out, "output directory");

  // compare
  std::vector<std::string> cmp_archives;
  std::string cmp_out = "comparison";
  auto* compare = app.add_subcommand("compare", "scenario comparison tables");
  compare->add_option("archives", cmp_archives, "two or more solution archives")
      ->expected(2, -1);
  compare->add_option("--out", cmp_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate) return ets::cli::cmd_calibrate(data_dir, out_params);
    if (*solve) {
      auto cfg = ets::scenario::load_scenario_file(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!data_dir.empty()) cfg.data_dir = data_dir;
      if (horizon > 0) {
        cfg.horizon = horizon;
        cfg.globals.horizon = horizon;
      }
      if (tol > 0) cfg.nash.region_options.kkt_tol = tol;
      if (omega > 0) cfg.nash.omega = omega;
      if (!cap_scenario.empty()) cfg.cap_scenario = cap_scenario;
      if (no_ets) cfg.ets_enabled = false;
      return ets::cli::cmd_solve(cfg);
    }
    if (*diagnose)
      return ets::cli::cmd_diagnose(diag_archives[0],
                                    diag_archives.size() > 1 ? diag_archives[1] : "", diag_out);
    if (*compare) return ets::cli::cmd_compare(cmp_archives, cmp_out);
  } catch (const ets::SchemaError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return ets::cli::kExitValidation;
  } catch (const ets::ConfigError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return ets::cli::kExitValidation;
  } catch (const ets::RegionalInfeasibility& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return ets::cli::kExitInfeasible;
  } catch (const ets::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return ets::cli::kExitInfeasible;
  } catch (const ets::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
