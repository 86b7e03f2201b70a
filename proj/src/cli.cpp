#include "ets/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "ets/calibration.hpp"
#include "ets/csv.hpp"
#include "ets/diagnostics.hpp"
#include "ets/manifest.hpp"

namespace fs = std::filesystem;

namespace ets::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

struct ArchiveWriter {
  std::string dir;
  std::vector<std::pair<std::string, std::string>> inventory;

  void emit(const std::string& name, const std::string& text) {
    write_text(dir + "/" + name, text);
    inventory.emplace_back(name, manifest::hex(manifest::fnv1a(text)));
  }
};

}  // namespace

void write_archive(const std::string& dir, const scenario::ScenarioConfig& cfg,
                   const nash::World& world, const nash::EquilibriumSolution& sol) {
  fs::create_directories(dir);
  ArchiveWriter w{dir, {}};
  const int H = world.globals.horizon;
  const int n = static_cast<int>(world.regions.size());

  // Scenario snapshot, with region scalars, so the archive is self-contained.
  config::Document doc = scenario::serialize_scenario(cfg);
  for (const auto& r : world.regions) {
    auto& s = doc.obtain("region:" + r.name);
    s.set("b1", fmt(r.b1));
    s.set("b2", fmt(r.b2));
    s.set("b3", fmt(r.b3));
    s.set("b4", fmt(r.b4));
    s.set("pi1", fmt(r.pi1));
    s.set("pi2", fmt(r.pi2));
    s.set("g0", fmt(r.g0));
    s.set("d", fmt(r.d));
    s.set("k0", fmt(r.K0));
  }
  auto& res = doc.obtain("result");
  res.set("converged", sol.converged ? "true" : "false");
  res.set("iterations", std::to_string(sol.iterations));
  w.emit("scenario.cfg", config::serialize(doc));

  {
    std::ostringstream os;
    os << "# schema_version=1\n";
    os << "region,year,population_billion,sigma_gtc_per_t,cap_gtc,tfp\n";
    for (int i = 0; i < n; ++i) {
      const auto& r = world.regions[i];
      for (int t = 0; t <= H; ++t)
        os << r.name << ',' << scenario::kBaseYear + t << ',' << fmt(r.L_path[t]) << ','
           << fmt(r.sigma_path[t]) << ',' << fmt(r.cap_path[t]) << ','
           << fmt(world.tfp_paths[i][t]) << '\n';
    }
    w.emit("paths.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "# schema_version=1\n";
    os << "region,year,mu,permit_purchase_gtc,investment_t,consumption_kusd,emissions_gtc\n";
    for (int i = 0; i < n; ++i) {
      const auto& traj = sol.regions[i].trajectory;
      for (int t = 0; t < H; ++t)
        os << world.regions[i].name << ',' << scenario::kBaseYear + t << ','
           << fmt(traj.mu[t]) << ',' << fmt(traj.permit_purchase[t]) << ','
           << fmt(traj.investment[t]) << ',' << fmt(traj.consumption[t]) << ','
           << fmt(traj.emissions[t]) << '\n';
    }
    w.emit("trajectories.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "# schema_version=1\n";
    os << "region,year,capital_t,cum_emissions_gtc\n";
    for (int i = 0; i < n; ++i) {
      const auto& traj = sol.regions[i].trajectory;
      for (int t = 0; t <= H; ++t)
        os << world.regions[i].name << ',' << scenario::kBaseYear + t << ','
           << fmt(traj.capital[t]) << ',' << fmt(traj.cum_emissions[t]) << '\n';
    }
    w.emit("states.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "# schema_version=1\n";
    os << "year,price_t_per_gtc,raw_price_t_per_gtc,imbalance_gtc\n";
    for (int t = 0; t < H; ++t)
      os << scenario::kBaseYear + t << ',' << fmt(sol.price_path[t]) << ','
         << fmt(sol.raw_price_path.empty() ? sol.price_path[t] : sol.raw_price_path[t])
         << ',' << fmt(sol.imbalance.empty() ? 0.0 : sol.imbalance[t]) << '\n';
    w.emit("prices.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "# schema_version=1\n";
    os << "region,year,cap_multiplier,capital_shadow,cum_emission_shadow\n";
    for (int i = 0; i < n; ++i) {
      const auto& rs = sol.regions[i];
      for (int t = 0; t <= H; ++t)
        os << world.regions[i].name << ',' << scenario::kBaseYear + t << ','
           << fmt(t < H ? rs.cap_multiplier[t] : 0.0) << ',' << fmt(rs.capital_shadow[t])
           << ',' << fmt(rs.cum_emission_shadow[t]) << '\n';
    }
    w.emit("shadows.csv", os.str());
  }
  if (!sol.history.empty()) w.emit("convergence.csv", nash::convergence_report(sol.history));

  manifest::RunManifest man;
  man.command = "solve";
  man.config_hash = manifest::hex(manifest::fnv1a(config::serialize(doc)));
  man.summary.emplace_back("converged", sol.converged ? "true" : "false");
  man.summary.emplace_back("iterations", std::to_string(sol.iterations));
  man.summary.emplace_back("regions", std::to_string(n));
  man.summary.emplace_back("horizon", std::to_string(H));
  man.files = w.inventory;
  write_text(dir + "/manifest.txt", man.serialize());
}

Archive load_archive(const std::string& dir) {
  Archive a;
  config::Document doc = config::read_file(dir + "/scenario.cfg");
  a.config = scenario::parse_scenario(doc);
  const int H = a.config.horizon;

  csv::Table paths = csv::read_file(dir + "/paths.csv");
  csv::require_columns(paths, {"region", "year", "population_billion", "sigma_gtc_per_t",
                               "cap_gtc", "tfp"},
                       "paths.csv");

  // Region order follows first appearance in paths.csv (the write order).
  std::vector<std::string> names;
  std::map<std::string, int> index;
  const int rc = paths.column("region");
  for (std::size_t row = 0; row < paths.rows.size(); ++row) {
    const std::string& name = paths.cell(row, rc);
    if (!index.count(name)) {
      index[name] = static_cast<int>(names.size());
      names.push_back(name);
    }
  }

  a.world.globals = a.config.globals;
  a.world.initial_cum_emissions = a.world.globals.initial_cum_emissions();
  const int n = static_cast<int>(names.size());
  a.world.regions.resize(n);
  a.world.tfp_paths.assign(n, std::vector<double>(H + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    auto& r = a.world.regions[i];
    r.name = names[i];
    const auto& s = doc.require("region:" + names[i]);
    r.b1 = s.number("b1");
    r.b2 = s.number("b2");
    r.b3 = s.number("b3");
    r.b4 = s.number("b4");
    r.pi1 = s.number("pi1");
    r.pi2 = s.number("pi2");
    r.g0 = s.number("g0");
    r.d = s.number("d");
    r.K0 = s.number("k0");
    r.L_path.assign(H + 1, 0.0);
    r.sigma_path.assign(H + 1, 0.0);
    r.cap_path.assign(H + 1, 0.0);
  }
  {
    const int yc = paths.column("year"), pc = paths.column("population_billion");
    const int sc = paths.column("sigma_gtc_per_t"), cc = paths.column("cap_gtc");
    const int tc = paths.column("tfp");
    for (std::size_t row = 0; row < paths.rows.size(); ++row) {
      const int i = index[paths.cell(row, rc)];
      const int t = paths.integer(row, yc) - scenario::kBaseYear;
      if (t < 0 || t > H) throw SchemaError("paths.csv: year outside horizon");
      a.world.regions[i].L_path[t] = paths.number(row, pc);
      a.world.regions[i].sigma_path[t] = paths.number(row, sc);
      a.world.regions[i].cap_path[t] = paths.number(row, cc);
      a.world.tfp_paths[i][t] = paths.number(row, tc);
    }
  }

  auto& sol = a.solution;
  sol.ets_enabled = a.config.ets_enabled;
  sol.region_names = names;
  sol.regions.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& traj = sol.regions[i].trajectory;
    traj.mu.assign(H, 0.0);
    traj.permit_purchase.assign(H, 0.0);
    traj.investment.assign(H, 0.0);
    traj.consumption.assign(H, 0.0);
    traj.emissions.assign(H, 0.0);
    traj.capital.assign(H + 1, 0.0);
    traj.cum_emissions.assign(H + 1, 0.0);
    sol.regions[i].cap_multiplier.assign(H, 0.0);
    sol.regions[i].capital_shadow.assign(H + 1, 0.0);
    sol.regions[i].cum_emission_shadow.assign(H + 1, 0.0);
  }

  csv::Table traj = csv::read_file(dir + "/trajectories.csv");
  csv::require_columns(traj, {"region", "year", "mu", "permit_purchase_gtc", "investment_t",
                              "consumption_kusd", "emissions_gtc"},
                       "trajectories.csv");
  for (std::size_t row = 0; row < traj.rows.size(); ++row) {
    const int i = index.at(traj.cell(row, traj.column("region")));
    const int t = traj.integer(row, traj.column("year")) - scenario::kBaseYear;
    auto& tr = sol.regions[i].trajectory;
    tr.mu[t] = traj.number(row, traj.column("mu"));
    tr.permit_purchase[t] = traj.number(row, traj.column("permit_purchase_gtc"));
    tr.investment[t] = traj.number(row, traj.column("investment_t"));
    tr.consumption[t] = traj.number(row, traj.column("consumption_kusd"));
    tr.emissions[t] = traj.number(row, traj.column("emissions_gtc"));
  }

  csv::Table states = csv::read_file(dir + "/states.csv");
  csv::require_columns(states, {"region", "year", "capital_t", "cum_emissions_gtc"},
                       "states.csv");
  for (std::size_t row = 0; row < states.rows.size(); ++row) {
    const int i = index.at(states.cell(row, states.column("region")));
    const int t = states.integer(row, states.column("year")) - scenario::kBaseYear;
    sol.regions[i].trajectory.capital[t] = states.number(row, states.column("capital_t"));
    sol.regions[i].trajectory.cum_emissions[t] =
        states.number(row, states.column("cum_emissions_gtc"));
  }

  csv::Table prices = csv::read_file(dir + "/prices.csv");
  csv::require_columns(prices,
                       {"year", "price_t_per_gtc", "raw_price_t_per_gtc", "imbalance_gtc"},
                       "prices.csv");
  sol.price_path.assign(H, 0.0);
  sol.raw_price_path.assign(H, 0.0);
  sol.imbalance.assign(H, 0.0);
  for (std::size_t row = 0; row < prices.rows.size(); ++row) {
    const int t = prices.integer(row, prices.column("year")) - scenario::kBaseYear;
    sol.price_path[t] = prices.number(row, prices.column("price_t_per_gtc"));
    sol.raw_price_path[t] = prices.number(row, prices.column("raw_price_t_per_gtc"));
    sol.imbalance[t] = prices.number(row, prices.column("imbalance_gtc"));
  }

  csv::Table shadows = csv::read_file(dir + "/shadows.csv");
  csv::require_columns(
      shadows, {"region", "year", "cap_multiplier", "capital_shadow", "cum_emission_shadow"},
      "shadows.csv");
  for (std::size_t row = 0; row < shadows.rows.size(); ++row) {
    const int i = index.at(shadows.cell(row, shadows.column("region")));
    const int t = shadows.integer(row, shadows.column("year")) - scenario::kBaseYear;
    if (t < H)
      sol.regions[i].cap_multiplier[t] = shadows.number(row, shadows.column("cap_multiplier"));
    sol.regions[i].capital_shadow[t] = shadows.number(row, shadows.column("capital_shadow"));
    sol.regions[i].cum_emission_shadow[t] =
        shadows.number(row, shadows.column("cum_emission_shadow"));
  }

  const auto* res = doc.find("result");
  if (res) {
    sol.converged = res->flag_or("converged", true);
    sol.iterations = res->integer_or("iterations", 0);
  }

  sol.cum_emissions.assign(H + 1, 0.0);
  sol.temperature.assign(H + 1, 0.0);
  sol.cum_emissions[0] = a.world.cum_emissions_start();
  for (int t = 0; t < H; ++t) {
    double total = 0;
    for (int i = 0; i < n; ++i) total += sol.regions[i].trajectory.emissions[t];
    sol.cum_emissions[t + 1] = sol.cum_emissions[t] + total;
  }
  for (int t = 0; t <= H; ++t)
    sol.temperature[t] = model::temperature(sol.cum_emissions[t], a.world.globals.zeta);

  a.world.validate();
  return a;
}

int cmd_solve(const scenario::ScenarioConfig& cfg) {
  nash::World world;
  try {
    world = scenario::assemble_world(cfg);
  } catch (const Error& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  }
  nash::NashConfig nc = cfg.nash;
  nc.ets_enabled = cfg.ets_enabled;
  nash::EquilibriumSolution sol;
  try {
    sol = nash::solve_nash(world, nc);
  } catch (const RegionalInfeasibility& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  write_archive(cfg.output_dir, cfg, world, sol);
  if (!sol.converged) {
    std::cerr << "not converged after " << sol.iterations << " iterations; archive written to "
              << cfg.output_dir << '\n';
    return kExitNotConverged;
  }
  std::cout << "converged in " << sol.iterations << " iterations; archive written to "
            << cfg.output_dir << '\n';
  return kExitOk;
}

namespace {

void check_same_grid(const Archive& a, const Archive& b) {
  if (a.config.horizon != b.config.horizon) throw GridMismatch("archives have different horizons");
  if (a.solution.region_names != b.solution.region_names)
    throw GridMismatch("archives have different region sets");
}

nash::World with_caps(const nash::World& base, const nash::EquilibriumSolution& source) {
  nash::World adjusted = base;
  const int H = base.globals.horizon;
  for (std::size_t i = 0; i < adjusted.regions.size(); ++i) {
    auto& caps = adjusted.regions[i].cap_path;
    caps.assign(H + 1, 0.0);
    for (int t = 0; t < H; ++t) caps[t] = source.regions[i].trajectory.emissions[t];
  }
  return adjusted;
}

}  // namespace

int cmd_diagnose(const std::string& archive_dir, const std::string& archive_no_ets_dir,
                 const std::string& out_dir) {
  Archive primary = load_archive(archive_dir);
  fs::create_directories(out_dir);

  {
    diag::PolicyReport rep = diag::build_policy_report(primary.solution, primary.world);
    std::ostringstream os;
    diag::write_report_csv(os, rep);
    write_text(out_dir + "/report.csv", os.str());
  }

  if (!archive_no_ets_dir.empty()) {
    Archive no_ets = load_archive(archive_no_ets_dir);
    check_same_grid(primary, no_ets);
    if (!primary.config.ets_enabled || no_ets.config.ets_enabled)
      throw ConfigError("diagnose expects (with-ETS, without-ETS) archives in that order");

    // Welfare comparison under the adjusted caps: both economies re-solved
    // with caps set to the no-ETS optimal emissions, so temperatures align.
    const nash::World world_adj = with_caps(primary.world, no_ets.solution);
    nash::NashConfig nc_ets = primary.config.nash;
    nc_ets.ets_enabled = true;
    nash::NashConfig nc_no = no_ets.config.nash;
    nc_no.ets_enabled = false;
    const nash::EquilibriumSolution with_ets = nash::solve_nash(world_adj, nc_ets);
    const nash::EquilibriumSolution without_ets = nash::solve_nash(world_adj, nc_no);

    std::ostringstream os;
    os << "region,cv_usd_per_capita,cv_share_pct\n";
    os.precision(12);
    for (std::size_t i = 0; i < world_adj.regions.size(); ++i) {
      const auto cv = diag::compensating_variation(with_ets, without_ets, world_adj,
                                                   static_cast<int>(i));
      os << world_adj.regions[i].name << ',' << cv.cv_usd_per_capita << ','
         << cv.cv_share_pct << '\n';
    }
    write_text(out_dir + "/welfare.csv", os.str());
  }
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& archive_dirs, const std::string& out_dir) {
  if (archive_dirs.size() < 2) throw ConfigError("compare needs at least two archives");
  std::vector<Archive> archives;
  for (const auto& dir : archive_dirs) archives.push_back(load_archive(dir));
  for (std::size_t k = 1; k < archives.size(); ++k) check_same_grid(archives[0], archives[k]);

  // Sort by scenario name so that the emitted tables are independent of the
  // argument order.
  std::sort(archives.begin(), archives.end(),
            [](const Archive& a, const Archive& b) { return a.config.name < b.config.name; });
  for (std::size_t k = 1; k < archives.size(); ++k)
    if (archives[k].config.name == archives[k - 1].config.name)
      throw ConfigError("duplicate scenario name '" + archives[k].config.name + "'");

  std::vector<diag::LabeledSolution> labeled;
  for (const auto& a : archives)
    labeled.push_back({a.config.name, &a.solution, &a.world});

  fs::create_directories(out_dir);
  write_text(out_dir + "/compare.csv", diag::scenario_compare(labeled));

  const int H = archives[0].config.horizon;
  {
    std::ostringstream os;
    os << "scenario,year,global_emissions_gtc,permit_trade_gtc,permit_price_usd_tc,"
          "temperature_c,abatement_cost_t\n";
    os.precision(12);
    for (const auto& a : archives) {
      for (int t = 0; t < H; ++t) {
        double total_e = 0, trade = 0, abate = 0;
        for (std::size_t i = 0; i < a.world.regions.size(); ++i) {
          const auto& trj = a.solution.regions[i].trajectory;
          total_e += trj.emissions[t];
          trade += std::max(0.0, trj.permit_purchase[t]);
          const auto& r = a.world.regions[i];
          const double Q = model::gross_output(a.world.tfp_paths[i][t], trj.capital[t],
                                               r.L_path[t], a.world.globals.alpha);
          abate += model::abatement_cost(trj.mu[t], Q, r.sigma_path[t], r.b1, r.b2, r.b3,
                                         r.b4, t);
        }
        os << a.config.name << ',' << scenario::kBaseYear + t << ',' << total_e << ','
           << trade << ',' << model::kUsdPerTonFactor * a.solution.price_path[t] << ','
           << a.solution.temperature[t] << ',' << abate << '\n';
      }
    }
    write_text(out_dir + "/fig1_global_series.csv", os.str());
  }
  {
    std::ostringstream scc_os, mac_os, ets_os, pt_os;
    scc_os << "scenario,region,year,scc_usd_tc\n";
    mac_os << "scenario,region,year,mac_usd_tc\n";
    ets_os << "scenario,region,year,emissions_gtc,mac_usd_tc,scc_usd_tc\n";
    pt_os << "scenario,year,permit_price_usd_tc,temperature_c\n";
    scc_os.precision(12);
    mac_os.precision(12);
    ets_os.precision(12);
    pt_os.precision(12);
    for (const auto& a : archives) {
      for (int t = 0; t < H; ++t)
        pt_os << a.config.name << ',' << scenario::kBaseYear + t << ','
              << model::kUsdPerTonFactor * a.solution.price_path[t] << ','
              << a.solution.temperature[t] << '\n';
      for (std::size_t i = 0; i < a.world.regions.size(); ++i) {
        const auto scc = diag::scc_path(a.solution, static_cast<int>(i));
        const auto mac = diag::mac_path(a.solution, a.world, static_cast<int>(i));
        const auto& name = a.world.regions[i].name;
        for (int t = 0; t < H; ++t) {
          scc_os << a.config.name << ',' << name << ',' << scenario::kBaseYear + t << ','
                 << scc[t] << '\n';
          mac_os << a.config.name << ',' << name << ',' << scenario::kBaseYear + t << ','
                 << mac[t] << '\n';
          ets_os << a.config.name << ',' << name << ',' << scenario::kBaseYear + t << ','
                 << a.solution.regions[i].trajectory.emissions[t] << ',' << mac[t] << ','
                 << scc[t] << '\n';
        }
      }
    }
    write_text(out_dir + "/fig4_regional_scc.csv", scc_os.str());
    write_text(out_dir + "/fig7_regional_mac.csv", mac_os.str());
    write_text(out_dir + "/fig5_ets_effects.csv", ets_os.str());
    write_text(out_dir + "/fig6_price_temperature.csv", pt_os.str());
  }
  return kExitOk;
}

// ---- calibrate ------------------------------------------------------------

namespace {

csv::Table load_required(const std::string& dir, const std::string& name) {
  const std::string path = dir + "/" + name;
  if (!fs::exists(path)) throw SchemaError("missing required input " + name);
  return csv::read_file(path);
}

}  // namespace

int cmd_calibrate(const std::string& data_dir, const std::string& out_params_file) {
  csv::Table rcp, gdp, tax, history, ndc, netzero, kahn, initials, pop;
  try {
    rcp = load_required(data_dir, "rcp.csv");
    gdp = load_required(data_dir, "gdp.csv");
    tax = load_required(data_dir, "tax_scenarios.csv");
    history = load_required(data_dir, "history.csv");
    ndc = load_required(data_dir, "ndc.csv");
    netzero = load_required(data_dir, "netzero.csv");
    kahn = load_required(data_dir, "kahn.csv");
    initials = load_required(data_dir, "initials.csv");
    pop = load_required(data_dir, "population.csv");

    csv::require_columns(rcp, {"scenario", "year", "emissions_gtc", "temp_c"}, "rcp.csv");
    csv::require_columns(gdp, {"region", "year", "gdppc_nocc", "gdppc_cc"}, "gdp.csv");
    csv::require_columns(
        tax, {"scenario", "year", "tax_usd_tc", "region", "emissions_gtc", "gdp_t"},
        "tax_scenarios.csv");
    csv::require_columns(history, {"country", "region", "year", "emissions_gtc"},
                         "history.csv");
    csv::require_columns(ndc,
                         {"country", "target_year", "kind", "reduction", "base_emissions_gtc",
                          "sigma_base_gtc_per_t", "q2030_projected_t"},
                         "ndc.csv");
    csv::require_columns(netzero, {"country", "netzero_year"}, "netzero.csv");
    csv::require_columns(kahn,
                         {"region", "year", "temp_rcp26_c", "temp_rcp85_c", "delta_rcp26",
                          "delta_rcp85"},
                         "kahn.csv");
    csv::require_columns(initials,
                         {"region", "k0_t", "gdppc_2020_kusd", "pop_2020_billion", "e0_gtc"},
                         "initials.csv");
    csv::require_columns(pop, {"region", "year", "pop_billion"}, "population.csv");
  } catch (const SchemaError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    // --- TCRE ---
    std::map<std::string, calib::RcpScenario> rcp_map;
    for (std::size_t row = 0; row < rcp.rows.size(); ++row) {
      auto& sc = rcp_map[rcp.cell(row, rcp.column("scenario"))];
      sc.name = rcp.cell(row, rcp.column("scenario"));
      sc.years.push_back(rcp.integer(row, rcp.column("year")));
      sc.emissions.push_back(rcp.number(row, rcp.column("emissions_gtc")));
      sc.temperature.push_back(rcp.number(row, rcp.column("temp_c")));
    }
    std::vector<calib::RcpScenario> rcp_series;
    for (auto& [name, sc] : rcp_map) {
      sc.cum_emissions.resize(sc.emissions.size());
      double cum = 0;
      for (std::size_t t = 0; t < sc.emissions.size(); ++t) {
        cum += sc.emissions[t];
        sc.cum_emissions[t] = cum;
      }
      rcp_series.push_back(sc);
    }
    const double zeta = calib::fit_tcre(rcp_series);

    // RCP4.5 temperatures drive the damage branch of the structural fit.
    std::vector<double> temps_rcp45;
    if (rcp_map.count("RCP4.5")) {
      const auto& sc = rcp_map["RCP4.5"];
      for (std::size_t t = 0; t < sc.years.size(); ++t)
        if (sc.years[t] >= 2020) temps_rcp45.push_back(sc.temperature[t]);
    }
    if (temps_rcp45.empty()) throw SchemaError("rcp.csv lacks RCP4.5 rows from 2020 on");

    // --- region set and per-region series ---
    std::vector<std::string> region_names;
    std::map<std::string, std::size_t> initials_row;
    for (std::size_t row = 0; row < initials.rows.size(); ++row) {
      region_names.push_back(initials.cell(row, initials.column("region")));
      initials_row[region_names.back()] = row;
    }

    auto pop_grid = [&](const std::string& region) {
      std::vector<std::pair<int, double>> grid;
      for (std::size_t row = 0; row < pop.rows.size(); ++row)
        if (pop.cell(row, pop.column("region")) == region)
          grid.emplace_back(pop.integer(row, pop.column("year")),
                            pop.number(row, pop.column("pop_billion")));
      std::sort(grid.begin(), grid.end());
      if (grid.empty()) throw SchemaError("population.csv has no rows for " + region);
      return grid;
    };

    config::Document out;
    auto& prov = out.obtain("provenance");
    prov.set("code_version", manifest::kCodeVersion);
    prov.set("schema_version", "1");
    prov.set("multistart_seeds", "8");
    prov.set("bounds_b2", "(2, 6]");
    prov.set("bounds_b4", "[0, 0.2]");
    for (const std::string name :
         {"rcp.csv", "gdp.csv", "tax_scenarios.csv", "history.csv", "ndc.csv", "netzero.csv",
          "kahn.csv", "initials.csv", "population.csv"})
      prov.set(std::string("hash_") + name,
               manifest::hex(manifest::fnv1a_file(data_dir + "/" + std::string(name))));

    auto& glob = out.obtain("global");
    glob.set("zeta", fmt(zeta));

    std::ostringstream sigma_csv;
    sigma_csv << "# schema_version=1\nregion,year,sigma_gtc_per_t\n";
    sigma_csv.precision(12);

    for (const auto& region : region_names) {
      // Abatement: recover mu from the tax scenarios against the zero-tax run.
      std::map<std::string, calib::TaxScenario> scen;
      std::map<int, double> zero_tax_e, zero_tax_q;
      for (std::size_t row = 0; row < tax.rows.size(); ++row) {
        if (tax.cell(row, tax.column("region")) != region) continue;
        const std::string name = tax.cell(row, tax.column("scenario"));
        const int year = tax.integer(row, tax.column("year"));
        const double t_usd = tax.number(row, tax.column("tax_usd_tc"));
        const double e = tax.number(row, tax.column("emissions_gtc"));
        if (t_usd == 0) {
          zero_tax_e[year] = e;
          zero_tax_q[year] = tax.number(row, tax.column("gdp_t"));
          continue;
        }
        auto& s = scen[name];
        s.name = name;
        s.tax_usd_tc.push_back(t_usd);
        s.emissions.push_back(e);
      }
      if (zero_tax_e.empty())
        throw SchemaError("tax_scenarios.csv lacks a zero-tax scenario for " + region);
      std::vector<double> zero_e, zero_q;
      for (const auto& [year, e] : zero_tax_e) {
        zero_e.push_back(e);
        zero_q.push_back(zero_tax_q[year]);
      }
      std::vector<calib::TaxScenario> scen_vec;
      for (auto& [name, s] : scen) scen_vec.push_back(std::move(s));
      const auto ab = calib::fit_abatement(scen_vec, zero_e);

      // Carbon intensity from the zero-tax scenario.
      const auto sigma = calib::extract_carbon_intensity(zero_e, zero_q);
      {
        int year = 0;
        std::size_t k = 0;
        for (const auto& [y, e] : zero_tax_e) {
          (void)e;
          year = y;
          sigma_csv << region << ',' << year << ',' << sigma[k++] << '\n';
        }
      }

      // Structural TFP/damage estimation.
      calib::TfpDamageData td;
      for (std::size_t row = 0; row < gdp.rows.size(); ++row) {
        if (gdp.cell(row, gdp.column("region")) != region) continue;
        td.gdppc_nocc.push_back(gdp.number(row, gdp.column("gdppc_nocc")));
        const double cc = gdp.number(row, gdp.column("gdppc_cc"));
        if (td.gdppc_cc.size() < 30 && cc > 0) td.gdppc_cc.push_back(cc);
      }
      if (td.gdppc_nocc.size() < 80)
        throw SchemaError("gdp.csv: " + region + " has fewer than 80 projection years");
      const std::size_t irow = initials_row.at(region);
      td.K0 = initials.number(irow, initials.column("k0_t"));
      td.gdppc_2020 = initials.number(irow, initials.column("gdppc_2020_kusd"));
      td.temps_rcp45 = temps_rcp45;
      td.labor = scenario::interpolate_annual(pop_grid(region), scenario::kBaseYear, 111, false);
      model::GlobalParams globals;
      const auto tf = calib::fit_tfp_damage(td, globals);

      // Damage fit against the loss-ratio projections (sensitivity set).
      std::vector<double> d26, d85, t26, t85;
      for (std::size_t row = 0; row < kahn.rows.size(); ++row) {
        if (kahn.cell(row, kahn.column("region")) != region) continue;
        d26.push_back(kahn.number(row, kahn.column("delta_rcp26")));
        d85.push_back(kahn.number(row, kahn.column("delta_rcp85")));
        t26.push_back(kahn.number(row, kahn.column("temp_rcp26_c")));
        t85.push_back(kahn.number(row, kahn.column("temp_rcp85_c")));
      }
      const auto kf = calib::fit_damage_kahn(d26, d85, t26, t85);

      auto& sec = out.obtain("region:" + region);
      sec.set("b1", fmt(ab.b1));
      sec.set("b2", fmt(ab.b2));
      sec.set("b3", fmt(ab.b3));
      sec.set("b4", fmt(ab.b4));
      sec.set("b4_at_bound", ab.b4_at_bound ? "true" : "false");
      sec.set("g0", fmt(tf.g0));
      sec.set("d", fmt(tf.d));
      sec.set("pi1", fmt(tf.pi1));
      sec.set("pi2", fmt(tf.pi2));
      sec.set("pi1_kahn", fmt(kf.pi1));
      sec.set("pi2_kahn", fmt(kf.pi2));
    }

    // Cap pathways from the country pledges.
    std::map<std::string, std::vector<double>> hist_by_country;
    std::map<std::string, std::string> region_of;
    for (std::size_t row = 0; row < history.rows.size(); ++row) {
      const std::string country = history.cell(row, history.column("country"));
      region_of[country] = history.cell(row, history.column("region"));
      hist_by_country[country].push_back(history.number(row, history.column("emissions_gtc")));
    }
    std::map<std::string, int> nz_of;
    for (std::size_t row = 0; row < netzero.rows.size(); ++row)
      nz_of[netzero.cell(row, netzero.column("country"))] =
          netzero.integer(row, netzero.column("netzero_year"));

    std::map<std::string, std::vector<calib::CapPathway>> region_caps;
    for (std::size_t row = 0; row < ndc.rows.size(); ++row) {
      const std::string country = ndc.cell(row, ndc.column("country"));
      if (!hist_by_country.count(country))
        throw SchemaError("ndc.csv country '" + country + "' missing from history.csv");
      if (!nz_of.count(country))
        throw SchemaError("country '" + country + "' missing from netzero.csv");
      const std::string kind = ndc.cell(row, ndc.column("kind"));
      const double reduction = ndc.number(row, ndc.column("reduction"));
      const int target_year = ndc.integer(row, ndc.column("target_year"));
      double target_level = 0;
      if (kind == "emissions") {
        target_level = (1.0 - reduction) * ndc.number(row, ndc.column("base_emissions_gtc"));
      } else if (kind == "intensity") {
        // Intensity pledges convert through projected output:
        //   E_target = (1 - r) * sigma_base * Q_2030.
        target_level = (1.0 - reduction) *
                       ndc.number(row, ndc.column("sigma_base_gtc_per_t")) *
                       ndc.number(row, ndc.column("q2030_projected_t"));
      } else {
        throw SchemaError("ndc.csv: unknown pledge kind '" + kind + "'");
      }
      const auto path = calib::build_cap_pathway(hist_by_country.at(country), target_level,
                                                 target_year, nz_of.at(country), 2100);
      region_caps[region_of.at(country)].push_back(path);
    }

    std::ostringstream caps_csv;
    caps_csv << "# schema_version=1\nregion,year,cap_gtc\n";
    caps_csv.precision(12);
    for (const auto& [region, parts] : region_caps) {
      const auto total = calib::aggregate_cap_pathways(parts);
      for (std::size_t k = 0; k < total.caps.size(); ++k)
        caps_csv << region << ',' << total.start_year + static_cast<int>(k) << ','
                 << total.caps[k] << '\n';
    }

    const fs::path out_path(out_params_file);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    const std::string base = out_path.parent_path().string();
    const std::string stem = (base.empty() ? "" : base + "/");
    write_text(stem + "sigma_fitted.csv", sigma_csv.str());
    write_text(stem + "caps_fitted.csv", caps_csv.str());
    auto& outputs = out.obtain("outputs");
    outputs.set("sigma_paths", "sigma_fitted.csv");
    outputs.set("cap_pathways", "caps_fitted.csv");
    config::write_file(out, out_params_file);
  } catch (const SchemaError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  }
  std::cout << "calibration written to " << out_params_file << '\n';
  return kExitOk;
}

}  // namespace ets::cli
