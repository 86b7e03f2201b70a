#include "ets/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ets/calibration.hpp"
#include "ets/csv.hpp"

namespace ets::scenario {

const std::vector<std::string>& canonical_regions() {
  static const std::vector<std::string> names = {"US",    "EU",      "Japan",  "Russia",
                                                 "Eurasia", "China",   "India",  "MidEast",
                                                 "Africa",  "LatAm",   "OHI",    "OthAs"};
  return names;
}

ScenarioConfig parse_scenario(const config::Document& doc) {
  ScenarioConfig cfg;
  const auto& sc = doc.require("scenario");
  cfg.name = sc.get("name");
  cfg.data_dir = sc.get_or("data_dir", cfg.data_dir);
  cfg.cap_scenario = sc.get_or("cap_scenario", cfg.cap_scenario);
  cfg.cap_file = sc.get_or("cap_file", "");
  cfg.output_dir = sc.get_or("output_dir", cfg.output_dir);
  cfg.ets_enabled = sc.flag_or("ets_enabled", true);
  cfg.horizon = sc.integer_or("horizon", 300);

  if (const auto* g = doc.find("global")) {
    cfg.globals.beta = g->number_or("beta", cfg.globals.beta);
    cfg.globals.gamma = g->number_or("gamma", cfg.globals.gamma);
    cfg.globals.alpha = g->number_or("alpha", cfg.globals.alpha);
    cfg.globals.delta = g->number_or("delta", cfg.globals.delta);
    cfg.globals.zeta = g->number_or("zeta", cfg.globals.zeta);
    cfg.globals.consumption_share_terminal =
        g->number_or("consumption_share_terminal", cfg.globals.consumption_share_terminal);
  }
  cfg.globals.horizon = cfg.horizon;

  if (const auto* s = doc.find("solver")) {
    cfg.nash.omega = s->number_or("omega", cfg.nash.omega);
    cfg.nash.price_floor = s->number_or("price_floor", cfg.nash.price_floor);
    cfg.nash.max_iterations = s->integer_or("max_iterations", cfg.nash.max_iterations);
    cfg.nash.price_tol = s->number_or("price_tol", cfg.nash.price_tol);
    cfg.nash.emission_tol = s->number_or("emission_tol", cfg.nash.emission_tol);
    cfg.nash.clearing_tol = s->number_or("clearing_tol", cfg.nash.clearing_tol);
    cfg.nash.region_options.kkt_tol = s->number_or("kkt_tol", cfg.nash.region_options.kkt_tol);
    cfg.nash.threads = s->integer_or("threads", cfg.nash.threads);
  }
  cfg.nash.ets_enabled = cfg.ets_enabled;

  const std::vector<std::string> known = {"baseline", "netzero2050", "netzero2070",
                                          "netzero2090", "custom"};
  if (std::find(known.begin(), known.end(), cfg.cap_scenario) == known.end())
    throw ConfigError("unknown cap_scenario '" + cfg.cap_scenario + "'");
  if (cfg.cap_scenario == "custom" && cfg.cap_file.empty())
    throw ConfigError("cap_scenario = custom requires cap_file");
  return cfg;
}

config::Document serialize_scenario(const ScenarioConfig& cfg) {
  config::Document doc;
  auto& sc = doc.obtain("scenario");
  sc.set("name", cfg.name);
  sc.set("data_dir", cfg.data_dir);
  sc.set("cap_scenario", cfg.cap_scenario);
  if (!cfg.cap_file.empty()) sc.set("cap_file", cfg.cap_file);
  sc.set("output_dir", cfg.output_dir);
  sc.set("ets_enabled", cfg.ets_enabled ? "true" : "false");
  sc.set("horizon", config::format_number(cfg.horizon));

  auto& g = doc.obtain("global");
  g.set("beta", config::format_number(cfg.globals.beta));
  g.set("gamma", config::format_number(cfg.globals.gamma));
  g.set("alpha", config::format_number(cfg.globals.alpha));
  g.set("delta", config::format_number(cfg.globals.delta));
  g.set("zeta", config::format_number(cfg.globals.zeta));
  g.set("consumption_share_terminal",
        config::format_number(cfg.globals.consumption_share_terminal));

  auto& s = doc.obtain("solver");
  s.set("omega", config::format_number(cfg.nash.omega));
  s.set("price_floor", config::format_number(cfg.nash.price_floor));
  s.set("max_iterations", config::format_number(cfg.nash.max_iterations));
  s.set("price_tol", config::format_number(cfg.nash.price_tol));
  s.set("emission_tol", config::format_number(cfg.nash.emission_tol));
  s.set("clearing_tol", config::format_number(cfg.nash.clearing_tol));
  s.set("kkt_tol", config::format_number(cfg.nash.region_options.kkt_tol));
  s.set("threads", config::format_number(cfg.nash.threads));
  return doc;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  return parse_scenario(config::read_file(path));
}

std::vector<double> interpolate_annual(const std::vector<std::pair<int, double>>& grid,
                                       int start_year, int n_years, bool zero_after_grid) {
  if (grid.empty()) throw ConfigError("empty interpolation grid");
  std::vector<double> out(n_years);
  for (int k = 0; k < n_years; ++k) {
    const int year = start_year + k;
    if (year <= grid.front().first) {
      out[k] = grid.front().second;
      continue;
    }
    if (year >= grid.back().first) {
      out[k] = zero_after_grid && year > grid.back().first ? 0.0 : grid.back().second;
      continue;
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (year <= grid[i].first) {
        const auto [y0, v0] = grid[i - 1];
        const auto [y1, v1] = grid[i];
        // Grid years reproduce their values exactly.
        out[k] = year == y1 ? v1
                            : v0 + (v1 - v0) * (static_cast<double>(year - y0) /
                                                static_cast<double>(y1 - y0));
        break;
      }
    }
  }
  return out;
}

std::vector<double> scenario_caps(const std::vector<std::pair<int, double>>& baseline_grid,
                                  const std::string& cap_scenario, int horizon) {
  if (cap_scenario == "baseline" || cap_scenario == "custom")
    return interpolate_annual(baseline_grid, kBaseYear, horizon + 1, true);
  int netzero = 0;
  if (cap_scenario == "netzero2050")
    netzero = 2050;
  else if (cap_scenario == "netzero2070")
    netzero = 2070;
  else if (cap_scenario == "netzero2090")
    netzero = 2090;
  else
    throw ConfigError("unknown cap scenario '" + cap_scenario + "'");

  std::vector<std::pair<int, double>> truncated;
  for (const auto& [year, v] : baseline_grid)
    if (year <= 2030) truncated.emplace_back(year, v);
  if (truncated.empty() || truncated.back().first != 2030)
    throw ConfigError("baseline cap grid must include 2030 for net-zero variants");
  truncated.emplace_back(netzero, 0.0);
  // The linear decline from the 2030 level to zero falls out of the grid
  // interpolation itself.
  return interpolate_annual(truncated, kBaseYear, horizon + 1, true);
}

nash::World assemble_world(const ScenarioConfig& cfg) {
  const int H = cfg.horizon;
  const std::string dir = cfg.data_dir;

  csv::Table regions = csv::read_file(dir + "/regions.csv");
  csv::require_columns(regions,
                       {"region", "b1", "b2", "b3", "b4", "pi1", "pi2", "g0", "d", "k0_t",
                        "gdppc_2020_kusd", "pop_2020_billion", "e0_gtc",
                        "sigma_decline_per_yr"},
                       "regions.csv");

  csv::Table pop = csv::read_file(dir + "/population.csv");
  csv::require_columns(pop, {"region", "year", "pop_billion"}, "population.csv");

  const std::string cap_path = cfg.cap_scenario == "custom"
                                   ? cfg.cap_file
                                   : dir + "/caps_baseline_5yr.csv";
  csv::Table caps = csv::read_file(cap_path);
  csv::require_columns(caps, {"region", "year", "cap_gtc"}, cap_path);

  auto grid_for = [](const csv::Table& t, const std::string& region,
                     const std::string& value_col) {
    std::vector<std::pair<int, double>> grid;
    const int rc = t.column("region"), yc = t.column("year");
    const int vc = t.column(value_col);
    for (std::size_t row = 0; row < t.rows.size(); ++row)
      if (t.cell(row, rc) == region)
        grid.emplace_back(t.integer(row, yc), t.number(row, vc));
    std::sort(grid.begin(), grid.end());
    return grid;
  };

  nash::World world;
  world.globals = cfg.globals;
  world.globals.horizon = H;
  world.initial_cum_emissions = world.globals.initial_cum_emissions();

  std::vector<RegionInputs> inputs;
  for (std::size_t row = 0; row < regions.rows.size(); ++row) {
    RegionInputs in;
    in.name = regions.cell(row, regions.column("region"));
    in.b1 = regions.number(row, regions.column("b1"));
    in.b2 = regions.number(row, regions.column("b2"));
    in.b3 = regions.number(row, regions.column("b3"));
    in.b4 = regions.number(row, regions.column("b4"));
    in.pi1 = regions.number(row, regions.column("pi1"));
    in.pi2 = regions.number(row, regions.column("pi2"));
    in.g0 = regions.number(row, regions.column("g0"));
    in.d = regions.number(row, regions.column("d"));
    in.k0 = regions.number(row, regions.column("k0_t"));
    in.gdppc_2020 = regions.number(row, regions.column("gdppc_2020_kusd"));
    in.pop_2020 = regions.number(row, regions.column("pop_2020_billion"));
    in.e0 = regions.number(row, regions.column("e0_gtc"));
    in.sigma_decline = regions.number(row, regions.column("sigma_decline_per_yr"));
    inputs.push_back(in);
  }
  if (cfg.cap_scenario != "custom") {
    if (inputs.size() != canonical_regions().size())
      throw ConfigError("the paper scenarios need all 12 regions; regions.csv has " +
                        std::to_string(inputs.size()));
  }

  const double T0 = model::kInitialTemperature;

  // TFP growth past 2099 follows the cross-region convergence rule anchored
  // on the US; toy datasets without a US region keep the in-century decay.
  int us_index = -1;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (inputs[i].name == "US") us_index = static_cast<int>(i);

  std::vector<std::vector<double>> g_post;
  if (us_index >= 0 && H > 79) {
    std::vector<double> g79(inputs.size()), y79(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& in = inputs[i];
      g79[i] = in.g0 * std::exp(-in.d * 79.0);
      double y = in.gdppc_2020;
      for (int t = 0; t < 79; ++t)
        y *= std::exp(in.g0 * std::exp(-in.d * t) / (1.0 - cfg.globals.alpha));
      y79[i] = y;
    }
    g_post = calib::extend_tfp_growth(g79, y79, us_index, cfg.globals.alpha, 0.005, H + 1);
  }

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& in = inputs[i];
    model::RegionParams r;
    r.name = in.name;
    r.b1 = in.b1;
    r.b2 = in.b2;
    r.b3 = in.b3;
    r.b4 = in.b4;
    r.pi1 = in.pi1;
    r.pi2 = in.pi2;
    r.g0 = in.g0;
    r.d = in.d;
    r.K0 = in.k0;

    auto pop_grid = grid_for(pop, in.name, "pop_billion");
    if (pop_grid.empty()) throw ConfigError("population.csv has no rows for " + in.name);
    r.L_path = interpolate_annual(pop_grid, kBaseYear, H + 1, false);

    const double D0 = model::damage_factor(T0, r.pi1, r.pi2);
    const double Y0 = in.gdppc_2020 * in.pop_2020;  // $T net output in 2020
    const double Q0 = Y0 * D0;
    const double sigma0 = in.e0 / Q0;
    r.sigma_path.resize(H + 1);
    for (int t = 0; t <= H; ++t) r.sigma_path[t] = sigma0 * std::exp(-in.sigma_decline * t);

    r.A0 = in.gdppc_2020 * D0 * std::pow(in.pop_2020, cfg.globals.alpha) /
           std::pow(in.k0, cfg.globals.alpha);

    auto cap_grid = grid_for(caps, in.name, "cap_gtc");
    if (cap_grid.empty()) throw ConfigError(cap_path + " has no rows for " + in.name);
    r.cap_path = scenario_caps(cap_grid, cfg.cap_scenario, H);

    world.tfp_paths.push_back(calib::build_tfp_path(
        r.A0, r.g0, r.d, g_post.empty() ? std::vector<double>{} : g_post[i], H));
    world.regions.push_back(std::move(r));
  }

  world.validate();
  return world;
}

}  // namespace ets::scenario
