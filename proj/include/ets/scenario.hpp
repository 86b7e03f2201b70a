#ifndef ETS_SCENARIO_HPP
#define ETS_SCENARIO_HPP

#include <string>
#include <vector>

#include "ets/config.hpp"
#include "ets/nash.hpp"

// Scenario configuration: global parameters, per-region calibrated constants,
// cap-scenario selection and solver settings, resolved against the bundled
// data directory into a ready-to-solve World.

namespace ets::scenario {

inline constexpr int kBaseYear = 2020;

// The twelve aggregated regions, in canonical order.
const std::vector<std::string>& canonical_regions();

struct RegionInputs {
  std::string name;
  double b1, b2, b3, b4;
  double pi1, pi2;
  double g0, d;
  double k0;             // $T
  double gdppc_2020;     // $1000s per person
  double pop_2020;       // billions
  double e0;             // GtC, gross emissions in 2020
  double sigma_decline;  // exponential decline rate of carbon intensity, 1/yr
};

struct ScenarioConfig {
  std::string name = "baseline";
  std::string data_dir = "data";
  std::string cap_scenario = "baseline";  // baseline|netzero2050|netzero2070|netzero2090|custom
  std::string cap_file;                   // used when cap_scenario = custom
  std::string output_dir = "out";
  bool ets_enabled = true;
  int horizon = 300;
  model::GlobalParams globals;
  nash::NashConfig nash;
};

// Parse/serialize the [scenario]/[global]/[solver] sections. Serialization is
// canonical: parse(serialize(cfg)) == cfg.
ScenarioConfig parse_scenario(const config::Document& doc);
config::Document serialize_scenario(const ScenarioConfig& cfg);
ScenarioConfig load_scenario_file(const std::string& path);

// Annual series from a coarse (year, value) grid: linear interpolation inside
// the grid, first/last value held outside, except caps which are zero past
// the end of their grid.
std::vector<double> interpolate_annual(const std::vector<std::pair<int, double>>& grid,
                                       int start_year, int n_years, bool zero_after_grid);

// Resolve the configuration against its data directory: regions.csv,
// population.csv and the cap tables become a fully populated World.
nash::World assemble_world(const ScenarioConfig& cfg);

// Cap pathway of one region under a scenario selector: the baseline grid
// interpolated annually; net-zero variants keep the baseline through 2030 and
// decline linearly to zero at the target year.
std::vector<double> scenario_caps(const std::vector<std::pair<int, double>>& baseline_grid,
                                  const std::string& cap_scenario, int horizon);

}  // namespace ets::scenario

#endif
