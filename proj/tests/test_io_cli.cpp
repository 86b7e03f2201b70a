#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ets/cli.hpp"
#include "ets/csv.hpp"
#include "ets/manifest.hpp"
#include "toy.hpp"

using namespace ets;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void put(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("csv parsing, typing and schema errors") {
  const auto t = csv::parse("# schema_version=2\na,b\n1,2.5\n3,x\n", "mem");
  CHECK(t.schema_version == 2);
  CHECK(t.columns == std::vector<std::string>{"a", "b"});
  CHECK(t.integer(0, 0) == 1);
  CHECK(t.number(0, 1) == doctest::Approx(2.5));
  CHECK_THROWS_WITH_AS(t.number(1, 1), doctest::Contains("row 2"), SchemaError);
  CHECK_THROWS_AS(csv::parse("a,b\n1\n", "mem"), SchemaError);
  CHECK_THROWS_AS(csv::require_columns(t, {"a", "missing"}, "mem"), SchemaError);
}

TEST_CASE("config round trip is the identity") {
  const std::string text = "[scenario]\nname = x\nhorizon = 20\n\n[global]\nbeta = 0.985\n\n";
  auto doc = config::parse(text, "mem");
  const std::string once = config::serialize(doc);
  auto doc2 = config::parse(once, "mem");
  CHECK(config::serialize(doc2) == once);
  CHECK(doc2.require("scenario").get("name") == "x");
  CHECK(doc2.require("global").number("beta") == doctest::Approx(0.985));
}

TEST_CASE("scenario config parse-serialize-parse is stable") {
  auto cfg = scenario::load_scenario_file(std::string(TEST_DATA_DIR) + "/scenario_baseline.cfg");
  CHECK(cfg.name == "baseline");
  CHECK(cfg.horizon == 300);
  CHECK(cfg.ets_enabled);
  const std::string once = config::serialize(scenario::serialize_scenario(cfg));
  auto cfg2 = scenario::parse_scenario(config::parse(once, "mem"));
  CHECK(config::serialize(scenario::serialize_scenario(cfg2)) == once);
}

TEST_CASE("bundled cap table reproduces the baseline pathway table bit-exactly") {
  auto t = csv::read_file(std::string(TEST_DATA_DIR) + "/caps_baseline_5yr.csv");
  csv::require_columns(t, {"region", "year", "cap_gtc"}, "caps");
  // Spot values, including the interpolation anchors.
  auto value = [&](const std::string& region, int year) {
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.cell(r, 0) == region && t.integer(r, 1) == year) return t.number(r, 2);
    REQUIRE(false);
    return 0.0;
  };
  CHECK(value("US", 2020) == 1.603);
  CHECK(value("US", 2030) == 0.812);
  CHECK(value("US", 2050) == 0.000);
  CHECK(value("Russia", 2050) == 0.207);
  CHECK(value("Russia", 2055) == 0.103);
  CHECK(value("China", 2060) == 0.004);
  CHECK(value("OthAs", 2065) == 0.040);
  CHECK(t.rows.size() == 12 * 11);
}

TEST_CASE("annual caps come from linear interpolation of the five-year grid") {
  const std::vector<std::pair<int, double>> grid = {{2050, 0.207}, {2055, 0.103}, {2060, 0.0}};
  auto caps = scenario::interpolate_annual(grid, 2050, 11, true);
  CHECK(caps[0] == doctest::Approx(0.207));
  CHECK(caps[2] == doctest::Approx(0.207 + 2.0 / 5.0 * (0.103 - 0.207)).epsilon(1e-12));
  CHECK(caps[5] == doctest::Approx(0.103));
  CHECK(caps[10] == 0.0);
}

TEST_CASE("net-zero cap variants keep the near-term path and retime the decline") {
  const std::vector<std::pair<int, double>> grid = {
      {2020, 1.0}, {2025, 0.9}, {2030, 0.8}, {2040, 0.4}, {2050, 0.0}};
  auto caps = scenario::scenario_caps(grid, "netzero2090", 120);
  CHECK(caps[0] == doctest::Approx(1.0));
  CHECK(caps[10] == doctest::Approx(0.8));
  CHECK(caps[40] == doctest::Approx(0.8 * 30.0 / 60.0).epsilon(1e-12));  // 2060
  CHECK(caps[70] == 0.0);                                                // 2090
  CHECK(caps[100] == 0.0);
}

TEST_CASE("assembled world has twelve regions with consistent initials") {
  scenario::ScenarioConfig cfg;
  cfg.data_dir = TEST_DATA_DIR;
  cfg.horizon = 120;
  cfg.globals.horizon = 120;
  auto world = scenario::assemble_world(cfg);
  CHECK(world.regions.size() == 12);
  for (std::size_t i = 0; i < world.regions.size(); ++i) {
    const auto& r = world.regions[i];
    // The TFP anchoring reproduces observed 2020 output: Y0 = gdppc * pop.
    const double Q0 = model::gross_output(world.tfp_paths[i][0], r.K0, r.L_path[0],
                                          world.globals.alpha);
    const double Y0 = model::net_output(Q0, 1.2, r.pi1, r.pi2);
    const double sigma_e0 = model::gross_emissions(r.sigma_path[0], Q0);
    CHECK(Y0 / r.L_path[0] > 1.0);
    CHECK(sigma_e0 > 0.1);
    CHECK(r.cap_path[55] == 0.0);  // all caps reach zero by 2070 + buffer
  }
  // Global 2020 caps exceed 2020 emissions (initial permit oversupply).
  double cap0 = 0, e0 = 0;
  for (const auto& r : world.regions) {
    cap0 += r.cap_path[0];
    e0 += model::gross_emissions(
        r.sigma_path[0], model::gross_output(world.tfp_paths[&r - &world.regions[0]][0],
                                             r.K0, r.L_path[0], world.globals.alpha));
  }
  CHECK(cap0 > e0);
}

TEST_CASE("archive round trip preserves the solution") {
  auto w = toy::world2(10);
  nash::NashConfig nc;
  nc.max_iterations = 3000;
  auto sol = nash::solve_nash(w, nc);
  REQUIRE(sol.converged);

  scenario::ScenarioConfig cfg;
  cfg.name = "toy";
  cfg.horizon = 10;
  cfg.globals.horizon = 10;
  cfg.cap_scenario = "custom";
  cfg.cap_file = "unused.csv";
  const std::string dir = "build_test_archive";
  fs::remove_all(dir);
  cli::write_archive(dir, cfg, w, sol);

  auto back = cli::load_archive(dir);
  CHECK(back.world.regions.size() == 2);
  CHECK(back.solution.converged == sol.converged);
  for (int i = 0; i < 2; ++i)
    for (int t = 0; t < 10; ++t) {
      CHECK(back.solution.regions[i].trajectory.mu[t] ==
            doctest::Approx(sol.regions[i].trajectory.mu[t]).epsilon(1e-15));
      CHECK(back.solution.regions[i].trajectory.consumption[t] ==
            doctest::Approx(sol.regions[i].trajectory.consumption[t]).epsilon(1e-15));
      CHECK(back.solution.regions[i].cum_emission_shadow[t] ==
            doctest::Approx(sol.regions[i].cum_emission_shadow[t]).epsilon(1e-15));
    }
  CHECK(back.solution.price_path == sol.price_path);

  // Manifest lists every file with its checksum.
  const std::string man = slurp(dir + "/manifest.txt");
  CHECK(man.find("trajectories.csv") != std::string::npos);
  CHECK(man.find("config_hash") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("calibrate refuses a dataset with a missing input, naming it") {
  const std::string dir = "build_test_empty_dataset";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK(cli::cmd_calibrate(dir, dir + "/params.cfg") == cli::kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("solve command end to end on a tiny custom scenario") {
  const std::string dir = "build_test_tiny";
  fs::remove_all(dir);
  fs::create_directories(dir);
  put(dir + "/regions.csv",
      "region,b1,b2,b3,b4,pi1,pi2,g0,d,k0_t,gdppc_2020_kusd,pop_2020_billion,e0_gtc,"
      "sigma_decline_per_yr\n"
      "North,0.462,2.859,9.92,0.182,0.0842,0.0096,0.02,0.01,70.0,63.5,0.331,1.41,0.012\n"
      "South,0.328,2.822,7.189,0.168,0.0003,0.0008,0.035,0.02,44.0,10.4,1.411,2.88,0.015\n");
  put(dir + "/population.csv",
      "region,year,pop_billion\nNorth,2020,0.331\nNorth,2100,0.40\n"
      "South,2020,1.411\nSouth,2100,1.10\n");
  put(dir + "/caps.csv",
      "region,year,cap_gtc\nNorth,2020,1.7\nNorth,2025,1.6\nNorth,2035,0.6\n"
      "South,2020,3.4\nSouth,2025,3.2\nSouth,2035,1.2\n");
  put(dir + "/tiny.cfg",
      "[scenario]\nname = tiny\ndata_dir = " + dir + "\ncap_scenario = custom\ncap_file = " +
          dir + "/caps.csv\noutput_dir = " + dir + "/out\nets_enabled = true\nhorizon = 16\n");

  auto cfg = scenario::load_scenario_file(dir + "/tiny.cfg");
  CHECK(cli::cmd_solve(cfg) == cli::kExitOk);
  CHECK(fs::exists(dir + "/out/trajectories.csv"));
  CHECK(fs::exists(dir + "/out/convergence.csv"));
  CHECK(fs::exists(dir + "/out/manifest.txt"));
  const std::string first = slurp(dir + "/out/trajectories.csv");
  const std::string first_prices = slurp(dir + "/out/prices.csv");

  // Re-running the same command reproduces the archive byte for byte.
  CHECK(cli::cmd_solve(cfg) == cli::kExitOk);
  CHECK(slurp(dir + "/out/trajectories.csv") == first);
  CHECK(slurp(dir + "/out/prices.csv") == first_prices);

  // Diagnose produces the report.
  CHECK(cli::cmd_diagnose(dir + "/out", "", dir + "/diag") == cli::kExitOk);
  CHECK(fs::exists(dir + "/diag/report.csv"));

  fs::remove_all(dir);
}

TEST_CASE("fnv checksums are stable") {
  CHECK(manifest::hex(manifest::fnv1a("")) == "cbf29ce484222325");
  CHECK(manifest::fnv1a("abc") != manifest::fnv1a("abd"));
}
