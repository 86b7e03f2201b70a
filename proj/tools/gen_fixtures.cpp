// Regenerates the synthetic calibration fixture CSVs under a target
// directory. The fixture encodes known generating parameters so the fits can
// be checked by round trip; committed outputs live in data/calibration_fixture.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ets/calibration.hpp"
#include "ets/model.hpp"
#include "ets/scenario.hpp"

namespace {

struct FixtureRegion {
  std::string name;
  double b1, b2, b3, b4, pi1, pi2, g0, d;
  double k0, gdppc, pop, e0;
};

// Table values for the three fixture regions (US, China, Russia).
const std::vector<FixtureRegion> kRegions = {
    {"US", 0.462, 2.859, 9.920, 0.182, 0.0842, 0.0096, 0.0033, 0.0011, 70.0, 63.5, 0.331, 1.41},
    {"China", 0.328, 2.822, 7.189, 0.168, 0.0003, 0.0008, 0.0345, 0.0308, 44.0, 10.4, 1.411, 2.88},
    {"Russia", 0.292, 2.499, 7.625, 0.2, -0.4169, 0.3094, 0.0170, 0.0154, 3.6, 10.2, 0.144, 0.45},
};

std::string g_dir;

std::ofstream open(const std::string& name) {
  std::ofstream out(g_dir + "/" + name, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << name << '\n';
    std::exit(1);
  }
  out << "# schema_version=1\n";
  out.precision(12);
  return out;
}

// Smooth per-year emission paths for the four concentration scenarios, zeroed
// before 1850 so within-file cumulative sums equal the full stock.
void write_rcp() {
  auto out = open("rcp.csv");
  out << "scenario,year,emissions_gtc,temp_c\n";
  struct Shape {
    const char* name;
    double peak, peak_year, width;
  };
  const std::vector<Shape> shapes = {{"RCP2.6", 10.0, 2020, 45.0},
                                     {"RCP4.5", 11.5, 2045, 60.0},
                                     {"RCP6.0", 13.5, 2070, 70.0},
                                     {"RCP8.5", 28.0, 2100, 80.0}};
  const double zeta = 0.0021;
  for (const auto& s : shapes) {
    double cum = 0;
    for (int year = 1850; year <= 2100; ++year) {
      const double x = (year - s.peak_year) / s.width;
      const double e = s.peak * std::exp(-x * x);
      cum += e;
      out << s.name << ',' << year << ',' << e << ',' << zeta * cum << '\n';
    }
  }
}

// GDP projections generated by the same nested growth solves the fit uses,
// from the table parameters, so the structural estimation can recover them.
void write_gdp_population_initials() {
  auto pop_out = open("population.csv");
  pop_out << "region,year,pop_billion\n";
  auto gdp_out = open("gdp.csv");
  gdp_out << "region,year,gdppc_nocc,gdppc_cc\n";
  auto init_out = open("initials.csv");
  init_out << "region,k0_t,gdppc_2020_kusd,pop_2020_billion,e0_gtc\n";

  const int inner = 110;
  ets::model::GlobalParams globals;
  globals.horizon = inner;

  // RCP4.5-like temperatures, matching write_rcp above from 2020 on.
  std::vector<double> temps(inner + 1);
  {
    double cum = 0;
    for (int year = 1850; year <= 1850 + 170 + inner; ++year) {
      const double x = (year - 2045) / 60.0;
      cum += 11.5 * std::exp(-x * x);
      if (year >= 2020 && year - 2020 <= inner) temps[year - 2020] = 0.0021 * cum;
    }
  }

  for (const auto& fr : kRegions) {
    std::vector<double> labor(inner + 1);
    for (int t = 0; t <= inner; ++t) {
      // Mild logistic population drift, flat after 2100.
      const double s = std::min(t, 80) / 80.0;
      const double target = fr.name == "China" ? 0.8 * fr.pop : 1.25 * fr.pop;
      labor[t] = fr.pop + (target - fr.pop) * (3 * s * s - 2 * s * s * s);
    }
    for (int year = 2020; year <= 2100; year += 5)
      pop_out << fr.name << ',' << year << ',' << labor[year - 2020] << '\n';
    init_out << fr.name << ',' << fr.k0 << ',' << fr.gdppc << ',' << fr.pop << ',' << fr.e0
             << '\n';

    std::vector<double> damage(inner + 1), ones(inner + 1, 1.0), tfp(inner + 1);
    for (int t = 0; t <= inner; ++t)
      damage[t] = 1.0 + fr.pi1 * temps[t] + fr.pi2 * temps[t] * temps[t];
    tfp[0] = fr.gdppc * damage[0] * std::pow(fr.pop, globals.alpha) /
             std::pow(fr.k0, globals.alpha);
    for (int t = 0; t < inner; ++t)
      tfp[t + 1] = tfp[t] * std::exp(fr.g0 * std::exp(-fr.d * t));

    ets::calib::GrowthInput gi;
    gi.globals = globals;
    gi.tfp = tfp;
    gi.labor = labor;
    gi.K0 = fr.k0;
    gi.damage = ones;
    const auto y_nocc = ets::calib::solve_growth_path(gi);
    gi.damage = damage;
    const auto y_cc = ets::calib::solve_growth_path(gi);

    for (int t = 0; t < 80; ++t)
      gdp_out << fr.name << ',' << 2020 + t << ',' << y_nocc[t] << ','
              << (t < 30 ? y_cc[t] : 0.0) << '\n';
  }
}

// Ten tax levels; emissions derived by inverting the MAC identity at the
// table coefficients, plus the zero-tax scenario that carries sigma.
void write_tax_scenarios() {
  auto out = open("tax_scenarios.csv");
  out << "scenario,year,tax_usd_tc,region,emissions_gtc,gdp_t\n";
  const std::vector<double> taxes = {0, 10, 20, 40, 60, 90, 130, 180, 240, 310, 390};
  for (const auto& fr : kRegions) {
    const double q0 = fr.gdppc * fr.pop * (1.0 + fr.pi1 * 1.2 + fr.pi2 * 1.44);
    for (double tax : taxes) {
      const std::string name = tax == 0 ? "FFrun451" : "tax" + std::to_string(int(tax));
      for (int year = 2020; year <= 2095; year += 5) {
        const int t = year - 2020;
        const double q = q0 * std::exp(0.015 * t);  // stylized BAU output growth
        const double e0 = fr.e0 / q0 * std::exp(-0.012 * t) * q;
        double mu = 0;
        if (tax > 0) {
          // Solve tax = 1000 b2 mu^(b2-1) (b1 + b3 e^(-b4 t)) for mu.
          const double coeff = 1000.0 * fr.b2 * (fr.b1 + fr.b3 * std::exp(-fr.b4 * t));
          mu = std::pow(std::min(1.0, tax / coeff), 1.0 / (fr.b2 - 1.0));
        }
        out << name << ',' << year << ',' << tax << ',' << fr.name << ','
            << (1.0 - mu) * e0 << ',' << q << '\n';
      }
    }
  }
}

void write_kahn() {
  auto out = open("kahn.csv");
  out << "region,year,temp_rcp26_c,temp_rcp85_c,delta_rcp26,delta_rcp85\n";
  for (const auto& fr : kRegions) {
    for (int t = 0; t < 95; ++t) {
      const double t26 = 1.2 + 0.5 * (1.0 - std::exp(-t / 40.0));
      const double t85 = 1.2 + 3.6 * t / 94.0;
      const double d26 = 1.0 - 1.0 / (1.0 + fr.pi1 * t26 + fr.pi2 * t26 * t26);
      const double d85 = 1.0 - 1.0 / (1.0 + fr.pi1 * t85 + fr.pi2 * t85 * t85);
      out << fr.name << ',' << 2020 + t << ',' << t26 << ',' << t85 << ',' << d26 << ','
          << d85 << '\n';
    }
  }
}

// Country pledge inputs: two countries per region; one intensity pledge.
void write_pledges() {
  auto hist = open("history.csv");
  hist << "country,region,year,emissions_gtc\n";
  auto ndc = open("ndc.csv");
  ndc << "country,target_year,kind,reduction,base_emissions_gtc,sigma_base_gtc_per_t,"
         "q2030_projected_t\n";
  auto nz = open("netzero.csv");
  nz << "country,netzero_year\n";

  struct Country {
    const char* name;
    const char* region;
    double e2014, trend;  // linear drift per year
    const char* kind;
    double reduction;
    int target_year, netzero;
    double sigma_base, q2030;
  };
  const std::vector<Country> countries = {
      {"Alpha", "US", 1.10, -0.010, "emissions", 0.45, 2030, 2050, 0, 0},
      {"Beta", "US", 0.42, -0.004, "emissions", 0.40, 2030, 2050, 0, 0},
      {"Gamma", "China", 2.10, 0.020, "intensity", 0.60, 2030, 2060, 0.40, 9.5},
      {"Delta", "China", 0.80, 0.006, "emissions", 0.10, 2030, 2060, 0, 0},
      {"Epsilon", "Russia", 0.46, -0.002, "emissions", 0.25, 2030, 2060, 0, 0},
  };
  for (const auto& c : countries) {
    for (int year = 2014; year <= 2018; ++year)
      hist << c.name << ',' << c.region << ',' << year << ','
           << c.e2014 + c.trend * (year - 2014) << '\n';
    const double base = c.e2014 + c.trend * 4;  // 2018
    ndc << c.name << ',' << c.target_year << ',' << c.kind << ',' << c.reduction << ','
        << base << ',' << c.sigma_base << ',' << c.q2030 << '\n';
    nz << c.name << ',' << c.netzero << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  g_dir = argc > 1 ? argv[1] : "data/calibration_fixture";
  std::filesystem::create_directories(g_dir);
  write_rcp();
  write_gdp_population_initials();
  write_tax_scenarios();
  write_kahn();
  write_pledges();
  std::cout << "fixture written to " << g_dir << '\n';
  return 0;
}
