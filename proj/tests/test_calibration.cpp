#include <doctest.h>

#include <cmath>
#include <random>

#include "ets/calibration.hpp"

using namespace ets;

namespace {

calib::RcpScenario synth_scenario(const std::string& name, double zeta, double peak,
                                  double peak_year, double width, double wobble = 0.0) {
  calib::RcpScenario s;
  s.name = name;
  double cum = 0;
  int k = 0;
  for (int year = 1850; year <= 2100; ++year, ++k) {
    const double x = (year - peak_year) / width;
    const double e = peak * std::exp(-x * x);
    cum += e;
    s.years.push_back(year);
    s.emissions.push_back(e);
    s.cum_emissions.push_back(cum);
    s.temperature.push_back(zeta * cum * (1.0 + wobble * std::sin(0.21 * k)));
  }
  return s;
}

}  // namespace

TEST_CASE("tcre fit recovers the exact slope") {
  auto s = synth_scenario("one", 0.0021, 11.0, 2040, 60);
  CHECK(calib::fit_tcre({s}) == doctest::Approx(0.0021).epsilon(1e-12));
}

TEST_CASE("tcre fit pools scenarios and tolerates small noise") {
  std::vector<calib::RcpScenario> scens = {
      synth_scenario("a", 0.0021, 10.0, 2020, 45, 0.01),
      synth_scenario("b", 0.0021, 28.0, 2100, 80, -0.01)};
  const double z = calib::fit_tcre(scens);
  CHECK(std::fabs(z - 0.0021) / 0.0021 < 0.02);
}

TEST_CASE("tcre fit is scale equivariant") {
  auto s = synth_scenario("one", 0.0021, 11.0, 2040, 60);
  auto scaled = s;
  for (auto& e : scaled.cum_emissions) e *= 3.0;
  CHECK(calib::fit_tcre({scaled}) == doctest::Approx(0.0021 / 3.0).epsilon(1e-12));
}

TEST_CASE("tcre degenerate data is rejected") {
  calib::RcpScenario s;
  s.name = "flat";
  s.years = {2000, 2001, 2002};
  s.emissions = {0, 0, 0};
  s.cum_emissions = {0, 0, 0};
  s.temperature = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(calib::fit_tcre({s}), DegenerateData);
}

TEST_CASE("cap pathway: flat history and matching target stay flat then decline") {
  const std::vector<double> hist(5, 1.0);
  auto path = calib::build_cap_pathway(hist, 1.0, 2030, 2050, 2065);
  for (int year = 2020; year <= 2030; ++year)
    CHECK(path.at_year(year) == doctest::Approx(1.0).epsilon(1e-9));
  // Linear segment: midpoint at half the 2030 level.
  CHECK(path.at_year(2040) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(path.at_year(2050) == 0.0);
  CHECK(path.at_year(2060) == 0.0);
  CHECK_FALSE(path.clamped_negative);
}

TEST_CASE("cap pathway: steep pledges clamp at zero and set the flag") {
  const std::vector<double> hist = {1.0, 0.8, 0.6, 0.4, 0.2};
  auto path = calib::build_cap_pathway(hist, 0.0, 2025, 2050, 2060);
  CHECK(path.clamped_negative);
  for (double v : path.caps) CHECK(v >= 0.0);
}

TEST_CASE("cap pathway aggregation is additive") {
  const std::vector<double> h1 = {1.0, 1.0, 1.0, 1.0, 1.0};
  const std::vector<double> h2 = {0.4, 0.42, 0.44, 0.46, 0.48};
  auto p1 = calib::build_cap_pathway(h1, 0.7, 2030, 2055, 2070);
  auto p2 = calib::build_cap_pathway(h2, 0.3, 2030, 2045, 2070);
  auto sum = calib::aggregate_cap_pathways({p1, p2});
  for (int year = 2020; year <= 2070; ++year)
    CHECK(sum.at_year(year) ==
          doctest::Approx(p1.at_year(year) + p2.at_year(year)).epsilon(1e-12));
}

TEST_CASE("growth solve produces a growing optimal path") {
  const int H = 80;
  model::GlobalParams g;
  g.horizon = H;
  calib::GrowthInput gi;
  gi.globals = g;
  gi.K0 = 50.0;
  gi.labor.assign(H + 1, 0.5);
  gi.damage.assign(H + 1, 1.0);
  gi.tfp.resize(H + 1);
  gi.tfp[0] = 8.0;
  for (int t = 0; t < H; ++t) gi.tfp[t + 1] = gi.tfp[t] * std::exp(0.01 * std::exp(-0.005 * t));
  const auto y = calib::solve_growth_path(gi);
  REQUIRE(static_cast<int>(y.size()) == H);
  for (double v : y) CHECK(v > 0);
  CHECK(y[H - 1] > y[0]);
}

TEST_CASE("structural estimation round trip recovers the generator") {
  const int inner = 110;
  const double g0 = 0.0170, d = 0.0154, pi1 = -0.4169, pi2 = 0.3094;  // Russia-like
  const double K0 = 3.6, y2020 = 10.2;
  model::GlobalParams g;
  g.horizon = inner;
  std::vector<double> labor(inner + 1);
  for (int t = 0; t <= inner; ++t) labor[t] = 0.144 - 0.02 * std::min(t, 80) / 80.0;
  std::vector<double> temps(inner + 1);
  for (int t = 0; t <= inner; ++t) temps[t] = 1.2 + 1.4 * (1 - std::exp(-t / 45.0));
  std::vector<double> damage(inner + 1), ones(inner + 1, 1.0), tfp(inner + 1);
  for (int t = 0; t <= inner; ++t)
    damage[t] = 1 + pi1 * temps[t] + pi2 * temps[t] * temps[t];
  tfp[0] = y2020 * damage[0] * std::pow(labor[0], g.alpha) / std::pow(K0, g.alpha);
  for (int t = 0; t < inner; ++t) tfp[t + 1] = tfp[t] * std::exp(g0 * std::exp(-d * t));
  calib::GrowthInput gi{g, tfp, labor, ones, K0};
  const auto y_nocc = calib::solve_growth_path(gi);
  gi.damage = damage;
  const auto y_cc = calib::solve_growth_path(gi);

  calib::TfpDamageData data;
  data.gdppc_nocc.assign(y_nocc.begin(), y_nocc.begin() + 80);
  data.gdppc_cc.assign(y_cc.begin(), y_cc.begin() + 30);
  data.temps_rcp45 = temps;
  data.labor = labor;
  data.K0 = K0;
  data.gdppc_2020 = y2020;
  const auto fit = calib::fit_tfp_damage(data, model::GlobalParams{});
  CHECK(std::fabs(fit.g0 - g0) / g0 < 1e-3);
  CHECK(std::fabs(fit.d - d) / d < 1e-3);
  CHECK(std::fabs(fit.pi1 - pi1) / std::fabs(pi1) < 1e-3);
  CHECK(std::fabs(fit.pi2 - pi2) / pi2 < 1e-3);
}

TEST_CASE("undamaged projections imply (near) zero damage parameters") {
  const int inner = 110;
  model::GlobalParams g;
  g.horizon = inner;
  std::vector<double> labor(inner + 1, 0.3), temps(inner + 1), tfp(inner + 1),
      ones(inner + 1, 1.0);
  for (int t = 0; t <= inner; ++t) temps[t] = 1.2 + 0.01 * t;
  tfp[0] = 20.0 * std::pow(labor[0], g.alpha) / std::pow(40.0, g.alpha);
  for (int t = 0; t < inner; ++t) tfp[t + 1] = tfp[t] * std::exp(0.008 * std::exp(-0.002 * t));
  calib::GrowthInput gi{g, tfp, labor, ones, 40.0};
  const auto y = calib::solve_growth_path(gi);

  calib::TfpDamageData data;
  data.gdppc_nocc.assign(y.begin(), y.begin() + 80);
  data.gdppc_cc.assign(y.begin(), y.begin() + 30);  // same path: no climate impact
  data.temps_rcp45 = temps;
  data.labor = labor;
  data.K0 = 40.0;
  data.gdppc_2020 = y[0];
  const auto fit = calib::fit_tfp_damage(data, model::GlobalParams{});
  CHECK(std::fabs(fit.pi1) < 2e-3);
  CHECK(std::fabs(fit.pi2) < 2e-3);
}

TEST_CASE("carbon intensity extraction") {
  CHECK(calib::extract_carbon_intensity({2.0}, {20.0})[0] == doctest::Approx(0.1));
  const auto sig = calib::extract_carbon_intensity({3.0, 1.5, 0.75}, {30.0, 15.0, 7.5});
  for (double v : sig) CHECK(v == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(calib::extract_carbon_intensity({1.0}, {0.0}), ZeroGdp);

  // Construction identity: sigma recovered from gross emissions to machine
  // precision.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> us(0.01, 0.5), uq(1.0, 50.0);
  std::vector<double> sigma(50), Q(50), E(50);
  for (int t = 0; t < 50; ++t) {
    sigma[t] = us(rng);
    Q[t] = uq(rng);
    E[t] = model::gross_emissions(sigma[t], Q[t]);
  }
  const auto back = calib::extract_carbon_intensity(E, Q);
  for (int t = 0; t < 50; ++t)
    CHECK(std::fabs(back[t] - sigma[t]) <= 1e-12 * sigma[t]);
}

TEST_CASE("abatement fit round trip within one percent") {
  const double b1 = 0.462, b2 = 2.859, b3 = 9.920, b4 = 0.182;  // US-like truth
  std::vector<calib::TaxScenario> scens;
  std::vector<double> zero_tax(76, 0.0);
  for (int k = 0; k < 16; ++k) zero_tax[static_cast<std::size_t>(5 * k)] =
      1.4 * std::exp(0.005 * 5 * k);
  for (double tax : {15.0, 40.0, 80.0, 140.0, 220.0, 320.0}) {
    calib::TaxScenario s;
    s.name = "tax" + std::to_string(static_cast<int>(tax));
    s.tax_usd_tc.assign(76, 0.0);
    s.emissions.assign(76, 0.0);
    for (int k = 0; k < 16; ++k) {
      const double t = 5.0 * k;
      const double coeff = 1000.0 * b2 * (b1 + b3 * std::exp(-b4 * t));
      const double mu = std::pow(std::min(1.0, tax / coeff), 1.0 / (b2 - 1.0));
      s.tax_usd_tc[static_cast<std::size_t>(5 * k)] = tax;
      s.emissions[static_cast<std::size_t>(5 * k)] =
          (1.0 - mu) * zero_tax[static_cast<std::size_t>(5 * k)];
    }
    scens.push_back(std::move(s));
  }
  const auto fit = calib::fit_abatement(scens, zero_tax);
  CHECK(std::fabs(fit.b1 - b1) / b1 < 0.01);
  CHECK(std::fabs(fit.b2 - b2) / b2 < 0.01);
  CHECK(std::fabs(fit.b3 - b3) / b3 < 0.01);
  CHECK(std::fabs(fit.b4 - b4) / b4 < 0.01);
}

TEST_CASE("mu recovery arithmetic and interior-point filtering") {
  // mu = 1 - E/E0.
  CHECK(1.0 - 1.5 / 2.0 == doctest::Approx(0.25));
  // A zero-tax-only dataset has no interior points.
  calib::TaxScenario s;
  s.name = "zero";
  s.tax_usd_tc = {0, 0, 0, 0};
  s.emissions = {2, 2, 2, 2};
  CHECK_THROWS_AS(calib::fit_abatement({s}, {2, 2, 2, 2}), NoInteriorPoints);
}

TEST_CASE("loss-ratio damage fit round trip") {
  const double pi1 = 0.1886, pi2 = 0.0764;  // Africa-like truth
  std::vector<double> t26(95), t85(95), d26(95), d85(95);
  for (int t = 0; t < 95; ++t) {
    t26[t] = 1.2 + 0.5 * (1 - std::exp(-t / 40.0));
    t85[t] = 1.2 + 3.6 * t / 94.0;
    d26[t] = 1.0 - 1.0 / (1 + pi1 * t26[t] + pi2 * t26[t] * t26[t]);
    d85[t] = 1.0 - 1.0 / (1 + pi1 * t85[t] + pi2 * t85[t] * t85[t]);
  }
  const auto fit = calib::fit_damage_kahn(d26, d85, t26, t85);
  CHECK(std::fabs(fit.pi1 - pi1) < 1e-6);
  CHECK(std::fabs(fit.pi2 - pi2) < 1e-6);

  // Equal losses with distinct temperatures: no damage signal.
  std::vector<double> zero(95, 0.1);
  const auto flat = calib::fit_damage_kahn(zero, zero, t26, t85);
  CHECK(std::fabs(flat.pi1) < 1e-6);
  CHECK(std::fabs(flat.pi2) < 1e-6);

  CHECK_THROWS_AS(calib::fit_damage_kahn(d26, d85, t26, t26), DegenerateData);
}

TEST_CASE("tfp growth extension") {
  const std::vector<double> g79 = {0.003, 0.010, 0.003};
  const std::vector<double> y79 = {120.0, 60.0, 120.0};
  const auto g = calib::extend_tfp_growth(g79, y79, 0, 0.3, 0.005, 300);

  // Long-run US rate.
  CHECK(g[0].back() == doctest::Approx(0.0033 * 0.7).epsilon(1e-3));
  // A region matching US output per capita inherits the US rate.
  for (std::size_t k = 1; k < g[2].size(); ++k)
    CHECK(g[2][k] == doctest::Approx(g[0][k]).epsilon(1e-9));
  // A poorer region grows strictly faster (catch-up).
  for (std::size_t k = 1; k < 40; ++k) CHECK(g[1][k] > g[0][k]);
}
