#include <doctest.h>

#include <cmath>
#include <random>

#include "ets/model.hpp"

using namespace ets;

namespace {

// Abatement cost parameters for all twelve regions (baseline set), used by
// the MAC monotonicity property.
struct Coeffs {
  double b1, b2, b3, b4;
};
const Coeffs kAbatement[12] = {
    {0.462, 2.859, 9.920, 0.182}, {0.477, 2.670, 5.832, 0.114}, {0.750, 2.011, 2.492, 0.2},
    {0.292, 2.499, 7.625, 0.2},   {0.347, 3.243, 7.966, 0.168}, {0.328, 2.822, 7.189, 0.168},
    {0.594, 2.802, 6.336, 0.2},   {0.455, 2.574, 11.205, 0.2},  {0.665, 3.636, 6.558, 0.2},
    {0.286, 3.828, 11.496, 0.2},  {0.347, 3.243, 7.966, 0.168}, {0.602, 3.995, 6.518, 0.163}};

}  // namespace

TEST_CASE("gross emissions") {
  CHECK(model::gross_emissions(0.1, 20.0) == doctest::Approx(2.0));
  CHECK(model::gross_emissions(0.05, 0.0) == 0.0);
  CHECK(model::gross_emissions(0.0823, 21.06) == doctest::Approx(1.7332380).epsilon(1e-7));
}

TEST_CASE("net emissions") {
  CHECK(model::net_emissions(1.0, 0.3, 55.0) == 0.0);
  CHECK(model::net_emissions(0.0, 0.1, 20.0) == doctest::Approx(2.0));
  CHECK(model::net_emissions(0.25, 0.08, 10.0) == doctest::Approx(0.6));
  CHECK_THROWS_AS(model::net_emissions(1.2, 0.1, 1.0), Error);
  CHECK_THROWS_AS(model::net_emissions(-0.1, 0.1, 1.0), Error);
}

TEST_CASE("temperature is linear in the stock") {
  CHECK(model::temperature(1.2 / 0.0021, 0.0021) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(model::temperature(0.0, 0.0021) == 0.0);
  CHECK(model::temperature(1000.0, 0.0021) == doctest::Approx(2.1));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3000.0);
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng), b = u(rng);
    CHECK(model::temperature(a + b, 0.0021) ==
          doctest::Approx(model::temperature(a, 0.0021) + model::temperature(b, 0.0021) -
                          model::temperature(0.0, 0.0021))
              .epsilon(1e-12));
  }
}

TEST_CASE("gross output") {
  CHECK(model::gross_output(3.0, 0.0, 1.0, 0.3) == 0.0);
  CHECK(model::gross_output(1.0, 1.0, 1.0, 0.3) == doctest::Approx(1.0));
  // 5 * 100^0.3 * 0.33^0.7
  const double expected = 5.0 * std::pow(100.0, 0.3) * std::pow(0.33, 0.7);
  CHECK(expected == doctest::Approx(9.1607232).epsilon(1e-7));
  CHECK(model::gross_output(5.0, 100.0, 0.33, 0.3) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("net output and the damage denominator") {
  CHECK(model::net_output(7.0, 2.5, 0.0, 0.0) == doctest::Approx(7.0));
  // Russia-type parameters: warming raises output at 1.2 degC.
  const double y_ru = model::net_output(1.0, 1.2, -0.4169, 0.3094);
  CHECK(y_ru == doctest::Approx(1.0 / 0.945256).epsilon(1e-10));
  CHECK(y_ru > 1.0);
  const double y_us = model::net_output(1.0, 1.2, 0.0842, 0.0096);
  CHECK(y_us == doctest::Approx(1.0 / 1.114864).epsilon(1e-10));
  CHECK_THROWS_AS(model::net_output(1.0, 10.0, -0.4169, 0.0), NonpositiveDamageDenominator);
}

TEST_CASE("abatement cost") {
  CHECK(model::abatement_cost(0.0, 10.0, 0.1, 0.462, 2.859, 9.920, 0.182, 0.0) == 0.0);
  CHECK(model::abatement_cost(1.0, 10.0, 0.1, 0.462, 2.859, 9.920, 0.182, 0.0) ==
        doctest::Approx(10.382).epsilon(1e-12));
  // The b3 term dies off with t.
  const double late = model::abatement_cost(1.0, 10.0, 0.1, 0.462, 2.859, 9.920, 0.182, 500.0);
  CHECK(late == doctest::Approx(0.462 * 0.1 * 10.0).epsilon(1e-9));
}

TEST_CASE("consumption and the budget") {
  CHECK(model::consumption(2.0, 0.0, 0.0, 0.0, 0.0, 1.0) == doctest::Approx(2.0));
  CHECK(model::consumption(10.0, 2.0, 0.5, 0.845, 1.0, 0.33) ==
        doctest::Approx(20.1666667).epsilon(1e-7));
  CHECK(model::consumption(10.0, 2.0, 0.5, 0.845, -1.0, 0.33) ==
        doctest::Approx(25.2878788).epsilon(1e-7));
  CHECK_THROWS_AS(model::consumption(1.0, 2.0, 0.0, 0.0, 0.0, 1.0), NonpositiveConsumption);
}

TEST_CASE("budget identity holds after the round trip") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.1, 30.0);
  for (int k = 0; k < 1000; ++k) {
    const double Y = u(rng) + 10.0, I = u(rng) * 0.2, Phi = u(rng) * 0.05;
    const double m = u(rng) * 0.1, EP = u(rng) - 15.0, L = u(rng) * 0.1;
    const double c = (Y - I - Phi - m * EP) / L;
    if (!(c > 0)) continue;
    const double back = c * L + I + Phi + m * EP;
    CHECK(std::fabs(back - Y) <= 1e-12 * std::max(1.0, std::fabs(Y)));
  }
}

TEST_CASE("capital step") {
  CHECK(model::step_capital(100.0, 10.0, 0.1) == doctest::Approx(100.0));
  CHECK(model::step_capital(100.0, 0.0, 0.1) == doctest::Approx(90.0));
  CHECK(model::step_capital(50.0, 7.3, 0.1) == doctest::Approx(52.3));
  CHECK_THROWS_AS(model::step_capital(10.0, -20.0, 0.1), NegativeCapital);
}

TEST_CASE("utility") {
  CHECK(model::utility(1.0, 1.45) == doctest::Approx(1.0 / -0.45).epsilon(1e-12));
  CHECK(model::utility(4.0, 0.5) == doctest::Approx(4.0));
  CHECK(model::utility(2.0, 1.45) > model::utility(1.0, 1.45));
  CHECK_THROWS_AS(model::utility(0.0, 1.45), NonpositiveConsumption);
}

TEST_CASE("marginal abatement cost") {
  CHECK(model::mac(0.0, 0.1, 0.462, 2.859, 9.920, 0.182, 0.0) == 0.0);
  CHECK(model::mac(1.0, 0.1, 0.462, 2.859, 9.920, 0.182, 0.0) ==
        doctest::Approx(1000.0 * 2.859 * 10.382).epsilon(1e-12));
  // Large-t plateau: 1000 * b2 * b1.
  CHECK(model::mac(1.0, 0.1, 0.462, 2.859, 9.920, 0.182, 400.0) ==
        doctest::Approx(1000.0 * 2.859 * 0.462).epsilon(1e-9));
}

TEST_CASE("mac equals the derivative of abatement cost w.r.t. abated tonnes") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> umu(0.05, 0.95), uq(1.0, 40.0), us(0.01, 0.4),
      ut(0.0, 80.0);
  for (int k = 0; k < 1000; ++k) {
    const Coeffs& c = kAbatement[k % 12];
    const double mu = umu(rng), Q = uq(rng), sigma = us(rng), t = ut(rng);
    const double h = 1e-6;
    const double up = model::abatement_cost(mu + h, Q, sigma, c.b1, c.b2, c.b3, c.b4, t);
    const double dn = model::abatement_cost(mu - h, Q, sigma, c.b1, c.b2, c.b3, c.b4, t);
    // dPhi/dE^A = dPhi/dmu / (sigma Q); the display unit carries a factor 1000.
    const double fd = 1000.0 * (up - dn) / (2.0 * h * sigma * Q);
    const double analytic = model::mac(mu, sigma, c.b1, c.b2, c.b3, c.b4, t);
    CHECK(std::fabs(fd - analytic) <= 1e-6 * std::max(1.0, std::fabs(analytic)));
  }
}

TEST_CASE("mac is strictly increasing in mu for every region") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  for (const auto& c : kAbatement) {
    CHECK(c.b2 > 2.0);
    for (int k = 0; k < 50; ++k) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      if (a == b) continue;
      CHECK(model::mac(a, 0.1, c.b1, c.b2, c.b3, c.b4, 12.0) <
            model::mac(b, 0.1, c.b1, c.b2, c.b3, c.b4, 12.0));
    }
  }
}

TEST_CASE("net emissions stay inside [0, gross]") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> umu(0.0, 1.0), uq(0.0, 50.0), us(0.01, 0.5);
  for (int k = 0; k < 1000; ++k) {
    const double mu = umu(rng), Q = uq(rng), sigma = us(rng);
    const double gross = model::gross_emissions(sigma, Q);
    const double net = model::net_emissions(mu, sigma, Q);
    CHECK(net >= 0.0);
    CHECK(net <= gross + 1e-15);
  }
}

TEST_CASE("terminal value") {
  // Multiplier L/(1-beta) with beta = 0.985.
  CHECK(1.0 / (1.0 - 0.985) == doctest::Approx(66.6666667).epsilon(1e-7));
  const double v = model::terminal_value(2.0, 1.0, 1.45, 0.985);
  const double expected = std::pow(1.5, -0.45) / (-0.45) / 0.015;
  CHECK(v == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-123.4397).epsilon(1e-5));
  CHECK(model::terminal_value(2.5, 1.0, 1.45, 0.985) > v);  // increasing in Y
  CHECK_THROWS_AS(model::terminal_value(0.0, 1.0, 1.45, 0.985), NonpositiveConsumption);
}

TEST_CASE("parameter validation") {
  model::GlobalParams g;
  CHECK_NOTHROW(g.validate());
  CHECK(g.initial_cum_emissions() == doctest::Approx(571.428571).epsilon(1e-8));
  g.gamma = 1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}
