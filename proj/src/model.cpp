#include "ets/model.hpp"

#include <cmath>

namespace ets::model {

void GlobalParams::validate() const {
  if (!(beta > 0 && beta < 1)) throw ConfigError("beta must be in (0,1)");
  if (!(gamma > 0) || gamma == 1.0) throw ConfigError("gamma must be > 0 and != 1");
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must be in (0,1)");
  if (!(delta >= 0 && delta <= 1)) throw ConfigError("delta must be in [0,1]");
  if (!(zeta > 0)) throw ConfigError("zeta must be > 0");
  if (horizon < 2) throw ConfigError("horizon must be >= 2");
  if (!(consumption_share_terminal > 0 && consumption_share_terminal <= 1))
    throw ConfigError("consumption_share_terminal must be in (0,1]");
}

void RegionParams::validate(int horizon) const {
  auto fail = [&](const std::string& msg) { throw ConfigError("region " + name + ": " + msg); };
  if (b1 < 0 || b3 < 0 || b4 < 0) fail("abatement coefficients must be nonnegative");
  if (!(b2 > 2)) fail("b2 must be > 2");
  if (!(A0 > 0)) fail("A0 must be > 0");
  if (K0 < 0) fail("K0 must be >= 0");
  const std::size_t need = static_cast<std::size_t>(horizon) + 1;
  if (L_path.size() < need) fail("L_path shorter than horizon+1");
  if (sigma_path.size() < need) fail("sigma_path shorter than horizon+1");
  if (cap_path.size() < need) fail("cap_path shorter than horizon+1");
  for (std::size_t t = 0; t < need; ++t) {
    if (!(L_path[t] > 0)) fail("L_path must be strictly positive");
    if (!(sigma_path[t] > 0)) fail("sigma_path must be strictly positive");
    if (cap_path[t] < 0) fail("cap_path must be nonnegative");
  }
}

double gross_emissions(double sigma, double Q) { return sigma * Q; }

double net_emissions(double mu, double sigma, double Q) {
  if (mu < 0 || mu > 1) throw Error("net_emissions: mu outside [0,1]");
  return (1.0 - mu) * sigma * Q;
}

double temperature(double cum_emissions, double zeta) { return zeta * cum_emissions; }

double gross_output(double A, double K, double L, double alpha) {
  if (K == 0) return 0.0;
  return A * std::pow(K, alpha) * std::pow(L, 1.0 - alpha);
}

double damage_factor(double T, double pi1, double pi2) {
  const double D = 1.0 + pi1 * T + pi2 * T * T;
  if (!(D > 0))
    throw NonpositiveDamageDenominator("damage denominator <= 0 at T=" + std::to_string(T));
  return D;
}

double net_output(double Q, double T, double pi1, double pi2) {
  return Q / damage_factor(T, pi1, pi2);
}

double abatement_cost(double mu, double Q, double sigma, double b1, double b2,
                      double b3, double b4, double t) {
  const double theta = (b1 + b3 * std::exp(-b4 * t)) * sigma;
  return theta * std::pow(mu, b2) * Q;
}

double consumption(double Y, double I, double Phi, double m,
                   double permit_purchase, double L) {
  const double c = (Y - I - Phi - m * permit_purchase) / L;
  if (!(c > 0)) throw NonpositiveConsumption("consumption <= 0: " + std::to_string(c));
  return c;
}

double step_capital(double K, double I, double delta) {
  const double Knext = (1.0 - delta) * K + I;
  if (Knext < 0) throw NegativeCapital("capital would become negative: " + std::to_string(Knext));
  return Knext;
}

double utility(double c, double gamma) {
  if (!(c > 0)) throw NonpositiveConsumption("utility of nonpositive consumption");
  return std::pow(c, 1.0 - gamma) / (1.0 - gamma);
}

double marginal_utility(double c, double gamma) {
  if (!(c > 0)) throw NonpositiveConsumption("marginal utility of nonpositive consumption");
  return std::pow(c, -gamma);
}

double mac(double mu, double sigma, double b1, double b2, double b3, double b4,
           double t) {
  if (mu == 0) return 0.0;  // b2 > 2 makes mu^(b2-1) vanish
  const double theta = (b1 + b3 * std::exp(-b4 * t)) * sigma;
  return kUsdPerTonFactor * b2 * std::pow(mu, b2 - 1.0) * theta / sigma;
}

double terminal_value(double Y_terminal, double L_terminal, double gamma,
                      double beta, double share) {
  if (!(Y_terminal > 0) || !(L_terminal > 0))
    throw NonpositiveConsumption("terminal value needs positive output and population");
  return utility(share * Y_terminal / L_terminal, gamma) * L_terminal / (1.0 - beta);
}

}  // namespace ets::model
