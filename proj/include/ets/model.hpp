#ifndef ETS_MODEL_HPP
#define ETS_MODEL_HPP

#include <string>
#include <vector>

#include "ets/errors.hpp"

// Pure evaluation of the model equations: emissions, climate, production,
// damages, abatement cost, budget, capital accumulation and utility.
// All functions are stateless and safe to call concurrently.
//
// Units used throughout the library:
//   emissions        GtC
//   money            trillion 2020 USD ($T)
//   permit prices    $T/GtC internally; USD per ton of carbon (USD/tC) is the
//                    display unit, related by the factor 1000
//   population       billions
//   temperature      degrees C above the pre-industrial level

namespace ets::model {

// Warming at the initial year (2020); fixes the initial cumulative-emission
// stock via E0 = kInitialTemperature / zeta.
inline constexpr double kInitialTemperature = 1.2;

// $T/GtC -> USD/tC.
inline constexpr double kUsdPerTonFactor = 1000.0;

struct GlobalParams {
  double beta = 0.985;   // annual discount factor
  double gamma = 1.45;   // inverse intertemporal elasticity of substitution
  double alpha = 0.3;    // capital elasticity of output
  double delta = 0.1;    // annual capital depreciation
  double zeta = 0.0021;  // temperature per unit cumulative emissions (degC/GtC)
  int horizon = 300;     // years in the truncated problem
  double consumption_share_terminal = 0.75;

  double initial_cum_emissions() const { return kInitialTemperature / zeta; }
  void validate() const;
};

struct RegionParams {
  std::string name;
  // Abatement cost coefficients; b2 is the exponent on the control rate.
  double b1 = 0, b2 = 2.5, b3 = 0, b4 = 0;
  // Damage coefficients (per degC, per degC^2).
  double pi1 = 0, pi2 = 0;
  // TFP growth at t=0 and its decay rate.
  double g0 = 0, d = 0;
  double A0 = 1;  // initial total factor productivity
  double K0 = 1;  // initial capital ($T)
  std::vector<double> L_path;      // population per year (billions), length horizon+1
  std::vector<double> sigma_path;  // carbon intensity (GtC/$T), length horizon+1
  std::vector<double> cap_path;    // emission caps (GtC), length horizon+1

  void validate(int horizon) const;
};

struct WorldState {
  int year_index = 0;
  std::vector<double> capitals;  // per-region capital ($T)
  double cum_emissions = 0;      // GtC
};

struct RegionDecision {
  double mu = 0;               // emission control rate in [0,1]
  double permit_purchase = 0;  // E^P, GtC, negative = sale
  double investment = 0;       // $T
};

// E^Gross = sigma * Q
double gross_emissions(double sigma, double Q);

// E = (1 - mu) * sigma * Q
double net_emissions(double mu, double sigma, double Q);

// T = zeta * cumulative emissions
double temperature(double cum_emissions, double zeta);

// Q = A * K^alpha * L^(1-alpha)
double gross_output(double A, double K, double L, double alpha);

// 1 + pi1*T + pi2*T^2; throws NonpositiveDamageDenominator if <= 0.
double damage_factor(double T, double pi1, double pi2);

// Y = Q / (1 + pi1*T + pi2*T^2)
double net_output(double Q, double T, double pi1, double pi2);

// Phi = (b1 + b3*exp(-b4*t)) * sigma * mu^b2 * Q
double abatement_cost(double mu, double Q, double sigma, double b1, double b2,
                      double b3, double b4, double t);

// c = (Y - I - Phi - m*E^P) / L; throws NonpositiveConsumption if c <= 0.
double consumption(double Y, double I, double Phi, double m,
                   double permit_purchase, double L);

// K' = (1-delta)*K + I; throws NegativeCapital if K' < 0.
double step_capital(double K, double I, double delta);

// u(c) = c^(1-gamma)/(1-gamma); throws NonpositiveConsumption if c <= 0.
double utility(double c, double gamma);

// u'(c) = c^(-gamma)
double marginal_utility(double c, double gamma);

// Marginal abatement cost in USD/tC:
//   MAC = 1000 * b2 * mu^(b2-1) * (b1 + b3*exp(-b4*t))
// computed through the derivative of the total abatement cost with respect to
// abated tonnes, hence the sigma argument (it cancels).
double mac(double mu, double sigma, double b1, double b2, double b3, double b4,
           double t);

// Present value of utilities past the horizon, assuming consumption stays at
// share*Y/L and population stays at L:
//   V = u(share*Y/L) * L / (1-beta)
double terminal_value(double Y_terminal, double L_terminal, double gamma,
                      double beta, double share = 0.75);

}  // namespace ets::model

#endif
