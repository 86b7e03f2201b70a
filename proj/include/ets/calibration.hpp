#ifndef ETS_CALIBRATION_HPP
#define ETS_CALIBRATION_HPP

#include <map>
#include <string>
#include <vector>

#include "ets/model.hpp"

// Calibration procedures: the TCRE fit, cap-pathway construction from
// emission pledges, the structural TFP/damage estimation, carbon-intensity
// extraction, the abatement-cost fit, the damage fit on loss-ratio
// projections, and the post-2100 TFP growth extension.
//
// All nonlinear fits run bounded Levenberg-Marquardt from 8 fixed starting
// points and keep the best optimum, so results are deterministic.

namespace ets::calib {

struct RcpScenario {
  std::string name;
  std::vector<int> years;
  std::vector<double> emissions;       // GtC/yr
  std::vector<double> temperature;     // degC above pre-industrial
  std::vector<double> cum_emissions;   // GtC, anchored at the series start
};

// Least-squares slope of temperature on cumulative emissions, through the
// origin, pooled across scenarios. Throws DegenerateData when the pooled
// cumulative emissions carry no signal.
double fit_tcre(const std::vector<RcpScenario>& scenarios);

struct CapPathway {
  int start_year = 2020;
  std::vector<double> caps;  // annual, GtC, from start_year
  bool clamped_negative = false;

  double at_year(int year) const;
};

// Quadratic least squares through the five 2014-2018 observations plus the
// pledge point, evaluated to 2030; linear decline to zero at the net-zero
// year; zero afterwards. Negative quadratic values are clamped and flagged.
CapPathway build_cap_pathway(const std::vector<double>& hist_2014_2018,
                             double target_level, int target_year, int netzero_year,
                             int end_year);

CapPathway aggregate_cap_pathways(const std::vector<CapPathway>& parts);

// Deterministic Ramsey growth solve used inside the structural estimation:
// choose investment to maximize discounted utility given TFP and an exogenous
// damage-factor path. Returns per-capita output net of damages.
struct GrowthInput {
  model::GlobalParams globals;      // horizon = inner truncation
  std::vector<double> tfp;          // length horizon+1
  std::vector<double> labor;        // length horizon+1
  std::vector<double> damage;       // divisor path, length horizon+1 (1 = none)
  double K0 = 1;
};
std::vector<double> solve_growth_path(const GrowthInput& input);

struct TfpDamageData {
  std::vector<double> gdppc_nocc;   // projected levels, >= 80 years
  std::vector<double> gdppc_cc;     // projected levels, >= 30 years
  std::vector<double> temps_rcp45;  // degC, spanning the inner horizon (last value held)
  std::vector<double> labor;        // billions, spanning the inner horizon
  double K0 = 1;                    // $T, 2020
  double gdppc_2020 = 1;            // observed, $1000s per person
};

struct TfpDamageFit {
  double g0 = 0, d = 0, pi1 = 0, pi2 = 0;
  double sse = 0;
};

// Structural estimation of (g0, d, pi1, pi2): minimizes the squared gaps
// between modeled and projected normalized GDP per capita, where the modeled
// paths come from the two nested growth solves (with and without the climate
// impact), and A0 matches observed 2020 GDP per capita.
TfpDamageFit fit_tfp_damage(const TfpDamageData& data, const model::GlobalParams& globals,
                            int inner_horizon = 110);

// sigma_t = E_t / Q_t, pointwise. Throws ZeroGdp on a nonpositive Q.
std::vector<double> extract_carbon_intensity(const std::vector<double>& emissions,
                                             const std::vector<double>& gdp);

struct TaxScenario {
  std::string name;
  std::vector<double> tax_usd_tc;  // per year
  std::vector<double> emissions;   // per year, GtC (one region)
};

struct AbatementFit {
  double b1 = 0, b2 = 2.5, b3 = 0, b4 = 0;
  bool b4_at_bound = false;  // ill-conditioning flag
  double sse = 0;
};

// Recovers mu = 1 - E/E_zero_tax per scenario-year and fits the MAC identity
// tau = 1000*b2*mu^(b2-1)*(b1+b3*exp(-b4 t)) in log space over the interior
// points. Throws NoInteriorPoints when fewer points than parameters remain.
AbatementFit fit_abatement(const std::vector<TaxScenario>& tax_scenarios,
                           const std::vector<double>& zero_tax_emissions);

struct KahnFit {
  double pi1 = 0, pi2 = 0;
  double sse = 0;
};

// Least squares on the damage-factor ratio identity against projected GDP
// loss ratios under RCP2.6 and RCP8.5.
KahnFit fit_damage_kahn(const std::vector<double>& delta_rcp26,
                        const std::vector<double>& delta_rcp85,
                        const std::vector<double>& temps_rcp26,
                        const std::vector<double>& temps_rcp85);

// TFP growth beyond t=79 (year 2099): US growth decays exponentially toward
// 0.0033*(1-alpha); other regions converge toward the US rate at speed chi
// through the per-capita output gap. Entry [i][k] is g_{i, 79+k}.
std::vector<std::vector<double>> extend_tfp_growth(const std::vector<double>& g_2099,
                                                   const std::vector<double>& y_2099,
                                                   int us_index, double alpha, double chi,
                                                   int t_max);

// Full TFP level path for one region: A_{t+1} = A_t * exp(g_t) with the
// within-century decay rule and the post-2099 extension rule.
std::vector<double> build_tfp_path(double A0, double g0, double d,
                                   const std::vector<double>& g_post79, int horizon);

}  // namespace ets::calib

#endif
