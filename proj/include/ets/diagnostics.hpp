#ifndef ETS_DIAGNOSTICS_HPP
#define ETS_DIAGNOSTICS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ets/nash.hpp"

// Post-equilibrium analysis: MAC and SCC paths, the optimal regional carbon
// tax, endogenous discount rates, the present-value-of-damages cross check,
// and compensating-variation welfare comparisons.

namespace ets::diag {

// SCC_t = -1000 * pE_{t+1} / pK_{t+1}, the marginal rate of substitution
// between cumulative global emissions and regional capital, priced by the
// shadow values of the two transition equations. USD/tC.
std::vector<double> scc_path(const nash::EquilibriumSolution& eq, int region);

// MAC along the equilibrium control path, USD/tC.
std::vector<double> mac_path(const nash::EquilibriumSolution& eq, const nash::World& world,
                             int region);

// tau_t = max(0, MAC_t - m_t), USD/tC. In years with zero emissions the value
// is only a lower bound on the optimal tax (see PolicyReport flags).
std::vector<double> optimal_tax_path(const nash::EquilibriumSolution& eq,
                                     const nash::World& world, int region);

// r_{t+1} = u'(c_t) / (beta u'(c_{t+1})) - 1 for t = 0..H-2; entry s of the
// result is the rate between years s and s+1.
std::vector<double> discount_rates(const nash::EquilibriumSolution& eq,
                                   const nash::World& world, int region);

struct PvDamageCheck {
  double max_rel_gap = 0;
  std::vector<double> scc_multiplier;  // USD/tC
  std::vector<double> scc_present_value;
  std::vector<double> rel_gap;  // per year
};

// Re-derives the SCC as the present value of the marginal-damage stream from
// a unit emission pulse, discounted at the endogenous rates, and compares it
// with the multiplier route.
PvDamageCheck pv_damage_check(const nash::EquilibriumSolution& eq, const nash::World& world,
                              int region);

struct WelfareComparison {
  double cv_usd_per_capita = 0;
  double cv_share_pct = 0;  // of period-0 per-capita consumption (with ETS)
};

// Compensating variation of the ETS: the uniform per-capita consumption
// reduction that makes the with-ETS consumption path welfare-equivalent to
// the without-ETS path. Both equilibria must share the temperature path (the
// adjusted-cap workflow guarantees this); `temp_tol` guards the precondition.
WelfareComparison compensating_variation(const nash::EquilibriumSolution& eq_with_ets,
                                         const nash::EquilibriumSolution& eq_without_ets,
                                         const nash::World& world, int region,
                                         double temp_tol = 0.01);

struct PolicyReport {
  std::vector<std::string> regions;
  int horizon = 0;
  int base_year = 2020;
  // Indexed [region][year].
  std::vector<std::vector<double>> mac, scc, optimal_tax, emissions, permit_purchase,
      pv_damage_gap;
  std::vector<std::vector<double>> discount_rate;  // [region][year-1]
  std::vector<double> permit_price;                // USD/tC
  // tau is only a lower bound where emissions are zero; a region with a
  // binding zero cap cannot sell even when its MAC is below the price.
  std::vector<std::vector<int>> tax_lower_bound_flag, zero_cap_binding_flag;
};

PolicyReport build_policy_report(const nash::EquilibriumSolution& eq, const nash::World& world);

// Long format: region,year,variable,value,unit.
void write_report_csv(std::ostream& os, const PolicyReport& report);

struct LabeledSolution {
  std::string label;
  const nash::EquilibriumSolution* eq = nullptr;
  const nash::World* world = nullptr;
};

// Aligned long-format table of price, temperature, MAC and SCC across
// scenario solutions on a common grid. Throws GridMismatch otherwise.
std::string scenario_compare(const std::vector<LabeledSolution>& solutions);

}  // namespace ets::diag

#endif
