#ifndef ETS_NASH_HPP
#define ETS_NASH_HPP

#include <string>
#include <vector>

#include "ets/region.hpp"

// Open-loop Nash equilibrium with market clearing: alternate regional best
// responses (all regions solved against the previous iterate, Jacobi style)
// with multiplicative price updates and damped emission updates until prices,
// emissions and the per-year permit imbalance settle.

namespace ets::nash {

struct World {
  model::GlobalParams globals;
  std::vector<model::RegionParams> regions;
  std::vector<std::vector<double>> tfp_paths;  // per region, length horizon+1
  double initial_cum_emissions = 0;            // GtC; 0 means derive from T0/zeta

  double cum_emissions_start() const {
    return initial_cum_emissions > 0 ? initial_cum_emissions
                                     : globals.initial_cum_emissions();
  }
  void validate() const;
};

struct NashConfig {
  double omega = 0.1;          // damping weight for both updates
  double price_floor = 1e-6;   // $T/GtC; keeps the multiplicative update alive
  int max_iterations = 4000;
  double price_tol = 1e-4;     // relative price change
  double emission_tol = 1e-4;  // relative emission change
  double clearing_tol = 1e-4;  // GtC
  std::vector<double> initial_price_path;              // optional, length H
  std::vector<std::vector<double>> initial_emissions;  // optional, per region
  region::SolverOptions region_options;
  bool ets_enabled = true;
  int threads = 0;  // 0: use ETS_NASH_THREADS, else hardware
  int polish_iterations = 50;  // undamped fixed-point passes at final prices
};

struct IterationRecord {
  int iteration = 0;
  double max_dprice = 0;     // relative
  double max_demission = 0;  // relative
  double max_imbalance = 0;  // GtC, over years where the price is live
};

struct EquilibriumSolution {
  std::vector<std::string> region_names;
  std::vector<region::RegionSolution> regions;
  std::vector<double> price_path;      // reported $T/GtC; 0 under excess supply
  std::vector<double> raw_price_path;  // floored path the regions solved against
  std::vector<double> cum_emissions;   // length H+1
  std::vector<double> temperature;     // length H+1
  std::vector<double> imbalance;       // per-year sum of permit purchases
  std::vector<IterationRecord> history;
  int iterations = 0;
  bool converged = false;
  bool ets_enabled = true;

  int horizon() const { return static_cast<int>(price_path.size()); }
};

// m_next = max(price_floor, m_prev * exp(omega * net_demand)).
double update_price(double m_prev, double net_demand, double omega, double price_floor);

// Convex combination, elementwise: omega*best + (1-omega)*prev.
std::vector<double> update_emissions(const std::vector<double>& best_response,
                                     const std::vector<double>& previous, double omega);

EquilibriumSolution solve_nash(const World& world, const NashConfig& config);

// CSV with columns iteration,max_dprice,max_demission,max_imbalance.
// Throws Error on empty history.
std::string convergence_report(const std::vector<IterationRecord>& history);

}  // namespace ets::nash

#endif
