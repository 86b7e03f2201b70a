#ifndef ETS_REGION_HPP
#define ETS_REGION_HPP

#include <optional>
#include <vector>

#include "ets/model.hpp"

// Finite-horizon welfare maximization for a single region, holding permit
// prices and the other regions' emission paths fixed (the maximization step
// of the equilibrium algorithm). Decisions are the control rate mu_t, the
// permit purchase E^P_t and investment I_t; capital and the cumulative
// emission stock are eliminated by forward substitution.
//
// With a positive permit price the optimal permit position is pinned by the
// cap constraint: any slack E_t - E^P_t < cap_t would be sold (pure budget
// gain), so E^P_t = E_t - cap_t and the cap multiplier equals
// beta^t u'(c_t) m_t. The solver exploits this and optimizes over (mu, I)
// only; the reported KKT residual covers the full first-order system.
// At m_t = 0 the position is indeterminate beyond cap slack and is tie-broken
// to the smallest trade, E^P_t = max(0, E_t - cap_t).

namespace ets::region {

struct Trajectory {
  std::vector<double> mu;               // length H
  std::vector<double> permit_purchase;  // length H
  std::vector<double> investment;       // length H
  std::vector<double> consumption;      // length H, per capita
  std::vector<double> emissions;        // length H, net of abatement
  std::vector<double> capital;          // length H+1
  std::vector<double> cum_emissions;    // length H+1, global stock as seen by the region

  int horizon() const { return static_cast<int>(mu.size()); }
};

struct RegionProblem {
  model::RegionParams region;
  model::GlobalParams globals;
  std::vector<double> tfp_path;          // A_t, length H+1
  std::vector<double> price_path;        // m_t ($T/GtC), length H
  std::vector<double> other_emissions;   // sum over other regions (GtC), length H
  double initial_capital = 0;
  double initial_cum_emissions = 0;
  bool ets_enabled = true;               // when false, E^P is forced to 0

  void validate() const;
};

struct SolverOptions {
  double kkt_tol = 1e-6;      // relative stationarity tolerance
  int max_iterations = 4000;  // projected quasi-Newton iterations per pass
  double cap_feasibility_tol = 1e-9;  // GtC, no-trade mode
};

struct RegionSolution {
  Trajectory trajectory;
  double welfare = 0;
  double kkt_residual = 0;
  bool converged = false;
  int iterations = 0;
  // Shadow prices: cap constraint (per year), and the capital / cumulative-
  // emission transition equations (the multiplier at index t prices the state
  // entering year t; index H prices the terminal state).
  std::vector<double> cap_multiplier;       // length H
  std::vector<double> capital_shadow;       // length H+1
  std::vector<double> cum_emission_shadow;  // length H+1
};

// Decision-path warm start for repeated solves inside the equilibrium loop.
struct WarmStart {
  std::vector<double> mu, investment;
  std::vector<double> cap_lambda;  // no-trade mode: previous cap multipliers
};

RegionSolution solve_region(const RegionProblem& problem, const SolverOptions& options,
                            const WarmStart* warm = nullptr);

// Re-evaluates discounted welfare (running utility plus terminal value) from
// a trajectory alone; independent of any solver state.
double welfare_of(const Trajectory& trajectory, const model::RegionParams& region,
                  const model::GlobalParams& globals, const std::vector<double>& tfp_path);

struct BestResponse {
  std::vector<double> emissions;
  std::vector<double> permit_purchase;
};

BestResponse best_response_emissions(const RegionSolution& solution);

}  // namespace ets::region

#endif
