#include "ets/nash.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace ets::nash {

namespace {

int resolve_threads(int configured, int nregions) {
  int n = configured;
  if (n <= 0) {
    if (const char* env = std::getenv("ETS_NASH_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return std::min(n, nregions);
}

// Business-as-usual emission path (no abatement, fixed saving rate) used for
// the default initial emissions guess.
std::vector<double> bau_emissions(const World& world, int i) {
  const auto& r = world.regions[i];
  const auto& g = world.globals;
  const int H = g.horizon;
  std::vector<double> E(H, 0.0);
  double K = r.K0;
  const double T0 = model::kInitialTemperature;
  for (int t = 0; t < H; ++t) {
    const double Q = model::gross_output(world.tfp_paths[i][t], K, r.L_path[t], g.alpha);
    const double Y = Q / std::max(0.1, 1.0 + r.pi1 * T0 + r.pi2 * T0 * T0);
    E[t] = model::gross_emissions(r.sigma_path[t], Q);
    K = (1.0 - g.delta) * K + 0.25 * Y;
  }
  return E;
}

struct SweepResult {
  std::vector<region::RegionSolution> solutions;
};

// Solve all regions against the same prices and previous-iterate emissions.
// Region order is fixed; workers process disjoint strided index sets, so the
// result is identical for any worker count.
void sweep(const World& world, const std::vector<double>& prices,
           const std::vector<std::vector<double>>& emissions_prev,
           const std::vector<double>& totals_prev,
           const region::SolverOptions& options, bool ets_enabled, int threads,
           std::vector<region::WarmStart>& warm,
           std::vector<region::RegionSolution>& out,
           std::vector<std::string>& failure) {
  const int n = static_cast<int>(world.regions.size());
  const int H = world.globals.horizon;
  out.resize(n);
  failure.assign(n, "");

  auto solve_one = [&](int i) {
    region::RegionProblem prob;
    prob.region = world.regions[i];
    prob.globals = world.globals;
    prob.tfp_path = world.tfp_paths[i];
    prob.price_path = prices;
    prob.other_emissions.resize(H);
    for (int t = 0; t < H; ++t)
      prob.other_emissions[t] = totals_prev[t] - emissions_prev[i][t];
    prob.initial_capital = world.regions[i].K0;
    prob.initial_cum_emissions = world.cum_emissions_start();
    prob.ets_enabled = ets_enabled;
    try {
      out[i] = region::solve_region(prob, options,
                                    warm[i].mu.empty() ? nullptr : &warm[i]);
    } catch (const Error& e) {
      failure[i] = e.what();
    }
  };

  const int workers = resolve_threads(threads, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) solve_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) solve_one(i);
      });
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < n; ++i)
    if (!failure[i].empty())
      throw RegionalInfeasibility(world.regions[i].name, -1, failure[i]);

  for (int i = 0; i < n; ++i) {
    warm[i].mu = out[i].trajectory.mu;
    warm[i].investment = out[i].trajectory.investment;
    warm[i].cap_lambda = out[i].cap_multiplier;
  }
}

}  // namespace

void World::validate() const {
  globals.validate();
  if (regions.empty()) throw ConfigError("world has no regions");
  if (tfp_paths.size() != regions.size())
    throw ConfigError("tfp_paths and regions size mismatch");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    regions[i].validate(globals.horizon);
    if (tfp_paths[i].size() < static_cast<std::size_t>(globals.horizon) + 1)
      throw ConfigError("tfp path too short for region " + regions[i].name);
  }
}

double update_price(double m_prev, double net_demand, double omega, double price_floor) {
  // Clamp the exponent so an extreme imbalance cannot overflow.
  const double arg = std::clamp(omega * net_demand, -50.0, 50.0);
  return std::max(price_floor, m_prev * std::exp(arg));
}

std::vector<double> update_emissions(const std::vector<double>& best_response,
                                     const std::vector<double>& previous, double omega) {
  if (best_response.size() != previous.size())
    throw Error("update_emissions: incongruent arrays");
  std::vector<double> next(previous.size());
  for (std::size_t t = 0; t < previous.size(); ++t)
    next[t] = omega * best_response[t] + (1.0 - omega) * previous[t];
  return next;
}

EquilibriumSolution solve_nash(const World& world, const NashConfig& config) {
  world.validate();
  const int n = static_cast<int>(world.regions.size());
  const int H = world.globals.horizon;
  const double floor = config.price_floor;
  const double snap_level = 10.0 * floor;

  EquilibriumSolution sol;
  sol.ets_enabled = config.ets_enabled;
  for (const auto& r : world.regions) sol.region_names.push_back(r.name);

  // Step 1: initial guesses.
  std::vector<double> prices(H, 0.0);
  if (config.ets_enabled) {
    if (!config.initial_price_path.empty()) {
      if (static_cast<int>(config.initial_price_path.size()) != H)
        throw ConfigError("initial_price_path length mismatch");
      prices = config.initial_price_path;
      for (double& m : prices) m = std::max(m, floor);
    } else {
      std::fill(prices.begin(), prices.end(), 0.01);
    }
  }

  std::vector<std::vector<double>> E_prev(n);
  if (!config.initial_emissions.empty()) {
    if (static_cast<int>(config.initial_emissions.size()) != n)
      throw ConfigError("initial_emissions region count mismatch");
    E_prev = config.initial_emissions;
  } else {
    for (int i = 0; i < n; ++i) {
      E_prev[i] = bau_emissions(world, i);
      for (int t = 0; t < H; ++t)
        E_prev[i][t] = std::min(E_prev[i][t], world.regions[i].cap_path[t]);
    }
  }

  std::vector<region::WarmStart> warm(n);
  std::vector<region::RegionSolution> current(n);
  std::vector<std::string> failures;
  std::vector<double> totals(H), imbalance(H, 0.0);
  // Per-year gain on the price step: grown under persistent one-sided
  // imbalance (demand is price-insensitive near marginal years), halved on
  // oscillation. The fixed point itself does not depend on the schedule.
  std::vector<double> gain(H, 1.0);
  std::vector<int> last_sign(H, 0);

  auto compute_totals = [&](const std::vector<std::vector<double>>& E) {
    std::fill(totals.begin(), totals.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < H; ++t) totals[t] += E[i][t];
  };

  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= config.max_iterations; ++iter) {
    compute_totals(E_prev);
    // Step 2: maximization for every region at the previous iterate.
    sweep(world, prices, E_prev, totals, config.region_options, config.ets_enabled,
          config.threads, warm, current, failures);

    // Step 3: update prices and emissions.
    IterationRecord rec;
    rec.iteration = iter;
    std::fill(imbalance.begin(), imbalance.end(), 0.0);
    if (config.ets_enabled) {
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < H; ++t) imbalance[t] += current[i].trajectory.permit_purchase[t];
    }
    for (int t = 0; t < H; ++t) {
      if (!config.ets_enabled) break;
      const int sign = imbalance[t] > config.clearing_tol    ? 1
                       : imbalance[t] < -config.clearing_tol ? -1
                                                             : 0;
      if (sign != 0 && sign == last_sign[t])
        gain[t] = std::min(gain[t] * 1.3, 512.0);
      else if (sign != 0 && sign == -last_sign[t])
        gain[t] = std::max(gain[t] * 0.5, 0.125);
      last_sign[t] = sign;
      const double m_new =
          update_price(prices[t], imbalance[t], config.omega * gain[t], floor);
      // Years decaying toward the floor under excess supply report a zero
      // price; only live-market years gate convergence.
      if (m_new > snap_level || imbalance[t] > config.clearing_tol) {
        rec.max_dprice = std::max(rec.max_dprice,
                                  std::fabs(m_new - prices[t]) / std::max(prices[t], floor));
        rec.max_imbalance = std::max(rec.max_imbalance, std::fabs(imbalance[t]));
      }
      prices[t] = m_new;
    }
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < H; ++t) {
        const double e_new = config.omega * current[i].trajectory.emissions[t] +
                             (1.0 - config.omega) * E_prev[i][t];
        rec.max_demission = std::max(
            rec.max_demission, std::fabs(e_new - E_prev[i][t]) / std::max(0.01, E_prev[i][t]));
        E_prev[i][t] = e_new;
      }
    }
    sol.history.push_back(rec);

    // Step 4: convergence.
    const bool price_ok = !config.ets_enabled || rec.max_dprice < config.price_tol;
    const bool emission_ok = rec.max_demission < config.emission_tol;
    const bool clearing_ok = !config.ets_enabled || rec.max_imbalance < config.clearing_tol;
    if (price_ok && emission_ok && clearing_ok) {
      converged = true;
      break;
    }
  }
  sol.iterations = std::min(iter, config.max_iterations);
  sol.converged = converged;

  // Polish: undamped best-response passes at the final prices, so that the
  // stored trajectories are best responses to each other (not to the damped
  // iterate). The coupling across regions is weak, so this contracts fast.
  for (int pass = 0; pass < config.polish_iterations; ++pass) {
    compute_totals(E_prev);
    sweep(world, prices, E_prev, totals, config.region_options, config.ets_enabled,
          config.threads, warm, current, failures);
    double drift = 0;
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < H; ++t) {
        drift = std::max(drift, std::fabs(current[i].trajectory.emissions[t] - E_prev[i][t]));
        E_prev[i][t] = current[i].trajectory.emissions[t];
      }
    if (drift < 1e-9) break;
  }

  // Assemble, applying the zero-price reporting rule: a price that sits at the
  // floor under excess supply is an artifact of the floor, not a market price.
  std::fill(imbalance.begin(), imbalance.end(), 0.0);
  if (config.ets_enabled)
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < H; ++t) imbalance[t] += current[i].trajectory.permit_purchase[t];

  sol.raw_price_path = prices;
  sol.price_path = prices;
  if (config.ets_enabled) {
    for (int t = 0; t < H; ++t) {
      if (prices[t] < snap_level && imbalance[t] <= config.clearing_tol)
        sol.price_path[t] = 0.0;
    }
  }

  // Re-derive reported permit positions and consumption in snapped years: at a
  // zero price the position is tie-broken to the smallest trade and the budget
  // no longer carries the permit term.
  for (int i = 0; i < n; ++i) {
    auto& traj = current[i].trajectory;
    const auto& r = world.regions[i];
    for (int t = 0; t < H; ++t) {
      if (!config.ets_enabled) break;
      if (sol.price_path[t] != 0.0 || prices[t] == 0.0) continue;
      const double Q = model::gross_output(world.tfp_paths[i][t], traj.capital[t],
                                           r.L_path[t], world.globals.alpha);
      const double T = model::temperature(traj.cum_emissions[t], world.globals.zeta);
      const double Y = model::net_output(Q, T, r.pi1, r.pi2);
      const double Phi = model::abatement_cost(traj.mu[t], Q, r.sigma_path[t], r.b1,
                                               r.b2, r.b3, r.b4, t);
      traj.permit_purchase[t] = std::max(0.0, traj.emissions[t] - r.cap_path[t]);
      traj.consumption[t] = model::consumption(Y, traj.investment[t], Phi, 0.0,
                                               traj.permit_purchase[t], r.L_path[t]);
      current[i].cap_multiplier[t] = 0.0;
    }
  }

  sol.regions = std::move(current);
  sol.imbalance = imbalance;
  sol.cum_emissions.assign(H + 1, 0.0);
  sol.temperature.assign(H + 1, 0.0);
  sol.cum_emissions[0] = world.cum_emissions_start();
  for (int t = 0; t < H; ++t) {
    double total = 0;
    for (int i = 0; i < n; ++i) total += sol.regions[i].trajectory.emissions[t];
    sol.cum_emissions[t + 1] = sol.cum_emissions[t] + total;
  }
  for (int t = 0; t <= H; ++t)
    sol.temperature[t] = model::temperature(sol.cum_emissions[t], world.globals.zeta);
  return sol;
}

std::string convergence_report(const std::vector<IterationRecord>& history) {
  if (history.empty()) throw Error("convergence_report: empty history");
  std::ostringstream os;
  os << "iteration,max_dprice,max_demission,max_imbalance\n";
  os.precision(12);
  for (const auto& rec : history)
    os << rec.iteration << ',' << rec.max_dprice << ',' << rec.max_demission << ','
       << rec.max_imbalance << '\n';
  return os.str();
}

}  // namespace ets::nash
