#ifndef ETS_TESTS_TOY_HPP
#define ETS_TESTS_TOY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "ets/nash.hpp"

// Small hand-built instances shared by the unit and acceptance suites.

namespace toy {

inline ets::model::RegionParams make_region(const std::string& name, double b1, double b2,
                                            double b3, double b4, double pi1, double pi2,
                                            double K0, double L, double gdppc, double e0,
                                            double sigma_decline, int horizon) {
  ets::model::RegionParams r;
  r.name = name;
  r.b1 = b1;
  r.b2 = b2;
  r.b3 = b3;
  r.b4 = b4;
  r.pi1 = pi1;
  r.pi2 = pi2;
  r.K0 = K0;
  const double T0 = 1.2;
  const double D0 = 1.0 + pi1 * T0 + pi2 * T0 * T0;
  const double Q0 = gdppc * L * D0;
  const double sigma0 = e0 / Q0;
  r.A0 = gdppc * D0 * std::pow(L, 0.3) / std::pow(K0, 0.3);
  r.L_path.assign(horizon + 1, L);
  r.sigma_path.resize(horizon + 1);
  r.cap_path.assign(horizon + 1, 0.0);
  for (int t = 0; t <= horizon; ++t) r.sigma_path[t] = sigma0 * std::exp(-sigma_decline * t);
  return r;
}

inline std::vector<double> tfp_path(double A0, double g0, double d, int horizon) {
  std::vector<double> A(horizon + 1);
  A[0] = A0;
  for (int t = 0; t < horizon; ++t) A[t + 1] = A[t] * std::exp(g0 * std::exp(-d * t));
  return A;
}

// Caps: slack for the first `slack_years`, then linear decline from the
// initial level to `final_frac` of it at the end (or to zero at `zero_at` if
// nonnegative).
inline void set_caps(ets::model::RegionParams& r, double level, int slack_years,
                     double final_frac, int horizon, int zero_at = -1) {
  for (int t = 0; t <= horizon; ++t) {
    if (t < slack_years) {
      r.cap_path[t] = level;
    } else if (zero_at > 0) {
      r.cap_path[t] = t >= zero_at ? 0.0
                                   : level * static_cast<double>(zero_at - t) /
                                         static_cast<double>(zero_at - slack_years + 1);
    } else {
      const double s = static_cast<double>(t - slack_years) /
                       static_cast<double>(horizon - slack_years);
      r.cap_path[t] = level * (1.0 - (1.0 - final_frac) * s);
    }
  }
}

// Two-region, 20-year instance: caps are slack early and bind later, so both
// the zero-price and the positive-price regimes appear along the path.
inline ets::nash::World world2(int horizon = 20) {
  ets::nash::World w;
  w.globals.horizon = horizon;
  auto a = make_region("Alpha", 0.462, 2.859, 9.920, 0.182, 0.0842, 0.0096, 70.0, 0.331,
                       63.5, 1.41, 0.012, horizon);
  auto b = make_region("Beta", 0.328, 2.822, 7.189, 0.168, 0.0003, 0.0008, 44.0, 1.411,
                       10.4, 2.88, 0.015, horizon);
  set_caps(a, 1.7, 5, 0.25, horizon);
  set_caps(b, 3.4, 5, 0.25, horizon);
  w.tfp_paths.push_back(tfp_path(a.A0, 0.020, 0.010, horizon));
  w.tfp_paths.push_back(tfp_path(b.A0, 0.035, 0.020, horizon));
  w.regions.push_back(std::move(a));
  w.regions.push_back(std::move(b));
  return w;
}

// Symmetric twin-region instance.
inline ets::nash::World world_symmetric(int horizon = 15) {
  ets::nash::World w;
  w.globals.horizon = horizon;
  for (const char* name : {"East", "West"}) {
    auto r = make_region(name, 0.40, 2.7, 8.0, 0.17, 0.08, 0.01, 50.0, 0.5, 30.0, 1.2,
                         0.012, horizon);
    set_caps(r, 1.4, 4, 0.3, horizon);
    w.tfp_paths.push_back(tfp_path(r.A0, 0.02, 0.01, horizon));
    w.regions.push_back(std::move(r));
  }
  return w;
}

// Three-region instance with net-zero caps at year `zero_at`; used for the
// horizon-truncation comparison.
inline ets::nash::World world3(int horizon, int zero_at = 110) {
  ets::nash::World w;
  w.globals.horizon = horizon;
  auto a = make_region("Alpha", 0.462, 2.859, 9.920, 0.182, 0.0842, 0.0096, 70.0, 0.331,
                       63.5, 1.41, 0.012, horizon);
  auto b = make_region("Beta", 0.328, 2.822, 7.189, 0.168, 0.0003, 0.0008, 44.0, 1.411,
                       10.4, 2.88, 0.015, horizon);
  auto c = make_region("Gamma", 0.292, 2.499, 7.625, 0.2, -0.4169, 0.3094, 3.6, 0.144,
                       10.2, 0.45, 0.015, horizon);
  set_caps(a, 1.7, 5, 0.0, horizon, zero_at);
  set_caps(b, 3.4, 5, 0.0, horizon, zero_at);
  set_caps(c, 0.55, 5, 0.0, horizon, zero_at);
  w.tfp_paths.push_back(tfp_path(a.A0, 0.020, 0.010, horizon));
  w.tfp_paths.push_back(tfp_path(b.A0, 0.035, 0.020, horizon));
  w.tfp_paths.push_back(tfp_path(c.A0, 0.017, 0.0154, horizon));
  w.regions.push_back(std::move(a));
  w.regions.push_back(std::move(b));
  w.regions.push_back(std::move(c));
  return w;
}

inline ets::region::RegionProblem region_problem(const ets::nash::World& w, int i,
                                                 std::vector<double> prices,
                                                 std::vector<double> other,
                                                 bool ets_enabled = true) {
  ets::region::RegionProblem p;
  p.region = w.regions[i];
  p.globals = w.globals;
  p.tfp_path = w.tfp_paths[i];
  p.price_path = std::move(prices);
  p.other_emissions = std::move(other);
  p.initial_capital = w.regions[i].K0;
  p.initial_cum_emissions = w.cum_emissions_start();
  p.ets_enabled = ets_enabled;
  return p;
}

}  // namespace toy

#endif
