#include "ets/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ets::diag {

namespace {

constexpr int kBaseYear = 2020;

void check_region(const nash::EquilibriumSolution& eq, int region) {
  if (region < 0 || region >= static_cast<int>(eq.regions.size()))
    throw Error("region index out of range");
}

// Marginal climate damage of region i at year t, $T per GtC of the cumulative
// emission stock: Y * D'(T) * zeta / D(T).
double marginal_damage(const nash::World& world, int i, double K, double CE, double A,
                       int t) {
  const auto& r = world.regions[i];
  const auto& g = world.globals;
  const double Q = model::gross_output(A, K, r.L_path[t], g.alpha);
  const double T = model::temperature(CE, g.zeta);
  const double D = model::damage_factor(T, r.pi1, r.pi2);
  const double Dp = r.pi1 + 2.0 * r.pi2 * T;
  return (Q / D) * Dp * g.zeta / D;
}

}  // namespace

std::vector<double> scc_path(const nash::EquilibriumSolution& eq, int region) {
  check_region(eq, region);
  const auto& sol = eq.regions[region];
  const int H = eq.horizon();
  if (static_cast<int>(sol.capital_shadow.size()) != H + 1 ||
      static_cast<int>(sol.cum_emission_shadow.size()) != H + 1)
    throw MissingMultipliers("equilibrium lacks transition shadow prices");
  std::vector<double> scc(H);
  for (int t = 0; t < H; ++t)
    scc[t] = -model::kUsdPerTonFactor * sol.cum_emission_shadow[t + 1] /
             sol.capital_shadow[t + 1];
  return scc;
}

std::vector<double> mac_path(const nash::EquilibriumSolution& eq, const nash::World& world,
                             int region) {
  check_region(eq, region);
  const auto& r = world.regions[region];
  const auto& traj = eq.regions[region].trajectory;
  const int H = eq.horizon();
  std::vector<double> out(H);
  for (int t = 0; t < H; ++t)
    out[t] = model::mac(traj.mu[t], r.sigma_path[t], r.b1, r.b2, r.b3, r.b4, t);
  return out;
}

std::vector<double> optimal_tax_path(const nash::EquilibriumSolution& eq,
                                     const nash::World& world, int region) {
  std::vector<double> tax = mac_path(eq, world, region);
  for (int t = 0; t < eq.horizon(); ++t)
    tax[t] = std::max(0.0, tax[t] - model::kUsdPerTonFactor * eq.price_path[t]);
  return tax;
}

std::vector<double> discount_rates(const nash::EquilibriumSolution& eq,
                                   const nash::World& world, int region) {
  check_region(eq, region);
  const auto& c = eq.regions[region].trajectory.consumption;
  const double beta = world.globals.beta;
  const double gamma = world.globals.gamma;
  std::vector<double> r(c.size() - 1);
  for (std::size_t t = 0; t + 1 < c.size(); ++t)
    r[t] = model::marginal_utility(c[t], gamma) /
               (beta * model::marginal_utility(c[t + 1], gamma)) -
           1.0;
  return r;
}

PvDamageCheck pv_damage_check(const nash::EquilibriumSolution& eq, const nash::World& world,
                              int region) {
  check_region(eq, region);
  const auto& g = world.globals;
  const auto& r = world.regions[region];
  const auto& traj = eq.regions[region].trajectory;
  const int H = eq.horizon();

  PvDamageCheck out;
  out.scc_multiplier = scc_path(eq, region);
  out.scc_present_value.assign(H, 0.0);
  out.rel_gap.assign(H, 0.0);

  // Marginal damages along the path, plus the terminal block.
  std::vector<double> md(H);
  for (int t = 0; t < H; ++t)
    md[t] = marginal_damage(world, region, traj.capital[t], traj.cum_emissions[t],
                            world.tfp_paths[region][t], t);
  const double Q_H = model::gross_output(world.tfp_paths[region][H], traj.capital[H],
                                         r.L_path[H], g.alpha);
  const double T_H = model::temperature(traj.cum_emissions[H], g.zeta);
  const double D_H = model::damage_factor(T_H, r.pi1, r.pi2);
  const double Y_H = Q_H / D_H;
  const double md_H = Y_H * (r.pi1 + 2.0 * r.pi2 * T_H) * g.zeta / D_H;
  const double c_term = g.consumption_share_terminal * Y_H / r.L_path[H];

  const std::vector<double> rates = discount_rates(eq, world, region);

  for (int t = 0; t < H; ++t) {
    double pv = 0;
    double df = 1.0;
    for (int s = t + 1; s < H; ++s) {
      df /= 1.0 + rates[s - 1];  // rate between years s-1 and s
      pv += df * md[s];
    }
    // Tail: the post-horizon consumption block of the terminal value.
    const double df_term = df * g.beta *
                           model::marginal_utility(c_term, g.gamma) /
                           model::marginal_utility(traj.consumption[H - 1], g.gamma);
    pv += df_term * g.consumption_share_terminal * md_H / (1.0 - g.beta);
    out.scc_present_value[t] = model::kUsdPerTonFactor * pv;
    out.rel_gap[t] = std::fabs(out.scc_present_value[t] - out.scc_multiplier[t]) /
                     std::max(1.0, std::fabs(out.scc_multiplier[t]));
    out.max_rel_gap = std::max(out.max_rel_gap, out.rel_gap[t]);
  }
  return out;
}

WelfareComparison compensating_variation(const nash::EquilibriumSolution& eq_with_ets,
                                         const nash::EquilibriumSolution& eq_without_ets,
                                         const nash::World& world, int region,
                                         double temp_tol) {
  check_region(eq_with_ets, region);
  check_region(eq_without_ets, region);
  const int H = eq_with_ets.horizon();
  if (eq_without_ets.horizon() != H) throw GridMismatch("horizon mismatch");
  for (int t = 0; t <= H; ++t) {
    const double dT = std::fabs(eq_with_ets.temperature[t] - eq_without_ets.temperature[t]);
    if (dT > temp_tol)
      throw TemperatureMismatch("temperature paths differ by " + std::to_string(dT) +
                                " degC at t=" + std::to_string(t) +
                                "; compare runs under the adjusted caps");
  }

  const auto& g = world.globals;
  const auto& r = world.regions[region];
  const auto& c1 = eq_with_ets.regions[region].trajectory.consumption;
  const auto& c0 = eq_without_ets.regions[region].trajectory.consumption;

  auto welfare = [&](const std::vector<double>& c, double shift) {
    double w = 0, bp = 1.0;
    for (int t = 0; t < H; ++t) {
      w += bp * model::utility(c[t] - shift, g.gamma) * r.L_path[t];
      bp *= g.beta;
    }
    return w;
  };

  const double w0 = welfare(c0, 0.0);
  const double cmin = *std::min_element(c1.begin(), c1.end());

  // W(c1 - cv) is strictly decreasing in cv; bracket by geometric expansion.
  auto f = [&](double cv) { return welfare(c1, cv) - w0; };
  double lo = -cmin / 2, hi = cmin / 2;
  const double hi_cap = cmin * (1.0 - 1e-12);
  while (f(lo) < 0) {
    lo *= 2.0;
    if (lo < -1e9) throw Unbracketed("CV bracket expansion failed (low side)");
  }
  while (f(hi) > 0) {
    if (hi >= hi_cap) throw Unbracketed("CV exceeds minimum consumption");
    hi = std::min(hi * 2.0, hi_cap);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  const double cv = 0.5 * (lo + hi);  // per-capita, $1000s (model units)

  WelfareComparison out;
  out.cv_usd_per_capita = model::kUsdPerTonFactor * cv;
  out.cv_share_pct = 100.0 * cv / c1[0];
  return out;
}

PolicyReport build_policy_report(const nash::EquilibriumSolution& eq,
                                 const nash::World& world) {
  const int n = static_cast<int>(eq.regions.size());
  const int H = eq.horizon();
  PolicyReport rep;
  rep.regions = eq.region_names;
  rep.horizon = H;
  rep.base_year = kBaseYear;
  rep.permit_price.resize(H);
  for (int t = 0; t < H; ++t)
    rep.permit_price[t] = model::kUsdPerTonFactor * eq.price_path[t];
  for (int i = 0; i < n; ++i) {
    rep.mac.push_back(mac_path(eq, world, i));
    rep.scc.push_back(scc_path(eq, i));
    rep.optimal_tax.push_back(optimal_tax_path(eq, world, i));
    rep.emissions.push_back(eq.regions[i].trajectory.emissions);
    rep.permit_purchase.push_back(eq.regions[i].trajectory.permit_purchase);
    rep.discount_rate.push_back(discount_rates(eq, world, i));
    rep.pv_damage_gap.push_back(pv_damage_check(eq, world, i).rel_gap);
    std::vector<int> lb(H, 0), zb(H, 0);
    for (int t = 0; t < H; ++t) {
      const auto& traj = eq.regions[i].trajectory;
      if (traj.emissions[t] <= 1e-12) lb[t] = 1;
      const double cap = world.regions[i].cap_path[t];
      if (cap <= 1e-12 && traj.emissions[t] - traj.permit_purchase[t] >= cap - 1e-9 &&
          rep.mac.back()[t] < rep.permit_price[t])
        zb[t] = 1;
    }
    rep.tax_lower_bound_flag.push_back(std::move(lb));
    rep.zero_cap_binding_flag.push_back(std::move(zb));
  }
  return rep;
}

void write_report_csv(std::ostream& os, const PolicyReport& rep) {
  os << "region,year,variable,value,unit\n";
  os.precision(12);
  auto row = [&](const std::string& region, int year, const std::string& var, double v,
                 const std::string& unit) {
    os << region << ',' << year << ',' << var << ',' << v << ',' << unit << '\n';
  };
  for (int t = 0; t < rep.horizon; ++t)
    row("GLOBAL", rep.base_year + t, "permit_price", rep.permit_price[t], "usd_per_tc");
  for (std::size_t i = 0; i < rep.regions.size(); ++i) {
    const std::string& name = rep.regions[i];
    for (int t = 0; t < rep.horizon; ++t) {
      const int year = rep.base_year + t;
      row(name, year, "mac", rep.mac[i][t], "usd_per_tc");
      row(name, year, "scc", rep.scc[i][t], "usd_per_tc");
      row(name, year, "optimal_tax", rep.optimal_tax[i][t], "usd_per_tc");
      row(name, year, "emissions", rep.emissions[i][t], "gtc");
      row(name, year, "permit_purchase", rep.permit_purchase[i][t], "gtc");
      row(name, year, "pv_damage_gap", rep.pv_damage_gap[i][t], "relative");
      if (t >= 1) row(name, year, "discount_rate", rep.discount_rate[i][t - 1], "per_year");
      row(name, year, "tax_lower_bound_flag", rep.tax_lower_bound_flag[i][t], "flag");
      row(name, year, "zero_cap_binding_flag", rep.zero_cap_binding_flag[i][t], "flag");
    }
  }
}

std::string scenario_compare(const std::vector<LabeledSolution>& solutions) {
  if (solutions.size() < 2) throw Error("scenario_compare needs at least two solutions");
  const int H = solutions.front().eq->horizon();
  const auto& names = solutions.front().eq->region_names;
  for (const auto& s : solutions) {
    if (s.eq->horizon() != H) throw GridMismatch("scenario horizons differ");
    if (s.eq->region_names != names) throw GridMismatch("scenario region sets differ");
  }
  std::ostringstream os;
  os.precision(12);
  os << "scenario,region,year,variable,value,unit\n";
  for (const auto& s : solutions) {
    for (int t = 0; t < H; ++t) {
      os << s.label << ",GLOBAL," << kBaseYear + t << ",permit_price,"
         << model::kUsdPerTonFactor * s.eq->price_path[t] << ",usd_per_tc\n";
      os << s.label << ",GLOBAL," << kBaseYear + t << ",temperature,"
         << s.eq->temperature[t] << ",degc\n";
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto mac = mac_path(*s.eq, *s.world, static_cast<int>(i));
      const auto scc = scc_path(*s.eq, static_cast<int>(i));
      for (int t = 0; t < H; ++t) {
        os << s.label << ',' << names[i] << ',' << kBaseYear + t << ",mac," << mac[t]
           << ",usd_per_tc\n";
        os << s.label << ',' << names[i] << ',' << kBaseYear + t << ",scc," << scc[t]
           << ",usd_per_tc\n";
      }
    }
  }
  return os.str();
}

}  // namespace ets::diag
