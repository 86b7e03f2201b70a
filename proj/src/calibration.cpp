#include "ets/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "ets/optimizer.hpp"

namespace ets::calib {

namespace {

// ---- bounded Levenberg-Marquardt with deterministic multistart ----------

using ResidualFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

double sse_of(const std::vector<double>& r) {
  double s = 0;
  for (double v : r) s += v * v;
  return s;
}

std::vector<double> lm_fit(const ResidualFn& residuals, std::vector<double> p,
                           const std::vector<double>& lo, const std::vector<double>& hi,
                           int max_iter, double* sse_out) {
  const int np = static_cast<int>(p.size());
  std::vector<double> r, r_trial, rp, rm;
  residuals(p, r);
  double sse = sse_of(r);
  const int nr = static_cast<int>(r.size());
  std::vector<std::vector<double>> J(nr, std::vector<double>(np));
  double lambda = 1e-3;

  for (int iter = 0; iter < max_iter; ++iter) {
    // Forward-difference Jacobian with bound-aware steps.
    for (int j = 0; j < np; ++j) {
      const double h = std::max(1e-7, 1e-6 * std::fabs(p[j]));
      std::vector<double> pj = p;
      double step = (p[j] + h <= hi[j]) ? h : -h;
      pj[j] = std::clamp(p[j] + step, lo[j], hi[j]);
      const double actual = pj[j] - p[j];
      if (actual == 0) {
        for (int k = 0; k < nr; ++k) J[k][j] = 0;
        continue;
      }
      residuals(pj, rp);
      for (int k = 0; k < nr; ++k) J[k][j] = (rp[k] - r[k]) / actual;
    }

    // Normal equations (J^T J + lambda diag) delta = -J^T r.
    std::array<std::array<double, 8>, 8> A{};
    std::array<double, 8> b{};
    for (int a = 0; a < np; ++a) {
      for (int c = 0; c < np; ++c) {
        double s = 0;
        for (int k = 0; k < nr; ++k) s += J[k][a] * J[k][c];
        A[a][c] = s;
      }
      double s = 0;
      for (int k = 0; k < nr; ++k) s += J[k][a] * r[k];
      b[a] = -s;
    }

    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      auto Ad = A;
      for (int a = 0; a < np; ++a) Ad[a][a] += lambda * std::max(A[a][a], 1e-12);
      // Gaussian elimination with partial pivoting.
      auto bb = b;
      std::array<int, 8> piv{};
      for (int a = 0; a < np; ++a) piv[a] = a;
      bool singular = false;
      for (int col = 0; col < np && !singular; ++col) {
        int best = col;
        for (int row = col + 1; row < np; ++row)
          if (std::fabs(Ad[row][col]) > std::fabs(Ad[best][col])) best = row;
        std::swap(Ad[col], Ad[best]);
        std::swap(bb[col], bb[best]);
        if (std::fabs(Ad[col][col]) < 1e-300) {
          singular = true;
          break;
        }
        for (int row = col + 1; row < np; ++row) {
          const double f = Ad[row][col] / Ad[col][col];
          for (int c2 = col; c2 < np; ++c2) Ad[row][c2] -= f * Ad[col][c2];
          bb[row] -= f * bb[col];
        }
      }
      if (singular) {
        lambda *= 10;
        continue;
      }
      std::vector<double> delta(np);
      for (int a = np - 1; a >= 0; --a) {
        double s = bb[a];
        for (int c2 = a + 1; c2 < np; ++c2) s -= Ad[a][c2] * delta[c2];
        delta[a] = s / Ad[a][a];
      }
      std::vector<double> trial(np);
      for (int a = 0; a < np; ++a) trial[a] = std::clamp(p[a] + delta[a], lo[a], hi[a]);
      residuals(trial, r_trial);
      const double sse_trial = sse_of(r_trial);
      if (sse_trial < sse) {
        p = trial;
        r = r_trial;
        sse = sse_trial;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
      } else {
        lambda *= 10;
      }
    }
    if (!improved) break;
    if (sse < 1e-24) break;
  }
  if (sse_out) *sse_out = sse;
  return p;
}

// Fixed fractional positions inside the box for the 8 multistart seeds.
constexpr double kSeedFrac[8][4] = {
    {0.50, 0.50, 0.50, 0.50}, {0.25, 0.25, 0.75, 0.75}, {0.75, 0.75, 0.25, 0.25},
    {0.10, 0.60, 0.40, 0.90}, {0.90, 0.40, 0.60, 0.10}, {0.35, 0.85, 0.15, 0.65},
    {0.65, 0.15, 0.85, 0.35}, {0.05, 0.95, 0.50, 0.20}};

std::vector<double> multistart_lm(const ResidualFn& residuals, const std::vector<double>& lo,
                                  const std::vector<double>& hi, int max_iter,
                                  double* best_sse_out) {
  const int np = static_cast<int>(lo.size());
  std::vector<double> best;
  double best_sse = opt::kInf;
  for (int s = 0; s < 8; ++s) {
    std::vector<double> p0(np);
    for (int j = 0; j < np; ++j) {
      const double hi_eff = std::isfinite(hi[j]) ? hi[j] : lo[j] + 1.0;
      p0[j] = lo[j] + kSeedFrac[s][j] * (hi_eff - lo[j]);
    }
    double sse = 0;
    auto p = lm_fit(residuals, p0, lo, hi, max_iter, &sse);
    if (sse < best_sse) {
      best_sse = sse;
      best = p;
    }
  }
  if (best_sse_out) *best_sse_out = best_sse;
  return best;
}

}  // namespace

// ---- TCRE ----------------------------------------------------------------

double fit_tcre(const std::vector<RcpScenario>& scenarios) {
  if (scenarios.empty()) throw DegenerateData("fit_tcre: no scenarios");
  double sTT = 0, sTE = 0;
  for (const auto& s : scenarios) {
    if (s.cum_emissions.size() != s.temperature.size())
      throw DegenerateData("fit_tcre: misaligned series in " + s.name);
    for (std::size_t t = 0; t < s.cum_emissions.size(); ++t) {
      sTT += s.cum_emissions[t] * s.cum_emissions[t];
      sTE += s.cum_emissions[t] * s.temperature[t];
    }
  }
  if (sTT < 1e-9) throw DegenerateData("fit_tcre: cumulative emissions carry no signal");
  return sTE / sTT;
}

// ---- cap pathways ----------------------------------------------------------

double CapPathway::at_year(int year) const {
  if (year < start_year) throw Error("cap pathway queried before start year");
  const std::size_t idx = static_cast<std::size_t>(year - start_year);
  if (idx >= caps.size()) return 0.0;
  return caps[idx];
}

CapPathway build_cap_pathway(const std::vector<double>& hist_2014_2018,
                             double target_level, int target_year, int netzero_year,
                             int end_year) {
  if (hist_2014_2018.size() != 5)
    throw DegenerateData("cap pathway needs the five 2014-2018 observations");
  if (target_year != 2025 && target_year != 2030)
    throw ConfigError("pledge target year must be 2025 or 2030");
  if (netzero_year < 2031) throw ConfigError("net-zero year must be past 2030");

  // Quadratic least squares over the six points, centered for conditioning.
  double S[5] = {0, 0, 0, 0, 0};
  double b0 = 0, b1 = 0, b2 = 0;
  auto add = [&](double year, double v) {
    const double x = year - 2016.0;
    double xp = 1.0;
    for (int k = 0; k < 5; ++k, xp *= x) S[k] += xp;
    b0 += v;
    b1 += v * x;
    b2 += v * x * x;
  };
  for (int k = 0; k < 5; ++k) add(2014.0 + k, hist_2014_2018[k]);
  add(target_year, target_level);

  double M[3][4] = {{S[0], S[1], S[2], b0}, {S[1], S[2], S[3], b1}, {S[2], S[3], S[4], b2}};
  for (int col = 0; col < 3; ++col) {
    int best = col;
    for (int row = col + 1; row < 3; ++row)
      if (std::fabs(M[row][col]) > std::fabs(M[best][col])) best = row;
    std::swap(M[col], M[best]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = M[row][col] / M[col][col];
      for (int c = col; c < 4; ++c) M[row][c] -= f * M[col][c];
    }
  }
  double coef[3];
  for (int a = 2; a >= 0; --a) {
    double s = M[a][3];
    for (int c = a + 1; c < 3; ++c) s -= M[a][c] * coef[c];
    coef[a] = s / M[a][a];
  }

  CapPathway path;
  path.start_year = 2020;
  path.caps.assign(static_cast<std::size_t>(end_year - 2020 + 1), 0.0);
  const double level_2030 = [&] {
    const double x = 2030.0 - 2016.0;
    return std::max(0.0, coef[0] + coef[1] * x + coef[2] * x * x);
  }();
  for (int year = 2020; year <= end_year; ++year) {
    double v = 0;
    if (year <= 2030) {
      const double x = year - 2016.0;
      v = coef[0] + coef[1] * x + coef[2] * x * x;
      if (v < 0) {
        v = 0;
        path.clamped_negative = true;
      }
    } else if (year < netzero_year) {
      v = level_2030 * static_cast<double>(netzero_year - year) /
          static_cast<double>(netzero_year - 2030);
    }
    path.caps[static_cast<std::size_t>(year - 2020)] = v;
  }
  return path;
}

CapPathway aggregate_cap_pathways(const std::vector<CapPathway>& parts) {
  if (parts.empty()) throw DegenerateData("no cap pathways to aggregate");
  CapPathway total;
  total.start_year = parts.front().start_year;
  std::size_t len = 0;
  for (const auto& p : parts) {
    if (p.start_year != total.start_year)
      throw GridMismatch("cap pathways start in different years");
    len = std::max(len, p.caps.size());
  }
  total.caps.assign(len, 0.0);
  for (const auto& p : parts) {
    total.clamped_negative = total.clamped_negative || p.clamped_negative;
    for (std::size_t k = 0; k < p.caps.size(); ++k) total.caps[k] += p.caps[k];
  }
  return total;
}

// ---- growth model for the structural estimation ---------------------------

std::vector<double> solve_growth_path(const GrowthInput& input) {
  const auto& g = input.globals;
  const int H = g.horizon;
  if (static_cast<int>(input.tfp.size()) < H + 1 ||
      static_cast<int>(input.labor.size()) < H + 1 ||
      static_cast<int>(input.damage.size()) < H + 1)
    throw ConfigError("growth input paths shorter than horizon+1");

  std::vector<double> K(H + 1), Y(H), c(H);

  auto simulate = [&](const std::vector<double>& I) -> bool {
    K[0] = input.K0;
    for (int t = 0; t < H; ++t) {
      if (!(K[t] > 0)) return false;
      const double Q = input.tfp[t] * std::pow(K[t], g.alpha) *
                       std::pow(input.labor[t], 1.0 - g.alpha);
      Y[t] = Q / input.damage[t];
      c[t] = (Y[t] - I[t]) / input.labor[t];
      if (!(c[t] > 0)) return false;
      K[t + 1] = (1.0 - g.delta) * K[t] + I[t];
    }
    return K[H] > 0;
  };

  std::vector<double> betapow(H + 1);
  betapow[0] = 1.0;
  for (int t = 1; t <= H; ++t) betapow[t] = betapow[t - 1] * g.beta;

  auto objective = [&](const std::vector<double>& I, long double& f,
                       std::vector<double>& grad) -> bool {
    if (!simulate(I)) return false;
    long double J = 0;
    for (int t = 0; t < H; ++t)
      J += betapow[t] * std::pow(c[t], 1.0 - g.gamma) / (1.0 - g.gamma) * input.labor[t];
    const double QH = input.tfp[H] * std::pow(K[H], g.alpha) *
                      std::pow(input.labor[H], 1.0 - g.alpha);
    const double YH = QH / input.damage[H];
    const double cterm = g.consumption_share_terminal * YH / input.labor[H];
    if (!(cterm > 0)) return false;
    J += betapow[H] * std::pow(cterm, 1.0 - g.gamma) / (1.0 - g.gamma) * input.labor[H] /
         (1.0 - g.beta);
    f = -J;
    grad.resize(H);
    double pK = betapow[H] * std::pow(cterm, -g.gamma) * g.consumption_share_terminal *
                g.alpha * (YH / K[H]) / (1.0 - g.beta);
    for (int t = H - 1; t >= 0; --t) {
      const double w = betapow[t] * std::pow(c[t], -g.gamma);
      grad[t] = -(-w + pK);
      pK = w * g.alpha * Y[t] / K[t] + (1.0 - g.delta) * pK;
    }
    return true;
  };

  // Feasible start: invest a fixed share of output.
  std::vector<double> I0(H, 0.0);
  {
    double Kt = input.K0;
    for (int t = 0; t < H; ++t) {
      const double Q = input.tfp[t] * std::pow(Kt, g.alpha) *
                       std::pow(input.labor[t], 1.0 - g.alpha);
      I0[t] = 0.25 * Q / input.damage[t];
      Kt = (1.0 - g.delta) * Kt + I0[t];
    }
  }

  std::vector<double> lo(H, -opt::kInf), hi(H, opt::kInf);
  opt::Options oopt;
  oopt.max_iterations = 2000;
  oopt.grad_tol = 0.0;
  auto stop = [&](const std::vector<double>&, const std::vector<double>& grad) {
    double worst = 0;
    for (int t = 0; t < H; ++t)
      worst = std::max(worst, std::fabs(grad[t]) / (betapow[t] * std::pow(c[t], -g.gamma)));
    return worst <= 1e-9;
  };
  auto res = opt::minimize_box(objective, I0, lo, hi, oopt, stop);

  long double f = 0;
  std::vector<double> grad;
  objective(res.x, f, grad);
  std::vector<double> y(H);
  for (int t = 0; t < H; ++t) y[t] = Y[t] / input.labor[t];
  return y;
}

// ---- TFP / damage structural estimation ------------------------------------

TfpDamageFit fit_tfp_damage(const TfpDamageData& data, const model::GlobalParams& globals,
                            int inner_horizon) {
  if (data.gdppc_nocc.size() < 80) throw DegenerateData("need 80 years of no-impact GDP");
  if (data.gdppc_cc.size() < 30) throw DegenerateData("need 30 years of with-impact GDP");
  if (data.labor.size() < static_cast<std::size_t>(inner_horizon) + 1)
    throw DegenerateData("labor path shorter than the inner horizon");

  model::GlobalParams g = globals;
  g.horizon = inner_horizon;

  auto temp_at = [&](int t) {
    if (data.temps_rcp45.empty()) return 0.0;
    const std::size_t idx = std::min<std::size_t>(t, data.temps_rcp45.size() - 1);
    return data.temps_rcp45[idx];
  };

  auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
    const double g0 = p[0], dec = p[1], pi1 = p[2], pi2 = p[3];
    r.assign(110, 1e3);  // penalty value when the candidate is inadmissible

    std::vector<double> damage(inner_horizon + 1);
    for (int t = 0; t <= inner_horizon; ++t) {
      const double T = temp_at(t);
      const double D = 1.0 + pi1 * T + pi2 * T * T;
      if (!(D > 1e-6)) return;
      damage[t] = D;
    }
    // A0 anchors modeled damaged GDP per capita at the 2020 observation.
    const double A0 = data.gdppc_2020 * damage[0] * std::pow(data.labor[0], g.alpha) /
                      std::pow(data.K0, g.alpha);
    std::vector<double> tfp(inner_horizon + 1);
    tfp[0] = A0;
    for (int t = 0; t < inner_horizon; ++t)
      tfp[t + 1] = tfp[t] * std::exp(g0 * std::exp(-dec * t));

    GrowthInput gi;
    gi.globals = g;
    gi.tfp = tfp;
    gi.labor = {data.labor.begin(), data.labor.begin() + inner_horizon + 1};
    gi.K0 = data.K0;
    gi.damage.assign(inner_horizon + 1, 1.0);
    std::vector<double> y_nocc;
    try {
      y_nocc = solve_growth_path(gi);
      gi.damage = damage;
      const std::vector<double> y_cc = solve_growth_path(gi);
      for (int t = 0; t < 80; ++t)
        r[t] = y_nocc[t] / y_nocc[0] - data.gdppc_nocc[t] / data.gdppc_nocc[0];
      for (int t = 0; t < 30; ++t)
        r[80 + t] = y_cc[t] / y_cc[0] - data.gdppc_cc[t] / data.gdppc_cc[0];
    } catch (const Error&) {
      // keep penalty residuals
    }
  };

  const std::vector<double> lo = {0.0, 0.0, -1.0, -1.0};
  const std::vector<double> hi = {0.08, 0.08, 1.0, 1.0};
  TfpDamageFit fit;
  auto p = multistart_lm(residuals, lo, hi, 60, &fit.sse);
  fit.g0 = p[0];
  fit.d = p[1];
  fit.pi1 = p[2];
  fit.pi2 = p[3];
  return fit;
}

// ---- carbon intensity -------------------------------------------------------

std::vector<double> extract_carbon_intensity(const std::vector<double>& emissions,
                                             const std::vector<double>& gdp) {
  if (emissions.size() != gdp.size()) throw GridMismatch("emissions/GDP paths misaligned");
  std::vector<double> sigma(emissions.size());
  for (std::size_t t = 0; t < gdp.size(); ++t) {
    if (!(gdp[t] > 0)) throw ZeroGdp("nonpositive GDP at index " + std::to_string(t));
    sigma[t] = emissions[t] / gdp[t];
  }
  return sigma;
}

// ---- abatement cost fit -------------------------------------------------------

AbatementFit fit_abatement(const std::vector<TaxScenario>& tax_scenarios,
                           const std::vector<double>& zero_tax_emissions) {
  struct Point {
    double mu, tau, t;
  };
  std::vector<Point> pts;
  for (const auto& sc : tax_scenarios) {
    for (std::size_t t = 0; t < sc.tax_usd_tc.size() && t < zero_tax_emissions.size(); ++t) {
      if (sc.tax_usd_tc[t] <= 0) continue;  // zero-tax rows identify mu = 0
      if (!(zero_tax_emissions[t] > 0)) continue;
      const double mu = 1.0 - sc.emissions[t] / zero_tax_emissions[t];
      if (mu <= 1e-6 || mu >= 1.0 - 1e-12) continue;
      pts.push_back({mu, sc.tax_usd_tc[t], static_cast<double>(t)});
    }
  }
  if (pts.size() < 4)
    throw NoInteriorPoints("abatement fit found " + std::to_string(pts.size()) +
                           " interior points, need >= 4");

  auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
    const double b1 = p[0], b2 = p[1], b3 = p[2], b4 = p[3];
    r.resize(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double coeff = b1 + b3 * std::exp(-b4 * pts[k].t);
      const double model_tau =
          model::kUsdPerTonFactor * b2 * std::pow(pts[k].mu, b2 - 1.0) * coeff;
      r[k] = std::log(std::max(model_tau, 1e-12)) - std::log(pts[k].tau);
    }
  };

  const std::vector<double> lo = {1e-4, 2.0001, 0.0, 0.0};
  const std::vector<double> hi = {5.0, 6.0, 50.0, 0.2};
  AbatementFit fit;
  auto p = multistart_lm(residuals, lo, hi, 120, &fit.sse);
  fit.b1 = p[0];
  fit.b2 = p[1];
  fit.b3 = p[2];
  fit.b4 = p[3];
  fit.b4_at_bound = p[3] >= hi[3] - 1e-9 || p[3] <= lo[3] + 1e-12;
  return fit;
}

// ---- damage fit on loss ratios -------------------------------------------------

KahnFit fit_damage_kahn(const std::vector<double>& delta_rcp26,
                        const std::vector<double>& delta_rcp85,
                        const std::vector<double>& temps_rcp26,
                        const std::vector<double>& temps_rcp85) {
  const std::size_t n = delta_rcp26.size();
  if (delta_rcp85.size() != n || temps_rcp26.size() != n || temps_rcp85.size() != n)
    throw GridMismatch("loss-ratio series misaligned");
  double spread = 0;
  for (std::size_t t = 0; t < n; ++t)
    spread += (temps_rcp85[t] - temps_rcp26[t]) * (temps_rcp85[t] - temps_rcp26[t]);
  if (spread < 1e-12) throw DegenerateData("identical temperature paths");

  auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
    const double pi1 = p[0], pi2 = p[1];
    r.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double D85 = 1.0 + pi1 * temps_rcp85[t] + pi2 * temps_rcp85[t] * temps_rcp85[t];
      const double D26 = 1.0 + pi1 * temps_rcp26[t] + pi2 * temps_rcp26[t] * temps_rcp26[t];
      if (!(D85 > 1e-6) || !(D26 > 1e-6)) {
        r.assign(n, 1e3);
        return;
      }
      r[t] = D85 / D26 - (1.0 - delta_rcp26[t]) / (1.0 - delta_rcp85[t]);
    }
  };

  const std::vector<double> lo = {-1.0, -1.0};
  const std::vector<double> hi = {1.0, 1.0};
  KahnFit fit;
  auto p = multistart_lm(residuals, lo, hi, 120, &fit.sse);
  fit.pi1 = p[0];
  fit.pi2 = p[1];
  return fit;
}

// ---- post-2099 TFP growth -------------------------------------------------------

std::vector<std::vector<double>> extend_tfp_growth(const std::vector<double>& g_2099,
                                                   const std::vector<double>& y_2099,
                                                   int us_index, double alpha, double chi,
                                                   int t_max) {
  const int n = static_cast<int>(g_2099.size());
  if (static_cast<int>(y_2099.size()) != n) throw GridMismatch("g/y vectors misaligned");
  if (us_index < 0 || us_index >= n) throw ConfigError("bad US index");
  for (double y : y_2099)
    if (!(y > 0)) throw ConfigError("per-capita outputs must be positive");
  const int base_t = 79;
  if (t_max < base_t) throw ConfigError("t_max before 2099");

  const double g_us_inf = 0.0033 * (1.0 - alpha);
  const int len = t_max - base_t + 1;

  std::vector<std::vector<double>> g(n, std::vector<double>(len, 0.0));
  std::vector<double> ytil = y_2099;
  for (int i = 0; i < n; ++i) g[i][0] = g_2099[i];

  for (int k = 0; k + 1 < len; ++k) {
    const int t = base_t + k;
    const double g_us_next =
        g_us_inf + (g_2099[us_index] - g_us_inf) * std::exp(-0.01 * (t + 1 - base_t));
    std::vector<double> ynext(n);
    for (int i = 0; i < n; ++i) ynext[i] = ytil[i] * std::exp(g[i][k] / (1.0 - alpha));
    for (int i = 0; i < n; ++i) {
      if (i == us_index)
        g[i][k + 1] = g_us_next;
      else
        g[i][k + 1] = g_us_next + (1.0 - alpha) * chi * std::log(ytil[us_index] / ytil[i]);
    }
    ytil = ynext;
  }
  return g;
}

std::vector<double> build_tfp_path(double A0, double g0, double d,
                                   const std::vector<double>& g_post79, int horizon) {
  std::vector<double> A(horizon + 1);
  A[0] = A0;
  for (int t = 0; t < horizon; ++t) {
    double gt;
    if (t < 79 || g_post79.empty())
      gt = g0 * std::exp(-d * t);
    else {
      const std::size_t k = std::min<std::size_t>(t - 79, g_post79.size() - 1);
      gt = g_post79[k];
    }
    A[t + 1] = A[t] * std::exp(gt);
  }
  return A;
}

}  // namespace ets::calib
