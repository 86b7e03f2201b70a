#include "ets/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ets/optimizer.hpp"

namespace ets::region {

namespace {

constexpr double kZeroCap = 1e-12;  // caps at or below this count as zero

double cap_violation(double E, double cap) { return std::max(0.0, E - cap); }

// One full simulation of a candidate decision path, with everything the
// adjoint pass needs cached per period.
struct Evaluation {
  std::vector<double> Q, T, D, Dp, Y, E, Phi, c, theta, uprime, w;  // length H
  std::vector<double> K, CE;                                        // length H+1
  double Q_H = 0, T_H = 0, D_H = 0, Dp_H = 0, Y_H = 0, c_term = 0;
  double welfare = 0;
  long double welfare_precise = 0;
  bool feasible = false;

  void resize(int H) {
    Q.resize(H);
    T.resize(H);
    D.resize(H);
    Dp.resize(H);
    Y.resize(H);
    E.resize(H);
    Phi.resize(H);
    c.resize(H);
    theta.resize(H);
    uprime.resize(H);
    w.resize(H);
    K.resize(H + 1);
    CE.resize(H + 1);
  }
};

class RegionModel {
 public:
  explicit RegionModel(const RegionProblem& p) : p_(p), H_(p.globals.horizon) {
    const auto& r = p_.region;
    theta_.resize(H_);
    betapow_.resize(H_ + 1);
    double bp = 1.0;
    for (int t = 0; t < H_; ++t) {
      theta_[t] = (r.b1 + r.b3 * std::exp(-r.b4 * t)) * r.sigma_path[t];
      betapow_[t] = bp;
      bp *= p_.globals.beta;
    }
    betapow_[H_] = bp;
  }

  int horizon() const { return H_; }
  const RegionProblem& problem() const { return p_; }
  double betapow(int t) const { return betapow_[t]; }

  // x = [mu_0..mu_{H-1}, I_0..I_{H-1}]
  bool forward(const std::vector<double>& x, Evaluation& ev) const {
    const auto& r = p_.region;
    const auto& g = p_.globals;
    ev.resize(H_);
    ev.feasible = false;
    ev.K[0] = p_.initial_capital;
    ev.CE[0] = p_.initial_cum_emissions;
    // Extended-precision sum: late-horizon utility terms are many orders of
    // magnitude below the total and must stay comparable for the line search.
    long double J = 0;
    for (int t = 0; t < H_; ++t) {
      const double mu = x[t];
      const double I = x[H_ + t];
      const double K = ev.K[t];
      if (!(K > 0)) return false;
      const double Q =
          p_.tfp_path[t] * std::pow(K, g.alpha) * std::pow(r.L_path[t], 1.0 - g.alpha);
      const double T = g.zeta * ev.CE[t];
      const double D = 1.0 + r.pi1 * T + r.pi2 * T * T;
      if (!(D > 0)) return false;
      const double Y = Q / D;
      const double E = (1.0 - mu) * r.sigma_path[t] * Q;
      const double Phi = theta_[t] * std::pow(mu, r.b2) * Q;
      const double m = p_.price_path[t];
      double permit_cost = 0;
      if (p_.ets_enabled && m > 0) permit_cost = m * (E - r.cap_path[t]);
      const double c = (Y - I - Phi - permit_cost) / r.L_path[t];
      if (!(c > 0)) return false;
      ev.Q[t] = Q;
      ev.T[t] = T;
      ev.D[t] = D;
      ev.Dp[t] = r.pi1 + 2.0 * r.pi2 * T;
      ev.Y[t] = Y;
      ev.E[t] = E;
      ev.Phi[t] = Phi;
      ev.c[t] = c;
      ev.theta[t] = theta_[t];
      ev.uprime[t] = std::pow(c, -g.gamma);
      ev.w[t] = betapow_[t] * ev.uprime[t];
      J += betapow_[t] * std::pow(c, 1.0 - g.gamma) / (1.0 - g.gamma) * r.L_path[t];
      ev.K[t + 1] = (1.0 - g.delta) * K + I;
      ev.CE[t + 1] = ev.CE[t] + E + p_.other_emissions[t];
    }
    // Terminal value on (K_H, CE_H).
    if (!(ev.K[H_] > 0)) return false;
    ev.Q_H = p_.tfp_path[H_] * std::pow(ev.K[H_], g.alpha) *
             std::pow(r.L_path[H_], 1.0 - g.alpha);
    ev.T_H = g.zeta * ev.CE[H_];
    ev.D_H = 1.0 + r.pi1 * ev.T_H + r.pi2 * ev.T_H * ev.T_H;
    if (!(ev.D_H > 0)) return false;
    ev.Dp_H = r.pi1 + 2.0 * r.pi2 * ev.T_H;
    ev.Y_H = ev.Q_H / ev.D_H;
    ev.c_term = g.consumption_share_terminal * ev.Y_H / r.L_path[H_];
    if (!(ev.c_term > 0)) return false;
    J += betapow_[H_] * std::pow(ev.c_term, 1.0 - g.gamma) / (1.0 - g.gamma) *
         r.L_path[H_] / (1.0 - g.beta);
    ev.welfare = static_cast<double>(J);
    ev.welfare_precise = J;
    ev.feasible = true;
    return true;
  }

  // Reverse pass. `extra_e[t]` is an additional sensitivity charged against
  // the emission node E_t (the cap multiplier in the no-trade mode; empty or
  // zero otherwise). Outputs the gradient of welfare w.r.t. (mu, I) and the
  // shadow prices of the capital and cumulative-emission transitions.
  void adjoint(const std::vector<double>& x, const Evaluation& ev,
               const std::vector<double>& extra_e, std::vector<double>& grad_mu,
               std::vector<double>& grad_I, std::vector<double>& pK,
               std::vector<double>& pE) const {
    const auto& r = p_.region;
    const auto& g = p_.globals;
    grad_mu.resize(H_);
    grad_I.resize(H_);
    pK.resize(H_ + 1);
    pE.resize(H_ + 1);

    const double uprime_term = std::pow(ev.c_term, -g.gamma);
    const double term_scale =
        betapow_[H_] * uprime_term * g.consumption_share_terminal / (1.0 - g.beta);
    pK[H_] = term_scale * g.alpha * ev.Y_H / ev.K[H_];
    pE[H_] = -term_scale * ev.Y_H * ev.Dp_H * g.zeta / ev.D_H;

    for (int t = H_ - 1; t >= 0; --t) {
      const double mu = x[t];
      const double m = p_.price_path[t];
      const double mhat = (p_.ets_enabled && m > 0) ? m : 0.0;
      const double sig = r.sigma_path[t];
      const double w = ev.w[t];
      const double e_t = extra_e.empty() ? 0.0 : extra_e[t];
      const double pE_eff = pE[t + 1] - e_t;

      const double dn_dQ =
          1.0 / ev.D[t] - ev.theta[t] * std::pow(mu, r.b2) - mhat * sig * (1.0 - mu);
      const double gQ = w * dn_dQ + pE_eff * sig * (1.0 - mu);
      const double gT = -w * ev.Q[t] * ev.Dp[t] / (ev.D[t] * ev.D[t]);

      pK[t] = gQ * g.alpha * ev.Q[t] / ev.K[t] + (1.0 - g.delta) * pK[t + 1];
      pE[t] = gT * g.zeta + pE[t + 1];

      const double dPhi_dmu = ev.theta[t] * r.b2 * std::pow(mu, r.b2 - 1.0) * ev.Q[t];
      grad_mu[t] = w * (-dPhi_dmu + mhat * sig * ev.Q[t]) + pE_eff * (-sig * ev.Q[t]);
      grad_I[t] = -w + pK[t + 1];
    }
  }

  // Scaled stationarity residual of the full first-order system, given the
  // welfare gradient already adjusted for cap multipliers. Investment
  // residuals are relative Euler-equation errors; control-rate residuals are
  // measured in price units and scaled by the local price level.
  double kkt_stationarity(const std::vector<double>& x, const Evaluation& ev,
                          const std::vector<double>& grad_mu,
                          const std::vector<double>& grad_I) const {
    const auto& r = p_.region;
    double worst = 0;
    for (int t = 0; t < H_; ++t) {
      const double w = ev.w[t];
      const double rI = std::fabs(grad_I[t]) / w;
      worst = std::max(worst, rI);
      // A zero cap without trading pins mu at 1; the cap multiplier absorbs
      // the control-rate gradient there, so no stationarity requirement.
      if (!p_.ets_enabled && r.cap_path[t] <= kZeroCap) continue;
      const double gmu_price = grad_mu[t] / (w * r.sigma_path[t] * ev.Q[t]);
      const double mac_price =
          r.b2 * std::pow(x[t], r.b2 - 1.0) * ev.theta[t] / r.sigma_path[t];
      const double scale = std::max(1.0, mac_price + p_.price_path[t]);
      double rmu;
      if (x[t] <= 0.0)
        rmu = std::max(0.0, gmu_price);  // raising mu must not help
      else if (x[t] >= 1.0)
        rmu = std::max(0.0, -gmu_price);
      else
        rmu = std::fabs(gmu_price);
      worst = std::max(worst, rmu / scale);
    }
    return worst;
  }

 private:
  const RegionProblem& p_;
  int H_;
  std::vector<double> theta_;
  std::vector<double> betapow_;
};

// Forward walk that builds a feasible starting path: invest a fixed share of
// the post-cost budget each year.
bool seed_path(const RegionModel& mdl, double mu0, double saving,
               std::vector<double>& x) {
  const auto& p = mdl.problem();
  const auto& r = p.region;
  const auto& g = p.globals;
  const int H = mdl.horizon();
  x.assign(2 * H, 0.0);
  double K = p.initial_capital;
  double CE = p.initial_cum_emissions;
  for (int t = 0; t < H; ++t) {
    double mu = mu0;
    if (!p.ets_enabled && r.cap_path[t] <= kZeroCap) mu = 1.0;
    if (!(K > 0)) return false;
    const double Q = p.tfp_path[t] * std::pow(K, g.alpha) *
                     std::pow(r.L_path[t], 1.0 - g.alpha);
    const double T = g.zeta * CE;
    const double D = 1.0 + r.pi1 * T + r.pi2 * T * T;
    if (!(D > 0)) return false;
    const double Y = Q / D;
    const double E = (1.0 - mu) * r.sigma_path[t] * Q;
    const double Phi = model::abatement_cost(mu, Q, r.sigma_path[t], r.b1, r.b2, r.b3, r.b4, t);
    const double m = p.price_path[t];
    const double permit_cost = (p.ets_enabled && m > 0) ? m * (E - r.cap_path[t]) : 0.0;
    const double net = Y - Phi - permit_cost;
    if (!(net > 0)) return false;
    const double I = saving * net;
    x[t] = mu;
    x[H + t] = I;
    K = (1.0 - g.delta) * K + I;
    CE += E + p.other_emissions[t];
  }
  return true;
}

struct SolvePass {
  opt::Result opt;
  Evaluation ev;
  std::vector<double> grad_mu, grad_I, pK, pE;
  double stationarity = 0;
};

// One bound-constrained solve at fixed cap multipliers `lambda` (no-trade
// mode) or with the permit position eliminated (trading mode, lambda empty
// meaning the penalty terms vanish).
//
// The curvature of the objective falls by orders of magnitude along the
// horizon (discounting times consumption growth), which cripples a plain
// quasi-Newton method, so the solve runs in diagonally preconditioned
// variables: x = s .* xhat with s from a curvature estimate at the start.
SolvePass run_pass(const RegionModel& mdl, std::vector<double> x0,
                   const std::vector<double>& lower, const std::vector<double>& upper,
                   const std::vector<double>& lambda, double rho,
                   const SolverOptions& options) {
  const int H = mdl.horizon();
  const auto& p = mdl.problem();
  const auto& g = p.globals;
  const bool penalized = !lambda.empty();

  SolvePass pass;
  Evaluation ev;
  std::vector<double> gmu, gI, pK, pE, lhat(penalized ? H : 0);

  // Curvature-based scales at the starting point.
  std::vector<double> scale(2 * H, 1.0);
  {
    Evaluation seed;
    if (mdl.forward(x0, seed)) {
      for (int t = 0; t < H; ++t) {
        const double w = seed.w[t];
        const double uc = g.gamma / (seed.c[t] * p.region.L_path[t]);  // -u''/u' over L
        const double sigQ = p.region.sigma_path[t] * seed.Q[t];
        const double h_mu = w * (sigQ * sigQ * uc +
                                 seed.theta[t] * p.region.b2 * (p.region.b2 - 1.0) *
                                     std::pow(0.5, p.region.b2 - 2.0) * seed.Q[t]) +
                            rho * sigQ * sigQ;
        const double h_I = w * uc + rho;
        scale[t] = 1.0 / std::sqrt(std::max(h_mu, 1e-300));
        scale[H + t] = 1.0 / std::sqrt(std::max(h_I, 1e-300));
      }
    }
  }

  std::vector<double> x0s(2 * H), lo_s(2 * H), hi_s(2 * H), xraw(2 * H);
  for (int i = 0; i < 2 * H; ++i) {
    x0s[i] = x0[i] / scale[i];
    lo_s[i] = lower[i] == -opt::kInf ? -opt::kInf : lower[i] / scale[i];
    hi_s[i] = upper[i] == opt::kInf ? opt::kInf : upper[i] / scale[i];
  }

  auto objective = [&](const std::vector<double>& xs, long double& f,
                       std::vector<double>& grad) -> bool {
    for (int i = 0; i < 2 * H; ++i) xraw[i] = xs[i] * scale[i];
    if (!mdl.forward(xraw, ev)) return false;
    f = -ev.welfare_precise;
    if (penalized) {
      for (int t = 0; t < H; ++t) {
        const double slackv = ev.E[t] - p.region.cap_path[t];
        lhat[t] = std::max(0.0, lambda[t] + rho * slackv);
        // Augmented-Lagrangian value for an inequality constraint.
        f += static_cast<long double>(lhat[t] * lhat[t] - lambda[t] * lambda[t]) /
             (2.0 * rho);
      }
    }
    mdl.adjoint(xraw, ev, lhat, gmu, gI, pK, pE);
    grad.resize(2 * H);
    for (int t = 0; t < H; ++t) {
      grad[t] = -gmu[t] * scale[t];
      grad[H + t] = -gI[t] * scale[H + t];
    }
    return true;
  };

  // Stop as soon as the scaled stationarity residual meets the contract.
  auto stop = [&](const std::vector<double>&, const std::vector<double>&) -> bool {
    return mdl.kkt_stationarity(xraw, ev, gmu, gI) <= options.kkt_tol;
  };

  opt::Options oopt;
  oopt.max_iterations = options.max_iterations;
  oopt.grad_tol = 0.0;  // rely on the scaled test
  pass.opt = opt::minimize_box(objective, std::move(x0s), lo_s, hi_s, oopt, stop);

  // Refresh caches at the final point, in raw variables.
  long double f = 0;
  std::vector<double> grad;
  objective(pass.opt.x, f, grad);
  for (int i = 0; i < 2 * H; ++i) pass.opt.x[i] = pass.opt.x[i] * scale[i];
  pass.ev = ev;
  pass.grad_mu = gmu;
  pass.grad_I = gI;
  pass.pK = pK;
  pass.pE = pE;
  pass.stationarity = mdl.kkt_stationarity(pass.opt.x, ev, gmu, gI);
  return pass;
}

}  // namespace

void RegionProblem::validate() const {
  globals.validate();
  region.validate(globals.horizon);
  const std::size_t H = static_cast<std::size_t>(globals.horizon);
  if (tfp_path.size() < H + 1) throw ConfigError("tfp_path shorter than horizon+1");
  if (price_path.size() < H) throw ConfigError("price_path shorter than horizon");
  if (other_emissions.size() < H) throw ConfigError("other_emissions shorter than horizon");
  for (std::size_t t = 0; t < H; ++t) {
    if (price_path[t] < 0) throw ConfigError("price_path must be nonnegative");
    if (!std::isfinite(region.cap_path[t])) throw ConfigError("cap_path must be finite");
  }
  if (!(initial_capital > 0)) throw ConfigError("initial capital must be positive");
  if (initial_cum_emissions < 0) throw ConfigError("initial cumulative emissions must be >= 0");
}

RegionSolution solve_region(const RegionProblem& problem, const SolverOptions& options,
                            const WarmStart* warm) {
  problem.validate();
  RegionModel mdl(problem);
  const int H = mdl.horizon();
  const auto& r = problem.region;

  std::vector<double> lower(2 * H), upper(2 * H);
  for (int t = 0; t < H; ++t) {
    lower[t] = 0.0;
    upper[t] = 1.0;
    if (!problem.ets_enabled && r.cap_path[t] <= kZeroCap) lower[t] = 1.0;  // only feasible point
    lower[H + t] = -opt::kInf;
    upper[H + t] = opt::kInf;
  }

  // Starting point: warm start if usable, otherwise a feasible seed.
  std::vector<double> x0;
  bool seeded = false;
  Evaluation probe;
  if (warm && static_cast<int>(warm->mu.size()) == H &&
      static_cast<int>(warm->investment.size()) == H) {
    x0.resize(2 * H);
    for (int t = 0; t < H; ++t) {
      x0[t] = std::clamp(warm->mu[t], lower[t], upper[t]);
      x0[H + t] = warm->investment[t];
    }
    seeded = mdl.forward(x0, probe);
  }
  if (!seeded) {
    for (double mu0 : {0.1, 0.5, 0.9, 1.0}) {
      if (seed_path(mdl, mu0, 0.25, x0) && mdl.forward(x0, probe)) {
        seeded = true;
        break;
      }
    }
  }
  if (!seeded)
    throw Infeasible("region " + r.name + ": no positive-consumption trajectory found");

  RegionSolution sol;
  std::vector<double> lambda;  // cap multipliers, no-trade mode only
  SolvePass pass;

  if (problem.ets_enabled) {
    pass = run_pass(mdl, x0, lower, upper, {}, 0.0, options);
    sol.kkt_residual = pass.stationarity;
    sol.converged = pass.stationarity <= options.kkt_tol;
    sol.iterations = pass.opt.iterations;
  } else {
    // Augmented Lagrangian over the per-year cap constraints E_t <= cap_t.
    lambda.assign(H, 0.0);
    if (warm && static_cast<int>(warm->cap_lambda.size()) == H) lambda = warm->cap_lambda;
    double rho = 1.0;
    double prev_viol = opt::kInf;
    int total_iters = 0;
    for (int outer = 0; outer < 40; ++outer) {
      pass = run_pass(mdl, x0, lower, upper, lambda, rho, options);
      total_iters += pass.opt.iterations;
      double viol = 0;
      for (int t = 0; t < H; ++t)
        viol = std::max(viol, cap_violation(pass.ev.E[t], r.cap_path[t]));
      // Multiplier update.
      for (int t = 0; t < H; ++t)
        lambda[t] = std::max(0.0, lambda[t] + rho * (pass.ev.E[t] - r.cap_path[t]));
      x0 = pass.opt.x;
      if (viol <= options.cap_feasibility_tol && pass.stationarity <= options.kkt_tol) break;
      if (viol > 0.25 * prev_viol) rho = std::min(rho * 10.0, 1e12);
      prev_viol = viol;
    }
    sol.iterations = total_iters;
    double viol = 0;
    for (int t = 0; t < H; ++t)
      viol = std::max(viol, cap_violation(pass.ev.E[t], r.cap_path[t]));
    sol.kkt_residual = std::max(pass.stationarity, viol);
    sol.converged =
        pass.stationarity <= options.kkt_tol && viol <= options.cap_feasibility_tol;
  }

  // Assemble the trajectory and shadow prices at the final point.
  const Evaluation& ev = pass.ev;
  Trajectory& traj = sol.trajectory;
  traj.mu.assign(pass.opt.x.begin(), pass.opt.x.begin() + H);
  traj.investment.assign(pass.opt.x.begin() + H, pass.opt.x.end());
  traj.consumption = ev.c;
  traj.emissions = ev.E;
  traj.capital = ev.K;
  traj.cum_emissions = ev.CE;
  traj.permit_purchase.resize(H);
  sol.cap_multiplier.resize(H);
  for (int t = 0; t < H; ++t) {
    if (problem.ets_enabled) {
      const double m = problem.price_path[t];
      if (m > 0) {
        traj.permit_purchase[t] = ev.E[t] - r.cap_path[t];
        sol.cap_multiplier[t] = mdl.betapow(t) * ev.uprime[t] * m;
      } else {
        traj.permit_purchase[t] = std::max(0.0, ev.E[t] - r.cap_path[t]);
        sol.cap_multiplier[t] = 0.0;
      }
    } else {
      traj.permit_purchase[t] = 0.0;
      if (r.cap_path[t] <= kZeroCap) {
        // Pinned year: the multiplier is read off the stationarity condition
        // for mu, lambda = -dJ/dmu / (sigma Q).
        sol.cap_multiplier[t] =
            std::max(0.0, -pass.grad_mu[t] / (r.sigma_path[t] * ev.Q[t]));
      } else {
        sol.cap_multiplier[t] = lambda.empty() ? 0.0 : lambda[t];
      }
    }
  }
  sol.capital_shadow = pass.pK;
  sol.cum_emission_shadow = pass.pE;
  sol.welfare = ev.welfare;
  return sol;
}

double welfare_of(const Trajectory& trajectory, const model::RegionParams& region,
                  const model::GlobalParams& globals, const std::vector<double>& tfp_path) {
  const int H = trajectory.horizon();
  double J = 0;
  double bp = 1.0;
  for (int t = 0; t < H; ++t) {
    J += bp * model::utility(trajectory.consumption[t], globals.gamma) * region.L_path[t];
    bp *= globals.beta;
  }
  const double Q_H = model::gross_output(tfp_path[H], trajectory.capital[H],
                                         region.L_path[H], globals.alpha);
  const double T_H = model::temperature(trajectory.cum_emissions[H], globals.zeta);
  const double Y_H = model::net_output(Q_H, T_H, region.pi1, region.pi2);
  J += bp * model::terminal_value(Y_H, region.L_path[H], globals.gamma, globals.beta,
                                  globals.consumption_share_terminal);
  return J;
}

BestResponse best_response_emissions(const RegionSolution& solution) {
  return BestResponse{solution.trajectory.emissions, solution.trajectory.permit_purchase};
}

}  // namespace ets::region
