#include "ets/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace ets::opt {

namespace {

void project(std::vector<double>& x, const std::vector<double>& lo,
             const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

// Infinity norm of the projected gradient: the componentwise distance between
// x and P(x - g). Zero exactly at a box-KKT point.
double projected_grad_inf(const std::vector<double>& x, const std::vector<double>& g,
                          const std::vector<double>& lo, const std::vector<double>& hi) {
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = std::clamp(x[i] - g[i], lo[i], hi[i]) - x[i];
    worst = std::max(worst, std::fabs(step));
  }
  return worst;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

Result minimize_box(const Objective& objective, std::vector<double> x0,
                    const std::vector<double>& lower, const std::vector<double>& upper,
                    const Options& options, const StopTest& stop_test) {
  const std::size_t n = x0.size();
  project(x0, lower, upper);

  Result res;
  res.x = std::move(x0);

  std::vector<double> g(n), gnew(n), xnew(n), d(n), q(n);
  long double f = 0;
  if (!objective(res.x, f, g)) {
    // Caller is responsible for supplying a feasible start.
    res.f = kInf;
    return res;
  }

  std::deque<Pair> pairs;
  double gamma_scale = 1.0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    res.iterations = iter;
    res.projected_grad_inf = projected_grad_inf(res.x, g, lower, upper);
    if (res.projected_grad_inf <= options.grad_tol || (stop_test && stop_test(res.x, g))) {
      res.converged = true;
      res.f = f;
      return res;
    }

    // Variables pinned at a bound with the gradient pushing outward are held
    // fixed for this iteration; the two-loop recursion runs on the rest.
    std::vector<bool> active(n, false);
    for (std::size_t i = 0; i < n; ++i)
      active[i] = (res.x[i] <= lower[i] && g[i] > 0) || (res.x[i] >= upper[i] && g[i] < 0);

    q = g;
    for (std::size_t i = 0; i < n; ++i)
      if (active[i]) q[i] = 0;

    std::vector<double> alpha(pairs.size());
    for (int k = static_cast<int>(pairs.size()) - 1; k >= 0; --k) {
      const Pair& p = pairs[k];
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += p.s[i] * q[i];
      alpha[k] = p.rho * dot;
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * p.y[i];
    }
    for (std::size_t i = 0; i < n; ++i) q[i] *= gamma_scale;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const Pair& p = pairs[k];
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += p.y[i] * q[i];
      const double beta = p.rho * dot;
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * p.s[i];
    }

    double descent = 0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = active[i] ? -g[i] : -q[i];
      descent += d[i] * g[i];
    }
    if (descent >= 0) {  // fall back on steepest descent
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      pairs.clear();
      gamma_scale = 1.0;
    }

    // Backtracking Armijo search along the projected path; if the
    // quasi-Newton direction fails entirely, retry once along the gradient.
    long double fnew = 0;
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        double gmax = 0;
        for (std::size_t i = 0; i < n; ++i) gmax = std::max(gmax, std::fabs(g[i]));
        if (gmax == 0) break;
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] / gmax;
        pairs.clear();
        gamma_scale = 1.0;
      }
      double step = 1.0;
      for (int ls = 0; ls < options.max_line_search && step >= options.min_step; ++ls) {
        for (std::size_t i = 0; i < n; ++i)
          xnew[i] = std::clamp(res.x[i] + step * d[i], lower[i], upper[i]);
        long double dirderiv = 0;  // gradient against the actually-taken step
        for (std::size_t i = 0; i < n; ++i)
          dirderiv += static_cast<long double>(g[i]) * (xnew[i] - res.x[i]);
        if (dirderiv >= 0) {
          step *= 0.5;
          continue;
        }
        if (objective(xnew, fnew, gnew) && fnew <= f + 1e-4L * dirderiv) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) {
      res.f = f;
      res.converged = res.projected_grad_inf <= options.grad_tol;
      return res;
    }

    Pair pr;
    pr.s.resize(n);
    pr.y.resize(n);
    double sy = 0, yy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pr.s[i] = xnew[i] - res.x[i];
      pr.y[i] = gnew[i] - g[i];
      sy += pr.s[i] * pr.y[i];
      yy += pr.y[i] * pr.y[i];
    }
    if (sy > 1e-12 * std::sqrt(yy) * std::sqrt(std::inner_product(
                         pr.s.begin(), pr.s.end(), pr.s.begin(), 0.0))) {
      pr.rho = 1.0 / sy;
      gamma_scale = sy / yy;
      pairs.push_back(std::move(pr));
      if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
    }

    res.x.swap(xnew);
    g.swap(gnew);
    f = fnew;
  }

  res.f = f;
  res.projected_grad_inf = projected_grad_inf(res.x, g, lower, upper);
  res.converged = res.projected_grad_inf <= options.grad_tol ||
                  (stop_test && stop_test(res.x, g));
  return res;
}

}  // namespace ets::opt
