#ifndef ETS_OPTIMIZER_HPP
#define ETS_OPTIMIZER_HPP

#include <functional>
#include <limits>
#include <vector>

// Projected L-BFGS for smooth box-constrained minimization. Used by the
// regional best-response solver and by the calibration growth solves.

namespace ets::opt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluates f(x) and its gradient. Returns false when x is infeasible for the
// underlying model (e.g. implies nonpositive consumption); the line search
// treats that as f = +inf and backtracks.
//
// f is extended precision: objective terms of a long discounted horizon span
// more orders of magnitude than a double-precision sum can compare.
using Objective = std::function<bool(const std::vector<double>& x, long double& f,
                                     std::vector<double>& grad)>;

// Optional custom stopping test, called after each accepted step with the
// current point and gradient. Return true to stop (reported as converged).
using StopTest =
    std::function<bool(const std::vector<double>& x, const std::vector<double>& grad)>;

struct Options {
  int max_iterations = 500;
  int memory = 10;
  double grad_tol = 1e-9;       // on the infinity norm of the projected gradient
  double min_step = 1e-16;      // line search abandons below this step size
  int max_line_search = 60;
};

struct Result {
  std::vector<double> x;
  long double f = 0;
  double projected_grad_inf = 0;
  int iterations = 0;
  bool converged = false;
};

Result minimize_box(const Objective& objective, std::vector<double> x0,
                    const std::vector<double>& lower, const std::vector<double>& upper,
                    const Options& options, const StopTest& stop_test = {});

}  // namespace ets::opt

#endif
