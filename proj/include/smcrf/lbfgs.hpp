#pragma once

#include <functional>
#include <vector>

namespace smcrf {

// Limited-memory BFGS with a strong-Wolfe line search.
struct LbfgsOptions {
  int memory = 10;
  int max_iter = 200;
  double tol = 1e-5;  // convergence when the gradient inf-norm drops below
  double c1 = 1e-4;   // sufficient decrease
  double c2 = 0.9;    // curvature
  int max_line_evals = 60;
};

struct LbfgsResult {
  bool converged = false;
  int iterations = 0;
  double value = 0;
  std::vector<double> trace;  // objective value per accepted iterate
};

// f evaluates the objective at x and fills grad (same size as x).
using ObjectiveFn =
    std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

LbfgsResult lbfgs_minimize(const ObjectiveFn& f, std::vector<double>& x,
                           const LbfgsOptions& opts);

}  // namespace smcrf
