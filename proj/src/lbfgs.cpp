#include "smcrf/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <utility>

#include "smcrf/errors.hpp"

namespace smcrf {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

struct LineSearchState {
  const ObjectiveFn& f;
  const std::vector<double>& x0;
  const std::vector<double>& dir;
  std::vector<double> x;  // scratch
  std::vector<double> g;  // gradient at the last probe
  int evals = 0;

  // phi(a) = f(x0 + a*dir); fills g and returns {phi, phi'}.
  // Non-finite values are mapped to +inf so callers shrink the step.
  std::pair<double, double> probe(double a) {
    ++evals;
    for (std::size_t i = 0; i < x0.size(); ++i) x[i] = x0[i] + a * dir[i];
    double v = f(x, g);
    if (!std::isfinite(v)) return {std::numeric_limits<double>::infinity(), 0.0};
    return {v, dot(g, dir)};
  }
};

struct SearchOutcome {
  double step = -1.0;  // negative: no acceptable step within the eval budget
  double value = 0.0;
};

// Strong-Wolfe search (bracket then bisect). On success ls.x and ls.g hold
// the accepted point, since every return follows its own probe.
SearchOutcome wolfe_search(LineSearchState& ls, double f0, double d0, double c1,
                           double c2, int max_evals) {
  double a_prev = 0.0, f_prev = f0, d_prev = d0;
  double a = 1.0;
  double lo = -1.0, hi = -1.0, f_lo = 0.0;

  while (ls.evals < max_evals) {
    auto [fa, da] = ls.probe(a);
    if (fa > f0 + c1 * a * d0 || (a_prev > 0.0 && fa >= f_prev)) {
      lo = a_prev;
      f_lo = f_prev;
      hi = a;
      break;
    }
    if (std::fabs(da) <= -c2 * d0) return {a, fa};
    if (da >= 0.0) {
      lo = a;
      f_lo = fa;
      hi = a_prev;
      break;
    }
    a_prev = a;
    f_prev = fa;
    d_prev = da;
    a *= 2.0;
  }
  (void)d_prev;
  if (lo < 0.0) return {};  // ran out of budget while bracketing

  while (ls.evals < max_evals) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return {};  // interval collapsed
    auto [fm, dm] = ls.probe(mid);
    if (fm > f0 + c1 * mid * d0 || fm >= f_lo) {
      hi = mid;
    } else {
      if (std::fabs(dm) <= -c2 * d0) return {mid, fm};
      if (dm * (hi - lo) >= 0.0) hi = lo;
      lo = mid;
      f_lo = fm;
    }
  }
  return {};
}

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& f, std::vector<double>& x,
                           const LbfgsOptions& opts) {
  const std::size_t n = x.size();
  std::vector<double> g(n, 0.0);
  double fx = f(x, g);
  if (!std::isfinite(fx))
    throw NumericalError("objective is not finite at the starting point");

  LbfgsResult res;
  res.value = fx;
  res.trace.push_back(fx);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> p(n, 0.0), alpha;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (inf_norm(g) <= opts.tol) {
      res.converged = true;
      break;
    }

    // p = -H*g via the two-loop recursion over stored (s, y) pairs.
    p = g;
    alpha.assign(s_hist.size(), 0.0);
    for (int j = static_cast<int>(s_hist.size()) - 1; j >= 0; --j) {
      alpha[j] = rho_hist[j] * dot(s_hist[j], p);
      for (std::size_t k = 0; k < n; ++k) p[k] -= alpha[j] * y_hist[j][k];
    }
    if (!s_hist.empty()) {
      double gamma = dot(s_hist.back(), y_hist.back()) /
                     dot(y_hist.back(), y_hist.back());
      for (double& v : p) v *= gamma;
    }
    for (std::size_t j = 0; j < s_hist.size(); ++j) {
      double beta = rho_hist[j] * dot(y_hist[j], p);
      for (std::size_t k = 0; k < n; ++k) p[k] += s_hist[j][k] * (alpha[j] - beta);
    }
    for (double& v : p) v = -v;

    double d0 = dot(g, p);
    if (!(d0 < 0.0)) {
      // Curvature history produced a non-descent direction; restart from
      // steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t k = 0; k < n; ++k) p[k] = -g[k];
      d0 = dot(g, p);
      if (!(d0 < 0.0)) {
        res.converged = true;  // gradient is numerically zero
        break;
      }
    }

    LineSearchState ls{f, x, p, std::vector<double>(n), std::vector<double>(n)};
    SearchOutcome out =
        wolfe_search(ls, fx, d0, opts.c1, opts.c2, opts.max_line_evals);
    if (out.step <= 0.0) {
      if (inf_norm(g) <= 100.0 * opts.tol) {
        res.converged = true;
        break;
      }
      throw NumericalError("line search failed to find an acceptable step");
    }

    // ls.x / ls.g already hold the accepted point.
    double f_new = out.value;
    std::vector<double> s(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = ls.x[k] - x[k];
      y[k] = ls.g[k] - g[k];
    }
    x = ls.x;
    g = ls.g;
    fx = f_new;
    ++res.iterations;
    res.trace.push_back(fx);

    double sy = dot(s, y);
    if (sy > 1e-12 * dot(y, y)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
  }

  res.value = fx;
  return res;
}

}  // namespace smcrf
