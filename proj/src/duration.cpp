#include "smcrf/duration.hpp"

#include <cmath>
#include <limits>

#include "smcrf/errors.hpp"

namespace smcrf {

std::string family_name(DurationFamily f) {
  switch (f) {
    case DurationFamily::None: return "none";
    case DurationFamily::GaussianLike: return "gaussian";
    case DurationFamily::GammaLike: return "gamma";
  }
  return "none";
}

DurationFamily family_from_name(const std::string& name) {
  if (name == "none") return DurationFamily::None;
  if (name == "gaussian") return DurationFamily::GaussianLike;
  if (name == "gamma") return DurationFamily::GammaLike;
  throw DataError("unknown duration family: " + name);
}

double duration_feature(const DurationModel& m, int d) {
  switch (m.family) {
    case DurationFamily::GaussianLike: {
      double z = d - m.p1;
      return -z * z / (2.0 * m.p2);
    }
    case DurationFamily::GammaLike:
      return -m.p1 * d + m.p2 * std::log(static_cast<double>(d));
    case DurationFamily::None:
      return 1.0;
  }
  return 1.0;
}

void DurationHistogram::add(int d, long n) {
  if (d < 1) throw DataError("segment length must be >= 1");
  counts[d] += n;
}

long DurationHistogram::total() const {
  long t = 0;
  for (auto& [d, n] : counts) t += n;
  return t;
}

double DurationHistogram::mean() const {
  double s = 0;
  for (auto& [d, n] : counts) s += static_cast<double>(d) * n;
  return s / total();
}

double DurationHistogram::variance() const {
  double mu = mean();
  double s = 0;
  for (auto& [d, n] : counts) s += (d - mu) * (d - mu) * n;
  return s / total();
}

double DurationHistogram::mean_log() const {
  double s = 0;
  for (auto& [d, n] : counts) s += std::log(static_cast<double>(d)) * n;
  return s / total();
}

DurationHistogram collect_histogram(const std::vector<Sentence>& corpus, int label) {
  DurationHistogram h;
  for (const Sentence& s : corpus)
    for (const Segment& g : s.segments)
      if (g.label == label) h.add(g.length());
  if (h.counts.empty()) throw DataError("empty duration sample");
  return h;
}

double digamma(double x) {
  if (!(x > 0))
    throw NumericalError("digamma requires a positive argument");
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // asymptotic series with Bernoulli coefficients through x^-12
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  double series = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  if (!(x > 0))
    throw NumericalError("trigamma requires a positive argument");
  double acc = 0.0;
  while (x < 8.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  double series = 1.0 + inv * 0.5 + inv2 * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66)))));
  return acc + inv * series;
}

namespace {

void require_fittable(const DurationHistogram& h) {
  if (h.counts.empty()) throw DataError("empty duration sample");
  if (h.total() < 2)
    throw DataError("duration sample too small: need at least 2 observations");
  if (h.distinct() < 2)
    throw DataError("degenerate duration sample: all segment lengths equal");
}

}  // namespace

double gaussian_log_lik(const DurationHistogram& h, double mu, double sigma2) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  double ll = 0;
  for (auto& [d, n] : h.counts)
    ll += n * (-0.5 * std::log(two_pi * sigma2) - (d - mu) * (d - mu) / (2 * sigma2));
  return ll;
}

double gamma_log_lik(const DurationHistogram& h, double rate, double shape) {
  double ll = 0;
  for (auto& [d, n] : h.counts)
    ll += n * (shape * std::log(rate) - std::lgamma(shape) +
               (shape - 1) * std::log(static_cast<double>(d)) - rate * d);
  return ll;
}

DurationModel fit_gaussian(const DurationHistogram& h) {
  require_fittable(h);
  double mu = h.mean();
  double sigma2 = h.variance();
  return {DurationFamily::GaussianLike, mu, sigma2, gaussian_log_lik(h, mu, sigma2)};
}

DurationModel fit_gamma(const DurationHistogram& h) {
  require_fittable(h);
  double mean = h.mean();
  double s = std::log(mean) - h.mean_log();
  if (!(s > 0))
    throw DataError("degenerate duration sample: gamma fit needs spread in lengths");
  double p = mean * mean / h.variance();
  if (!(p > 0)) p = 1.0;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    double f = std::log(p) - digamma(p) - s;
    double fp = 1.0 / p - trigamma(p);
    double next = p - f / fp;
    if (next <= 0) next = p / 2;
    double delta = std::fabs(next - p);
    p = next;
    if (delta < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(p))
    throw NumericalError("gamma fit did not converge within 100 iterations");
  double rate = p / mean;
  return {DurationFamily::GammaLike, rate, p - 1, gamma_log_lik(h, rate, p)};
}

}  // namespace smcrf
