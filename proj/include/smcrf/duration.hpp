#pragma once

#include <map>
#include <string>
#include <vector>

#include "smcrf/corpus.hpp"

namespace smcrf {

enum class DurationFamily { None, GaussianLike, GammaLike };

std::string family_name(DurationFamily f);
DurationFamily family_from_name(const std::string& name);  // DataError on unknown

// GaussianLike: p1 = mu, p2 = sigma2 (ML variance, denominator = total).
// GammaLike:    p1 = alpha (rate), p2 = beta = shape - 1.
struct DurationModel {
  DurationFamily family = DurationFamily::None;
  double p1 = 0.0;
  double p2 = 0.0;
  double log_lik = 0.0;  // continuous log-likelihood of the fitted sample
};

// Segment-length feature value D(d):
//   GaussianLike  -(d - mu)^2 / (2 sigma2)
//   GammaLike     -alpha d + beta ln d
//   None          1.0  (also used for non-durational labels)
double duration_feature(const DurationModel& m, int d);

struct DurationHistogram {
  std::map<int, long> counts;  // length -> occurrences

  void add(int d, long n = 1);
  long total() const;
  double mean() const;
  double variance() const;  // ML (divides by total)
  double mean_log() const;
  int distinct() const { return static_cast<int>(counts.size()); }
};

// Lengths of all gold segments with the given label. Throws DataError
// ("empty duration sample") when none exist.
DurationHistogram collect_histogram(const std::vector<Sentence>& corpus, int label);

// Closed-form ML fit. Requires total >= 2 and nonzero sample variance.
DurationModel fit_gaussian(const DurationHistogram& h);

// ML fit of the shape p via Newton iteration on
//   ln p - psi(p) = ln(mean) - mean(ln d),
// initialized at the moment estimate p0 = mean^2 / variance. Converges when
// successive iterates differ by < 1e-10; more than 100 iterations raises
// NumericalError. Returns alpha = p / mean (rate) and beta = p - 1.
DurationModel fit_gamma(const DurationHistogram& h);

double gaussian_log_lik(const DurationHistogram& h, double mu, double sigma2);
double gamma_log_lik(const DurationHistogram& h, double rate, double shape);

// psi and psi': recurrence up the axis, then the asymptotic series.
// Absolute error below 1e-12 for arguments >= 0.1.
double digamma(double x);
double trigamma(double x);

}  // namespace smcrf
