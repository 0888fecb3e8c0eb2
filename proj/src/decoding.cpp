#include "smcrf/decoding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smcrf/inference.hpp"

namespace smcrf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Inclusive-span feasibility table; index begin * n + end.
std::vector<char> span_table(int n, const std::vector<std::pair<int, int>>& spans) {
  std::vector<char> ok(static_cast<std::size_t>(n) * n, 0);
  for (const auto& [b, e] : spans)
    if (b >= 0 && e < n && b <= e) ok[static_cast<std::size_t>(b) * n + e] = 1;
  return ok;
}

struct DpResult {
  DecodePath path;
  std::vector<int> bp_d;  // (n+1) x labels; argmax segment length per cell
  std::vector<double> v;
};

// Shared Viterbi core. np_ok null disables the NP constraint; prune applies
// the monotone predecessor-boundary cut to durational labels.
DpResult run_dp(const Model& m, const Sentence& s, const std::vector<char>* np_ok,
                bool prune, DecodeStats* stats) {
  const int n = s.size();
  const int nl = m.labels.size();
  const int start = m.start_label();
  DpResult r;
  if (n == 0) return r;

  SegmentScores sc(m, s);
  r.v.assign(static_cast<std::size_t>(n + 1) * nl, kNegInf);
  r.bp_d.assign(r.v.size(), 0);
  std::vector<int> bp_prev(r.v.size(), -1);

  long long evaluated = 0, np_pruned = 0, mono_pruned = 0;

  for (int i = 1; i <= n; ++i) {
    for (int y = 0; y < nl; ++y) {
      const bool durational = m.labels.is_durational(y);
      int dmax = sc.max_d(i);
      if (prune && durational && i >= 2 && r.v[(i - 1) * nl + y] != kNegInf) {
        // Predecessor boundaries before the one recorded at i-1 are skipped:
        // tau' = i - d >= tau*(i-1) means d <= d*(i-1) + 1.
        int cut = r.bp_d[(i - 1) * nl + y] + 1;
        if (cut < dmax) {
          mono_pruned += dmax - cut;
          dmax = cut;
        }
      }

      double best = kNegInf;
      int best_d = 0, best_prev = -1;
      for (int d = 1; d <= dmax; ++d) {
        if (np_ok && durational &&
            !(*np_ok)[static_cast<std::size_t>(i - d) * n + (i - 1)]) {
          ++np_pruned;
          continue;
        }
        const double od = sc.obs_dur(i, d, y);
        if (i == d) {
          ++evaluated;
          double cand = od + sc.trans(start, y);
          if (cand > best) {
            best = cand;
            best_d = d;
            best_prev = start;
          }
        } else {
          for (int p = 0; p < nl; ++p) {
            ++evaluated;
            double vp = r.v[(i - d) * nl + p];
            if (vp == kNegInf) continue;
            double cand = vp + (od + sc.trans(p, y));
            if (cand > best) {
              best = cand;
              best_d = d;
              best_prev = p;
            }
          }
        }
      }
      r.v[i * nl + y] = best;
      r.bp_d[i * nl + y] = best_d;
      bp_prev[i * nl + y] = best_prev;
    }
  }

  int y_star = 0;
  for (int y = 1; y < nl; ++y)
    if (r.v[n * nl + y] > r.v[n * nl + y_star]) y_star = y;

  r.path.score = r.v[n * nl + y_star];
  for (int i = n, y = y_star; i > 0;) {
    int d = r.bp_d[i * nl + y];
    r.path.segments.push_back({i - d, i - 1, y});
    int p = bp_prev[i * nl + y];
    i -= d;
    y = p;
  }
  std::reverse(r.path.segments.begin(), r.path.segments.end());

  if (stats) {
    stats->transitions_evaluated += evaluated;
    stats->segments_pruned_by_np += np_pruned;
    stats->segments_pruned_by_monotonicity += mono_pruned;
  }
  return r;
}

bool all_durational_concave(const Model& m) {
  for (int y = 0; y < m.labels.size(); ++y)
    if (m.labels.is_durational(y) && !duration_concave(m, y)) return false;
  return true;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

bool duration_concave(const Model& m, int label) {
  for (int d = 1; d + 2 <= m.max_len; ++d) {
    double h1 = m.duration_value(label, d + 1) - m.duration_value(label, d);
    double h2 = m.duration_value(label, d + 2) - m.duration_value(label, d + 1);
    if (h2 > h1 + 1e-12) return false;
  }
  return true;
}

DecodePath viterbi(const Model& m, const Sentence& s, DecodeStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  DpResult r = run_dp(m, s, nullptr, false, stats);
  if (stats) stats->wall_seconds += seconds_since(t0);
  return std::move(r.path);
}

DecodePath constrained_viterbi(const Model& m, const Sentence& s,
                               const std::vector<std::pair<int, int>>& np_spans,
                               const DecodeOptions& opts, DecodeStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  bool prune = opts.monotone_pruning;
  if (prune && !all_durational_concave(m)) {
    prune = false;
    if (stats) stats->pruning_disabled = true;
    if (opts.warn_on_disable)
      std::fprintf(stderr,
                   "warning: duration feature not concave; monotone pruning disabled\n");
  }
  std::vector<char> ok;
  const std::vector<char>* np_ok = nullptr;
  if (opts.np_constraint) {
    ok = span_table(s.size(), np_spans);
    np_ok = &ok;
  }
  DpResult r = run_dp(m, s, np_ok, prune, stats);
  if (stats) stats->wall_seconds += seconds_since(t0);
  return std::move(r.path);
}

MonotonicityReport check_monotonicity_assumption(const Model& m, double threshold) {
  MonotonicityReport rep;
  rep.threshold = threshold;
  for (int y = 0; y < m.labels.size(); ++y) {
    if (!m.labels.is_durational(y)) continue;
    if (!duration_concave(m, y)) rep.concave = false;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int d = 1; d <= m.max_len; ++d) {
      int id = m.index.lookup(FeatureKind::duration(y, d));
      double w = id >= 0 ? m.theta[id] : 0.0;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    if (m.max_len >= 2) rep.max_disparity = std::max(rep.max_disparity, hi - lo);
  }
  rep.unsafe = rep.max_disparity > threshold;
  return rep;
}

std::vector<int> recorded_boundaries(const Model& m, const Sentence& s, int label) {
  DpResult r = run_dp(m, s, nullptr, false, nullptr);
  const int n = s.size();
  const int nl = m.labels.size();
  std::vector<int> tau(n + 1, -1);
  for (int i = 1; i <= n; ++i)
    if (r.v[i * nl + label] != kNegInf) tau[i] = i - r.bp_d[i * nl + label];
  return tau;
}

TagResult tag_corpus(const Model& m, const std::vector<Sentence>& corpus,
                     Decoder decoder, const DecodeOptions& opts, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  TagResult out;
  const int n = static_cast<int>(corpus.size());
  out.paths.resize(n);

  DecodeOptions per = opts;
  per.warn_on_disable = false;
  bool disabled = false;
  if (decoder == Decoder::Constrained && opts.monotone_pruning &&
      !all_durational_concave(m)) {
    per.monotone_pruning = false;
    disabled = true;
    if (opts.warn_on_disable)
      std::fprintf(stderr,
                   "warning: duration feature not concave; monotone pruning disabled\n");
  }

  std::vector<DecodeStats> parts(n);
  std::exception_ptr err = nullptr;
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#else
  (void)threads;
#endif
  for (int i = 0; i < n; ++i) {
    try {
      if (decoder == Decoder::Viterbi) {
        out.paths[i] = viterbi(m, corpus[i], &parts[i]);
      } else {
        auto spans = noun_group_spans(corpus[i], m.noun_groups);
        out.paths[i] = constrained_viterbi(m, corpus[i], spans, per, &parts[i]);
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  for (const DecodeStats& p : parts) {
    out.stats.transitions_evaluated += p.transitions_evaluated;
    out.stats.segments_pruned_by_np += p.segments_pruned_by_np;
    out.stats.segments_pruned_by_monotonicity += p.segments_pruned_by_monotonicity;
  }
  out.stats.pruning_disabled = disabled;
  out.stats.wall_seconds = seconds_since(t0);
  return out;
}

}  // namespace smcrf
