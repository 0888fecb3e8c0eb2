#include "smcrf/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smcrf/errors.hpp"

namespace smcrf {

SparseVector gold_features(const Model& m, const Sentence& s) {
  SparseVector out;
  int prev = m.start_label();
  for (const Segment& seg : s.segments) {
    SparseVector f = extract(m, s, seg, prev);
    for (const auto& it : f.items) out.items.push_back(it);
    prev = seg.label;
  }
  out.finalize();
  return out;
}

namespace {

// Adds one sentence's log Z - theta.F(gold) and its gradient. A non-finite
// log Z poisons value with +inf so the line search backs off instead of
// propagating NaNs into the gradient.
void accumulate_sentence(const Model& m, const Sentence& s, double& value,
                         std::vector<double>& grad) {
  SegmentScores sc(m, s, SegmentScores::Keep::Vectors);
  Lattice lat = forward_backward(m, s, sc);
  if (!std::isfinite(lat.log_z)) {
    value = std::numeric_limits<double>::infinity();
    return;
  }
  value += lat.log_z;
  add_expected_features(m, sc, lat, 1.0, grad.data());
  SparseVector gold = gold_features(m, s);
  value -= gold.dot(m.theta);
  for (const auto& [id, v] : gold.items) grad[id] -= v;
}

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
}

void add_regularizer(const Model& m, double sigma2, Objective& obj) {
  if (!std::isfinite(sigma2)) return;
  double sq = 0.0;
  for (std::size_t k = 0; k < m.theta.size(); ++k) {
    sq += m.theta[k] * m.theta[k];
    obj.grad[k] += m.theta[k] / sigma2;
  }
  obj.value += sq / (2.0 * sigma2);
}

constexpr int kBlock = 16;       // sentences folded serially per block
constexpr int kWaveBlocks = 32;  // blocks materialized at once

}  // namespace

Objective corpus_nll(const Model& m, const std::vector<Sentence>& corpus,
                     double sigma2, int threads) {
  check_sigma2(sigma2);
  const int K = m.index.size();
  Objective out;
  out.grad.assign(K, 0.0);

  const int n = static_cast<int>(corpus.size());
  const int nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> bval;
  std::vector<std::vector<double>> bgrad;
  std::exception_ptr err = nullptr;

#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
#endif

  for (int w0 = 0; w0 < nblocks; w0 += kWaveBlocks) {
    const int wn = std::min(kWaveBlocks, nblocks - w0);
    bval.assign(wn, 0.0);
    bgrad.assign(wn, {});
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (int b = 0; b < wn; ++b) {
      try {
        bgrad[b].assign(K, 0.0);
        const int lo = (w0 + b) * kBlock;
        const int hi = std::min(lo + kBlock, n);
        for (int i = lo; i < hi; ++i)
          accumulate_sentence(m, corpus[i], bval[b], bgrad[b]);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    for (int b = 0; b < wn; ++b) {
      out.value += bval[b];
      for (int k = 0; k < K; ++k) out.grad[k] += bgrad[b][k];
    }
  }

  add_regularizer(m, sigma2, out);
  return out;
}

Objective corpus_nll_serial(const Model& m, const std::vector<Sentence>& corpus,
                            double sigma2) {
  check_sigma2(sigma2);
  Objective out;
  out.grad.assign(m.index.size(), 0.0);
  for (const Sentence& s : corpus) accumulate_sentence(m, s, out.value, out.grad);
  add_regularizer(m, sigma2, out);
  return out;
}

Model build_model(const std::vector<Sentence>& corpus, const TrainSetup& setup) {
  if (setup.max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  setup.labels.validate();

  Model m;
  m.labels = setup.labels;
  m.max_len = setup.max_len;
  m.templates = setup.templates;
  m.noun_groups = setup.noun_groups;

  const int nl = m.labels.size();
  if (!setup.preset_durations.empty()) {
    if (static_cast<int>(setup.preset_durations.size()) != nl)
      throw std::invalid_argument("preset duration list must have one entry per label");
    m.durations = setup.preset_durations;
  } else {
    m.durations.assign(nl, DurationModel{});
    for (int y = 0; y < nl; ++y) {
      if (!m.labels.is_durational(y)) continue;
      DurationHistogram h = collect_histogram(corpus, y);
      switch (setup.family) {
        case DurationFamily::GaussianLike: m.durations[y] = fit_gaussian(h); break;
        case DurationFamily::GammaLike: m.durations[y] = fit_gamma(h); break;
        case DurationFamily::None: break;
      }
    }
  }

  m.register_structural_features();
  for (const Sentence& s : corpus) {
    validate_cover(s, m.labels);
    int prev = m.start_label();
    for (const Segment& seg : s.segments) {
      extract_growing(m, s, seg, prev);
      prev = seg.label;
    }
  }
  m.index.freeze();
  m.theta.assign(m.index.size(), 0.0);
  m.refresh_duration_cache();
  m.validate();
  return m;
}

TrainReport optimize(Model& m, const std::vector<Sentence>& corpus,
                     const TrainConfig& cfg) {
  if (m.theta.size() != static_cast<std::size_t>(m.index.size()))
    throw std::invalid_argument("theta size does not match the feature index");
  check_sigma2(cfg.sigma2);

  LbfgsOptions opts;
  opts.memory = cfg.lbfgs_memory;
  opts.max_iter = cfg.max_iter;
  opts.tol = cfg.tol;

  int evals = 0;
  ObjectiveFn f = [&](const std::vector<double>& x, std::vector<double>& grad) {
    m.theta = x;
    Objective obj = corpus_nll(m, corpus, cfg.sigma2, cfg.threads);
    grad = std::move(obj.grad);
    ++evals;
    if (cfg.verbose)
      std::fprintf(stderr, "eval %d: nll %.8f\n", evals, obj.value);
    return obj.value;
  };

  std::vector<double> x = m.theta;
  TrainReport rep;
  rep.opt = lbfgs_minimize(f, x, opts);
  m.theta = std::move(x);
  rep.value = rep.opt.value;
  if (cfg.verbose)
    std::fprintf(stderr, "done: %d iterations, %d evals, nll %.8f, %s\n",
                 rep.opt.iterations, evals, rep.value,
                 rep.opt.converged ? "converged" : "iteration limit");
  return rep;
}

Model train(std::vector<Sentence> corpus, const TrainSetup& setup,
            const TrainConfig& cfg, TrainReport* report) {
  corpus = split_long_segments(std::move(corpus), setup.max_len);
  Model m = build_model(corpus, setup);
  TrainReport rep = optimize(m, corpus, cfg);
  if (report) *report = rep;
  return m;
}

}  // namespace smcrf
