#pragma once

#include <vector>

#include "smcrf/features.hpp"
#include "smcrf/inference.hpp"
#include "smcrf/lbfgs.hpp"

namespace smcrf {

// Feature vector of the gold segmentation (segments chained from START).
SparseVector gold_features(const Model& m, const Sentence& s);

struct Objective {
  double value = 0.0;
  std::vector<double> grad;
};

// Regularized negative log-likelihood at m.theta:
//   sum_s [ log Z(s) - theta . F(s, gold) ] + |theta|^2 / (2 sigma2)
// sigma2 = +infinity drops the regularizer. Sentences are folded in blocks
// of 16 and block totals reduced in index order, so the result is identical
// for every thread count. threads = 0 keeps the OpenMP default.
Objective corpus_nll(const Model& m, const std::vector<Sentence>& corpus,
                     double sigma2, int threads = 0);

// Plain single loop over sentences; reference for the blocked kernel.
Objective corpus_nll_serial(const Model& m, const std::vector<Sentence>& corpus,
                            double sigma2);

struct TrainConfig {
  double sigma2 = 10.0;
  int max_iter = 200;
  double tol = 1e-5;
  int lbfgs_memory = 10;
  int threads = 0;  // 0 = OpenMP default
  bool verbose = false;
};

struct TrainSetup {
  LabelSet labels = LabelSet::keyphrase();
  int max_len = 4;
  TemplateConfig templates;
  NounGroupConfig noun_groups;
  // Family fitted for durational labels; non-durational labels stay None.
  DurationFamily family = DurationFamily::GammaLike;
  // When sized (one per label), used as-is instead of fitting.
  std::vector<DurationModel> preset_durations;
};

// Model skeleton from a corpus whose gold segments already fit max_len:
// duration models (fit or preset), the full structural feature block, then
// observation features of every gold segment; the index is frozen and theta
// zeroed.
Model build_model(const std::vector<Sentence>& corpus, const TrainSetup& setup);

struct TrainReport {
  LbfgsResult opt;
  double value = 0.0;  // final regularized NLL
};

// L-BFGS minimization of corpus_nll starting from the current m.theta.
TrainReport optimize(Model& m, const std::vector<Sentence>& corpus,
                     const TrainConfig& cfg);

// split_long_segments + build_model + optimize.
Model train(std::vector<Sentence> corpus, const TrainSetup& setup,
            const TrainConfig& cfg, TrainReport* report = nullptr);

}  // namespace smcrf
