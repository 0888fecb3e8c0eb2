// Compares the OpenMP objective/decoding kernels against the serial
// reference implementations on a generated corpus: wall time, speedup and
// result agreement.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smcrf/decoding.hpp"
#include "smcrf/synth.hpp"
#include "smcrf/training.hpp"

using namespace smcrf;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max(1.0, std::fabs(b));
}

}  // namespace

int main(int argc, char** argv) {
  int sentences = 400;
  int reps = 3;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    if (flag == "--sentences")
      sentences = std::atoi(argv[i + 1]);
    else if (flag == "--reps")
      reps = std::atoi(argv[i + 1]);
  }

#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
#else
  const int max_threads = 1;
  std::fprintf(stderr, "note: built without OpenMP; parallel rows use 1 thread\n");
#endif

  SynthConfig cfg;
  cfg.sentences = sentences;
  cfg.seed = 7;
  LabelSet labels = LabelSet::keyphrase();
  auto corpus = split_long_segments(generate_synthetic(cfg, labels), 3);

  TrainSetup setup;
  setup.max_len = 3;
  Model m = build_model(corpus, setup);
  Rng rng(123);
  for (double& w : m.theta) w = rng.uniform_real(-0.5, 0.5);

  std::printf("kernel\tthreads\treps\tbest_seconds\tspeedup\tmax_rel_diff_vs_serial\n");

  Objective ref;
  double t_serial = best_of(reps, [&] { ref = corpus_nll_serial(m, corpus, 10.0); });
  std::printf("corpus_nll\tserial\t%d\t%.6f\t%.3f\t%.3g\n", reps, t_serial, 1.0, 0.0);

  for (int nt : {1, max_threads}) {
    Objective obj;
    double t = best_of(reps, [&] { obj = corpus_nll(m, corpus, 10.0, nt); });
    double diff = rel_diff(obj.value, ref.value);
    for (std::size_t k = 0; k < ref.grad.size(); ++k)
      diff = std::max(diff, rel_diff(obj.grad[k], ref.grad[k]));
    std::printf("corpus_nll\t%d\t%d\t%.6f\t%.3f\t%.3g\n", nt, reps, t,
                t_serial / std::max(t, 1e-12), diff);
    if (nt == max_threads) break;  // avoid a duplicate row when max is 1
  }

  TagResult ref_tag;
  double t_tag1 =
      best_of(reps, [&] { ref_tag = tag_corpus(m, corpus, Decoder::Constrained, {}, 1); });
  std::printf("tag\t1\t%d\t%.6f\t%.3f\t%.3g\n", reps, t_tag1, 1.0, 0.0);

  if (max_threads > 1) {
    TagResult tr;
    double t = best_of(
        reps, [&] { tr = tag_corpus(m, corpus, Decoder::Constrained, {}, max_threads); });
    long long disagree = 0;
    for (std::size_t i = 0; i < tr.paths.size(); ++i)
      if (tr.paths[i].segments != ref_tag.paths[i].segments) ++disagree;
    std::printf("tag\t%d\t%d\t%.6f\t%.3f\t%lld\n", max_threads, reps, t,
                t_tag1 / std::max(t, 1e-12), disagree);
  }
  return 0;
}
