#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "smcrf/corpus.hpp"

namespace smcrf {

// Thin wrapper over mt19937_64 with fixed sampling algorithms, so streams
// are identical across standard libraries (the std distributions are not).
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  std::uint64_t next() { return eng(); }
  // uniform over [lo, hi] inclusive
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  // uniform over [0, 1)
  double uniform_real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }
  bool bernoulli(double p) { return uniform_real() < p; }
  // index into weights proportional to weight
  int weighted(const std::vector<double>& weights);
};

struct SynthConfig {
  int sentences = 60;
  std::uint64_t seed = 1;
  // keyphrase length distribution: (length, weight)
  std::vector<std::pair<int, double>> length_weights = {{1, 0.3}, {2, 0.7}};
  int min_phrases = 1, max_phrases = 2;  // keyphrases per sentence
  int min_gap = 2, max_gap = 5;          // filler run length around phrases
  double title_rate = 0.7;   // whole phrase marked in-title
  double title_noise = 0.05; // stray in-title mark on a filler token
  double trap_rate = 0.5;    // plain noun dropped mid-gap (gap length >= 3)
};

// Separable keyphrase corpus: keyword and adjective vocabulary occurs only
// inside gold phrases, fillers and trap nouns only outside, phrases are
// noun groups (adjective* noun) and never sentence-initial or adjacent.
std::vector<Sentence> generate_synthetic(const SynthConfig& cfg,
                                         const LabelSet& labels);

}  // namespace smcrf
