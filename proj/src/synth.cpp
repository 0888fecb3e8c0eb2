#include "smcrf/synth.hpp"

#include <stdexcept>
#include <string>

#include "smcrf/errors.hpp"

namespace smcrf {

int Rng::weighted(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double x = uniform_real() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (x < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

namespace {

struct Word {
  const char* surface;
  const char* pos;
};

// Disjoint role vocabularies keep the corpus linearly separable on word
// identity: keywords/adjectives appear only inside phrases, fillers and
// trap nouns only outside.
const Word kKeywords[] = {
    {"quantizer", "NN"}, {"entropy", "NN"},   {"lattice", "NN"},
    {"kernels", "NNS"},  {"gradient", "NN"},  {"manifold", "NN"},
    {"tensors", "NNS"},  {"spectrum", "NN"},  {"operator", "NN"},
    {"embedding", "NN"}, {"cascades", "NNS"}, {"monoid", "NN"},
};
const Word kAdjectives[] = {
    {"sparse", "JJ"},     {"convex", "JJ"},  {"stochastic", "JJ"},
    {"adaptive", "JJ"},   {"robust", "JJ"},  {"spectral", "JJ"},
    {"modular", "JJ"},    {"greedy", "JJ"},
};
const Word kFillers[] = {
    {"the", "DT"},  {"of", "IN"},    {"is", "VBZ"}, {"very", "RB"},
    {"and", "CC"},  {"to", "TO"},    {"in", "IN"},  {"often", "RB"},
    {"a", "DT"},    {"with", "IN"},
};
const Word kTraps[] = {
    {"table", "NN"}, {"door", "NN"}, {"window", "NN"},
    {"car", "NN"},   {"house", "NN"}, {"tree", "NN"},
};

template <std::size_t N>
const Word& pick(Rng& rng, const Word (&words)[N]) {
  return words[rng.uniform_int(0, static_cast<int>(N) - 1)];
}

void push_token(Sentence& s, const Word& w, bool in_title) {
  s.tokens.push_back({w.surface, w.pos, "", in_title});
}

// Run of fillers, optionally with one trap noun strictly inside it.
void push_gap(Sentence& s, Rng& rng, const SynthConfig& cfg, int default_label) {
  int len = rng.uniform_int(cfg.min_gap, cfg.max_gap);
  int trap_at = -1;
  if (len >= 3 && rng.bernoulli(cfg.trap_rate)) trap_at = rng.uniform_int(1, len - 2);
  int begin = s.size();
  for (int i = 0; i < len; ++i) {
    bool stray = rng.bernoulli(cfg.title_noise);
    if (i == trap_at)
      push_token(s, pick(rng, kTraps), stray);
    else
      push_token(s, pick(rng, kFillers), stray);
  }
  s.segments.push_back({begin, s.size() - 1, default_label});
}

void push_phrase(Sentence& s, Rng& rng, const SynthConfig& cfg, int label,
                 const std::vector<int>& lengths,
                 const std::vector<double>& weights) {
  int len = lengths[rng.weighted(weights)];
  bool in_title = rng.bernoulli(cfg.title_rate);
  int begin = s.size();
  for (int i = 0; i < len - 1; ++i) push_token(s, pick(rng, kAdjectives), in_title);
  push_token(s, pick(rng, kKeywords), in_title);
  s.segments.push_back({begin, s.size() - 1, label});
}

}  // namespace

std::vector<Sentence> generate_synthetic(const SynthConfig& cfg,
                                         const LabelSet& labels) {
  if (cfg.sentences < 0) throw std::invalid_argument("sentence count negative");
  if (cfg.min_gap < 1 || cfg.max_gap < cfg.min_gap ||
      cfg.min_phrases < 1 || cfg.max_phrases < cfg.min_phrases)
    throw std::invalid_argument("bad gap or phrase bounds");

  int kp = -1;
  for (int y = 0; y < labels.size(); ++y)
    if (labels.is_durational(y)) { kp = y; break; }
  if (kp < 0) throw DataError("label set has no durational label");

  std::vector<int> lengths;
  std::vector<double> weights;
  for (const auto& [len, w] : cfg.length_weights) {
    if (len < 1 || w < 0.0) throw std::invalid_argument("bad length weight");
    lengths.push_back(len);
    weights.push_back(w);
  }
  if (lengths.empty()) throw std::invalid_argument("empty length distribution");

  Rng rng(cfg.seed);
  std::vector<Sentence> corpus;
  corpus.reserve(cfg.sentences);
  for (int q = 0; q < cfg.sentences; ++q) {
    Sentence s;
    int phrases = rng.uniform_int(cfg.min_phrases, cfg.max_phrases);
    for (int p = 0; p < phrases; ++p) {
      push_gap(s, rng, cfg, labels.default_label);
      push_phrase(s, rng, cfg, kp, lengths, weights);
    }
    push_gap(s, rng, cfg, labels.default_label);
    corpus.push_back(std::move(s));
  }
  return corpus;
}

}  // namespace smcrf
