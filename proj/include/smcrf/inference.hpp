#pragma once

#include <vector>

#include "smcrf/features.hpp"

namespace smcrf {

// Log-domain forward/backward tables over segment boundaries 0..n.
// alpha(i, y): log-sum of scores of all partial segmentations of tokens
// [0, i) whose last segment ends at boundary i with label y; the boundary-0
// predecessor is the distinguished START label with alpha = 0.
// beta(i, y): log-sum of scores of all completions of tokens [i, n) given
// the previous segment ended at boundary i with label y; beta(n, y) = 0.
struct Lattice {
  int n = 0;
  int num_labels = 0;
  double log_z = 0;
  std::vector<double> alpha;  // (n+1) * num_labels
  std::vector<double> beta;

  double a(int i, int y) const { return alpha[static_cast<std::size_t>(i) * num_labels + y]; }
  double b(int i, int y) const { return beta[static_cast<std::size_t>(i) * num_labels + y]; }
};

// Per-sentence cache of segment scores, split the way every consumer sums
// them: the observation+duration part keyed by (end boundary, length, label)
// and the transition weight keyed by (previous label, label).
class SegmentScores {
 public:
  enum class Keep { ScoresOnly, Vectors };

  SegmentScores(const Model& m, const Sentence& s, Keep keep = Keep::ScoresOnly);

  int n() const { return n_; }
  int max_d(int i) const { return i < L_ ? i : L_; }  // segment lengths at boundary i
  int num_labels() const { return m_; }

  // i = end boundary in 1..n, d = segment length, y = label id.
  double obs_dur(int i, int d, int y) const { return scores_[pos(i, d, y)]; }
  const SparseVector& obs_dur_vec(int i, int d, int y) const { return vecs_[pos(i, d, y)]; }

  // prev may be labels.start(); missing transition features score 0.
  double trans(int prev, int y) const { return trans_[prev * m_ + y]; }
  int trans_id(int prev, int y) const { return trans_id_[prev * m_ + y]; }

  double log_phi(int i, int d, int y, int prev) const {
    return obs_dur(i, d, y) + trans(prev, y);
  }

 private:
  std::size_t pos(int i, int d, int y) const {
    return (static_cast<std::size_t>(i - 1) * L_ + (d - 1)) * m_ + y;
  }
  int n_, L_, m_;
  std::vector<double> scores_;
  std::vector<SparseVector> vecs_;
  std::vector<double> trans_;
  std::vector<int> trans_id_;
};

double log_sum_exp(const double* v, int n);

// theta . extract(...), computed as obs+duration part plus transition weight
// (the same summation order the lattice and the decoders use).
double segment_score(const Model& m, const Sentence& s, const Segment& seg,
                     int prev_label);

Lattice forward(const Model& m, const Sentence& s, const SegmentScores& sc);
void backward(const Model& m, const Sentence& s, const SegmentScores& sc, Lattice& lat);
Lattice forward_backward(const Model& m, const Sentence& s, const SegmentScores& sc);
Lattice forward_backward(const Model& m, const Sentence& s);

// log Z recomputed from the beta side; equals lat.log_z up to rounding.
double log_z_from_beta(const SegmentScores& sc, const Lattice& lat);

// P(segment, previous label | sentence) per the alpha/phi/beta identity.
double segment_marginal(const Model& m, const Sentence& s, const Lattice& lat,
                        const Segment& seg, int prev_label);

// E_P[F(x, S)] as a dense vector over the feature index.
std::vector<double> expected_features(const Model& m, const Sentence& s);
void add_expected_features(const Model& m, const SegmentScores& sc, const Lattice& lat,
                           double scale, double* acc);

}  // namespace smcrf
