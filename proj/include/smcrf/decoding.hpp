#pragma once

#include <utility>
#include <vector>

#include "smcrf/features.hpp"

namespace smcrf {

struct DecodeStats {
  long long transitions_evaluated = 0;
  long long segments_pruned_by_np = 0;
  long long segments_pruned_by_monotonicity = 0;
  double wall_seconds = 0.0;
  bool pruning_disabled = false;  // concavity check failed, cut not applied
};

struct DecodePath {
  std::vector<Segment> segments;  // contiguous cover, lengths <= max_len
  double score = 0.0;             // sum of segment_score along the path
};

struct DecodeOptions {
  bool np_constraint = true;    // durational labels only on noun-group spans
  bool monotone_pruning = true; // skip predecessor boundaries behind the
                                // recorded optimum of the previous position
  bool warn_on_disable = true;  // stderr note when concavity fails
};

// Exact maximum-score segmentation. Ties prefer the shorter segment, then
// the lower label index (and the lower previous-label index within a
// position). Stats, when non-null, count one transition per examined
// (previous label, label) pair.
DecodePath viterbi(const Model& m, const Sentence& s, DecodeStats* stats = nullptr);

// np_spans: inclusive token spans (as from noun_group_spans) that segments
// with durational labels are restricted to. Monotone pruning is applied only
// when every durational label's duration feature is concave over [1, L];
// otherwise it is disabled for the call and flagged in the stats.
DecodePath constrained_viterbi(const Model& m, const Sentence& s,
                               const std::vector<std::pair<int, int>>& np_spans,
                               const DecodeOptions& opts,
                               DecodeStats* stats = nullptr);

struct MonotonicityReport {
  double max_disparity = 0.0;  // largest pairwise gap among Duration weights
                               // of one durational label
  bool concave = true;         // duration feature concave for all durational
                               // labels over [1, max_len]
  bool unsafe = false;         // max_disparity > threshold
  double threshold = 1.0;
};

MonotonicityReport check_monotonicity_assumption(const Model& m,
                                                 double threshold = 1.0);

// Non-increasing first differences of D(label, d) over d in [1, max_len].
bool duration_concave(const Model& m, int label);

// tau(i) = i - d*(i, label): start boundary of the best segment ending at
// boundary i with the given label under plain Viterbi, for i in 1..n
// (entry 0 unused). -1 where no candidate exists.
std::vector<int> recorded_boundaries(const Model& m, const Sentence& s, int label);

enum class Decoder { Viterbi, Constrained };

struct TagResult {
  std::vector<DecodePath> paths;
  DecodeStats stats;  // counters summed over sentences; wall_seconds is the
                      // whole pass
};

// Decodes every sentence; OpenMP across sentences with deterministic output
// order. threads = 0 keeps the OpenMP default. Noun-group spans are computed
// per sentence when the constrained decoder asks for them.
TagResult tag_corpus(const Model& m, const std::vector<Sentence>& corpus,
                     Decoder decoder, const DecodeOptions& opts = {},
                     int threads = 0);

}  // namespace smcrf
