#pragma once

#include <vector>

#include "smcrf/corpus.hpp"
#include "smcrf/decoding.hpp"

namespace smcrf {

// Span: exact (begin, end, label) match of durational segments, micro-averaged.
// String: per-sentence deduplicated sets of (label, lowercased surface).
enum class MatchMode { Span, String };

MatchMode match_mode_from_name(const std::string& name);  // DataError on unknown

struct EvalReport {
  long long tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

EvalReport evaluate(const std::vector<Sentence>& gold,
                    const std::vector<DecodePath>& predicted,
                    const LabelSet& labels, MatchMode mode = MatchMode::Span);

// Predicted corpus read back from a tagged file; token counts must agree.
EvalReport evaluate(const std::vector<Sentence>& gold,
                    const std::vector<Sentence>& predicted,
                    const LabelSet& labels, MatchMode mode = MatchMode::Span);

}  // namespace smcrf
