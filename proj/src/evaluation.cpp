#include "smcrf/evaluation.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <utility>

#include "smcrf/errors.hpp"

namespace smcrf {

namespace {

void tally(long long both, long long gold_only, long long pred_only, EvalReport& r) {
  r.tp += both;
  r.fn += gold_only;
  r.fp += pred_only;
}

// Durational segments as a sorted set of (begin, end, label).
std::set<std::array<int, 3>> span_set(const std::vector<Segment>& segs,
                                      const LabelSet& labels) {
  std::set<std::array<int, 3>> out;
  for (const Segment& g : segs)
    if (labels.is_durational(g.label)) out.insert({g.begin, g.end, g.label});
  return out;
}

std::set<std::pair<int, std::string>> string_set(const Sentence& s,
                                                 const std::vector<Segment>& segs,
                                                 const LabelSet& labels) {
  std::set<std::pair<int, std::string>> out;
  for (const Segment& g : segs)
    if (labels.is_durational(g.label))
      out.insert({g.label, span_surface(s, g.begin, g.end, true)});
  return out;
}

template <class Set>
void tally_sets(const Set& gold, const Set& pred, EvalReport& r) {
  long long both = 0;
  for (const auto& x : pred)
    if (gold.count(x)) ++both;
  tally(both, static_cast<long long>(gold.size()) - both,
        static_cast<long long>(pred.size()) - both, r);
}

void finish(EvalReport& r) {
  r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
}

EvalReport evaluate_impl(const std::vector<Sentence>& gold,
                         const std::vector<const std::vector<Segment>*>& predicted,
                         const LabelSet& labels, MatchMode mode) {
  if (gold.size() != predicted.size())
    throw DataError("gold and predicted corpora have different sentence counts");
  EvalReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (mode == MatchMode::Span) {
      tally_sets(span_set(gold[i].segments, labels),
                 span_set(*predicted[i], labels), r);
    } else {
      tally_sets(string_set(gold[i], gold[i].segments, labels),
                 string_set(gold[i], *predicted[i], labels), r);
    }
  }
  finish(r);
  return r;
}

}  // namespace

MatchMode match_mode_from_name(const std::string& name) {
  if (name == "span") return MatchMode::Span;
  if (name == "string") return MatchMode::String;
  throw DataError("unknown match mode: " + name);
}

EvalReport evaluate(const std::vector<Sentence>& gold,
                    const std::vector<DecodePath>& predicted,
                    const LabelSet& labels, MatchMode mode) {
  std::vector<const std::vector<Segment>*> segs;
  segs.reserve(predicted.size());
  for (const DecodePath& p : predicted) segs.push_back(&p.segments);
  return evaluate_impl(gold, segs, labels, mode);
}

EvalReport evaluate(const std::vector<Sentence>& gold,
                    const std::vector<Sentence>& predicted,
                    const LabelSet& labels, MatchMode mode) {
  std::vector<const std::vector<Segment>*> segs;
  segs.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (i < gold.size() && predicted[i].size() != gold[i].size())
      throw DataError("gold and predicted sentences have different token counts");
    segs.push_back(&predicted[i].segments);
  }
  return evaluate_impl(gold, segs, labels, mode);
}

}  // namespace smcrf
