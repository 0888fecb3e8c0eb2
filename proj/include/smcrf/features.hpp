#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smcrf/corpus.hpp"
#include "smcrf/duration.hpp"

namespace smcrf {

enum class FeatureType : unsigned char { Observation, Transition, Duration };

struct FeatureKind {
  FeatureType type = FeatureType::Observation;
  int label = 0;        // current segment label
  int prev_label = -1;  // Transition only; labels.start() marks START
  int length = 0;       // Duration only
  std::string key;      // Observation only

  static FeatureKind observation(int label, std::string key);
  static FeatureKind transition(int prev_label, int label);
  static FeatureKind duration(int label, int length);

  std::string encode() const;  // unique textual form, also the hash key
  bool operator==(const FeatureKind& o) const;
};

// Bijective kind <-> dense id map. Growing until freeze(); afterwards
// lookups never mutate and unseen kinds resolve to -1.
class FeatureIndex {
 public:
  int add(const FeatureKind& k);
  int lookup(const FeatureKind& k) const;
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  int size() const { return static_cast<int>(kinds_.size()); }
  const FeatureKind& kind(int id) const { return kinds_[id]; }

 private:
  std::unordered_map<std::string, int> by_key_;
  std::vector<FeatureKind> kinds_;
  bool frozen_ = false;
};

// Sorted sparse vector with strictly increasing indices.
struct SparseVector {
  std::vector<std::pair<int, double>> items;

  void add(int id, double value) { items.emplace_back(id, value); }
  void finalize();  // sort by index, merge duplicates by summing
  double dot(const std::vector<double>& w) const;
};

struct TemplateConfig {
  bool noun_phrase = true;
  bool in_title = true;
  bool length = true;
  bool word = true;
  bool span_word = true;

  // One template name per line (isNounPhrase, isInTitle, len, word,
  // span-word); '#' comments and blank lines ignored. Unknown names raise
  // DataError. The resulting config enables exactly the listed templates.
  static TemplateConfig parse(std::istream& in);
  static TemplateConfig load(const std::string& path);
  static TemplateConfig from_names(const std::string& comma_separated);
  std::string names() const;  // enabled template names, comma-joined
};

// Span descriptor keys in emission order: isNounPhrase=<sum>, isInTitle=<v>,
// len=<d>, word=<lower> per token, span-word=<lower tokens joined by _>.
// isInTitle promotion: a span matching the noun-group pattern with at least
// one in-title token gets v = span length; otherwise v = in-title count.
std::vector<std::string> observation_keys(const Sentence& s, int begin, int end,
                                          const TemplateConfig& templates,
                                          const NounGroupConfig& noun_groups);

struct Model {
  LabelSet labels;
  int max_len = 2;
  TemplateConfig templates;
  NounGroupConfig noun_groups;
  std::vector<DurationModel> durations;  // one per label; None if non-durational
  FeatureIndex index;
  std::vector<double> theta;

  int start_label() const { return labels.start(); }

  // D(label, d) with the family of the label's duration model; 1.0 for
  // non-durational labels. Cached per (label, d <= max_len).
  double duration_value(int label, int d) const;
  void refresh_duration_cache();

  // Registers the complete Transition block (START and every label pair)
  // and Duration block (every label, d <= max_len) ahead of the gold pass.
  void register_structural_features();

  void validate() const;

 private:
  std::vector<double> dur_cache_;
};

// Features of one labeled segment given the previous label: one Observation
// entry per active key (value 1.0), exactly one Transition entry (value 1.0)
// and exactly one Duration entry (value D(label, d)). In the frozen variant,
// kinds missing from the index are dropped.
SparseVector extract(const Model& m, const Sentence& s, const Segment& seg,
                     int prev_label);
SparseVector extract_growing(Model& m, const Sentence& s, const Segment& seg,
                             int prev_label);

}  // namespace smcrf
