#include "smcrf/features.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "smcrf/errors.hpp"

namespace smcrf {

FeatureKind FeatureKind::observation(int label, std::string key) {
  FeatureKind k;
  k.type = FeatureType::Observation;
  k.label = label;
  k.key = std::move(key);
  return k;
}

FeatureKind FeatureKind::transition(int prev_label, int label) {
  FeatureKind k;
  k.type = FeatureType::Transition;
  k.prev_label = prev_label;
  k.label = label;
  return k;
}

FeatureKind FeatureKind::duration(int label, int length) {
  FeatureKind k;
  k.type = FeatureType::Duration;
  k.label = label;
  k.length = length;
  return k;
}

std::string FeatureKind::encode() const {
  switch (type) {
    case FeatureType::Observation:
      return "O\t" + std::to_string(label) + '\t' + key;
    case FeatureType::Transition:
      return "T\t" + std::to_string(prev_label) + '\t' + std::to_string(label);
    case FeatureType::Duration:
      return "D\t" + std::to_string(label) + '\t' + std::to_string(length);
  }
  return {};
}

bool FeatureKind::operator==(const FeatureKind& o) const {
  return type == o.type && label == o.label && prev_label == o.prev_label &&
         length == o.length && key == o.key;
}

int FeatureIndex::add(const FeatureKind& k) {
  std::string enc = k.encode();
  auto it = by_key_.find(enc);
  if (it != by_key_.end()) return it->second;
  if (frozen_) return -1;
  int id = static_cast<int>(kinds_.size());
  by_key_.emplace(std::move(enc), id);
  kinds_.push_back(k);
  return id;
}

int FeatureIndex::lookup(const FeatureKind& k) const {
  auto it = by_key_.find(k.encode());
  return it == by_key_.end() ? -1 : it->second;
}

void SparseVector::finalize() {
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (out > 0 && items[out - 1].first == items[i].first)
      items[out - 1].second += items[i].second;
    else
      items[out++] = items[i];
  }
  items.resize(out);
}

double SparseVector::dot(const std::vector<double>& w) const {
  double s = 0;
  for (const auto& [id, v] : items) s += w[id] * v;
  return s;
}

namespace {

constexpr const char* kTemplateNames[] = {"isNounPhrase", "isInTitle", "len",
                                          "word", "span-word"};

bool* template_slot(TemplateConfig& t, const std::string& name) {
  if (name == kTemplateNames[0]) return &t.noun_phrase;
  if (name == kTemplateNames[1]) return &t.in_title;
  if (name == kTemplateNames[2]) return &t.length;
  if (name == kTemplateNames[3]) return &t.word;
  if (name == kTemplateNames[4]) return &t.span_word;
  return nullptr;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

TemplateConfig TemplateConfig::parse(std::istream& in) {
  TemplateConfig t;
  t.noun_phrase = t.in_title = t.length = t.word = t.span_word = false;
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    std::string name = trim(line);
    if (name.empty() || name[0] == '#') continue;
    bool* slot = template_slot(t, name);
    if (!slot) throw DataError("unknown feature template: " + name);
    *slot = true;
    any = true;
  }
  if (!any) throw DataError("template configuration enables no templates");
  return t;
}

TemplateConfig TemplateConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open template file: " + path);
  return parse(in);
}

TemplateConfig TemplateConfig::from_names(const std::string& comma_separated) {
  std::string lines = comma_separated;
  std::replace(lines.begin(), lines.end(), ',', '\n');
  std::istringstream in(lines);
  return parse(in);
}

std::string TemplateConfig::names() const {
  const bool on[] = {noun_phrase, in_title, length, word, span_word};
  std::string out;
  for (int i = 0; i < 5; ++i) {
    if (!on[i]) continue;
    if (!out.empty()) out += ',';
    out += kTemplateNames[i];
  }
  return out;
}

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

void push_unique(std::vector<std::string>& keys, std::string key) {
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    keys.push_back(std::move(key));
}

}  // namespace

std::vector<std::string> observation_keys(const Sentence& s, int begin, int end,
                                          const TemplateConfig& templates,
                                          const NounGroupConfig& noun_groups) {
  if (begin < 0 || end >= s.size() || begin > end)
    throw std::invalid_argument("observation_keys: span out of range");
  std::vector<std::string> keys;
  if (templates.noun_phrase) {
    int sum = 0;
    for (int i = begin; i <= end; ++i) {
      const Token& t = s.tokens[i];
      bool nouny = t.phrase.empty()
                       ? std::find(noun_groups.allowed.begin(), noun_groups.allowed.end(),
                                   t.pos) != noun_groups.allowed.end()
                       : t.phrase == "NP";
      if (nouny) ++sum;
    }
    keys.push_back("isNounPhrase=" + std::to_string(sum));
  }
  if (templates.in_title) {
    int count = 0;
    for (int i = begin; i <= end; ++i)
      if (s.tokens[i].in_title) ++count;
    int v = (count >= 1 && is_noun_group(s, begin, end, noun_groups))
                ? end - begin + 1
                : count;
    keys.push_back("isInTitle=" + std::to_string(v));
  }
  if (templates.length)
    keys.push_back("len=" + std::to_string(end - begin + 1));
  if (templates.word)
    for (int i = begin; i <= end; ++i)
      push_unique(keys, "word=" + lower(s.tokens[i].surface));
  if (templates.span_word) {
    std::string joined;
    for (int i = begin; i <= end; ++i) {
      if (i > begin) joined += '_';
      joined += lower(s.tokens[i].surface);
    }
    push_unique(keys, "span-word=" + joined);
  }
  return keys;
}

double Model::duration_value(int label, int d) const {
  if (d < 1 || d > max_len)
    throw std::invalid_argument("duration_value: length out of range");
  if (!dur_cache_.empty())
    return dur_cache_[static_cast<std::size_t>(label) * max_len + (d - 1)];
  if (!labels.durational[label]) return 1.0;
  return duration_feature(durations[label], d);
}

void Model::refresh_duration_cache() {
  dur_cache_.assign(static_cast<std::size_t>(labels.size()) * max_len, 1.0);
  for (int y = 0; y < labels.size(); ++y) {
    if (!labels.durational[y]) continue;
    for (int d = 1; d <= max_len; ++d)
      dur_cache_[static_cast<std::size_t>(y) * max_len + (d - 1)] =
          duration_feature(durations[y], d);
  }
}

void Model::register_structural_features() {
  if (index.frozen()) throw std::invalid_argument("feature index already frozen");
  for (int prev = -1; prev < labels.size(); ++prev) {
    int p = prev < 0 ? start_label() : prev;
    for (int y = 0; y < labels.size(); ++y)
      index.add(FeatureKind::transition(p, y));
  }
  for (int y = 0; y < labels.size(); ++y)
    for (int d = 1; d <= max_len; ++d)
      index.add(FeatureKind::duration(y, d));
}

void Model::validate() const {
  labels.validate();
  if (max_len < 1) throw DataError("model: max segment length must be >= 1");
  if (durations.size() != static_cast<std::size_t>(labels.size()))
    throw DataError("model: one duration model per label required");
  for (int y = 0; y < labels.size(); ++y)
    if (!labels.durational[y] && durations[y].family != DurationFamily::None)
      throw DataError("model: non-durational label " + labels.names[y] +
                      " carries a duration family");
  if (!theta.empty() && theta.size() != static_cast<std::size_t>(index.size()))
    throw DataError("model: weight vector size does not match feature index");
}

namespace {

SparseVector extract_impl(const Model& m, const Sentence& s, const Segment& seg,
                          int prev_label, FeatureIndex* growing) {
  int d = seg.length();
  if (seg.begin < 0 || seg.end >= s.size() || d < 1 || d > m.max_len)
    throw std::invalid_argument("extract: segment span out of range");
  if (seg.label < 0 || seg.label >= m.labels.size())
    throw std::invalid_argument("extract: segment label out of range");
  if (prev_label < 0 || prev_label > m.start_label())
    throw std::invalid_argument("extract: previous label out of range");

  const FeatureIndex& idx = growing ? *growing : m.index;
  SparseVector vec;
  auto resolve = [&](const FeatureKind& k) {
    return growing ? growing->add(k) : idx.lookup(k);
  };
  for (std::string& key :
       observation_keys(s, seg.begin, seg.end, m.templates, m.noun_groups)) {
    int id = resolve(FeatureKind::observation(seg.label, std::move(key)));
    if (id >= 0) vec.add(id, 1.0);
  }
  {
    int id = resolve(FeatureKind::transition(prev_label, seg.label));
    if (id >= 0) vec.add(id, 1.0);
  }
  {
    int id = resolve(FeatureKind::duration(seg.label, d));
    if (id >= 0) vec.add(id, m.duration_value(seg.label, d));
  }
  vec.finalize();
  return vec;
}

}  // namespace

SparseVector extract(const Model& m, const Sentence& s, const Segment& seg,
                     int prev_label) {
  return extract_impl(m, s, seg, prev_label, nullptr);
}

SparseVector extract_growing(Model& m, const Sentence& s, const Segment& seg,
                             int prev_label) {
  return extract_impl(m, s, seg, prev_label, &m.index);
}

}  // namespace smcrf
