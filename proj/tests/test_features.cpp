#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "smcrf/errors.hpp"
#include "smcrf/features.hpp"
#include "support/checks.hpp"

using namespace smcrf;

namespace {

Sentence oracle_sentence() {
  Sentence s;
  s.tokens = {{"big", "JJ", "", true},
              {"data", "NN", "", true},
              {"of", "IN", "", false},
              {"analytics", "NN", "", false}};
  s.segments = {{0, 1, 1}, {2, 3, 0}};
  return s;
}

Model tiny_model(int max_len = 2) {
  Model m;
  m.labels = LabelSet::keyphrase();
  m.max_len = max_len;
  m.durations = {DurationModel{DurationFamily::None, 0, 0, 0},
                 DurationModel{DurationFamily::GammaLike, 1.2, 0.8, 0}};
  m.refresh_duration_cache();
  return m;
}

}  // namespace

TEST_CASE("feature kinds encode uniquely") {
  auto o = FeatureKind::observation(1, "word=data");
  auto t = FeatureKind::transition(2, 1);
  auto d = FeatureKind::duration(1, 2);
  CHECK(o.encode() != t.encode());
  CHECK(t.encode() != d.encode());
  CHECK(o == FeatureKind::observation(1, "word=data"));
  CHECK_FALSE(o == FeatureKind::observation(0, "word=data"));
  CHECK_FALSE(FeatureKind::duration(1, 2) == FeatureKind::duration(1, 3));
  CHECK_FALSE(FeatureKind::transition(0, 1) == FeatureKind::transition(1, 0));
  // key text must not collide with structural encodings
  CHECK(FeatureKind::observation(1, "2").encode() != FeatureKind::duration(1, 2).encode());
}

TEST_CASE("feature index grows then freezes") {
  FeatureIndex idx;
  int a = idx.add(FeatureKind::observation(0, "word=x"));
  int b = idx.add(FeatureKind::transition(2, 1));
  CHECK(a == 0);
  CHECK(b == 1);
  CHECK(idx.add(FeatureKind::observation(0, "word=x")) == a);  // idempotent
  CHECK(idx.size() == 2);
  CHECK(idx.lookup(FeatureKind::transition(2, 1)) == b);
  CHECK(idx.lookup(FeatureKind::duration(1, 1)) == -1);
  CHECK(idx.kind(a) == FeatureKind::observation(0, "word=x"));

  idx.freeze();
  CHECK(idx.frozen());
  CHECK(idx.add(FeatureKind::observation(0, "word=x")) == a);  // known kinds still resolve
  CHECK(idx.add(FeatureKind::observation(0, "word=new")) == -1);
  CHECK(idx.size() == 2);
}

TEST_CASE("sparse vector finalize sorts and merges") {
  SparseVector v;
  v.add(5, 1.0);
  v.add(2, 0.5);
  v.add(5, 2.0);
  v.add(0, -1.0);
  v.finalize();
  REQUIRE(v.items.size() == 3);
  CHECK(v.items[0] == std::pair{0, -1.0});
  CHECK(v.items[1] == std::pair{2, 0.5});
  CHECK(v.items[2] == std::pair{5, 3.0});

  std::vector<double> w = {2.0, 0.0, 4.0, 0.0, 0.0, 10.0};
  CHECK(v.dot(w) == doctest::Approx(-2.0 + 2.0 + 30.0).epsilon(1e-15));
}

TEST_CASE("template configuration parses and round-trips") {
  TemplateConfig all;
  CHECK(all.names() == "isNounPhrase,isInTitle,len,word,span-word");

  std::istringstream in("# comment\nword\n\nlen\n");
  auto cfg = TemplateConfig::parse(in);
  CHECK(cfg.word);
  CHECK(cfg.length);
  CHECK_FALSE(cfg.noun_phrase);
  CHECK_FALSE(cfg.in_title);
  CHECK_FALSE(cfg.span_word);
  CHECK(cfg.names() == "len,word");

  auto two = TemplateConfig::from_names("isInTitle,span-word");
  CHECK(two.in_title);
  CHECK(two.span_word);
  CHECK_FALSE(two.word);

  CHECK_THROWS_MSG(TemplateConfig::from_names("wordz"), DataError,
                   "unknown feature template");
  CHECK_THROWS_MSG(TemplateConfig::from_names(""), DataError, "no templates");
}

TEST_CASE("observation keys follow the documented emission order") {
  Sentence s = oracle_sentence();
  TemplateConfig t;
  NounGroupConfig ng;

  // noun-group span with in-title tokens: isInTitle promoted to span length
  CHECK(observation_keys(s, 0, 1, t, ng) ==
        std::vector<std::string>{"isNounPhrase=2", "isInTitle=2", "len=2",
                                 "word=big", "word=data", "span-word=big_data"});
  CHECK(observation_keys(s, 2, 2, t, ng) ==
        std::vector<std::string>{"isNounPhrase=0", "isInTitle=0", "len=1",
                                 "word=of", "span-word=of"});
  // "of" is not an allowed POS, "analytics" is: sum = 1, no promotion
  CHECK(observation_keys(s, 2, 3, t, ng) ==
        std::vector<std::string>{"isNounPhrase=1", "isInTitle=0", "len=2",
                                 "word=of", "word=analytics",
                                 "span-word=of_analytics"});
}

TEST_CASE("observation keys: promotion needs both a title hit and the pattern") {
  TemplateConfig t;
  NounGroupConfig ng;
  Sentence s;
  // in-title token inside a non-noun-group span: v stays the raw count
  s.tokens = {{"of", "IN", "", true}, {"x", "NN", "", false}};
  auto keys = observation_keys(s, 0, 1, t, ng);
  CHECK(keys[1] == "isInTitle=1");

  // noun-group span without any title token: no promotion either
  s.tokens = {{"big", "JJ", "", false}, {"data", "NN", "", false}};
  CHECK(observation_keys(s, 0, 1, t, ng)[1] == "isInTitle=0");

  // parser tags qualify the span for promotion even with non-noun POS
  s.tokens = {{"of", "IN", "NP", true}, {"x", "NN", "NP", false}};
  CHECK(observation_keys(s, 0, 1, t, ng)[0] == "isNounPhrase=2");
  CHECK(observation_keys(s, 0, 1, t, ng)[1] == "isInTitle=2");
}

TEST_CASE("observation keys dedupe words and lowercase surfaces") {
  TemplateConfig t;
  NounGroupConfig ng;
  Sentence s;
  s.tokens = {{"Very", "RB", "", false}, {"very", "RB", "", false}};
  auto keys = observation_keys(s, 0, 1, t, ng);
  CHECK(keys == std::vector<std::string>{"isNounPhrase=0", "isInTitle=0", "len=2",
                                         "word=very", "span-word=very_very"});
}

TEST_CASE("disabled templates drop their keys") {
  TemplateConfig t = TemplateConfig::from_names("word");
  NounGroupConfig ng;
  Sentence s = oracle_sentence();
  CHECK(observation_keys(s, 0, 1, t, ng) ==
        std::vector<std::string>{"word=big", "word=data"});
}

TEST_CASE("model duration values are cached per label and length") {
  Model m = tiny_model(3);
  CHECK(m.duration_value(0, 1) == 1.0);  // non-durational
  CHECK(m.duration_value(0, 3) == 1.0);
  CHECK(m.duration_value(1, 1) == doctest::Approx(-1.2).epsilon(1e-15));
  CHECK(m.duration_value(1, 2) ==
        doctest::Approx(-2.4 + 0.8 * std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(m.duration_value(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(m.duration_value(1, 4), std::invalid_argument);
}

TEST_CASE("structural registration order is deterministic") {
  Model m = tiny_model(2);
  m.register_structural_features();
  REQUIRE(m.index.size() == 10);
  int start = m.start_label();
  const FeatureKind expected[] = {
      FeatureKind::transition(start, 0), FeatureKind::transition(start, 1),
      FeatureKind::transition(0, 0),     FeatureKind::transition(0, 1),
      FeatureKind::transition(1, 0),     FeatureKind::transition(1, 1),
      FeatureKind::duration(0, 1),       FeatureKind::duration(0, 2),
      FeatureKind::duration(1, 1),       FeatureKind::duration(1, 2),
  };
  for (int i = 0; i < 10; ++i) CHECK(m.index.kind(i) == expected[i]);

  m.index.freeze();
  CHECK_THROWS_AS(m.register_structural_features(), std::logic_error);
}

TEST_CASE("extract emits observations, one transition and one duration") {
  Model m = tiny_model(2);
  m.register_structural_features();
  Sentence s = oracle_sentence();

  auto v = extract_growing(m, s, {0, 1, 1}, m.start_label());
  // 6 observation keys + 1 transition + 1 duration
  REQUIRE(v.items.size() == 8);
  // strictly increasing ids after finalize
  for (std::size_t i = 1; i < v.items.size(); ++i)
    CHECK(v.items[i - 1].first < v.items[i].first);

  int n_trans = 0, n_dur = 0, n_obs = 0;
  for (auto& [id, val] : v.items) {
    switch (m.index.kind(id).type) {
      case FeatureType::Transition:
        ++n_trans;
        CHECK(val == 1.0);
        CHECK(m.index.kind(id) == FeatureKind::transition(m.start_label(), 1));
        break;
      case FeatureType::Duration:
        ++n_dur;
        CHECK(val == doctest::Approx(m.duration_value(1, 2)).epsilon(1e-15));
        CHECK(m.index.kind(id) == FeatureKind::duration(1, 2));
        break;
      case FeatureType::Observation:
        ++n_obs;
        CHECK(val == 1.0);
        break;
    }
  }
  CHECK(n_trans == 1);
  CHECK(n_dur == 1);
  CHECK(n_obs == 6);
}

TEST_CASE("the duration entry is emitted even when its value is zero") {
  Model m = tiny_model(2);
  m.durations[1] = DurationModel{DurationFamily::GaussianLike, 2.0, 1.0, 0.0};
  m.refresh_duration_cache();
  m.register_structural_features();
  Sentence s = oracle_sentence();
  auto v = extract_growing(m, s, {0, 1, 1}, 0);  // d = 2 = mu, so D = 0
  bool found = false;
  for (auto& [id, val] : v.items)
    if (m.index.kind(id) == FeatureKind::duration(1, 2)) {
      found = true;
      CHECK(val == 0.0);
    }
  CHECK(found);
}

TEST_CASE("frozen extract drops unseen observation kinds") {
  Model m = tiny_model(2);
  m.register_structural_features();
  Sentence s = oracle_sentence();
  extract_growing(m, s, {0, 1, 1}, m.start_label());
  m.index.freeze();
  m.theta.assign(m.index.size(), 0.0);

  Sentence other = s;
  other.tokens[0].surface = "novel";
  auto v = extract(m, other, {0, 1, 1}, m.start_label());
  // word=novel and span-word=novel_data are unseen; the other 4 keys remain
  int n_obs = 0;
  for (auto& [id, val] : v.items)
    if (m.index.kind(id).type == FeatureType::Observation) ++n_obs;
  CHECK(n_obs == 4);
}

TEST_CASE("extract validates its inputs") {
  Model m = tiny_model(2);
  m.register_structural_features();
  m.index.freeze();
  Sentence s = oracle_sentence();
  CHECK_THROWS_AS(extract(m, s, {0, 2, 1}, m.start_label()), std::invalid_argument);
  CHECK_THROWS_AS(extract(m, s, {2, 1, 0}, m.start_label()), std::invalid_argument);
  CHECK_THROWS_AS(extract(m, s, {0, 0, 5}, m.start_label()), std::invalid_argument);
  CHECK_THROWS_AS(extract(m, s, {3, 4, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(extract(m, s, {0, 0, 0}, 9), std::invalid_argument);
}
