#include "support/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smcrf/inference.hpp"
#include "smcrf/training.hpp"

namespace smcrf::testing {

namespace {

double lse(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

void extend(const Model& m, const Sentence& s, std::vector<Segment>& prefix,
            int used, std::vector<EnumPath>& out) {
  const int n = s.size();
  if (used == n) {
    EnumPath p;
    p.segments = prefix;
    int prev = m.start_label();
    for (const Segment& seg : p.segments) {
      p.score += segment_score(m, s, seg, prev);
      prev = seg.label;
    }
    out.push_back(std::move(p));
    return;
  }
  for (int d = 1; d <= m.max_len && used + d <= n; ++d) {
    for (int y = 0; y < m.labels.size(); ++y) {
      prefix.push_back({used, used + d - 1, y});
      extend(m, s, prefix, used + d, out);
      prefix.pop_back();
    }
  }
}

}  // namespace

std::vector<EnumPath> enumerate_paths(const Model& m, const Sentence& s) {
  std::vector<EnumPath> out;
  std::vector<Segment> prefix;
  extend(m, s, prefix, 0, out);
  return out;
}

double enum_log_z(const std::vector<EnumPath>& paths) {
  std::vector<double> scores;
  scores.reserve(paths.size());
  for (const EnumPath& p : paths) scores.push_back(p.score);
  return lse(scores);
}

const EnumPath& enum_best(const std::vector<EnumPath>& paths) {
  if (paths.empty()) throw std::invalid_argument("no paths to choose from");
  auto preferred = [](const EnumPath& a, const EnumPath& b) {
    if (a.score != b.score) return a.score > b.score;
    // The decoder resolves ties from the end of the sentence inwards:
    // at each boundary the lower label, then the shorter segment, wins.
    int i = static_cast<int>(a.segments.size()) - 1;
    int j = static_cast<int>(b.segments.size()) - 1;
    while (i >= 0 && j >= 0) {
      if (a.segments[i].label != b.segments[j].label)
        return a.segments[i].label < b.segments[j].label;
      if (a.segments[i].length() != b.segments[j].length())
        return a.segments[i].length() < b.segments[j].length();
      --i;
      --j;
    }
    return false;
  };
  const EnumPath* best = &paths[0];
  for (const EnumPath& p : paths)
    if (preferred(p, *best)) best = &p;
  return *best;
}

std::vector<EnumPath> filter_np(const Model& m, const std::vector<EnumPath>& paths,
                                const std::vector<std::pair<int, int>>& np_spans) {
  auto allowed = [&](const Segment& g) {
    if (!m.labels.is_durational(g.label)) return true;
    for (const auto& [b, e] : np_spans)
      if (b == g.begin && e == g.end) return true;
    return false;
  };
  std::vector<EnumPath> out;
  for (const EnumPath& p : paths)
    if (std::all_of(p.segments.begin(), p.segments.end(), allowed)) out.push_back(p);
  return out;
}

double enum_marginal(const std::vector<EnumPath>& paths, double log_z,
                     const Segment& seg, int prev_label, int start_label) {
  double mass = 0.0;
  for (const EnumPath& p : paths) {
    int prev = start_label;
    for (const Segment& g : p.segments) {
      if (g == seg && prev == prev_label) mass += std::exp(p.score - log_z);
      prev = g.label;
    }
  }
  return mass;
}

std::vector<double> enum_expected(const Model& m, const Sentence& s,
                                  const std::vector<EnumPath>& paths, double log_z) {
  std::vector<double> out(m.index.size(), 0.0);
  for (const EnumPath& p : paths) {
    double w = std::exp(p.score - log_z);
    int prev = m.start_label();
    for (const Segment& g : p.segments) {
      SparseVector f = extract(m, s, g, prev);
      for (const auto& [id, v] : f.items) out[id] += w * v;
      prev = g.label;
    }
  }
  return out;
}

double chain_log_z(const Model& m, const Sentence& s) {
  if (m.max_len != 1) throw std::invalid_argument("chain recursion needs L = 1");
  const int n = s.size();
  const int nl = m.labels.size();
  auto weight = [&](const FeatureKind& k) {
    int id = m.index.lookup(k);
    return id >= 0 ? m.theta[id] : 0.0;
  };
  // node potential: observation keys of the single-token span plus the
  // length-1 duration feature
  auto node = [&](int t, int y) {
    double w = 0.0;
    for (const std::string& key :
         observation_keys(s, t, t, m.templates, m.noun_groups))
      w += weight(FeatureKind::observation(y, key));
    w += weight(FeatureKind::duration(y, 1)) * m.duration_value(y, 1);
    return w;
  };
  std::vector<double> a(nl), next(nl), terms(nl);
  for (int y = 0; y < nl; ++y)
    a[y] = node(0, y) + weight(FeatureKind::transition(m.start_label(), y));
  for (int t = 1; t < n; ++t) {
    for (int y = 0; y < nl; ++y) {
      for (int p = 0; p < nl; ++p)
        terms[p] = a[p] + weight(FeatureKind::transition(p, y));
      next[y] = node(t, y) + lse(terms);
    }
    a = next;
  }
  return lse(a);
}

double segment_lattice_log_z(const Model& m, const Sentence& s) {
  const int n = s.size();
  const int nl = m.labels.size();
  // phi from raw features, independent of the engine's score cache
  auto phi = [&](const Segment& g, int prev) {
    return extract(m, s, g, prev).dot(m.theta);
  };
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(nl));
  std::vector<double> terms;
  for (int i = 1; i <= n; ++i) {
    for (int y = 0; y < nl; ++y) {
      terms.clear();
      for (int d = 1; d <= m.max_len && d <= i; ++d) {
        Segment g{i - d, i - 1, y};
        if (d == i) {
          terms.push_back(phi(g, m.start_label()));
        } else {
          for (int p = 0; p < nl; ++p)
            terms.push_back(a[i - d][p] + phi(g, p));
        }
      }
      a[i][y] = lse(terms);
    }
  }
  return lse(a[n]);
}

std::vector<Segment> random_segmentation(Rng& rng, int n, int max_len,
                                         int num_labels) {
  std::vector<Segment> out;
  int used = 0;
  while (used < n) {
    int d = rng.uniform_int(1, std::min(max_len, n - used));
    int y = rng.uniform_int(0, num_labels - 1);
    out.push_back({used, used + d - 1, y});
    used += d;
  }
  return out;
}

RandomInstance random_instance(Rng& rng, const RandomInstanceConfig& cfg) {
  static const char* kWords[] = {"alpha", "beta",  "gamma", "delta", "omega",
                                 "sigma", "kappa", "theta", "probe", "trial"};
  static const char* kPos[] = {"NN", "NNS", "JJ", "VBG", "IN", "DT", "RB"};

  auto random_sentence = [&](int n) {
    Sentence s;
    bool tagged = rng.bernoulli(0.2);
    for (int t = 0; t < n; ++t) {
      Token tok;
      tok.surface = kWords[rng.uniform_int(0, 9)];
      tok.pos = kPos[rng.uniform_int(0, 6)];
      tok.in_title = rng.bernoulli(0.3);
      if (tagged) tok.phrase = rng.bernoulli(0.6) ? "NP" : "VP";
      s.tokens.push_back(tok);
    }
    s.segments = random_segmentation(rng, n, cfg.max_len, 2);
    return s;
  };

  RandomInstance inst;
  inst.sentence = random_sentence(rng.uniform_int(cfg.min_tokens, cfg.max_tokens));

  // Observation features come from every span of the instance sentence plus
  // two more random sentences over the same vocabulary. Covering all spans
  // (not just gold ones) gives each span a distinct random score, so random
  // weights produce no accidental exact ties between different paths.
  std::vector<Sentence> gold = {inst.sentence};
  for (int q = 0; q < 2; ++q)
    gold.push_back(random_sentence(rng.uniform_int(cfg.min_tokens, cfg.max_tokens)));

  TrainSetup setup;
  setup.labels = LabelSet::keyphrase();
  setup.max_len = cfg.max_len;
  setup.preset_durations.resize(2);
  if (cfg.dominance) {
    setup.preset_durations[1] = {DurationFamily::GaussianLike,
                                 rng.uniform_real(1.0, 3.0),
                                 rng.uniform_real(0.5, 2.0), 0.0};
  } else {
    switch (rng.uniform_int(0, 2)) {
      case 0:
        setup.preset_durations[1] = {DurationFamily::GaussianLike,
                                     rng.uniform_real(1.0, 3.0),
                                     rng.uniform_real(0.5, 2.0), 0.0};
        break;
      case 1:
        setup.preset_durations[1] = {DurationFamily::GammaLike,
                                     rng.uniform_real(0.5, 2.0),
                                     rng.uniform_real(0.0, 3.0), 0.0};
        break;
      default:
        setup.preset_durations[1] = {DurationFamily::None, 0.0, 0.0, 0.0};
    }
  }
  // Mirrors build_model, but registers the observation keys of every span
  // of every sentence rather than only the gold segments.
  Model& m = inst.model;
  m.labels = setup.labels;
  m.max_len = setup.max_len;
  m.templates = setup.templates;
  m.noun_groups = setup.noun_groups;
  m.durations = setup.preset_durations;
  m.refresh_duration_cache();
  m.register_structural_features();
  for (const Sentence& s : gold)
    for (int a = 0; a < s.size(); ++a)
      for (int b = a; b < std::min(s.size(), a + m.max_len); ++b)
        for (int y = 0; y < m.labels.size(); ++y)
          extract_growing(m, s, {a, b, y}, m.start_label());
  m.index.freeze();
  m.theta.assign(m.index.size(), 0.0);
  m.validate();

  if (cfg.dominance) {
    for (double& w : inst.model.theta) w = rng.uniform_real(-0.02, 0.02);
    for (int y = 0; y < inst.model.labels.size(); ++y) {
      if (!inst.model.labels.is_durational(y)) continue;
      double c = rng.uniform_real(6.0, 10.0);
      for (int d = 1; d <= inst.model.max_len; ++d) {
        int id = inst.model.index.lookup(FeatureKind::duration(y, d));
        inst.model.theta[id] = c;
      }
    }
  } else {
    for (double& w : inst.model.theta) w = rng.uniform_real(-1.0, 1.0);
  }
  return inst;
}

}  // namespace smcrf::testing
