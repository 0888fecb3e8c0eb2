#include "smcrf/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smcrf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Observation + duration part of a segment score, summed in key emission
// order. Both segment_score and SegmentScores go through here so the two
// agree bit for bit.
double obs_dur_score(const Model& m, const Sentence& s, int begin, int end, int y) {
  double score = 0;
  for (const std::string& key :
       observation_keys(s, begin, end, m.templates, m.noun_groups)) {
    int id = m.index.lookup(FeatureKind::observation(y, key));
    if (id >= 0) score += m.theta[id];
  }
  int d = end - begin + 1;
  int id = m.index.lookup(FeatureKind::duration(y, d));
  if (id >= 0) score += m.theta[id] * m.duration_value(y, d);
  return score;
}

}  // namespace

double log_sum_exp(const double* v, int n) {
  double mx = kNegInf;
  for (int i = 0; i < n; ++i)
    if (v[i] > mx) mx = v[i];
  if (mx == kNegInf) return kNegInf;
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += std::exp(v[i] - mx);
  return mx + std::log(acc);
}

SegmentScores::SegmentScores(const Model& m, const Sentence& s, Keep keep)
    : n_(s.size()), L_(m.max_len), m_(m.labels.size()) {
  if (m.theta.size() != static_cast<std::size_t>(m.index.size()))
    throw std::invalid_argument("SegmentScores: model has no weight vector");
  scores_.assign(static_cast<std::size_t>(n_) * L_ * m_, kNegInf);
  if (keep == Keep::Vectors) vecs_.resize(scores_.size());
  for (int i = 1; i <= n_; ++i) {
    for (int d = 1; d <= max_d(i); ++d) {
      int begin = i - d, end = i - 1;
      for (int y = 0; y < m_; ++y) {
        scores_[pos(i, d, y)] = obs_dur_score(m, s, begin, end, y);
        if (keep == Keep::Vectors) {
          SparseVector vec;
          for (const std::string& key :
               observation_keys(s, begin, end, m.templates, m.noun_groups)) {
            int id = m.index.lookup(FeatureKind::observation(y, key));
            if (id >= 0) vec.add(id, 1.0);
          }
          int id = m.index.lookup(FeatureKind::duration(y, d));
          if (id >= 0) vec.add(id, m.duration_value(y, d));
          vec.finalize();
          vecs_[pos(i, d, y)] = std::move(vec);
        }
      }
    }
  }
  int start = m.start_label();
  trans_.assign(static_cast<std::size_t>(start + 1) * m_, 0.0);
  trans_id_.assign(trans_.size(), -1);
  for (int prev = 0; prev <= start; ++prev)
    for (int y = 0; y < m_; ++y) {
      int id = m.index.lookup(FeatureKind::transition(prev, y));
      trans_id_[prev * m_ + y] = id;
      if (id >= 0) trans_[prev * m_ + y] = m.theta[id];
    }
}

double segment_score(const Model& m, const Sentence& s, const Segment& seg,
                     int prev_label) {
  if (seg.length() < 1 || seg.length() > m.max_len)
    throw std::invalid_argument("segment_score: segment length out of range");
  double score = obs_dur_score(m, s, seg.begin, seg.end, seg.label);
  int id = m.index.lookup(FeatureKind::transition(prev_label, seg.label));
  if (id >= 0) score += m.theta[id];
  return score;
}

Lattice forward(const Model& m, const Sentence& s, const SegmentScores& sc) {
  Lattice lat;
  lat.n = s.size();
  lat.num_labels = m.labels.size();
  lat.alpha.assign(static_cast<std::size_t>(lat.n + 1) * lat.num_labels, kNegInf);
  int start = m.start_label();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m.max_len) * (lat.num_labels + 1));
  for (int i = 1; i <= lat.n; ++i) {
    for (int y = 0; y < lat.num_labels; ++y) {
      terms.clear();
      for (int d = 1; d <= sc.max_d(i); ++d) {
        double od = sc.obs_dur(i, d, y);
        if (i == d) {
          terms.push_back(od + sc.trans(start, y));
        } else {
          for (int prev = 0; prev < lat.num_labels; ++prev) {
            double a = lat.a(i - d, prev);
            if (a != kNegInf) terms.push_back(a + od + sc.trans(prev, y));
          }
        }
      }
      lat.alpha[static_cast<std::size_t>(i) * lat.num_labels + y] =
          log_sum_exp(terms.data(), static_cast<int>(terms.size()));
    }
  }
  lat.log_z = log_sum_exp(lat.alpha.data() + static_cast<std::size_t>(lat.n) * lat.num_labels,
                          lat.num_labels);
  return lat;
}

void backward(const Model& m, const Sentence& s, const SegmentScores& sc, Lattice& lat) {
  (void)m;
  int n = s.size();
  int ys = lat.num_labels;
  lat.beta.assign(static_cast<std::size_t>(n + 1) * ys, kNegInf);
  for (int y = 0; y < ys; ++y) lat.beta[static_cast<std::size_t>(n) * ys + y] = 0.0;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(sc.max_d(n)) * ys);
  for (int i = n - 1; i >= 0; --i) {
    for (int y = 0; y < ys; ++y) {
      terms.clear();
      for (int d = 1; d <= n - i && d <= sc.max_d(n); ++d) {
        for (int next = 0; next < ys; ++next) {
          double b = lat.b(i + d, next);
          if (b != kNegInf)
            terms.push_back(sc.obs_dur(i + d, d, next) + sc.trans(y, next) + b);
        }
      }
      lat.beta[static_cast<std::size_t>(i) * ys + y] =
          log_sum_exp(terms.data(), static_cast<int>(terms.size()));
    }
  }
}

Lattice forward_backward(const Model& m, const Sentence& s, const SegmentScores& sc) {
  Lattice lat = forward(m, s, sc);
  backward(m, s, sc, lat);
  return lat;
}

Lattice forward_backward(const Model& m, const Sentence& s) {
  SegmentScores sc(m, s);
  return forward_backward(m, s, sc);
}

double log_z_from_beta(const SegmentScores& sc, const Lattice& lat) {
  // first segments: boundary 0 with the START predecessor
  std::vector<double> terms;
  int start = lat.num_labels;  // labels.start()
  for (int d = 1; d <= sc.max_d(lat.n); ++d)
    for (int y = 0; y < lat.num_labels; ++y)
      if (d <= lat.n && lat.b(d, y) != kNegInf)
        terms.push_back(sc.obs_dur(d, d, y) + sc.trans(start, y) + lat.b(d, y));
  return log_sum_exp(terms.data(), static_cast<int>(terms.size()));
}

double segment_marginal(const Model& m, const Sentence& s, const Lattice& lat,
                        const Segment& seg, int prev_label) {
  int i = seg.end + 1;
  int d = seg.length();
  if (d < 1 || d > m.max_len || seg.begin < 0 || seg.end >= s.size())
    throw std::invalid_argument("segment_marginal: span out of range");
  double a;
  if (prev_label == m.start_label())
    a = seg.begin == 0 ? 0.0 : kNegInf;
  else
    a = lat.a(seg.begin, prev_label);
  if (a == kNegInf) return 0.0;
  double phi = segment_score(m, s, seg, prev_label);
  return std::exp(a + phi + lat.b(i, seg.label) - lat.log_z);
}

void add_expected_features(const Model& m, const SegmentScores& sc, const Lattice& lat,
                           double scale, double* acc) {
  int n = lat.n;
  int ys = lat.num_labels;
  int start = m.start_label();
  for (int i = 1; i <= n; ++i) {
    for (int d = 1; d <= sc.max_d(i); ++d) {
      for (int y = 0; y < ys; ++y) {
        double od = sc.obs_dur(i, d, y);
        double b = lat.b(i, y);
        if (b == kNegInf) continue;
        double mass = 0;
        if (i == d) {
          double p = std::exp(od + sc.trans(start, y) + b - lat.log_z);
          mass = p;
          int tid = sc.trans_id(start, y);
          if (tid >= 0) acc[tid] += scale * p;
        } else {
          for (int prev = 0; prev < ys; ++prev) {
            double a = lat.a(i - d, prev);
            if (a == kNegInf) continue;
            double p = std::exp(a + od + sc.trans(prev, y) + b - lat.log_z);
            mass += p;
            int tid = sc.trans_id(prev, y);
            if (tid >= 0) acc[tid] += scale * p;
          }
        }
        if (mass == 0) continue;
        for (const auto& [id, v] : sc.obs_dur_vec(i, d, y).items)
          acc[id] += scale * mass * v;
      }
    }
  }
}

std::vector<double> expected_features(const Model& m, const Sentence& s) {
  SegmentScores sc(m, s, SegmentScores::Keep::Vectors);
  Lattice lat = forward_backward(m, s, sc);
  std::vector<double> out(m.index.size(), 0.0);
  add_expected_features(m, sc, lat, 1.0, out.data());
  return out;
}

}  // namespace smcrf
