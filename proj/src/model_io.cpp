#include "smcrf/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "smcrf/errors.hpp"

namespace smcrf {

namespace {

constexpr const char* kMagic = "smcrf-model";
constexpr int kVersion = 1;
constexpr const char* kStartName = "<START>";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string> next(const char* what) {
    std::string line;
    if (!std::getline(in_, line))
      throw DataError("model file truncated, expected " + std::string(what));
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return split_tabs(line);
  }

  long line_no() const { return line_no_; }

 private:
  std::istream& in_;
  long line_no_ = 0;
};

[[noreturn]] void bad_line(const LineReader& r, const std::string& msg) {
  throw DataError("model file line " + std::to_string(r.line_no()) + ": " + msg);
}

int parse_int(const LineReader& r, const std::string& s) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad_line(r, "expected integer, got '" + s + "'");
  }
}

double parse_double(const LineReader& r, const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    bad_line(r, "expected number, got '" + s + "'");
  return v;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void save_model(std::ostream& out, const Model& m) {
  m.validate();
  if (m.theta.size() != static_cast<std::size_t>(m.index.size()))
    throw DataError("model: cannot save untrained weight vector");
  out << kMagic << '\t' << kVersion << '\n';
  out << "labels\t" << m.labels.size() << '\n';
  for (int y = 0; y < m.labels.size(); ++y)
    out << "label\t" << m.labels.names[y] << '\t' << (m.labels.durational[y] ? 1 : 0)
        << '\n';
  out << "default-label\t" << m.labels.names[m.labels.default_label] << '\n';
  out << "max-len\t" << m.max_len << '\n';
  out << "templates\t" << m.templates.names() << '\n';
  out << "noun-allowed\t" << join(m.noun_groups.allowed, ',') << '\n';
  out << "noun-end\t" << join(m.noun_groups.nouns, ',') << '\n';
  out << "noun-max-len\t" << m.noun_groups.max_len << '\n';
  for (int y = 0; y < m.labels.size(); ++y) {
    const DurationModel& dm = m.durations[y];
    out << "duration\t" << m.labels.names[y] << '\t' << family_name(dm.family) << '\t'
        << format_g17(dm.p1) << '\t' << format_g17(dm.p2) << '\t'
        << format_g17(dm.log_lik) << '\n';
  }
  out << "features\t" << m.index.size() << '\n';
  for (int id = 0; id < m.index.size(); ++id) {
    const FeatureKind& k = m.index.kind(id);
    switch (k.type) {
      case FeatureType::Observation:
        out << "O\t" << m.labels.names[k.label] << '\t' << k.key;
        break;
      case FeatureType::Transition:
        out << "T\t"
            << (k.prev_label == m.labels.size() ? kStartName
                                                : m.labels.names[k.prev_label])
            << '\t' << m.labels.names[k.label];
        break;
      case FeatureType::Duration:
        out << "D\t" << m.labels.names[k.label] << '\t' << k.length;
        break;
    }
    out << '\t' << format_g17(m.theta[id]) << '\n';
  }
}

void save_model(const std::string& path, const Model& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  save_model(out, m);
}

Model load_model(std::istream& in) {
  LineReader r(in);
  Model m;

  auto header = r.next("header");
  if (header.size() != 2 || header[0] != kMagic)
    bad_line(r, "not a model file (bad magic)");
  if (parse_int(r, header[1]) != kVersion) bad_line(r, "unsupported model version");

  auto labels = r.next("labels count");
  if (labels.size() != 2 || labels[0] != "labels") bad_line(r, "expected 'labels'");
  int n_labels = parse_int(r, labels[1]);
  if (n_labels < 1) bad_line(r, "label count must be >= 1");
  for (int y = 0; y < n_labels; ++y) {
    auto row = r.next("label row");
    if (row.size() != 3 || row[0] != "label") bad_line(r, "expected 'label' row");
    m.labels.names.push_back(row[1]);
    m.labels.durational.push_back(parse_int(r, row[2]) != 0);
  }
  auto def = r.next("default-label");
  if (def.size() != 2 || def[0] != "default-label")
    bad_line(r, "expected 'default-label'");
  m.labels.default_label = m.labels.find(def[1]);
  if (m.labels.default_label < 0) bad_line(r, "default label not in label set");

  auto maxlen = r.next("max-len");
  if (maxlen.size() != 2 || maxlen[0] != "max-len") bad_line(r, "expected 'max-len'");
  m.max_len = parse_int(r, maxlen[1]);

  auto tmpl = r.next("templates");
  if (tmpl.size() != 2 || tmpl[0] != "templates") bad_line(r, "expected 'templates'");
  m.templates = TemplateConfig::from_names(tmpl[1]);

  auto allowed = r.next("noun-allowed");
  if (allowed.size() != 2 || allowed[0] != "noun-allowed")
    bad_line(r, "expected 'noun-allowed'");
  m.noun_groups.allowed = split(allowed[1], ',');
  auto nouns = r.next("noun-end");
  if (nouns.size() != 2 || nouns[0] != "noun-end") bad_line(r, "expected 'noun-end'");
  m.noun_groups.nouns = split(nouns[1], ',');
  auto nml = r.next("noun-max-len");
  if (nml.size() != 2 || nml[0] != "noun-max-len")
    bad_line(r, "expected 'noun-max-len'");
  m.noun_groups.max_len = parse_int(r, nml[1]);

  m.durations.assign(n_labels, DurationModel{});
  for (int y = 0; y < n_labels; ++y) {
    auto row = r.next("duration row");
    if (row.size() != 6 || row[0] != "duration") bad_line(r, "expected 'duration' row");
    int label = m.labels.find(row[1]);
    if (label < 0) bad_line(r, "duration row for unknown label " + row[1]);
    DurationModel dm;
    dm.family = family_from_name(row[2]);
    dm.p1 = parse_double(r, row[3]);
    dm.p2 = parse_double(r, row[4]);
    dm.log_lik = parse_double(r, row[5]);
    m.durations[label] = dm;
  }

  auto feats = r.next("features count");
  if (feats.size() != 2 || feats[0] != "features") bad_line(r, "expected 'features'");
  int n_features = parse_int(r, feats[1]);
  m.theta.reserve(n_features);
  for (int id = 0; id < n_features; ++id) {
    auto row = r.next("feature row");
    if (row.size() < 2) bad_line(r, "short feature row");
    FeatureKind kind;
    double w = 0;
    if (row[0] == "O") {
      if (row.size() != 4) bad_line(r, "observation row needs 4 columns");
      int label = m.labels.find(row[1]);
      if (label < 0) bad_line(r, "unknown label " + row[1]);
      kind = FeatureKind::observation(label, row[2]);
      w = parse_double(r, row[3]);
    } else if (row[0] == "T") {
      if (row.size() != 4) bad_line(r, "transition row needs 4 columns");
      int prev = row[1] == kStartName ? m.labels.start() : m.labels.find(row[1]);
      int label = m.labels.find(row[2]);
      if (prev < 0 || label < 0) bad_line(r, "unknown label in transition row");
      kind = FeatureKind::transition(prev, label);
      w = parse_double(r, row[3]);
    } else if (row[0] == "D") {
      if (row.size() != 4) bad_line(r, "duration row needs 4 columns");
      int label = m.labels.find(row[1]);
      if (label < 0) bad_line(r, "unknown label " + row[1]);
      kind = FeatureKind::duration(label, parse_int(r, row[2]));
      w = parse_double(r, row[3]);
    } else {
      bad_line(r, "unknown feature row type '" + row[0] + "'");
    }
    if (m.index.add(kind) != id) bad_line(r, "duplicate feature row");
    m.theta.push_back(w);
  }
  m.index.freeze();
  m.refresh_duration_cache();
  m.validate();
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  try {
    return load_model(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace smcrf
