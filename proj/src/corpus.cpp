#include "smcrf/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "smcrf/errors.hpp"

namespace smcrf {

int LabelSet::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names[i] == name) return i;
  return -1;
}

void LabelSet::validate() const {
  if (names.empty()) throw DataError("label set is empty");
  if (names.size() != durational.size())
    throw DataError("label set: names and durational flags differ in size");
  if (default_label < 0 || default_label >= size())
    throw DataError("label set: default label out of range");
  if (durational[default_label])
    throw DataError("label set: default label must be non-durational");
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      if (names[i] == names[j]) throw DataError("label set: duplicate name " + names[i]);
}

LabelSet LabelSet::keyphrase() {
  LabelSet ls;
  ls.names = {"NKP", "KP"};
  ls.durational = {false, true};
  ls.default_label = 0;
  return ls;
}

namespace {

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

[[noreturn]] void parse_fail(long line_no, const std::string& msg) {
  throw DataError("line " + std::to_string(line_no) + ": " + msg);
}

struct SegmentBuilder {
  std::vector<Segment> segments;
  int open_label = -1;
  int open_begin = -1;

  void close(int end) {
    if (open_label >= 0) segments.push_back({open_begin, end, open_label});
    open_label = -1;
  }
  void open(int begin, int label) {
    open_begin = begin;
    open_label = label;
  }
};

}  // namespace

std::vector<Sentence> parse_corpus(std::istream& in, const LabelSet& labels) {
  labels.validate();
  std::vector<Sentence> corpus;
  Sentence cur;
  SegmentBuilder builder;
  std::string line;
  long line_no = 0;

  auto flush = [&] {
    if (cur.tokens.empty()) return;
    builder.close(cur.size() - 1);
    cur.segments = std::move(builder.segments);
    builder = SegmentBuilder{};
    corpus.push_back(std::move(cur));
    cur = Sentence{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') continue;
    if (line.empty()) {
      flush();
      continue;
    }
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 5)
      parse_fail(line_no, "expected 5 tab-separated columns, got " +
                              std::to_string(cols.size()));
    if (cols[0].empty()) parse_fail(line_no, "empty surface column");
    Token tok;
    tok.surface = cols[0];
    tok.pos = cols[1];
    if (cols[2] == "0")
      tok.in_title = false;
    else if (cols[2] == "1")
      tok.in_title = true;
    else
      parse_fail(line_no, "in_title column must be 0 or 1, got '" + cols[2] + "'");
    tok.phrase = (cols[3] == "-") ? std::string{} : cols[3];

    const std::string& tag = cols[4];
    int pos_idx = cur.size();
    if (tag == "O") {
      // maximal O runs collapse into one default-label segment
      if (builder.open_label != labels.default_label) {
        builder.close(pos_idx - 1);
        builder.open(pos_idx, labels.default_label);
      }
    } else if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
      int label = labels.find(tag.substr(2));
      if (label < 0) parse_fail(line_no, "unknown label in span tag '" + tag + "'");
      bool continues = tag[0] == 'I' && builder.open_label == label;
      if (!continues) {
        builder.close(pos_idx - 1);
        builder.open(pos_idx, label);
      }
    } else {
      parse_fail(line_no, "bad span tag '" + tag + "' (expected B-<label>, I-<label> or O)");
    }
    cur.tokens.push_back(std::move(tok));
  }
  flush();
  for (const Sentence& s : corpus) validate_cover(s, labels);
  return corpus;
}

std::vector<Sentence> load_corpus(const std::string& path, const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  try {
    return parse_corpus(in, labels);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_corpus(std::ostream& out, const std::vector<Sentence>& corpus,
                  const LabelSet& labels) {
  for (const Sentence& s : corpus) {
    std::size_t seg = 0;
    for (int i = 0; i < s.size(); ++i) {
      while (seg < s.segments.size() && s.segments[seg].end < i) ++seg;
      const Segment& g = s.segments[seg];
      std::string tag;
      if (g.label == labels.default_label)
        tag = "O";
      else
        tag = (i == g.begin ? "B-" : "I-") + labels.names[g.label];
      const Token& t = s.tokens[i];
      out << t.surface << '\t' << t.pos << '\t' << (t.in_title ? '1' : '0') << '\t'
          << (t.phrase.empty() ? "-" : t.phrase) << '\t' << tag << '\n';
    }
    out << '\n';
  }
}

void save_corpus(const std::string& path, const std::vector<Sentence>& corpus,
                 const LabelSet& labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  write_corpus(out, corpus, labels);
}

void validate_cover(const Sentence& s, const LabelSet& labels) {
  if (s.tokens.empty()) throw DataError("sentence with no tokens");
  if (s.segments.empty()) throw DataError("sentence with no segments");
  int expect = 0;
  for (const Segment& g : s.segments) {
    if (g.label < 0 || g.label >= labels.size())
      throw DataError("segment label id out of range");
    if (g.begin != expect || g.end < g.begin)
      throw DataError("segments do not form a contiguous cover");
    expect = g.end + 1;
  }
  if (expect != s.size()) throw DataError("segments do not cover the sentence");
}

std::vector<Sentence> split_long_segments(std::vector<Sentence> corpus, int max_len) {
  if (max_len < 1) throw DataError("max segment length must be >= 1");
  for (Sentence& s : corpus) {
    std::vector<Segment> out;
    out.reserve(s.segments.size());
    for (const Segment& g : s.segments) {
      int begin = g.begin;
      while (g.end - begin + 1 > max_len) {
        out.push_back({begin, begin + max_len - 1, g.label});
        begin += max_len;
      }
      out.push_back({begin, g.end, g.label});
    }
    s.segments = std::move(out);
  }
  return corpus;
}

namespace {

bool contains(const std::vector<std::string>& pool, const std::string& v) {
  return std::find(pool.begin(), pool.end(), v) != pool.end();
}

}  // namespace

bool is_noun_group(const Sentence& s, int begin, int end, const NounGroupConfig& cfg) {
  if (begin < 0 || end >= s.size() || begin > end) return false;
  bool any_phrase = false;
  for (int i = begin; i <= end; ++i)
    if (!s.tokens[i].phrase.empty()) any_phrase = true;
  if (any_phrase) {
    for (int i = begin; i <= end; ++i)
      if (s.tokens[i].phrase != "NP") return false;
    return true;
  }
  for (int i = begin; i <= end; ++i)
    if (!contains(cfg.allowed, s.tokens[i].pos)) return false;
  return contains(cfg.nouns, s.tokens[end].pos);
}

std::vector<std::pair<int, int>> noun_group_spans(const Sentence& s,
                                                  const NounGroupConfig& cfg) {
  std::vector<std::pair<int, int>> spans;
  for (int a = 0; a < s.size(); ++a)
    for (int b = a; b < s.size() && b - a + 1 <= cfg.max_len; ++b)
      if (is_noun_group(s, a, b, cfg)) spans.emplace_back(a, b);
  return spans;
}

std::string span_surface(const Sentence& s, int begin, int end, bool lowercase) {
  std::string out;
  for (int i = begin; i <= end; ++i) {
    if (i > begin) out += ' ';
    out += s.tokens[i].surface;
  }
  if (lowercase)
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace smcrf
