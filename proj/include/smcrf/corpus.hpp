#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace smcrf {

struct Token {
  std::string surface;
  std::string pos;
  std::string phrase;  // parser phrase tag; empty when the column holds "-"
  bool in_title = false;
};

// Token span [begin, end], both inclusive, with a label id.
struct Segment {
  int begin = 0;
  int end = 0;
  int label = 0;

  int length() const { return end - begin + 1; }
  bool operator==(const Segment&) const = default;
};

struct LabelSet {
  std::vector<std::string> names;
  std::vector<bool> durational;
  int default_label = 0;

  int size() const { return static_cast<int>(names.size()); }
  // Distinguished previous-label id used for the first segment of a sentence.
  int start() const { return size(); }
  int find(const std::string& name) const;
  bool is_durational(int label) const { return durational[label]; }
  void validate() const;

  // {NKP, KP}: NKP is the default non-durational label, KP is durational.
  static LabelSet keyphrase();
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<Segment> segments;  // contiguous, in order, covering all tokens

  int size() const { return static_cast<int>(tokens.size()); }
};

// Line-oriented UTF-8 format, one token per line:
//   surface TAB pos TAB in_title(0|1) TAB phrase_tag("-" if none) TAB span_tag
// span_tag is B-<label>, I-<label> or O; a blank line ends a sentence; lines
// starting with '#' are comments. Maximal O runs become single default-label
// segments. Throws DataError with a line number on malformed input.
std::vector<Sentence> parse_corpus(std::istream& in, const LabelSet& labels);
std::vector<Sentence> load_corpus(const std::string& path, const LabelSet& labels);

void write_corpus(std::ostream& out, const std::vector<Sentence>& corpus,
                  const LabelSet& labels);
void save_corpus(const std::string& path, const std::vector<Sentence>& corpus,
                 const LabelSet& labels);

// Checks that segments are in order, contiguous, cover all tokens and carry
// valid label ids. Throws DataError otherwise.
void validate_cover(const Sentence& s, const LabelSet& labels);

// Replaces every gold segment of length m > max_len by ceil(m / max_len)
// consecutive segments, left to right, each at most max_len long.
std::vector<Sentence> split_long_segments(std::vector<Sentence> corpus, int max_len);

struct NounGroupConfig {
  std::vector<std::string> allowed = {"JJ", "JJR", "JJS", "NN",
                                      "NNS", "NNP", "NNPS", "VBG"};
  std::vector<std::string> nouns = {"NN", "NNS", "NNP", "NNPS"};
  int max_len = 4;  // only bounds noun_group_spans, not is_noun_group
};

// A span qualifies via parser tags when any token carries a phrase tag (then
// all tokens must be tagged "NP"); fully untagged spans match when every POS
// is in `allowed` and the last POS is in `nouns`.
bool is_noun_group(const Sentence& s, int begin, int end, const NounGroupConfig& cfg);

// All qualifying spans of length <= cfg.max_len, ordered by (begin, end).
std::vector<std::pair<int, int>> noun_group_spans(const Sentence& s,
                                                  const NounGroupConfig& cfg);

std::string span_surface(const Sentence& s, int begin, int end, bool lowercase);

}  // namespace smcrf
