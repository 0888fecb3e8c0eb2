#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "smcrf/corpus.hpp"
#include "smcrf/decoding.hpp"
#include "smcrf/duration.hpp"
#include "smcrf/errors.hpp"
#include "smcrf/evaluation.hpp"
#include "smcrf/model_io.hpp"
#include "smcrf/synth.hpp"
#include "smcrf/training.hpp"

namespace {

using namespace smcrf;

struct FitArgs {
  std::string corpus, label = "KP", family = "both", out;
};

void print_fit(const DurationModel& f) {
  if (f.family == DurationFamily::GaussianLike)
    std::cout << "fit\tgaussian\tmu\t" << format_g17(f.p1) << "\tsigma2\t"
              << format_g17(f.p2) << "\tloglik\t" << format_g17(f.log_lik) << "\n";
  else
    std::cout << "fit\tgamma\trate\t" << format_g17(f.p1) << "\tbeta\t"
              << format_g17(f.p2) << "\tloglik\t" << format_g17(f.log_lik) << "\n";
}

void run_fit(const FitArgs& a) {
  LabelSet labels = LabelSet::keyphrase();
  int y = labels.find(a.label);
  if (y < 0) throw DataError("unknown label: " + a.label);
  auto corpus = load_corpus(a.corpus, labels);
  DurationHistogram h = collect_histogram(corpus, y);

  std::cout << "label\t" << a.label << "\n";
  std::cout << "count\t" << h.total() << "\n";
  for (const auto& [d, c] : h.counts) std::cout << "hist\t" << d << "\t" << c << "\n";

  std::vector<DurationModel> fits;
  if (a.family == "gaussian" || a.family == "both") fits.push_back(fit_gaussian(h));
  if (a.family == "gamma" || a.family == "both") fits.push_back(fit_gamma(h));
  for (const DurationModel& f : fits) print_fit(f);

  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw DataError("cannot open " + a.out);
    for (const DurationModel& f : fits)
      out << a.label << "\t" << family_name(f.family) << "\t" << format_g17(f.p1)
          << "\t" << format_g17(f.p2) << "\n";
  }
}

// Rows of "<label> TAB family TAB p1 TAB p2". Every durational label must be
// covered; other labels may be listed only with family none.
std::vector<DurationModel> load_preset(const std::string& path, const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<DurationModel> out(labels.size());
  std::vector<bool> seen(labels.size(), false);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) f.push_back(cell);
    const std::string at = path + ":" + std::to_string(ln) + ": ";
    if (f.size() != 4) throw DataError(at + "expected 4 tab-separated fields");
    int y = labels.find(f[0]);
    if (y < 0) throw DataError(at + "unknown label: " + f[0]);
    DurationModel dm;
    dm.family = family_from_name(f[1]);
    try {
      dm.p1 = std::stod(f[2]);
      dm.p2 = std::stod(f[3]);
    } catch (const std::exception&) {
      throw DataError(at + "bad parameter value");
    }
    if (!labels.is_durational(y) && dm.family != DurationFamily::None)
      throw DataError(at + "non-durational label cannot carry a duration family");
    out[y] = dm;
    seen[y] = true;
  }
  for (int y = 0; y < labels.size(); ++y)
    if (labels.is_durational(y) && !seen[y])
      throw DataError(path + ": missing duration row for label " + labels.names[y]);
  return out;
}

struct TrainArgs {
  std::string corpus, duration = "gamma", templates, out, durations;
  int l = 4, max_iter = 200, threads = 0;
  double sigma2 = 10.0, tol = 1e-5;
  bool verbose = false;
};

void run_train(const TrainArgs& a) {
  TrainSetup setup;
  setup.max_len = a.l;
  setup.family = family_from_name(a.duration);
  if (!a.templates.empty()) setup.templates = TemplateConfig::load(a.templates);
  auto corpus = load_corpus(a.corpus, setup.labels);
  if (!a.durations.empty())
    setup.preset_durations = load_preset(a.durations, setup.labels);

  TrainConfig cfg;
  cfg.sigma2 = a.sigma2;
  cfg.max_iter = a.max_iter;
  cfg.tol = a.tol;
  cfg.threads = a.threads;
  cfg.verbose = a.verbose;

  TrainReport rep;
  Model m = train(std::move(corpus), setup, cfg, &rep);
  save_model(a.out, m);
  std::fprintf(stderr, "trained %d features: nll %.8f after %d iterations (%s)\n",
               m.index.size(), rep.value, rep.opt.iterations,
               rep.opt.converged ? "converged" : "iteration limit");
}

struct TagArgs {
  std::string corpus, model, decoder = "constrained", out;
  bool no_prune = false, no_np = false, stats = false;
  int threads = 0;
};

void run_tag(const TagArgs& a) {
  Model m = load_model(a.model);
  auto corpus = load_corpus(a.corpus, m.labels);
  DecodeOptions opts;
  opts.monotone_pruning = !a.no_prune;
  opts.np_constraint = !a.no_np;
  Decoder dec = a.decoder == "viterbi" ? Decoder::Viterbi : Decoder::Constrained;
  TagResult res = tag_corpus(m, corpus, dec, opts, a.threads);

  for (std::size_t i = 0; i < corpus.size(); ++i)
    corpus[i].segments = res.paths[i].segments;
  if (a.out.empty())
    write_corpus(std::cout, corpus, m.labels);
  else
    save_corpus(a.out, corpus, m.labels);

  if (a.stats)
    std::fprintf(stderr,
                 "transitions_evaluated\t%lld\n"
                 "segments_pruned_by_np\t%lld\n"
                 "segments_pruned_by_monotonicity\t%lld\n"
                 "wall_seconds\t%.6f\n"
                 "pruning_disabled\t%d\n",
                 res.stats.transitions_evaluated, res.stats.segments_pruned_by_np,
                 res.stats.segments_pruned_by_monotonicity, res.stats.wall_seconds,
                 res.stats.pruning_disabled ? 1 : 0);
}

struct EvalArgs {
  std::string gold, predicted, match = "span";
};

void run_eval(const EvalArgs& a) {
  LabelSet labels = LabelSet::keyphrase();
  auto gold = load_corpus(a.gold, labels);
  auto predicted = load_corpus(a.predicted, labels);
  EvalReport r = evaluate(gold, predicted, labels, match_mode_from_name(a.match));
  std::cout << "P\tR\tF1\ttp\tfp\tfn\n";
  std::printf("%.10g\t%.10g\t%.10g\t%lld\t%lld\t%lld\n", r.precision, r.recall,
              r.f1, r.tp, r.fp, r.fn);
}

struct BenchArgs {
  std::string corpus, model;
  int reps = 3;
};

void run_bench(const BenchArgs& a) {
  Model m = load_model(a.model);
  auto corpus = load_corpus(a.corpus, m.labels);
  std::cout << "config\treps\twall_seconds\ttransitions_evaluated\t"
               "segments_pruned_by_np\tsegments_pruned_by_monotonicity\t"
               "agreement_vs_viterbi\n";
  if (a.reps <= 0) return;

  struct Row {
    const char* name;
    Decoder dec;
    DecodeOptions opts;
  };
  DecodeOptions quiet;
  quiet.warn_on_disable = false;
  Row rows[] = {
      {"viterbi", Decoder::Viterbi, quiet},
      {"constrained", Decoder::Constrained, quiet},
      {"constrained-no-prune", Decoder::Constrained,
       [&] { auto o = quiet; o.monotone_pruning = false; return o; }()},
      {"constrained-no-np", Decoder::Constrained,
       [&] { auto o = quiet; o.np_constraint = false; return o; }()},
  };

  std::vector<DecodePath> base;
  double t_viterbi = 0.0, t_constrained = 0.0;
  long long tr_viterbi = 0, tr_constrained = 0;
  for (const Row& row : rows) {
    TagResult res;
    double wall = 0.0;
    for (int r = 0; r < a.reps; ++r) {
      res = tag_corpus(m, corpus, row.dec, row.opts);
      wall += res.stats.wall_seconds;
    }
    wall /= a.reps;
    if (base.empty()) base = res.paths;  // first row is plain Viterbi
    long long agree = 0;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (res.paths[i].segments == base[i].segments) ++agree;
    double rate = base.empty() ? 1.0 : static_cast<double>(agree) / base.size();
    std::printf("%s\t%d\t%.6f\t%lld\t%lld\t%lld\t%.6f\n", row.name, a.reps, wall,
                res.stats.transitions_evaluated, res.stats.segments_pruned_by_np,
                res.stats.segments_pruned_by_monotonicity, rate);
    if (std::string(row.name) == "viterbi") {
      t_viterbi = wall;
      tr_viterbi = res.stats.transitions_evaluated;
    } else if (std::string(row.name) == "constrained") {
      t_constrained = wall;
      tr_constrained = res.stats.transitions_evaluated;
    }
  }
  if (tr_viterbi > 0)
    std::printf("# transitions_ratio\t%.6f\n",
                static_cast<double>(tr_constrained) / tr_viterbi);
  if (t_viterbi > 0)
    std::printf("# wall_time_ratio\t%.6f\n", t_constrained / t_viterbi);
}

struct SynthArgs {
  std::string out, len_weights = "1:0.3,2:0.7";
  int sentences = 60, min_gap = 2, max_gap = 5, min_phrases = 1, max_phrases = 2;
  std::uint64_t seed = 1;
  double title_rate = 0.7, trap_rate = 0.5, title_noise = 0.05;
};

std::vector<std::pair<int, double>> parse_len_weights(const std::string& spec) {
  std::vector<std::pair<int, double>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("bad length weight spec: " + item);
    try {
      out.emplace_back(std::stoi(item.substr(0, colon)),
                       std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad length weight spec: " + item);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty length weight spec");
  return out;
}

void run_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.sentences = a.sentences;
  cfg.seed = a.seed;
  cfg.length_weights = parse_len_weights(a.len_weights);
  cfg.min_gap = a.min_gap;
  cfg.max_gap = a.max_gap;
  cfg.min_phrases = a.min_phrases;
  cfg.max_phrases = a.max_phrases;
  cfg.title_rate = a.title_rate;
  cfg.trap_rate = a.trap_rate;
  cfg.title_noise = a.title_noise;
  LabelSet labels = LabelSet::keyphrase();
  auto corpus = generate_synthetic(cfg, labels);
  if (a.out.empty())
    write_corpus(std::cout, corpus, labels);
  else
    save_corpus(a.out, corpus, labels);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-Markov CRF keyphrase tagger with segment-duration features"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* cmd_fit = app.add_subcommand("fit-durations",
                                     "fit segment-length distributions for a label");
  cmd_fit->add_option("corpus", fit.corpus, "corpus file")->required();
  cmd_fit->add_option("--label", fit.label, "durational label name");
  cmd_fit->add_option("--family", fit.family, "gaussian, gamma or both")
      ->check(CLI::IsMember({"gaussian", "gamma", "both"}));
  cmd_fit->add_option("--out", fit.out, "write rows usable with train --durations");
  cmd_fit->callback([&] { run_fit(fit); });

  TrainArgs tr;
  auto* cmd_train = app.add_subcommand("train", "fit durations and weights");
  cmd_train->add_option("corpus", tr.corpus, "training corpus")->required();
  cmd_train->add_option("--l", tr.l, "maximum segment length")
      ->check(CLI::PositiveNumber);
  cmd_train->add_option("--duration", tr.duration, "duration family for KP labels")
      ->check(CLI::IsMember({"gamma", "gaussian", "none"}));
  cmd_train->add_option("--sigma2", tr.sigma2, "L2 regularizer variance");
  cmd_train->add_option("--max-iter", tr.max_iter, "L-BFGS iteration cap");
  cmd_train->add_option("--tol", tr.tol, "gradient inf-norm tolerance");
  cmd_train->add_option("--templates", tr.templates, "feature template file");
  cmd_train->add_option("--out", tr.out, "model output file")->required();
  cmd_train->add_option("--durations", tr.durations, "preset duration parameter file");
  cmd_train->add_option("--threads", tr.threads, "OpenMP threads (0 = default)");
  cmd_train->add_flag("--verbose", tr.verbose, "print objective per evaluation");
  cmd_train->callback([&] { run_train(tr); });

  TagArgs tag;
  auto* cmd_tag = app.add_subcommand("tag", "decode a corpus");
  cmd_tag->add_option("corpus", tag.corpus, "input corpus")->required();
  cmd_tag->add_option("--model", tag.model, "model file")->required();
  cmd_tag->add_option("--decoder", tag.decoder, "viterbi or constrained")
      ->check(CLI::IsMember({"viterbi", "constrained"}));
  cmd_tag->add_flag("--no-prune", tag.no_prune, "disable monotone pruning");
  cmd_tag->add_flag("--no-np-constraint", tag.no_np, "disable the noun-group constraint");
  cmd_tag->add_flag("--stats", tag.stats, "print decode counters to stderr");
  cmd_tag->add_option("--out", tag.out, "output file (default stdout)");
  cmd_tag->add_option("--threads", tag.threads, "OpenMP threads (0 = default)");
  cmd_tag->callback([&] { run_tag(tag); });

  EvalArgs ev;
  auto* cmd_eval = app.add_subcommand("eval", "phrase precision/recall/F1");
  cmd_eval->add_option("gold", ev.gold, "gold corpus")->required();
  cmd_eval->add_option("predicted", ev.predicted, "tagged corpus")->required();
  cmd_eval->add_option("--match", ev.match, "span or string")
      ->check(CLI::IsMember({"span", "string"}));
  cmd_eval->callback([&] { run_eval(ev); });

  BenchArgs be;
  auto* cmd_bench = app.add_subcommand("bench-decode", "compare decoder configurations");
  cmd_bench->add_option("corpus", be.corpus, "corpus file")->required();
  cmd_bench->add_option("--model", be.model, "model file")->required();
  cmd_bench->add_option("--reps", be.reps, "repetitions per configuration")
      ->check(CLI::NonNegativeNumber);
  cmd_bench->callback([&] { run_bench(be); });

  SynthArgs sy;
  auto* cmd_synth = app.add_subcommand("gen-synth", "generate a synthetic corpus");
  cmd_synth->add_option("--out", sy.out, "output file (default stdout)");
  cmd_synth->add_option("--sentences", sy.sentences, "sentence count")
      ->check(CLI::NonNegativeNumber);
  cmd_synth->add_option("--seed", sy.seed, "generator seed");
  cmd_synth->add_option("--len-weights", sy.len_weights,
                        "phrase length distribution, e.g. 1:0.3,2:0.7");
  cmd_synth->add_option("--title-rate", sy.title_rate, "phrase in-title probability");
  cmd_synth->add_option("--trap-rate", sy.trap_rate, "plain-noun trap probability");
  cmd_synth->add_option("--title-noise", sy.title_noise, "stray in-title probability");
  cmd_synth->add_option("--min-gap", sy.min_gap, "minimum filler run");
  cmd_synth->add_option("--max-gap", sy.max_gap, "maximum filler run");
  cmd_synth->add_option("--min-phrases", sy.min_phrases, "minimum phrases per sentence");
  cmd_synth->add_option("--max-phrases", sy.max_phrases, "maximum phrases per sentence");
  cmd_synth->callback([&] { run_synth(sy); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
