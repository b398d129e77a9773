#ifndef PREFSCALE_EVAL_HPP
#define PREFSCALE_EVAL_HPP

// Ranking, evaluation with fractional tie credit, the random baseline, k-fold
// held-out experiments, and paired sign tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "prefscale/corpus.hpp"
#include "prefscale/error.hpp"
#include "prefscale/goldscore.hpp"
#include "prefscale/pipeline.hpp"
#include "prefscale/random.hpp"
#include "prefscale/train.hpp"

namespace prefscale {

struct RankedAnalysis {
  std::string id;
  double score = 0.0;
};

/// Analyses by descending Σ_j c_j s_ij; ties keep input order.
inline std::vector<RankedAnalysis> rank(const Sentence& s, const ScalingFactors& c) {
  std::vector<RankedAnalysis> out;
  out.reserve(s.analyses.size());
  for (const auto& a : s.analyses) {
    double total = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) total += c.values[j] * a.feature(c.names[j]);
    out.push_back({a.id, total});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedAnalysis& x, const RankedAnalysis& y) { return x.score > y.score; });
  return out;
}

struct SentenceOutcome {
  std::string id;
  bool strict = false;      // every top scorer correct
  double fractional = 0.0;  // G/N over the N top scorers
};

struct EvalReport {
  std::size_t n_sentences = 0;
  std::size_t correct_strict = 0;
  double correct_fractional = 0.0;
  double percentage = 0.0;
  std::vector<SentenceOutcome> per_sentence;

  void add(SentenceOutcome o) {
    ++n_sentences;
    correct_strict += o.strict ? 1 : 0;
    correct_fractional += o.fractional;
    per_sentence.push_back(std::move(o));
    percentage = 100.0 * correct_fractional / static_cast<double>(n_sentences);
  }
};

inline SentenceOutcome evaluate_sentence(const Sentence& s, const ScalingFactors& c) {
  SentenceOutcome o{s.id, false, 0.0};
  const auto ranked = rank(s, c);
  if (ranked.empty()) return o;
  std::map<std::string, bool> correct;
  for (const auto& a : s.analyses) correct[a.id] = exact_match(a, s.gold);
  std::size_t top = 0;
  std::size_t good = 0;
  for (const auto& r : ranked) {
    if (r.score != ranked.front().score) break;
    ++top;
    good += correct[r.id] ? 1 : 0;
  }
  o.fractional = static_cast<double>(good) / static_cast<double>(top);
  o.strict = good == top;
  return o;
}

/// Per sentence, with N top-scoring analyses of which G are exactly correct:
/// fractional credit G/N and strict credit iff G = N.
inline EvalReport evaluate(const Corpus& corpus, const ScalingFactors& c) {
  EvalReport report;
  for (const auto& s : corpus.sentences) report.add(evaluate_sentence(s, c));
  return report;
}

/// Expected accuracy of picking one analysis uniformly at random.
inline EvalReport random_baseline(const Corpus& corpus) {
  EvalReport report;
  for (const auto& s : corpus.sentences) {
    std::size_t good = 0;
    for (const auto& a : s.analyses) good += exact_match(a, s.gold) ? 1 : 0;
    const double credit = s.analyses.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(s.analyses.size());
    report.add({s.id, good == s.analyses.size() && good > 0, credit});
  }
  return report;
}

/// Sampled variant of the random baseline: one uniform pick per sentence.
inline EvalReport random_baseline_sampled(const Corpus& corpus, std::uint64_t seed) {
  EvalReport report;
  auto g = rng::substream(seed, 0x5eed);
  for (const auto& s : corpus.sentences) {
    if (s.analyses.empty()) {
      report.add({s.id, false, 0.0});
      continue;
    }
    const auto pick = rng::below(g, s.analyses.size());
    const bool ok = exact_match(s.analyses[pick], s.gold);
    report.add({s.id, ok, ok ? 1.0 : 0.0});
  }
  return report;
}

inline EvalReport merge(const std::vector<EvalReport>& reports) {
  EvalReport out;
  for (const auto& r : reports)
    for (const auto& o : r.per_sentence) out.add(o);
  return out;
}

// ---------------------------------------------------------------------------
// Sign test

struct SignTestResult {
  std::size_t plus = 0;   // A correct, B wrong
  std::size_t minus = 0;  // B correct, A wrong
  double sds = 0.0;

  bool no_disagreements() const { return plus + minus == 0; }
};

/// Number of standard deviations |plus - minus| / sqrt(plus + minus); 0 when
/// the two systems never disagree.
inline double sign_test_sds(std::size_t plus, std::size_t minus) {
  if (plus + minus == 0) return 0.0;
  const double d = std::abs(static_cast<double>(plus) - static_cast<double>(minus));
  return d / std::sqrt(static_cast<double>(plus + minus));
}

inline SignTestResult sign_test(const std::map<std::string, bool>& a, const std::map<std::string, bool>& b) {
  if (a.size() != b.size()) throw data_error("sign test: result sets cover different sentences");
  SignTestResult r;
  for (const auto& [id, ok_a] : a) {
    const auto it = b.find(id);
    if (it == b.end()) throw data_error("sign test: sentence '" + id + "' missing from second result set");
    if (ok_a && !it->second) ++r.plus;
    if (!ok_a && it->second) ++r.minus;
  }
  r.sds = sign_test_sds(r.plus, r.minus);
  return r;
}

inline std::map<std::string, bool> strict_outcomes(const EvalReport& report) {
  std::map<std::string, bool> out;
  for (const auto& o : report.per_sentence) out[o.id] = o.strict;
  return out;
}

// ---------------------------------------------------------------------------
// Result files: "sentence<TAB>strict<TAB>fractional" with a header row.

inline void write_results(std::ostream& out, const EvalReport& report) {
  out << "sentence\tstrict\tfractional\n";
  for (const auto& o : report.per_sentence)
    out << o.id << '\t' << (o.strict ? 1 : 0) << '\t' << format_double(o.fractional) << '\n';
}

inline EvalReport read_results(std::istream& in, std::string_view source = "<stream>") {
  EvalReport report;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, bool> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("sentence\t")) continue;
    std::istringstream fields(line);
    std::string id;
    std::string strict;
    std::string frac;
    if (!std::getline(fields, id, '\t') || !std::getline(fields, strict, '\t') || !std::getline(fields, frac, '\t'))
      throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
    if (strict != "0" && strict != "1")
      throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": strict column must be 0 or 1");
    double f = 0.0;
    try {
      std::size_t used = 0;
      f = std::stod(frac, &used);
      if (used != frac.size()) throw std::invalid_argument(frac);
    } catch (const std::exception&) {
      throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": bad fractional value");
    }
    if (!seen.emplace(id, true).second)
      throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": duplicate sentence '" + id + "'");
    report.add({id, strict == "1", f});
  }
  return report;
}

inline void save_results(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write results file " + path.string());
  write_results(out, report);
}

inline EvalReport load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open results file " + path.string());
  return read_results(in, path.string());
}

// ---------------------------------------------------------------------------
// Cross-validation

/// Seeded shuffle of sentence indices dealt round-robin into k folds; fold
/// sizes differ by at most one. Each fold lists indices in corpus order.
inline std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw data_error("cross-validation needs at least 2 folds");
  if (k > n) throw data_error("cross-validation: " + std::to_string(k) + " folds for " + std::to_string(n) + " sentences");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto g = rng::substream(seed, 0xf01d);
  rng::shuffle(g, order);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t p = 0; p < n; ++p) folds[p % k].push_back(order[p]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct CrossValResult {
  std::vector<std::vector<std::size_t>> folds;
  std::vector<TrainedPipeline> trained;
  std::vector<EvalReport> fold_reports;
  EvalReport aggregate;
};

/// Trains on k-1 folds and evaluates on the held-out one, for every fold.
inline CrossValResult cross_validate(const Corpus& corpus, std::size_t k, const PipelineConfig& cfg,
                                     std::uint64_t seed) {
  CrossValResult out;
  out.folds = make_folds(corpus.sentences.size(), k, seed);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) train_idx.insert(train_idx.end(), out.folds[g].begin(), out.folds[g].end());
    std::sort(train_idx.begin(), train_idx.end());
    auto trained = train_pipeline(subset(corpus, train_idx), cfg);
    const auto held_out = prepare(subset(corpus, out.folds[f]), trained.models);
    out.fold_reports.push_back(evaluate(held_out, trained.factors));
    out.trained.push_back(std::move(trained));
  }
  out.aggregate = merge(out.fold_reports);
  return out;
}

}  // namespace prefscale

#endif  // PREFSCALE_EVAL_HPP
