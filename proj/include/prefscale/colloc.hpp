#ifndef PREFSCALE_COLLOC_HPP
#define PREFSCALE_COLLOC_HPP

// Semantic collocation statistics over (H1, R, H2) triples and the syntactic
// rule-cost function. Each statistic yields a per-triple score table; an
// analysis is scored by the mean over its triples, multiplied by the number of
// words in the sentence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prefscale/corpus.hpp"
#include "prefscale/error.hpp"
#include "prefscale/goldscore.hpp"

namespace prefscale {

enum class Statistic { mutual_info, chi_squared, chi, mean_distance, likelihood_ratio };

inline constexpr Statistic all_statistics[] = {Statistic::mutual_info, Statistic::chi_squared,
                                               Statistic::chi, Statistic::mean_distance,
                                               Statistic::likelihood_ratio};

inline std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::mutual_info: return "mutual_info";
    case Statistic::chi_squared: return "chi_squared";
    case Statistic::chi: return "chi";
    case Statistic::mean_distance: return "mean_distance";
    case Statistic::likelihood_ratio: return "likelihood_ratio";
  }
  return "";
}

inline std::optional<Statistic> parse_statistic(std::string_view name) {
  for (auto s : all_statistics)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

/// Whether add-0.5 smoothing applies to the statistic by default.
inline double default_smoothing(Statistic s) {
  switch (s) {
    case Statistic::mutual_info:
    case Statistic::chi_squared:
    case Statistic::chi: return 0.5;
    default: return 0.0;
  }
}

/// How tied best analyses share a sentence's weight in the triple population.
enum class TieWeighting { fractional, count_all };

struct CollocOptions {
  TieWeighting ties = TieWeighting::fractional;
  /// Overrides the statistic's default smoothing when set.
  std::optional<double> smoothing;
  /// Unseen-triple value for every statistic except mean_distance.
  double default_value = 0.0;
  /// mean_distance's unseen-triple value; defaults to the corpus-wide mean of g.
  std::optional<double> mean_distance_default;
};

// ---------------------------------------------------------------------------
// Triple counts over best analyses

struct TripleStats {
  std::map<Triple, double> joint;
  std::map<std::string, double, std::less<>> m1;  // by h1
  std::map<std::string, double, std::less<>> m2;  // by r
  std::map<std::string, double, std::less<>> m3;  // by h2
  std::map<std::pair<std::string, std::string>, double> h1_r;  // (h1, r)
  std::map<std::pair<std::string, std::string>, double> r_h2;  // (r, h2)
  double n = 0.0;

  void add(const Triple& t, double weight) {
    joint[t] += weight;
    m1[t.h1] += weight;
    m2[t.r] += weight;
    m3[t.h2] += weight;
    h1_r[{t.h1, t.r}] += weight;
    r_h2[{t.r, t.h2}] += weight;
    n += weight;
  }

  template <class Map, class Key>
  static double count(const Map& map, const Key& key) {
    const auto it = map.find(key);
    return it == map.end() ? 0.0 : it->second;
  }

  double joint_count(const Triple& t) const { return count(joint, t); }
};

/// Counts triple tokens in each sentence's best analyses (by training score).
/// With fractional tie weighting each sentence contributes its expected triple
/// multiset: every tied analysis counts 1/|best_set|.
inline TripleStats extract_triple_counts(const Corpus& corpus, const ScoreWeights& w = {},
                                         TieWeighting ties = TieWeighting::fractional) {
  TripleStats stats;
  for (const auto& s : corpus.sentences) {
    const auto best = best_analysis_indices(s, w);
    if (best.empty()) continue;
    const double weight = ties == TieWeighting::fractional ? 1.0 / static_cast<double>(best.size()) : 1.0;
    for (auto b : best)
      for (const auto& t : s.analyses[b].triples) stats.add(t, weight);
  }
  return stats;
}

namespace detail {

inline void require_trained(const TripleStats& stats) {
  if (!(stats.n > 0.0)) throw untrained_error("collocation statistics have no triple observations");
}

}  // namespace detail

/// Independence expectation N·P1(h1)·P2(r)·P3(h2).
inline double expected_frequency(const TripleStats& stats, const Triple& t) {
  detail::require_trained(stats);
  const double n = stats.n;
  return n * (TripleStats::count(stats.m1, t.h1) / n) * (TripleStats::count(stats.m2, t.r) / n) *
         (TripleStats::count(stats.m3, t.h2) / n);
}

/// ln(A / (P1(h1) P2(r) P3(h2))) with A estimated from the smoothed joint count.
inline double mutual_information(const TripleStats& stats, const Triple& t, double smoothing = 0.5,
                                 double default_value = 0.0) {
  detail::require_trained(stats);
  const double n = stats.n;
  const double p1 = TripleStats::count(stats.m1, t.h1) / n;
  const double p2 = TripleStats::count(stats.m2, t.r) / n;
  const double p3 = TripleStats::count(stats.m3, t.h2) / n;
  const double a = (stats.joint_count(t) + smoothing) / n;
  if (p1 <= 0.0 || p2 <= 0.0 || p3 <= 0.0 || a <= 0.0) return default_value;
  return std::log(a / (p1 * p2 * p3));
}

/// |F-E|(F-E)/E: signed chi-squared cell value.
inline double chi_squared_signed(const TripleStats& stats, const Triple& t, double smoothing = 0.5,
                                 double default_value = 0.0) {
  const double e = expected_frequency(stats, t);
  if (!(e > 0.0)) return default_value;
  const double d = stats.joint_count(t) + smoothing - e;
  return std::abs(d) * d / e;
}

/// (F-E)/sqrt(E).
inline double chi_signed(const TripleStats& stats, const Triple& t, double smoothing = 0.5,
                         double default_value = 0.0) {
  const double e = expected_frequency(stats, t);
  if (!(e > 0.0)) return default_value;
  return (stats.joint_count(t) + smoothing - e) / std::sqrt(e);
}

/// Signed -2 ln(lambda) for a 2x2 contingency table: rows are h1 / not h1,
/// columns h2 / not h2. Positive when k11 exceeds its independence expectation.
/// Degenerate tables (an empty row or column) give 0.
inline double signed_log_likelihood_ratio(double k11, double k12, double k21, double k22) {
  const auto clamp0 = [](double x) { return x < 0.0 ? 0.0 : x; };
  k11 = clamp0(k11);
  k12 = clamp0(k12);
  k21 = clamp0(k21);
  k22 = clamp0(k22);
  const double row1 = k11 + k12;
  const double row2 = k21 + k22;
  const double col1 = k11 + k21;
  const double col2 = k12 + k22;
  const double n = row1 + row2;
  if (row1 <= 0.0 || row2 <= 0.0 || col1 <= 0.0 || col2 <= 0.0) return 0.0;
  const auto term = [n](double k, double r, double c) {
    return k > 0.0 ? k * std::log(k * n / (r * c)) : 0.0;
  };
  double g2 = 2.0 * (term(k11, row1, col1) + term(k12, row1, col2) + term(k21, row2, col1) +
                     term(k22, row2, col2));
  if (g2 < 0.0) g2 = 0.0;  // rounding near independence
  return k11 * n >= row1 * col1 ? g2 : -g2;
}

/// Likelihood ratio for H1 and H2 being independent given R, over the
/// best-analysis triples that share t's relation.
inline double likelihood_ratio(const TripleStats& stats, const Triple& t) {
  detail::require_trained(stats);
  const double n_r = TripleStats::count(stats.m2, t.r);
  if (!(n_r > 0.0)) return 0.0;
  const double k11 = stats.joint_count(t);
  const double row1 = TripleStats::count(stats.h1_r, std::pair{t.h1, t.r});
  const double col1 = TripleStats::count(stats.r_h2, std::pair{t.r, t.h2});
  return signed_log_likelihood_ratio(k11, row1 - k11, col1 - k11, n_r - row1 - col1 + k11);
}

// ---------------------------------------------------------------------------
// Mean distance: average relativised training score of all analyses bearing a triple

struct MeanDistanceTable {
  std::map<Triple, std::pair<double, std::size_t>> sums;  // sum of g, analyses counted
  double corpus_mean = 0.0;                               // mean g over all analyses

  std::optional<double> value(const Triple& t) const {
    const auto it = sums.find(t);
    if (it == sums.end() || it->second.second == 0) return std::nullopt;
    return it->second.first / static_cast<double>(it->second.second);
  }
};

inline MeanDistanceTable mean_distance_table(const Corpus& corpus, const ScoreWeights& w = {}) {
  MeanDistanceTable table;
  double total = 0.0;
  std::size_t analyses = 0;
  for (const auto& s : corpus.sentences) {
    const auto rel = relativize(s, {}, w);
    for (std::size_t i = 0; i < s.analyses.size(); ++i) {
      total += rel.g[i];
      ++analyses;
      std::set<Triple> present(s.analyses[i].triples.begin(), s.analyses[i].triples.end());
      for (const auto& t : present) {
        auto& [sum, count] = table.sums[t];
        sum += rel.g[i];
        ++count;
      }
    }
  }
  if (analyses > 0) table.corpus_mean = total / static_cast<double>(analyses);
  return table;
}

/// Mean relativised training score over every analysis containing t (each
/// analysis counted once). Unseen triples get the corpus-wide mean of g.
inline double mean_distance(const Corpus& corpus, const ScoreWeights& w, const Triple& t) {
  const auto table = mean_distance_table(corpus, w);
  return table.value(t).value_or(table.corpus_mean);
}

// ---------------------------------------------------------------------------
// Trained per-triple score tables

struct CollocModel {
  Statistic statistic = Statistic::mean_distance;
  std::map<Triple, double> table;
  double default_value = 0.0;
  double smoothing = 0.0;

  double lookup(const Triple& t) const {
    const auto it = table.find(t);
    return it == table.end() ? default_value : it->second;
  }
  bool operator==(const CollocModel&) const = default;
};

/// Builds the score table for one statistic from a training corpus whose class
/// map has already been applied. The table covers every triple observed in any
/// analysis of the corpus.
inline CollocModel train_colloc_model(const Corpus& corpus, Statistic statistic,
                                      const ScoreWeights& w = {}, const CollocOptions& options = {}) {
  CollocModel model;
  model.statistic = statistic;
  model.smoothing = options.smoothing.value_or(default_smoothing(statistic));
  model.default_value = options.default_value;

  if (statistic == Statistic::mean_distance) {
    const auto md = mean_distance_table(corpus, w);
    model.smoothing = 0.0;
    model.default_value = options.mean_distance_default.value_or(md.corpus_mean);
    for (const auto& [t, sc] : md.sums)
      model.table.emplace(t, sc.first / static_cast<double>(sc.second));
    return model;
  }

  const auto stats = extract_triple_counts(corpus, w, options.ties);
  detail::require_trained(stats);
  std::set<Triple> observed;
  for (const auto& s : corpus.sentences)
    for (const auto& a : s.analyses) observed.insert(a.triples.begin(), a.triples.end());
  for (const auto& t : observed) {
    double v = 0.0;
    switch (statistic) {
      case Statistic::mutual_info: v = mutual_information(stats, t, model.smoothing, model.default_value); break;
      case Statistic::chi_squared: v = chi_squared_signed(stats, t, model.smoothing, model.default_value); break;
      case Statistic::chi: v = chi_signed(stats, t, model.smoothing, model.default_value); break;
      case Statistic::likelihood_ratio: v = likelihood_ratio(stats, t); break;
      case Statistic::mean_distance: break;
    }
    model.table.emplace(t, v);
  }
  return model;
}

/// Mean table value over the analysis's triple tokens, times the sentence's
/// word count. Analyses without triples score 0.
inline double score_analysis(const CollocModel& model, const Analysis& a, std::size_t word_count) {
  if (a.triples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : a.triples) sum += model.lookup(t);
  return sum / static_cast<double>(a.triples.size()) * static_cast<double>(word_count);
}

// ---------------------------------------------------------------------------
// Syntactic rule probabilities

struct RuleModel {
  std::map<std::string, double, std::less<>> probs;
  double floor = 0.0;

  double prob(std::string_view rule) const {
    const auto it = probs.find(rule);
    return it == probs.end() ? floor : it->second;
  }
  bool operator==(const RuleModel&) const = default;
};

/// P(R) = (occurrences of R in exactly-correct analyses + 0.5) /
///        (all rule occurrences in those analyses + 0.5·|vocabulary|),
/// the vocabulary being every rule seen anywhere in the corpus.
inline RuleModel estimate_rule_probs(const Corpus& corpus) {
  std::map<std::string, double, std::less<>> counts;
  std::set<std::string, std::less<>> vocabulary;
  double total = 0.0;
  bool any_correct = false;
  for (const auto& s : corpus.sentences) {
    for (const auto& a : s.analyses) {
      vocabulary.insert(a.rules.begin(), a.rules.end());
      if (!exact_match(a, s.gold)) continue;
      any_correct = true;
      for (const auto& r : a.rules) {
        counts[r] += 1.0;
        total += 1.0;
      }
    }
  }
  if (!any_correct) throw untrained_error("rule model: no exactly-correct analyses in training data");
  const double denom = total + 0.5 * static_cast<double>(vocabulary.size());
  RuleModel model;
  model.floor = 0.5 / denom;
  for (const auto& r : vocabulary) model.probs.emplace(r, (TripleStats::count(counts, r) + 0.5) / denom);
  return model;
}

/// Sum of log probabilities of the analysis's rules (with multiplicity).
inline double syntactic_rule_cost(const RuleModel& model, const Analysis& a) {
  double cost = 0.0;
  for (const auto& r : a.rules) cost += std::log(model.prob(r));
  return cost;
}

// ---------------------------------------------------------------------------
// Model files

inline nlohmann::json to_json(const CollocModel& m) {
  nlohmann::json j;
  j["statistic"] = std::string(to_string(m.statistic));
  j["default_value"] = m.default_value;
  j["smoothing"] = m.smoothing;
  j["table"] = nlohmann::json::array();
  for (const auto& [t, v] : m.table) j["table"].push_back({t.h1, t.r, t.h2, v});
  return j;
}

inline CollocModel colloc_model_from_json(const nlohmann::json& j) {
  CollocModel m;
  const auto stat = parse_statistic(j.at("statistic").get<std::string>());
  if (!stat) throw data_error("unknown collocation statistic in model file");
  m.statistic = *stat;
  m.default_value = j.at("default_value").get<double>();
  m.smoothing = j.at("smoothing").get<double>();
  for (const auto& row : j.at("table")) {
    if (!row.is_array() || row.size() != 4) throw data_error("collocation table rows need 4 fields");
    m.table.emplace(Triple{row[0].get<std::string>(), row[1].get<std::string>(), row[2].get<std::string>()},
                    row[3].get<double>());
  }
  return m;
}

inline nlohmann::json to_json(const RuleModel& m) {
  nlohmann::json j;
  j["floor"] = m.floor;
  j["probs"] = nlohmann::json::object();
  for (const auto& [r, p] : m.probs) j["probs"][r] = p;
  return j;
}

inline RuleModel rule_model_from_json(const nlohmann::json& j) {
  RuleModel m;
  m.floor = j.at("floor").get<double>();
  for (const auto& [r, p] : j.at("probs").items()) m.probs.emplace(r, p.get<double>());
  return m;
}

}  // namespace prefscale

#endif  // PREFSCALE_COLLOC_HPP
