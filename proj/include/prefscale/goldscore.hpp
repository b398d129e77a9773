#ifndef PREFSCALE_GOLDSCORE_HPP
#define PREFSCALE_GOLDSCORE_HPP

// Training score of an analysis against the gold skeletal tree, and
// relativisation of per-analysis quantities within a sentence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "prefscale/corpus.hpp"

namespace prefscale {

/// Coefficients of the training score a1|Q∩T| - a2|Q\T| - a3|T\Q|.
struct ScoreWeights {
  double a1 = 1.0;
  double a2 = 10.0;
  double a3 = 0.0;

  bool valid() const {
    return std::isfinite(a1) && std::isfinite(a2) && std::isfinite(a3) && a1 >= 0 && a2 >= 0 &&
           a3 >= 0;
  }
  bool operator==(const ScoreWeights&) const = default;
};

/// Overlap counts between analysis spans Q and gold spans T (labels ignored).
struct SpanAgreement {
  std::size_t common = 0;      // |Q ∩ T|
  std::size_t spurious = 0;    // |Q \ T|
  std::size_t missing = 0;     // |T \ Q|
};

inline SpanAgreement span_agreement(const std::vector<Span>& q, const std::vector<Span>& t) {
  SpanAgreement out;
  auto qi = q.begin();
  auto ti = t.begin();
  while (qi != q.end() && ti != t.end()) {
    if (*qi < *ti) {
      ++out.spurious;
      ++qi;
    } else if (*ti < *qi) {
      ++out.missing;
      ++ti;
    } else {
      ++out.common;
      ++qi;
      ++ti;
    }
  }
  out.spurious += static_cast<std::size_t>(q.end() - qi);
  out.missing += static_cast<std::size_t>(t.end() - ti);
  return out;
}

inline double training_score(const std::vector<Constituent>& q, const std::vector<Constituent>& t,
                             const ScoreWeights& w = {}) {
  const auto agreement = span_agreement(span_set(q), span_set(t));
  return w.a1 * static_cast<double>(agreement.common) -
         w.a2 * static_cast<double>(agreement.spurious) -
         w.a3 * static_cast<double>(agreement.missing);
}

inline double training_score(const Analysis& a, const SkeletalTree& gold, const ScoreWeights& w = {}) {
  return training_score(a.spans, gold.constituents, w);
}

/// Exact agreement of unlabeled span sets; the evaluation correctness criterion.
inline bool exact_match(const Analysis& a, const SkeletalTree& t) {
  return span_set(a.spans) == span_set(t.constituents);
}

/// Indices of analyses whose raw training score is maximal (exact ties).
inline std::vector<std::size_t> best_analysis_indices(const Sentence& s, const ScoreWeights& w = {}) {
  std::vector<double> scores;
  scores.reserve(s.analyses.size());
  for (const auto& a : s.analyses) scores.push_back(training_score(a, s.gold, w));
  std::vector<std::size_t> best;
  if (scores.empty()) return best;
  const double top = *std::max_element(scores.begin(), scores.end());
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] == top) best.push_back(i);
  return best;
}

inline std::vector<std::string> best_analyses(const Sentence& s, const ScoreWeights& w = {}) {
  std::vector<std::string> ids;
  for (auto i : best_analysis_indices(s, w)) ids.push_back(s.analyses[i].id);
  return ids;
}

struct RelativisedSentence {
  std::string sentence_id;
  std::vector<double> g;               // per analysis
  std::vector<std::vector<double>> z;  // per analysis, per function
  std::vector<std::string> best_set;
};

/// Subtracts, from every analysis's training score and feature values, the mean
/// of the same quantity over the analyses that best match the gold tree.
inline RelativisedSentence relativize(const Sentence& s, std::span<const std::string> functions,
                                      const ScoreWeights& w = {}) {
  RelativisedSentence out;
  out.sentence_id = s.id;
  const auto n = s.analyses.size();
  const auto m = functions.size();
  std::vector<double> raw_g(n);
  std::vector<std::vector<double>> raw_z(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    raw_g[i] = training_score(s.analyses[i], s.gold, w);
    for (std::size_t j = 0; j < m; ++j) raw_z[i][j] = s.analyses[i].feature(functions[j]);
  }
  const auto best = best_analysis_indices(s, w);
  if (best.empty()) return out;
  const double k = static_cast<double>(best.size());

  double g_ref = 0.0;
  std::vector<double> z_ref(m, 0.0);
  for (auto b : best) {
    g_ref += raw_g[b];
    for (std::size_t j = 0; j < m; ++j) z_ref[j] += raw_z[b][j];
  }
  g_ref /= k;
  for (auto& v : z_ref) v /= k;

  out.g.resize(n);
  out.z.assign(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    out.g[i] = raw_g[i] - g_ref;
    for (std::size_t j = 0; j < m; ++j) out.z[i][j] = raw_z[i][j] - z_ref[j];
  }
  for (auto b : best) out.best_set.push_back(s.analyses[b].id);
  return out;
}

}  // namespace prefscale

#endif  // PREFSCALE_GOLDSCORE_HPP
