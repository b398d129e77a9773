#ifndef PREFSCALE_TESTS_ORACLES_HPP
#define PREFSCALE_TESTS_ORACLES_HPP

// Independent reference implementations for tests. They share no code with the
// library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prefscale/corpus.hpp"

namespace oracle {

using prefscale::Analysis;
using prefscale::Corpus;
using prefscale::Sentence;
using prefscale::Triple;

// ---------------------------------------------------------------------------
// Least squares by grid search and zooming refinement

inline double sse(const std::vector<std::vector<double>>& z, const std::vector<double>& g,
                  const std::vector<double>& c) {
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double r = g[i];
    for (std::size_t j = 0; j < c.size(); ++j) r -= c[j] * z[i][j];
    total += r * r;
  }
  return total;
}

/// Minimises SSE over c by evaluating a (2k+1)^m grid around the incumbent and
/// shrinking it. Works for small m on bounded, well-conditioned problems.
inline std::vector<double> grid_minimise(const std::vector<std::vector<double>>& z, const std::vector<double>& g,
                                         std::size_t m, double radius = 16.0, int rounds = 80, int k = 4) {
  std::vector<double> best(m, 0.0);
  double best_sse = sse(z, g, best);
  double step = radius / k;
  for (int round = 0; round < rounds; ++round) {
    const auto centre = best;
    std::vector<int> idx(m, -k);
    while (true) {
      std::vector<double> c(m);
      for (std::size_t j = 0; j < m; ++j) c[j] = centre[j] + step * idx[j];
      const double v = sse(z, g, c);
      if (v < best_sse) {
        best_sse = v;
        best = c;
      }
      std::size_t d = 0;
      while (d < m && ++idx[d] > k) idx[d++] = -k;
      if (d == m) break;
    }
    // Recentre without shrinking when the optimum sits on the grid boundary.
    bool on_edge = false;
    for (std::size_t j = 0; j < m; ++j)
      if (std::abs(best[j] - centre[j]) >= step * k - 1e-15) on_edge = true;
    if (!on_edge) step *= 0.5;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Training scores recomputed with std::set

inline std::set<std::pair<int, int>> spans_of(const std::vector<prefscale::Constituent>& cs) {
  std::set<std::pair<int, int>> out;
  for (const auto& c : cs) out.insert({c.start, c.end});
  return out;
}

inline double training_score(const Analysis& a, const Sentence& s, double a1 = 1, double a2 = 10, double a3 = 0) {
  const auto q = spans_of(a.spans);
  const auto t = spans_of(s.gold.constituents);
  double common = 0, spurious = 0, missing = 0;
  for (const auto& x : q) (t.count(x) ? common : spurious) += 1;
  for (const auto& x : t) missing += q.count(x) ? 0 : 1;
  return a1 * common - a2 * spurious - a3 * missing;
}

// ---------------------------------------------------------------------------
// Collocation statistics from a flat weighted list of best-analysis triple tokens

struct Token {
  Triple t;
  double w;
};

inline std::vector<Token> best_tokens(const Corpus& corpus, bool fractional = true) {
  std::vector<Token> out;
  for (const auto& s : corpus.sentences) {
    double top = -1e300;
    for (const auto& a : s.analyses) top = std::max(top, training_score(a, s));
    std::vector<const Analysis*> best;
    for (const auto& a : s.analyses)
      if (training_score(a, s) == top) best.push_back(&a);
    for (const auto* a : best)
      for (const auto& t : a->triples)
        out.push_back({t, fractional ? 1.0 / static_cast<double>(best.size()) : 1.0});
  }
  return out;
}

template <class Pred>
double weight_where(const std::vector<Token>& tokens, Pred pred) {
  double total = 0.0;
  for (const auto& tok : tokens)
    if (pred(tok.t)) total += tok.w;
  return total;
}

inline double mutual_info(const std::vector<Token>& tokens, const Triple& t, double smoothing) {
  const double n = weight_where(tokens, [](const Triple&) { return true; });
  const double f = weight_where(tokens, [&](const Triple& x) { return x == t; });
  const double p1 = weight_where(tokens, [&](const Triple& x) { return x.h1 == t.h1; }) / n;
  const double p2 = weight_where(tokens, [&](const Triple& x) { return x.r == t.r; }) / n;
  const double p3 = weight_where(tokens, [&](const Triple& x) { return x.h2 == t.h2; }) / n;
  if (p1 == 0 || p2 == 0 || p3 == 0) return 0.0;
  return std::log((f + smoothing) / n) - std::log(p1) - std::log(p2) - std::log(p3);
}

inline std::pair<double, double> observed_expected(const std::vector<Token>& tokens, const Triple& t) {
  const double n = weight_where(tokens, [](const Triple&) { return true; });
  const double f = weight_where(tokens, [&](const Triple& x) { return x == t; });
  const double c1 = weight_where(tokens, [&](const Triple& x) { return x.h1 == t.h1; });
  const double c2 = weight_where(tokens, [&](const Triple& x) { return x.r == t.r; });
  const double c3 = weight_where(tokens, [&](const Triple& x) { return x.h2 == t.h2; });
  return {f, c1 * c2 * c3 / (n * n)};
}

inline double chi_squared(const std::vector<Token>& tokens, const Triple& t, double smoothing) {
  auto [f, e] = observed_expected(tokens, t);
  if (e == 0) return 0.0;
  f += smoothing;
  return (f >= e ? 1.0 : -1.0) * (f - e) * (f - e) / e;
}

inline double chi(const std::vector<Token>& tokens, const Triple& t, double smoothing) {
  auto [f, e] = observed_expected(tokens, t);
  if (e == 0) return 0.0;
  return (f + smoothing - e) / std::sqrt(e);
}

/// Binomial log likelihood k ln p + (n-k) ln(1-p), with 0 ln 0 = 0.
inline double log_binomial(double k, double n, double p) {
  double v = 0.0;
  if (k > 0) v += k * std::log(p);
  if (n - k > 0) v += (n - k) * std::log(1.0 - p);
  return v;
}

/// -2 ln lambda comparing P(h2 | h1) with P(h2 | not h1) against one shared
/// rate, signed by whether the first rate is the larger. 0 when degenerate.
inline double binomial_g2(double k11, double k12, double k21, double k22) {
  const double n1 = k11 + k12;
  const double n2 = k21 + k22;
  if (n1 == 0 || n2 == 0 || k11 + k21 == 0 || k12 + k22 == 0) return 0.0;
  const double p1 = k11 / n1;
  const double p2 = k21 / n2;
  const double p = (k11 + k21) / (n1 + n2);
  const double g2 = 2.0 * (log_binomial(k11, n1, p1) + log_binomial(k21, n2, p2) - log_binomial(k11, n1, p) -
                           log_binomial(k21, n2, p));
  return p1 >= p2 ? std::max(0.0, g2) : -std::max(0.0, g2);
}

inline double likelihood_ratio(const std::vector<Token>& tokens, const Triple& t) {
  std::vector<Token> same_r;
  for (const auto& tok : tokens)
    if (tok.t.r == t.r) same_r.push_back(tok);
  const double k11 = weight_where(same_r, [&](const Triple& x) { return x.h1 == t.h1 && x.h2 == t.h2; });
  const double k12 = weight_where(same_r, [&](const Triple& x) { return x.h1 == t.h1 && x.h2 != t.h2; });
  const double k21 = weight_where(same_r, [&](const Triple& x) { return x.h1 != t.h1 && x.h2 == t.h2; });
  const double k22 = weight_where(same_r, [&](const Triple& x) { return x.h1 != t.h1 && x.h2 != t.h2; });
  return binomial_g2(k11, k12, k21, k22);
}

/// Mean of (training score minus mean best training score) over analyses containing t.
inline double mean_distance(const Corpus& corpus, const Triple& t) {
  double sum = 0.0;
  double count = 0.0;
  for (const auto& s : corpus.sentences) {
    std::vector<double> scores;
    for (const auto& a : s.analyses) scores.push_back(training_score(a, s));
    const double top = *std::max_element(scores.begin(), scores.end());
    for (std::size_t i = 0; i < s.analyses.size(); ++i) {
      const auto& tr = s.analyses[i].triples;
      if (std::find(tr.begin(), tr.end(), t) == tr.end()) continue;
      sum += scores[i] - top;
      count += 1.0;
    }
  }
  return sum / count;
}

}  // namespace oracle

#endif  // PREFSCALE_TESTS_ORACLES_HPP
