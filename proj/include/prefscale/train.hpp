#ifndef PREFSCALE_TRAIN_HPP
#define PREFSCALE_TRAIN_HPP

// Scaling factors for a linear combination of preference functions:
// least squares on relativised scores, coordinate-wise hill climbing on the
// number of correctly disambiguated sentences, and a normalized baseline.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "prefscale/corpus.hpp"
#include "prefscale/error.hpp"
#include "prefscale/goldscore.hpp"

namespace prefscale {

/// Named coefficients c_j, ordered like the function list they were trained on.
struct ScalingFactors {
  std::vector<std::string> names;
  std::vector<double> values;

  static ScalingFactors zeros(std::vector<std::string> names) {
    ScalingFactors f;
    f.values.assign(names.size(), 0.0);
    f.names = std::move(names);
    return f;
  }

  std::size_t size() const { return values.size(); }

  std::optional<double> find(std::string_view name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
      if (names[j] == name) return values[j];
    return std::nullopt;
  }

  bool operator==(const ScalingFactors&) const = default;
};

/// strict: a sentence is correct only if every top-scoring analysis is correct.
/// lenient: at least one top-scoring analysis is correct.
enum class TieMode { strict, lenient };

// ---------------------------------------------------------------------------
// Training matrix

struct TrainingRow {
  std::string sentence_id;
  std::string analysis_id;
  double g = 0.0;
  std::vector<double> z;
};

struct TrainingMatrix {
  std::vector<std::string> functions;
  std::vector<TrainingRow> rows;
};

inline TrainingMatrix assemble_training_matrix(const Corpus& corpus,
                                               std::span<const std::string> functions,
                                               const ScoreWeights& w = {}) {
  TrainingMatrix m;
  m.functions.assign(functions.begin(), functions.end());
  for (const auto& s : corpus.sentences) {
    if (s.analyses.empty()) throw data_error("sentence '" + s.id + "' has no analyses");
    auto rel = relativize(s, functions, w);
    for (std::size_t i = 0; i < s.analyses.size(); ++i)
      m.rows.push_back({s.id, s.analyses[i].id, rel.g[i], std::move(rel.z[i])});
  }
  return m;
}

inline TrainingMatrix assemble_training_matrix(const Corpus& corpus, const ScoreWeights& w = {}) {
  return assemble_training_matrix(corpus, corpus.function_names, w);
}

/// Σ_i (g_i - Σ_j c_j z_ij)^2
inline double sum_squared_error(const TrainingMatrix& m, std::span<const double> c) {
  double total = 0.0;
  for (const auto& row : m.rows) {
    double pred = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) pred += c[j] * row.z[j];
    const double r = row.g - pred;
    total += r * r;
  }
  return total;
}

/// d SSE / d c_k = -2 Σ_i z_ik (g_i - Σ_j c_j z_ij)
inline std::vector<double> sse_gradient(const TrainingMatrix& m, std::span<const double> c) {
  std::vector<double> grad(c.size(), 0.0);
  for (const auto& row : m.rows) {
    double pred = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) pred += c[j] * row.z[j];
    const double r = row.g - pred;
    for (std::size_t k = 0; k < c.size(); ++k) grad[k] += -2.0 * row.z[k] * r;
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Least squares

namespace detail {

/// Gaussian elimination with partial pivoting on a dense row-major system.
/// Returns nullopt when a pivot falls below tolerance.
inline std::optional<std::vector<double>> gauss_solve(std::vector<double> a, std::vector<double> b,
                                                      double pivot_tolerance) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (!(std::abs(a[pivot * n + col]) > pivot_tolerance)) return std::nullopt;
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i * n + k] * x[k];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

}  // namespace detail

inline constexpr double kPivotTolerance = 1e-10;
inline constexpr double kRidgeScale = 1e-8;

/// Minimizes Σ_i (g_i - Σ_j c_j z_ij)^2 by solving the normal equations.
/// A near-singular normal matrix is regularized with a small ridge term.
inline ScalingFactors least_squares(const TrainingMatrix& m, std::vector<std::string>* warnings = nullptr) {
  const std::size_t k = m.functions.size();
  auto factors = ScalingFactors::zeros(m.functions);
  if (k == 0) return factors;

  std::vector<double> normal(k * k, 0.0);
  std::vector<double> rhs(k, 0.0);
  for (const auto& row : m.rows) {
    for (std::size_t a = 0; a < k; ++a) {
      rhs[a] += row.z[a] * row.g;
      for (std::size_t b = 0; b < k; ++b) normal[a * k + b] += row.z[a] * row.z[b];
    }
  }
  double trace = 0.0;
  double max_diag = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    trace += normal[a * k + a];
    max_diag = std::max(max_diag, normal[a * k + a]);
  }
  if (max_diag == 0.0) {
    if (warnings) warnings->push_back("least squares: all relativised feature scores are zero; factors set to 0");
    return factors;
  }

  // Pivot tolerance is relative to the largest diagonal entry so that it does
  // not depend on the units of the preference functions.
  auto solution = detail::gauss_solve(normal, rhs, kPivotTolerance * max_diag);
  if (!solution) {
    const double ridge = kRidgeScale * trace / static_cast<double>(k);
    if (warnings)
      warnings->push_back("least squares: near-singular normal equations, ridge " + std::to_string(ridge));
    for (std::size_t a = 0; a < k; ++a) normal[a * k + a] += ridge;
    solution = detail::gauss_solve(normal, rhs, 0.0);
    if (!solution) solution.emplace(k, 0.0);
  }
  factors.values = std::move(*solution);
  return factors;
}

/// |c_j| = 1/stddev of the relativised scores of function j; the sign follows
/// the correlation with the relativised training score (non-negative -> +).
inline ScalingFactors normalized_factors(const TrainingMatrix& m, std::vector<std::string>* warnings = nullptr) {
  const std::size_t k = m.functions.size();
  auto factors = ScalingFactors::zeros(m.functions);
  const double n = static_cast<double>(m.rows.size());
  if (m.rows.empty()) return factors;
  double g_mean = 0.0;
  for (const auto& row : m.rows) g_mean += row.g;
  g_mean /= n;
  for (std::size_t j = 0; j < k; ++j) {
    double z_mean = 0.0;
    for (const auto& row : m.rows) z_mean += row.z[j];
    z_mean /= n;
    double var = 0.0;
    double cov = 0.0;
    for (const auto& row : m.rows) {
      const double dz = row.z[j] - z_mean;
      var += dz * dz;
      cov += dz * (row.g - g_mean);
    }
    var /= n;
    cov /= n;
    if (!(var > 0.0)) {
      if (warnings) warnings->push_back("normalized factors: '" + m.functions[j] + "' has zero variance; factor set to 0");
      continue;
    }
    factors.values[j] = (cov < 0.0 ? -1.0 : 1.0) / std::sqrt(var);
  }
  return factors;
}

// ---------------------------------------------------------------------------
// Dense scoring view

/// Raw feature rows and correctness flags for one sentence.
struct DenseSentence {
  std::string id;
  std::size_t n = 0;          // analyses
  std::size_t m = 0;          // functions
  std::vector<double> s;      // n x m row-major raw scores
  std::vector<char> correct;  // exact match per analysis

  double score(std::size_t a, std::span<const double> c) const {
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) total += c[j] * s[a * m + j];
    return total;
  }
};

inline DenseSentence densify(const Sentence& sentence, std::span<const std::string> functions) {
  DenseSentence d;
  d.id = sentence.id;
  d.n = sentence.analyses.size();
  d.m = functions.size();
  d.s.resize(d.n * d.m);
  d.correct.resize(d.n);
  for (std::size_t a = 0; a < d.n; ++a) {
    const auto& an = sentence.analyses[a];
    for (std::size_t j = 0; j < d.m; ++j) d.s[a * d.m + j] = an.feature(functions[j]);
    d.correct[a] = exact_match(an, sentence.gold) ? 1 : 0;
  }
  return d;
}

inline std::vector<DenseSentence> densify(const Corpus& corpus, std::span<const std::string> functions) {
  std::vector<DenseSentence> out;
  out.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) out.push_back(densify(s, functions));
  return out;
}

/// Direct rescoring: is the sentence disambiguated correctly under c?
inline bool sentence_correct(const DenseSentence& d, std::span<const double> c, TieMode mode = TieMode::strict) {
  if (d.n == 0) return false;
  std::vector<double> scores(d.n);
  for (std::size_t a = 0; a < d.n; ++a) scores[a] = d.score(a, c);
  const double top = *std::max_element(scores.begin(), scores.end());
  bool any_correct = false;
  bool all_correct = true;
  for (std::size_t a = 0; a < d.n; ++a) {
    if (scores[a] != top) continue;
    any_correct = any_correct || d.correct[a];
    all_correct = all_correct && d.correct[a];
  }
  return mode == TieMode::strict ? all_correct : any_correct;
}

inline std::size_t correct_count(const std::vector<DenseSentence>& dense, std::span<const double> c,
                                 TieMode mode = TieMode::strict) {
  std::size_t count = 0;
  for (const auto& d : dense) count += sentence_correct(d, c, mode) ? 1 : 0;
  return count;
}

/// Number of sentences whose top-scoring analyses (under Σ_j c_j s_ij on raw
/// features) are exactly correct.
inline std::size_t correct_count(const Corpus& corpus, const ScalingFactors& c, TieMode mode = TieMode::strict) {
  return correct_count(densify(corpus, c.names), c.values, mode);
}

// ---------------------------------------------------------------------------
// Feasible intervals

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Interval {
  double lower = -kInfinity;
  double upper = kInfinity;
  bool lower_closed = false;
  bool upper_closed = false;

  bool contains(double x) const {
    const bool above = lower_closed ? x >= lower : x > lower;
    const bool below = upper_closed ? x <= upper : x < upper;
    return above && below;
  }
  bool operator==(const Interval&) const = default;
};

/// Sorted, disjoint union of intervals.
struct IntervalSet {
  std::vector<Interval> intervals;

  static IntervalSet everything() { return {{Interval{}}}; }
  bool empty() const { return intervals.empty(); }
  bool contains(double x) const {
    return std::any_of(intervals.begin(), intervals.end(), [x](const Interval& i) { return i.contains(x); });
  }
  bool operator==(const IntervalSet&) const = default;
};

namespace detail {

/// Test point strictly below/above an extreme breakpoint.
inline double beyond(double edge, double direction) {
  return edge + direction * std::max(1.0, std::abs(edge));
}

/// Lines score_a(x) = base_a + slope_a·x for every analysis when only c_j varies.
struct Pencil {
  std::vector<double> base;
  std::vector<double> slope;
  const std::vector<char>* correct = nullptr;

  // Top-scoring correct minus top-scoring incorrect at x.
  std::pair<double, double> envelopes(double x) const {
    double best_c = -kInfinity;
    double best_i = -kInfinity;
    for (std::size_t a = 0; a < base.size(); ++a) {
      const double v = base[a] + slope[a] * x;
      if ((*correct)[a])
        best_c = std::max(best_c, v);
      else
        best_i = std::max(best_i, v);
    }
    return {best_c, best_i};
  }

  bool wins(double x, TieMode mode) const {
    const auto [c, i] = envelopes(x);
    return mode == TieMode::strict ? c > i : c >= i;
  }
};

inline Pencil pencil(const DenseSentence& d, std::span<const double> c, std::size_t j) {
  Pencil p;
  p.base.resize(d.n);
  p.slope.resize(d.n);
  p.correct = &d.correct;
  for (std::size_t a = 0; a < d.n; ++a) {
    double b = 0.0;
    for (std::size_t k = 0; k < d.m; ++k)
      if (k != j) b += c[k] * d.s[a * d.m + k];
    p.base[a] = b;
    p.slope[a] = d.s[a * d.m + j];
  }
  return p;
}

}  // namespace detail

/// Values of c_j (other factors fixed) for which the sentence is disambiguated
/// correctly. Under the strict tie rule the set is open; under the lenient rule
/// it is closed.
inline IntervalSet feasible_intervals(const DenseSentence& d, std::span<const double> c, std::size_t j,
                                      TieMode mode = TieMode::strict) {
  const bool any_correct = std::any_of(d.correct.begin(), d.correct.end(), [](char x) { return x != 0; });
  const bool all_correct = std::all_of(d.correct.begin(), d.correct.end(), [](char x) { return x != 0; });
  if (d.n == 0 || !any_correct) return {};
  if (all_correct) return IntervalSet::everything();

  const auto lines = detail::pencil(d, c, j);
  // The winner can only change where a correct line crosses an incorrect one.
  std::vector<double> breaks;
  for (std::size_t a = 0; a < d.n; ++a) {
    if (!d.correct[a]) continue;
    for (std::size_t b = 0; b < d.n; ++b) {
      if (d.correct[b] || lines.slope[a] == lines.slope[b]) continue;
      const double x = (lines.base[b] - lines.base[a]) / (lines.slope[a] - lines.slope[b]);
      if (std::isfinite(x)) breaks.push_back(x);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.empty()) return lines.wins(0.0, mode) ? IntervalSet::everything() : IntervalSet{};

  // Slots alternate region, point, region, ..., region: slot 2k+1 is breaks[k].
  const std::size_t k_count = breaks.size();
  std::vector<char> in(2 * k_count + 1, 0);
  for (std::size_t r = 0; r <= k_count; ++r) {
    double x;
    if (r == 0) {
      x = detail::beyond(breaks.front(), -1.0);
    } else if (r == k_count) {
      x = detail::beyond(breaks.back(), 1.0);
    } else {
      x = breaks[r - 1] + (breaks[r] - breaks[r - 1]) / 2.0;
      if (!(x > breaks[r - 1] && x < breaks[r])) continue;  // no representable interior
    }
    in[2 * r] = lines.wins(x, mode) ? 1 : 0;
  }
  // A breakpoint where the crossing lines are not on top keeps its neighbours' status.
  for (std::size_t k = 0; k < k_count; ++k) {
    const std::size_t slot = 2 * k + 1;
    const auto [cv, iv] = lines.envelopes(breaks[k]);
    const double tol = 1e-12 * std::max({1.0, std::abs(cv), std::abs(iv)});
    if (mode == TieMode::lenient)
      in[slot] = in[slot - 1] || in[slot + 1] || cv >= iv - tol ? 1 : 0;
    else
      in[slot] = in[slot - 1] && in[slot + 1] && cv > iv + tol ? 1 : 0;
  }

  IntervalSet out;
  const auto slot_lower = [&](std::size_t slot, Interval& iv) {
    if (slot == 0) {
      iv.lower = -kInfinity;
      iv.lower_closed = false;
    } else if (slot % 2 == 1) {
      iv.lower = breaks[slot / 2];
      iv.lower_closed = true;
    } else {
      iv.lower = breaks[slot / 2 - 1];
      iv.lower_closed = false;
    }
  };
  const auto slot_upper = [&](std::size_t slot, Interval& iv) {
    if (slot == 2 * k_count) {
      iv.upper = kInfinity;
      iv.upper_closed = false;
    } else if (slot % 2 == 1) {
      iv.upper = breaks[slot / 2];
      iv.upper_closed = true;
    } else {
      iv.upper = breaks[slot / 2];
      iv.upper_closed = false;
    }
  };
  for (std::size_t slot = 0; slot < in.size();) {
    if (!in[slot]) {
      ++slot;
      continue;
    }
    std::size_t end = slot;
    while (end + 1 < in.size() && in[end + 1]) ++end;
    Interval iv;
    slot_lower(slot, iv);
    slot_upper(end, iv);
    out.intervals.push_back(iv);
    slot = end + 1;
  }
  return out;
}

inline IntervalSet feasible_intervals(const Sentence& sentence, const ScalingFactors& c, std::size_t j,
                                      TieMode mode = TieMode::strict) {
  return feasible_intervals(densify(sentence, c.names), c.values, j, mode);
}

// ---------------------------------------------------------------------------
// Hill climbing

struct HillClimbOptions {
  TieMode tie_mode = TieMode::strict;
  /// 0 means 50 × number of factors.
  std::size_t max_iterations = 0;
};

struct HillClimbResult {
  ScalingFactors factors;
  /// correct_count before the first alteration and after each one.
  std::vector<std::size_t> counts;
  std::size_t iterations = 0;
};

struct Alteration {
  std::size_t count = 0;
  double value = 0.0;
};

/// Best single value for c_j given the per-sentence feasible sets, found by
/// overlaying every sentence's intervals. Ties prefer the smallest change from
/// the current value, then the smaller absolute value.
inline Alteration best_alteration(const std::vector<DenseSentence>& dense, std::span<const double> c,
                                  std::size_t j, TieMode mode, std::size_t current_count) {
  const double x0 = c[j];
  std::vector<IntervalSet> sets;
  sets.reserve(dense.size());
  std::vector<double> edges;
  std::size_t always = 0;
  for (const auto& d : dense) {
    auto set = feasible_intervals(d, c, j, mode);
    if (set.intervals.size() == 1 && set.intervals.front() == Interval{}) {
      ++always;
      continue;
    }
    for (const auto& iv : set.intervals) {
      if (std::isfinite(iv.lower)) edges.push_back(iv.lower);
      if (std::isfinite(iv.upper)) edges.push_back(iv.upper);
    }
    sets.push_back(std::move(set));
  }
  Alteration best{current_count, x0};
  if (edges.empty()) return best;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const std::size_t k_count = edges.size();
  const std::size_t slots = 2 * k_count + 1;
  std::vector<long long> diff(slots + 1, 0);
  const auto index_of = [&](double e) {
    return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), e) - edges.begin());
  };
  for (const auto& set : sets) {
    for (const auto& iv : set.intervals) {
      std::size_t lo = 0;
      std::size_t hi = slots - 1;
      if (std::isfinite(iv.lower)) lo = 2 * index_of(iv.lower) + (iv.lower_closed ? 1 : 2);
      if (std::isfinite(iv.upper)) hi = 2 * index_of(iv.upper) + (iv.upper_closed ? 1 : 0);
      if (lo > hi) continue;
      diff[lo] += 1;
      diff[hi + 1] -= 1;
    }
  }

  double best_change = 0.0;
  long long running = 0;
  for (std::size_t slot = 0; slot < slots; ++slot) {
    running += diff[slot];
    const std::size_t count = always + static_cast<std::size_t>(running);
    double value;
    if (slot % 2 == 1) {
      if (mode == TieMode::strict) continue;  // open sets never gain at a single point
      value = edges[slot / 2];
    } else {
      const std::size_t r = slot / 2;
      const double lo = r == 0 ? -kInfinity : edges[r - 1];
      const double hi = r == k_count ? kInfinity : edges[r];
      if (x0 > lo && x0 < hi) {
        value = x0;
      } else if (r == 0) {
        value = detail::beyond(edges.front(), -1.0);
      } else if (r == k_count) {
        value = detail::beyond(edges.back(), 1.0);
      } else {
        value = lo + (hi - lo) / 2.0;
        if (!(value > lo && value < hi)) continue;
      }
    }
    const double change = std::abs(value - x0);
    const bool better = count > best.count ||
                        (count == best.count && count > current_count &&
                         (change < best_change || (change == best_change && std::abs(value) < std::abs(best.value))));
    if (better) {
      best = {count, value};
      best_change = change;
    }
  }
  return best;
}

/// Repeatedly applies the single-factor alteration that most increases the
/// number of correctly disambiguated sentences, until none does.
inline HillClimbResult hill_climb(const std::vector<DenseSentence>& dense, ScalingFactors c0,
                                  const HillClimbOptions& options = {}) {
  HillClimbResult result;
  result.factors = std::move(c0);
  auto& c = result.factors.values;
  const std::size_t m = c.size();
  const std::size_t cap = options.max_iterations ? options.max_iterations : 50 * std::max<std::size_t>(m, 1);
  std::size_t current = correct_count(dense, c, options.tie_mode);
  result.counts.push_back(current);
  if (m == 0) return result;

  while (true) {
    std::size_t best_j = m;
    Alteration best{current, 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      const auto alt = best_alteration(dense, c, j, options.tie_mode, current);
      if (alt.count > best.count) {
        best = alt;
        best_j = j;
      }
    }
    if (best_j == m) break;
    if (result.iterations >= cap)
      throw convergence_error("hill climbing did not terminate within " + std::to_string(cap) + " iterations");
    const double previous = c[best_j];
    c[best_j] = best.value;
    const std::size_t rescored = correct_count(dense, c, options.tie_mode);
    if (rescored <= current) {
      // Overlay and direct rescoring disagree at a breakpoint; keep the old value.
      c[best_j] = previous;
      break;
    }
    current = rescored;
    result.counts.push_back(current);
    ++result.iterations;
  }
  return result;
}

inline HillClimbResult hill_climb(const Corpus& corpus, ScalingFactors c0, const HillClimbOptions& options = {}) {
  const auto dense = densify(corpus, c0.names);
  return hill_climb(dense, std::move(c0), options);
}

// ---------------------------------------------------------------------------
// Factors files: one "name<TAB>value" per line; '#' starts a comment.

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_factors(std::ostream& out, const ScalingFactors& f) {
  for (std::size_t j = 0; j < f.size(); ++j) out << f.names[j] << '\t' << format_double(f.values[j]) << '\n';
}

inline ScalingFactors read_factors(std::istream& in, std::string_view source = "<stream>") {
  ScalingFactors f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    std::string value;
    if (!(fields >> name)) continue;
    std::string extra;
    if (!(fields >> value) || (fields >> extra))
      throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": expected 'name value'");
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || !std::isfinite(v))
      throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": bad factor value '" + value + "'");
    if (f.find(name))
      throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": duplicate factor '" + name + "'");
    f.names.push_back(name);
    f.values.push_back(v);
  }
  return f;
}

inline ScalingFactors load_factors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open factors file " + path.string());
  return read_factors(in, path.string());
}

inline void save_factors(const std::filesystem::path& path, const ScalingFactors& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write factors file " + path.string());
  write_factors(out, f);
}

/// Reorders factors to the given function list; every function must be present.
inline ScalingFactors align_factors(const ScalingFactors& f, std::span<const std::string> functions) {
  ScalingFactors out;
  for (const auto& name : functions) {
    const auto v = f.find(name);
    if (!v) throw data_error("factors file has no value for function '" + name + "'");
    out.names.push_back(name);
    out.values.push_back(*v);
  }
  return out;
}

}  // namespace prefscale

#endif  // PREFSCALE_TRAIN_HPP
