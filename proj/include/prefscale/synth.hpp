#ifndef PREFSCALE_SYNTH_HPP
#define PREFSCALE_SYNTH_HPP

// Seeded synthetic corpora with planted structure: a known weight vector under
// which the correct analysis wins (up to noise), and triples / rules whose
// association with correctness is controlled by triple_signal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "prefscale/corpus.hpp"
#include "prefscale/error.hpp"
#include "prefscale/random.hpp"
#include "prefscale/train.hpp"

namespace prefscale {

struct SynthConfig {
  std::size_t n_sentences = 200;
  std::size_t min_analyses = 2;
  std::size_t max_analyses = 6;
  std::size_t n_functions = 20;
  /// Empty means "draw from the seed".
  std::vector<double> planted_weights;
  double noise_scale = 1.0;
  std::size_t n_heads = 60;
  std::size_t n_relations = 6;
  std::size_t n_rules = 30;
  double triple_signal = 0.8;
  std::size_t min_tokens = 4;
  std::size_t max_tokens = 15;
  std::uint64_t seed = 1;
};

inline void check_config(const SynthConfig& cfg) {
  const auto fail = [](const std::string& what) { throw data_error("synth config: " + what); };
  if (cfg.n_sentences < 1) fail("n_sentences must be at least 1");
  if (cfg.min_analyses < 2) fail("analyses per sentence must be at least 2");
  if (cfg.max_analyses < cfg.min_analyses) fail("max_analyses < min_analyses");
  if (cfg.n_functions < 1) fail("n_functions must be at least 1");
  if (!cfg.planted_weights.empty()) {
    if (cfg.planted_weights.size() != cfg.n_functions) fail("planted_weights must have n_functions entries");
    if (std::all_of(cfg.planted_weights.begin(), cfg.planted_weights.end(), [](double w) { return w == 0.0; }))
      fail("planted_weights must not all be zero");
  }
  if (!(cfg.noise_scale >= 0.0) || !std::isfinite(cfg.noise_scale)) fail("noise_scale must be finite and >= 0");
  if (!(cfg.triple_signal >= 0.0 && cfg.triple_signal <= 1.0)) fail("triple_signal must lie in [0, 1]");
  if (cfg.n_heads < 4) fail("n_heads must be at least 4");
  if (cfg.n_relations < 1) fail("n_relations must be at least 1");
  if (cfg.n_rules < 2) fail("n_rules must be at least 2");
  if (cfg.min_tokens < 2) fail("sentences need at least 2 tokens so a distractor can differ from gold");
  if (cfg.max_tokens < cfg.min_tokens) fail("max_tokens < min_tokens");
}

inline std::string padded(std::string_view prefix, std::size_t value, std::size_t width) {
  auto digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(prefix) + digits;
}

inline std::vector<std::string> synth_function_names(std::size_t n) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(n - 1).size());
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n; ++j) names.push_back(padded("f", j, width));
  return names;
}

/// The weight vector under which correct analyses win when noise_scale = 0.
inline ScalingFactors planted_factors(const SynthConfig& cfg) {
  check_config(cfg);
  ScalingFactors f;
  f.names = synth_function_names(cfg.n_functions);
  if (!cfg.planted_weights.empty()) {
    f.values = cfg.planted_weights;
    return f;
  }
  auto g = rng::substream(cfg.seed, 0xa11ce);
  f.values.resize(cfg.n_functions);
  for (auto& w : f.values) {
    if (rng::bernoulli(g, 0.25)) {
      w = 0.0;
    } else {
      w = rng::uniform(g, 0.2, 2.0) * (rng::bernoulli(g, 0.5) ? 1.0 : -1.0);
    }
  }
  if (std::all_of(f.values.begin(), f.values.end(), [](double w) { return w == 0.0; })) f.values[0] = 1.0;
  return f;
}

inline constexpr double kSharedNoise = 1.0;
inline constexpr double kCoarseRate = 0.15;

namespace detail {

struct Lexicon {
  std::vector<double> head_weights;                   // Zipfian popularity
  std::vector<std::vector<std::size_t>> preferred;    // [h1 * n_rel + r] -> preferred h2s
  std::vector<std::vector<std::size_t>> confusable;   // [h1 * n_rel + r] -> typical wrong h2s
  std::size_t n_heads = 0;
  std::size_t n_rel = 0;
  std::size_t n_rules = 0;

  bool is_preferred(std::size_t h1, std::size_t r, std::size_t h2) const {
    const auto& p = preferred[h1 * n_rel + r];
    return std::find(p.begin(), p.end(), h2) != p.end();
  }
};

inline Lexicon make_lexicon(const SynthConfig& cfg) {
  Lexicon lex;
  lex.n_heads = cfg.n_heads;
  lex.n_rel = cfg.n_relations;
  lex.n_rules = cfg.n_rules;
  for (std::size_t h = 0; h < cfg.n_heads; ++h) lex.head_weights.push_back(1.0 / static_cast<double>(h + 1));
  auto g = rng::substream(cfg.seed, 0x1e11c0);
  lex.preferred.resize(cfg.n_heads * cfg.n_relations);
  lex.confusable.resize(cfg.n_heads * cfg.n_relations);
  // Preferred dependents follow head popularity; confusable ones are uniform,
  // so they are mostly rare heads.
  for (std::size_t k = 0; k < lex.preferred.size(); ++k) {
    auto& p = lex.preferred[k];
    while (p.size() < 2) {
      const auto h = rng::weighted(g, lex.head_weights);
      if (std::find(p.begin(), p.end(), h) == p.end()) p.push_back(h);
    }
    auto& c = lex.confusable[k];
    while (c.size() < 2) {
      const auto h = static_cast<std::size_t>(rng::below(g, cfg.n_heads));
      if (std::find(p.begin(), p.end(), h) == p.end() && std::find(c.begin(), c.end(), h) == c.end()) c.push_back(h);
    }
  }
  return lex;
}

inline Triple make_triple(std::size_t h1, std::size_t r, std::size_t h2) {
  return {padded("h", h1, 3), padded("r", r, 1), padded("h", h2, 3)};
}

struct TripleIds {
  std::size_t h1, r, h2;
};

inline TripleIds good_triple(rng::engine& g, const Lexicon& lex) {
  const auto h1 = rng::weighted(g, lex.head_weights);
  const auto r = static_cast<std::size_t>(rng::below(g, lex.n_rel));
  const auto& p = lex.preferred[h1 * lex.n_rel + r];
  return {h1, r, p[rng::below(g, p.size())]};
}

/// A triple the planted lexicon disfavours: one of the head's confusable
/// dependents in place of the intended one.
inline TripleIds bad_triple(rng::engine& g, const Lexicon& lex, TripleIds base) {
  const auto& c = lex.confusable[base.h1 * lex.n_rel + base.r];
  return {base.h1, base.r, c[rng::below(g, c.size())]};
}

inline std::string good_rule(rng::engine& g, const Lexicon& lex) {
  const std::size_t half = lex.n_rules / 2;
  std::vector<double> w(half);
  for (std::size_t i = 0; i < half; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  return padded("rule", rng::weighted(g, w), 2);
}

inline std::string bad_rule(rng::engine& g, const Lexicon& lex) {
  const std::size_t half = lex.n_rules / 2;
  return padded("rule", half + rng::below(g, lex.n_rules - half), 2);
}

inline Category random_label(rng::engine& g) { return rng::bernoulli(g, 0.5) ? Category::A : Category::P; }

inline void random_tree(rng::engine& g, int lo, int hi, std::vector<Constituent>& out) {
  if (hi - lo < 2) return;
  const int k = static_cast<int>(rng::between(g, lo + 1, hi - 1));
  for (auto [a, b] : {std::pair{lo, k}, std::pair{k, hi}}) {
    const bool keep = (b - a >= 2) ? rng::bernoulli(g, 0.6) : rng::bernoulli(g, 0.25);
    if (keep) out.push_back({a, b, random_label(g)});
    random_tree(g, a, b, out);
  }
}

inline bool compatible(const std::vector<Constituent>& spans, int s, int e) {
  for (const auto& c : spans) {
    if (c.start == s && c.end == e) return false;
    const bool disjoint = c.end <= s || e <= c.start;
    const bool nested = (c.start <= s && e <= c.end) || (s <= c.start && c.end <= e);
    if (!disjoint && !nested) return false;
  }
  return true;
}

/// Gold spans edited one to three times; never equal to gold as a span set.
inline std::vector<Constituent> perturb(rng::engine& g, const std::vector<Constituent>& gold, int n_tokens) {
  const auto gold_set = span_set(gold);
  for (int attempt = 0; attempt < 50; ++attempt) {
    auto spans = gold;
    const auto edits = rng::between(g, 1, 3);
    for (long long e = 0; e < edits; ++e) {
      const auto op = rng::below(g, 3);
      std::vector<std::size_t> inner;
      for (std::size_t i = 0; i < spans.size(); ++i)
        if (!(spans[i].start == 0 && spans[i].end == n_tokens)) inner.push_back(i);
      if (op == 0 && !inner.empty()) {
        spans.erase(spans.begin() + static_cast<std::ptrdiff_t>(inner[rng::below(g, inner.size())]));
      } else if (op == 1 && !inner.empty()) {
        auto& c = spans[inner[rng::below(g, inner.size())]];
        const int delta = rng::bernoulli(g, 0.5) ? 1 : -1;
        if (rng::bernoulli(g, 0.5)) {
          const int s = std::clamp(c.start + delta, 0, c.end - 1);
          c.start = s;
        } else {
          const int en = std::clamp(c.end + delta, c.start + 1, n_tokens);
          c.end = en;
        }
      } else {
        for (int tries = 0; tries < 20; ++tries) {
          const int s = static_cast<int>(rng::between(g, 0, n_tokens - 1));
          const int en = static_cast<int>(rng::between(g, s + 1, n_tokens));
          if (en - s == n_tokens) continue;
          if (compatible(spans, s, en)) {
            spans.push_back({s, en, random_label(g)});
            break;
          }
        }
      }
    }
    // Shifts can create duplicates; keep the first occurrence of each span.
    std::vector<Constituent> unique;
    std::set<Span> seen;
    for (const auto& c : spans)
      if (seen.insert(c.span()).second) unique.push_back(c);
    if (span_set(unique) != gold_set) return unique;
  }
  auto spans = gold;
  const auto it = std::find_if(spans.begin(), spans.end(), [](const Constituent& c) { return c.start == 0 && c.end == 1; });
  if (it != spans.end())
    spans.erase(it);
  else
    spans.push_back({0, 1, Category::A});
  return spans;
}

inline bool is_coarse(std::size_t j) { return j % 5 == 0; }

inline double round6(double x) { return std::round(x * 1e6) / 1e6; }

}  // namespace detail

/// Deterministic synthetic corpus for the given configuration.
inline Corpus generate(const SynthConfig& cfg) {
  check_config(cfg);
  const auto planted = planted_factors(cfg);
  const auto lex = detail::make_lexicon(cfg);
  const std::size_t m = cfg.n_functions;

  Corpus corpus;
  corpus.function_names = planted.names;
  const std::size_t id_width = std::max<std::size_t>(5, std::to_string(cfg.n_sentences).size());
  for (std::size_t i = 0; i < cfg.n_sentences; ++i) {
    auto g = rng::substream(cfg.seed, i);
    Sentence s;
    s.id = padded("s", i + 1, id_width);
    const auto n_tokens = static_cast<int>(rng::between(g, static_cast<long long>(cfg.min_tokens),
                                                        static_cast<long long>(cfg.max_tokens)));
    for (int t = 0; t < n_tokens; ++t) s.tokens.push_back(padded("w", rng::below(g, 1000), 3));
    s.gold.constituents.push_back({0, n_tokens, Category::P});
    detail::random_tree(g, 0, n_tokens, s.gold.constituents);

    const auto n_analyses = static_cast<std::size_t>(rng::between(
        g, static_cast<long long>(cfg.min_analyses), static_cast<long long>(cfg.max_analyses)));
    const auto correct_at = static_cast<std::size_t>(rng::below(g, n_analyses));

    // The correct analysis: gold spans, sentence-level feature offsets, good triples and rules.
    std::vector<double> base(m);
    for (auto& b : base) b = static_cast<double>(n_tokens) * rng::uniform(g, 0.0, 2.0);
    const std::size_t n_triples = std::max<std::size_t>(2, static_cast<std::size_t>(n_tokens) / 2);
    std::vector<detail::TripleIds> good;
    for (std::size_t t = 0; t < n_triples; ++t) good.push_back(detail::good_triple(g, lex));
    std::vector<std::string> rules;
    for (int r = 0; r < n_tokens; ++r) rules.push_back(detail::good_rule(g, lex));

    for (std::size_t a = 0; a < n_analyses; ++a) {
      Analysis an;
      an.id = padded("q", a + 1, 1);
      auto triples = good;
      auto an_rules = rules;
      std::vector<double> x = base;
      if (a == correct_at) {
        an.spans = s.gold.constituents;
      } else {
        an.spans = detail::perturb(g, s.gold.constituents, n_tokens);
        // Distance below the correct analysis under the default training score.
        const auto agreement = span_agreement(span_set(an.spans), span_set(s.gold.constituents));
        const double wrongness = static_cast<double>(agreement.missing + 10 * agreement.spurious);
        const double margin = rng::uniform(g, 0.5, 1.5);
        // A disturbance shared by every informative function, oriented like its weight.
        const double shared = kSharedNoise * cfg.noise_scale * rng::normal(g);
        for (std::size_t j = 0; j < m; ++j) {
          const double w = planted.values[j];
          // Coarse functions separate gross errors well and near misses poorly.
          const double step = detail::is_coarse(j) ? kCoarseRate * wrongness : margin;
          const double sign = w > 0 ? 1.0 : (w < 0 ? -1.0 : 0.0);
          x[j] += -w * rng::uniform(g, 0.1, 1.0) * step + sign * shared + cfg.noise_scale * rng::normal(g);
        }
      }
      // Every analysis, correct or not, edits a few triple and rule slots, so that
      // with triple_signal = 0 the analyses of a sentence are exchangeable.
      const double p_bad = a == correct_at ? 0.0 : cfg.triple_signal;
      const auto replaced = std::min<std::size_t>(n_triples, static_cast<std::size_t>(rng::between(g, 1, 2)));
      std::vector<std::size_t> positions(n_triples);
      for (std::size_t p = 0; p < n_triples; ++p) positions[p] = p;
      rng::shuffle(g, positions);
      for (std::size_t p = 0; p < replaced; ++p) {
        auto& slot = triples[positions[p]];
        slot = rng::bernoulli(g, p_bad) ? detail::bad_triple(g, lex, slot) : detail::good_triple(g, lex);
      }
      const auto rule_edits = rng::between(g, 1, 2);
      for (long long e = 0; e < rule_edits; ++e) {
        auto& slot = an_rules[rng::below(g, an_rules.size())];
        slot = rng::bernoulli(g, p_bad) ? detail::bad_rule(g, lex) : detail::good_rule(g, lex);
      }
      for (const auto& t : triples) an.triples.push_back(detail::make_triple(t.h1, t.r, t.h2));
      an.rules = std::move(an_rules);
      for (std::size_t j = 0; j < m; ++j) an.features.emplace(corpus.function_names[j], detail::round6(x[j]));
      s.analyses.push_back(std::move(an));
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// key=value configuration files

inline void set_synth_option(SynthConfig& cfg, const std::string& key, const std::string& value) {
  const auto as_size = [&] {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw data_error("synth config: '" + key + "' expects a non-negative integer, got '" + value + "'");
    }
  };
  const auto as_double = [&](const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw data_error("synth config: '" + key + "' expects a number, got '" + text + "'");
    }
  };
  if (key == "n_sentences") cfg.n_sentences = as_size();
  else if (key == "min_analyses") cfg.min_analyses = as_size();
  else if (key == "max_analyses") cfg.max_analyses = as_size();
  else if (key == "n_functions") cfg.n_functions = as_size();
  else if (key == "noise_scale") cfg.noise_scale = as_double(value);
  else if (key == "n_heads") cfg.n_heads = as_size();
  else if (key == "n_relations") cfg.n_relations = as_size();
  else if (key == "n_rules") cfg.n_rules = as_size();
  else if (key == "triple_signal") cfg.triple_signal = as_double(value);
  else if (key == "min_tokens") cfg.min_tokens = as_size();
  else if (key == "max_tokens") cfg.max_tokens = as_size();
  else if (key == "seed") cfg.seed = as_size();
  else if (key == "planted_weights") {
    cfg.planted_weights.clear();
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) cfg.planted_weights.push_back(as_double(item));
  } else {
    throw data_error("synth config: unknown key '" + key + "'");
  }
}

inline SynthConfig read_synth_config(std::istream& in, SynthConfig cfg = {}) {
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw data_error("synth config: expected key=value, got '" + line + "'");
    set_synth_option(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace prefscale

#endif  // PREFSCALE_SYNTH_HPP
