#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "prefscale/eval.hpp"
#include "prefscale/synth.hpp"

using namespace prefscale;

TEST(Generate, NoiselessCorpusIsSolvedByPlantedWeights) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.noise_scale = 0.0;
    cfg.n_sentences = 150;
    const auto corpus = generate(cfg);
    EXPECT_EQ(correct_count(corpus, planted_factors(cfg)), corpus.sentences.size());
  }
}

TEST(Generate, ExplicitPlantedWeightsAreUsed) {
  SynthConfig cfg;
  cfg.n_functions = 3;
  cfg.planted_weights = {2.0, 0.0, -1.0};
  cfg.noise_scale = 0.0;
  const auto planted = planted_factors(cfg);
  EXPECT_EQ(planted.values, cfg.planted_weights);
  EXPECT_EQ(correct_count(generate(cfg), planted), cfg.n_sentences);
}

TEST(Generate, SameSeedIsByteIdentical) {
  SynthConfig cfg;
  cfg.seed = 42;
  cfg.n_sentences = 80;
  EXPECT_EQ(to_jsonl(generate(cfg)), to_jsonl(generate(cfg)));
  auto other = cfg;
  other.seed = 43;
  EXPECT_NE(to_jsonl(generate(cfg)), to_jsonl(generate(other)));
}

TEST(Generate, ShapeAndInvariants) {
  SynthConfig cfg;
  cfg.seed = 9;
  cfg.n_sentences = 300;
  cfg.min_analyses = 3;
  cfg.max_analyses = 5;
  cfg.n_functions = 7;
  const auto corpus = generate(cfg);
  EXPECT_TRUE(validate(corpus).empty());
  EXPECT_EQ(corpus.function_names.size(), 7u);
  ASSERT_EQ(corpus.sentences.size(), 300u);
  for (const auto& s : corpus.sentences) {
    EXPECT_GE(s.tokens.size(), cfg.min_tokens);
    EXPECT_LE(s.tokens.size(), cfg.max_tokens);
    EXPECT_GE(s.analyses.size(), 3u);
    EXPECT_LE(s.analyses.size(), 5u);
    std::size_t exact = 0;
    for (const auto& a : s.analyses) {
      exact += exact_match(a, s.gold) ? 1 : 0;
      EXPECT_FALSE(a.triples.empty());
      EXPECT_FALSE(a.rules.empty());
      EXPECT_EQ(a.features.size(), 7u);
    }
    EXPECT_EQ(exact, 1u) << s.id;
  }
}

TEST(Generate, RoundTripsThroughJsonLines) {
  SynthConfig cfg;
  cfg.n_sentences = 30;
  const auto corpus = generate(cfg);
  std::istringstream in(to_jsonl(corpus));
  EXPECT_EQ(read_corpus(in, "synth"), corpus);
}

TEST(Generate, NoTripleSignalMeansMeanDistanceIsNearRandom) {
  // With no signal the held-out score of mean_distance alone is a draw around
  // the random-baseline expectation. Each sentence's credit has variance at
  // most p(1 - p), p being its random-pick expectation.
  double md = 0.0, expected = 0.0, variance = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_sentences = 300;
    cfg.triple_signal = 0.0;
    const auto corpus = generate(cfg);
    PipelineConfig pc;
    pc.method = Method::unit;
    pc.base_functions = std::vector<std::string>{};
    pc.colloc = {Statistic::mean_distance};
    md += cross_validate(corpus, 5, pc, seed).aggregate.correct_fractional;
    for (const auto& o : random_baseline(corpus).per_sentence) {
      expected += o.fractional;
      variance += o.fractional * (1.0 - o.fractional);
    }
  }
  EXPECT_LT(std::abs(md - expected), 3.0 * std::sqrt(variance)) << md << " vs " << expected;
}

TEST(CheckConfig, RejectsInvalidSettings) {
  const auto bad = [](auto edit) {
    SynthConfig cfg;
    edit(cfg);
    return cfg;
  };
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.n_sentences = 0; })), data_error);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.min_analyses = 1; })), data_error);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.max_analyses = 1; })), data_error);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.noise_scale = -1; })), data_error);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.triple_signal = 1.5; })), data_error);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.planted_weights = {1.0}; })), data_error);
  EXPECT_THROW(generate(bad([](SynthConfig& c) {
                 c.n_functions = 2;
                 c.planted_weights = {0.0, 0.0};
               })),
               data_error);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.min_tokens = 1; })), data_error);
  EXPECT_NO_THROW(check_config(SynthConfig{}));
}

TEST(SynthConfigFile, ParsesKeysCommentsAndLists) {
  std::istringstream in(
      "# small corpus\n"
      "n_sentences = 12\n"
      "seed=7\n"
      "noise_scale = 0.25  # low\n"
      "n_functions = 3\n"
      "planted_weights = 1, -0.5, 0\n"
      "triple_signal = 0.6\n");
  const auto cfg = read_synth_config(in);
  EXPECT_EQ(cfg.n_sentences, 12u);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.noise_scale, 0.25);
  EXPECT_EQ(cfg.planted_weights, (std::vector<double>{1, -0.5, 0}));
  EXPECT_EQ(cfg.triple_signal, 0.6);
  EXPECT_EQ(cfg.max_analyses, SynthConfig{}.max_analyses);
}

TEST(SynthConfigFile, RejectsUnknownKeysAndBadValues) {
  std::istringstream unknown("n_sentence = 3\n");
  EXPECT_THROW(read_synth_config(unknown), data_error);
  std::istringstream no_eq("n_sentences 3\n");
  EXPECT_THROW(read_synth_config(no_eq), data_error);
  std::istringstream not_int("n_sentences = 3.5\n");
  EXPECT_THROW(read_synth_config(not_int), data_error);
  std::istringstream not_num("noise_scale = loud\n");
  EXPECT_THROW(read_synth_config(not_num), data_error);
}
