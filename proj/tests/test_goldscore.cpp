#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "prefscale/goldscore.hpp"
#include "prefscale/synth.hpp"

using namespace prefscale;

namespace {

std::vector<Constituent> spans(std::initializer_list<std::pair<int, int>> list) {
  std::vector<Constituent> out;
  for (auto [s, e] : list) out.push_back({s, e, Category::A});
  return out;
}

// Gold of ten nested spans; analyses keep `kept` of them plus `extra` spurious ones.
Sentence sentence_with_scores(const std::vector<std::pair<int, int>>& kept_extra) {
  Sentence s;
  s.id = "s";
  s.tokens.assign(20, "w");
  for (int i = 0; i < 10; ++i) s.gold.constituents.push_back({i, 20, Category::A});
  int n = 0;
  for (auto [kept, extra] : kept_extra) {
    Analysis a;
    a.id = "q" + std::to_string(++n);
    a.spans.assign(s.gold.constituents.begin(), s.gold.constituents.begin() + kept);
    for (int k = 0; k < extra; ++k) a.spans.push_back({k, k + 1, Category::A});
    s.analyses.push_back(a);
  }
  return s;
}

}  // namespace

TEST(TrainingScore, IdentityIsA1TimesSize) {
  const auto t = spans({{0, 4}, {0, 1}, {1, 4}, {2, 4}});
  EXPECT_EQ(training_score(t, t), 4.0);
}

TEST(TrainingScore, FormulaArithmetic) {
  // |Q∩T| = 5, |Q\T| = 2, |T\Q| = 3.
  const auto q = spans({{0, 9}, {1, 9}, {2, 9}, {3, 9}, {4, 9}, {0, 1}, {1, 2}});
  const auto t = spans({{0, 9}, {1, 9}, {2, 9}, {3, 9}, {4, 9}, {5, 9}, {6, 9}, {7, 9}});
  EXPECT_EQ(training_score(q, t), -15.0);
  EXPECT_EQ(training_score(q, t, {1, 10, 1}), -18.0);
  const auto agreement = span_agreement(span_set(q), span_set(t));
  EXPECT_EQ(agreement.common, 5u);
  EXPECT_EQ(agreement.spurious, 2u);
  EXPECT_EQ(agreement.missing, 3u);
}

TEST(TrainingScore, LabelsAndDuplicatesIgnored) {
  std::vector<Constituent> q = {{0, 3, Category::A}, {0, 3, Category::P}, {1, 2, Category::none}};
  std::vector<Constituent> t = {{0, 3, Category::P}, {1, 2, Category::A}};
  EXPECT_EQ(training_score(q, t), 2.0);
}

TEST(ScoreWeights, Validity) {
  EXPECT_TRUE(ScoreWeights{}.valid());
  EXPECT_FALSE((ScoreWeights{-1, 10, 0}.valid()));
  EXPECT_FALSE((ScoreWeights{1, std::nan(""), 0}.valid()));
}

TEST(Relativize, WorkedExample) {
  auto s = sentence_with_scores({{10, 0}, {10, 0}, {4, 0}});
  const double phi[] = {16, 16, 10}, f1[] = {8, 6, 2}, f2[] = {4, 10, 12};
  for (int a = 0; a < 3; ++a) s.analyses[a].features = {{"phi", phi[a]}, {"f1", f1[a]}, {"f2", f2[a]}};
  const std::vector<std::string> fns = {"phi", "f1", "f2"};
  const auto rel = relativize(s, fns);
  EXPECT_EQ(rel.g, (std::vector<double>{0, 0, -6}));
  EXPECT_EQ(rel.z, (std::vector<std::vector<double>>{{0, 1, -3}, {0, -1, 3}, {-6, -5, 5}}));
  EXPECT_EQ(rel.best_set, (std::vector<std::string>{"q1", "q2"}));
}

TEST(Relativize, SingleAnalysisIsAllZero) {
  auto s = sentence_with_scores({{3, 1}});
  s.analyses[0].features = {{"f", 7.0}};
  const std::vector<std::string> fns = {"f"};
  const auto rel = relativize(s, fns);
  EXPECT_EQ(rel.g, (std::vector<double>{0}));
  EXPECT_EQ(rel.z, (std::vector<std::vector<double>>{{0}}));
}

TEST(Relativize, IdenticalAnalysesAreAllZero) {
  auto s = sentence_with_scores({{6, 1}, {6, 1}});
  for (auto& a : s.analyses) a.features = {{"f", -2.5}};
  const std::vector<std::string> fns = {"f"};
  const auto rel = relativize(s, fns);
  EXPECT_EQ(rel.g, (std::vector<double>{0, 0}));
  EXPECT_EQ(rel.z, (std::vector<std::vector<double>>{{0}, {0}}));
}

TEST(Relativize, PropertiesOnSyntheticCorpora) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_sentences = 50;
    cfg.n_functions = 5;
    const auto corpus = generate(cfg);
    for (auto s : corpus.sentences) {
      // Force some ties among best analyses.
      if (s.analyses.size() > 2) s.analyses[1] = s.analyses[0];
      const auto rel = relativize(s, corpus.function_names);
      EXPECT_EQ(*std::max_element(rel.g.begin(), rel.g.end()), 0.0);
      const auto best = best_analysis_indices(s);
      for (std::size_t j = 0; j < corpus.function_names.size(); ++j) {
        double mean = 0.0;
        for (auto b : best) mean += rel.z[b][j];
        EXPECT_NEAR(mean / static_cast<double>(best.size()), 0.0, 1e-9);
      }
      for (std::size_t i = 0; i < s.analyses.size(); ++i) {
        const auto top = oracle::training_score(s.analyses[best[0]], s);
        EXPECT_EQ(rel.g[i], oracle::training_score(s.analyses[i], s) - top);
      }
    }
  }
}

TEST(ExactMatch, SpanSetEquality) {
  Analysis a;
  a.spans = {{0, 7, Category::P}, {1, 2, Category::A}, {3, 4, Category::A}, {4, 7, Category::P}, {5, 7, Category::A}};
  SkeletalTree t{a.spans};
  EXPECT_TRUE(exact_match(a, t));
  t.constituents.pop_back();
  EXPECT_FALSE(exact_match(a, t));
  SkeletalTree relabelled{a.spans};
  for (auto& c : relabelled.constituents) c.label = c.label == Category::A ? Category::P : Category::A;
  EXPECT_TRUE(exact_match(a, relabelled));
}

TEST(BestAnalyses, TiesAndSingletons) {
  EXPECT_EQ(best_analyses(sentence_with_scores({{10, 0}, {10, 0}, {4, 0}})),
            (std::vector<std::string>{"q1", "q2"}));
  EXPECT_EQ(best_analyses(sentence_with_scores({{3, 0}})), (std::vector<std::string>{"q1"}));
  EXPECT_EQ(best_analyses(sentence_with_scores({{5, 1}, {5, 1}, {5, 1}})),
            (std::vector<std::string>{"q1", "q2", "q3"}));
  EXPECT_TRUE(best_analyses(Sentence{}).empty());
}

TEST(BestAnalyses, WeightsChangeTheWinner) {
  // q1: 8 common, 1 spurious; q2: 5 common, 0 spurious.
  const auto s = sentence_with_scores({{8, 1}, {5, 0}});
  EXPECT_EQ(best_analyses(s), (std::vector<std::string>{"q2"}));
  EXPECT_EQ(best_analyses(s, {1, 1, 0}), (std::vector<std::string>{"q1"}));
}
