#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "prefscale/corpus.hpp"

using namespace prefscale;

namespace {

const std::string kData = PREFSCALE_TEST_DATA;

Corpus parse(const std::string& text, bool enforce = true) {
  std::istringstream in(text);
  return read_corpus(in, "mem", enforce);
}

std::string header(const std::string& functions = R"(["f"])") {
  return R"({"function_names":)" + functions + "}\n";
}

Sentence small_sentence() {
  Sentence s;
  s.id = "s1";
  s.tokens = {"a", "b", "c", "d", "e"};
  s.gold.constituents = {{0, 5, Category::P}, {1, 3, Category::A}};
  Analysis a;
  a.id = "q1";
  a.spans = s.gold.constituents;
  a.triples = {{"get_Acquire", "3", "dinner_Meal"}};
  a.features = {{"f", 1.5}};
  s.analyses.push_back(a);
  return s;
}

}  // namespace

TEST(LoadCorpus, WorkedExampleHasFourFunctions) {
  const auto c = load_corpus(kData + "/dinner.jsonl");
  ASSERT_EQ(c.function_names.size(), 4u);
  EXPECT_EQ(c.function_names[0], "Low1");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0].analyses.size(), 2u);
  EXPECT_EQ(c.sentences[0].word_count(), 7u);
  EXPECT_DOUBLE_EQ(c.sentences[0].analyses[0].feature("SemColl"), 24.32);
}

TEST(LoadCorpus, OneSentenceTwoAnalyses) {
  const auto c = parse(header() +
                       R"({"id":"x","tokens":["a","b"],"gold":[[0,2]],"analyses":[{"id":"q1","spans":[[0,2]]},{"id":"q2","spans":[[0,1]]}]})");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0].analyses.size(), 2u);
}

TEST(LoadCorpus, RoundTripIsIdentity) {
  Corpus c;
  c.function_names = {"f"};
  c.class_map = {{"dinner_Meal", "cc_SpecificMeal"}};
  c.sentences.push_back(small_sentence());
  const auto text = to_jsonl(c);
  EXPECT_EQ(parse(text), c);
  EXPECT_EQ(to_jsonl(parse(text)), text);
}

TEST(LoadCorpus, SpanBeyondSentenceNamesTheSentence) {
  try {
    parse(header() + R"({"id":"too_long","tokens":["a","b"],"gold":[[0,3]],"analyses":[]})");
    FAIL() << "expected data_error";
  } catch (const data_error& e) {
    EXPECT_NE(std::string(e.what()).find("too_long"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, MissingFeatureReadsAsZero) {
  const auto c = parse(header(R"(["f","g"])") +
                       R"({"id":"x","tokens":["a","b"],"gold":[[0,2]],"analyses":[{"id":"q1","spans":[[0,2]],"features":{"f":2}}]})");
  EXPECT_EQ(c.sentences[0].analyses[0].feature("g"), 0.0);
  EXPECT_EQ(c.sentences[0].analyses[0].feature("f"), 2.0);
}

TEST(LoadCorpus, IntegerRelationIsReadAsString) {
  const auto c = parse(header() +
                       R"({"id":"x","tokens":["a","b"],"gold":[[0,2]],"analyses":[{"id":"q1","spans":[[0,2]],"triples":[["get_Acquire",3,"dinner_Meal"]]}]})");
  EXPECT_EQ(c.sentences[0].analyses[0].triples[0].r, "3");
}

TEST(LoadCorpus, ErrorsCarrySourceAndLine) {
  try {
    parse(header() + "\n{not json}\n");
    FAIL() << "expected data_error";
  } catch (const data_error& e) {
    EXPECT_NE(std::string(e.what()).find("mem:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse(R"({"id":"x"})"), data_error);
  EXPECT_THROW(parse(""), data_error);
  EXPECT_THROW(parse(header() + R"({"id":"x","tokens":["a"],"gold":[[0,1,"Q"]],"analyses":[]})"), data_error);
  EXPECT_THROW(parse(header() + R"({"id":"x","tokens":["a"],"analyses":[]})"), data_error);
  EXPECT_THROW(load_corpus(kData + "/does_not_exist.jsonl"), data_error);
}

TEST(LoadCorpus, UnenforcedLoadKeepsViolations) {
  const auto c = parse(header() + R"({"id":"x","tokens":["a","b"],"gold":[[0,3]],"analyses":[{"id":"q1","spans":[[0,2]]}]})",
                       false);
  EXPECT_EQ(validate(c).size(), 1u);
}

TEST(ApplyClassMap, MapsHeadsToClasses) {
  Corpus c;
  c.function_names = {"f"};
  c.class_map = {{"dinner_Meal", "cc_SpecificMeal"}};
  c.sentences.push_back(small_sentence());
  const auto mapped = apply_class_map(c);
  EXPECT_EQ(mapped.sentences[0].analyses[0].triples[0], (Triple{"get_Acquire", "3", "cc_SpecificMeal"}));
}

TEST(ApplyClassMap, EmptyMapIsIdentity) {
  Corpus c;
  c.function_names = {"f"};
  c.sentences.push_back(small_sentence());
  EXPECT_EQ(apply_class_map(c), c);
}

TEST(ApplyClassMap, Idempotent) {
  Corpus c = load_corpus(kData + "/dinner.jsonl");
  const auto once = apply_class_map(c);
  EXPECT_EQ(apply_class_map(once), once);
}

TEST(Validate, WellFormedCorpusHasNoViolations) {
  EXPECT_TRUE(validate(load_corpus(kData + "/dinner.jsonl")).empty());
  EXPECT_TRUE(validate(load_corpus(kData + "/colloc20.jsonl")).empty());
}

TEST(Validate, CrossingGoldConstituentsIsOneViolation) {
  Corpus c;
  c.function_names = {"f"};
  auto s = small_sentence();
  s.gold.constituents = {{0, 3, Category::A}, {2, 5, Category::A}};
  c.sentences.push_back(s);
  EXPECT_EQ(validate(c).size(), 1u);
}

TEST(Validate, NegativeStartIsOneViolation) {
  Corpus c;
  c.function_names = {"f"};
  auto s = small_sentence();
  s.analyses[0].spans.push_back({-1, 2, Category::A});
  c.sentences.push_back(s);
  EXPECT_EQ(validate(c).size(), 1u);
}

TEST(Validate, FlagsDuplicatesUndeclaredFeaturesAndIds) {
  Corpus c;
  c.function_names = {"f"};
  auto s = small_sentence();
  s.gold.constituents.push_back({1, 3, Category::P});
  c.sentences.push_back(s);
  EXPECT_FALSE(validate(c).empty());

  c.sentences[0] = small_sentence();
  c.sentences[0].analyses[0].features["undeclared"] = 1.0;
  EXPECT_FALSE(validate(c).empty());

  c.sentences[0] = small_sentence();
  c.sentences.push_back(small_sentence());
  EXPECT_FALSE(validate(c).empty()) << "duplicate sentence ids";
}

TEST(Subset, KeepsRequestedSentencesInOrder) {
  Corpus c;
  c.function_names = {"f"};
  for (int i = 0; i < 4; ++i) {
    auto s = small_sentence();
    s.id = "s" + std::to_string(i);
    c.sentences.push_back(s);
  }
  const auto sub = subset(c, {1, 3});
  ASSERT_EQ(sub.sentences.size(), 2u);
  EXPECT_EQ(sub.sentences[0].id, "s1");
  EXPECT_EQ(sub.sentences[1].id, "s3");
  EXPECT_EQ(sub.function_names, c.function_names);
}

TEST(BracketedTree, WorkedExampleSpans) {
  const auto t = parse_bracketed_tree("(P do (A I) get (A dinner) (P on (A this flight)))");
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"do", "I", "get", "dinner", "on", "this", "flight"}));
  EXPECT_EQ(span_set(t.tree.constituents), (std::vector<Span>{{0, 7}, {1, 2}, {3, 4}, {4, 7}, {5, 7}}));
  EXPECT_EQ(t.tree.constituents.front().label, Category::P);
}

TEST(BracketedTree, RejectsMalformedInput) {
  EXPECT_THROW(parse_bracketed_tree("(P a (A b)"), data_error);
  EXPECT_THROW(parse_bracketed_tree("(P a))"), data_error);
  EXPECT_THROW(parse_bracketed_tree("(X a)"), data_error);
  EXPECT_THROW(parse_bracketed_tree("(P a (A))"), data_error);
  EXPECT_THROW(parse_bracketed_tree(""), data_error);
}
