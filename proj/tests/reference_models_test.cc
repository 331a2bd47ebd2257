#include <gtest/gtest.h>

#include "test_util.h"
#include "xqa/coupling.h"
#include "xqa/errors.h"
#include "xqa/reference_models.h"

namespace xqa {
namespace {

using testing::make_context;

TEST(OverlapScore, SetOverlapOverSentenceLength) {
  std::vector<std::string> q = normalized_tokens("Who likes Mary?");
  EXPECT_DOUBLE_EQ(overlap_score(q, "John likes Mary."), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(overlap_score(q, "Mary likes Mary."), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(overlap_score(q, ""), 0.0);
}

TEST(SelectFacts, DominantSentence) {
  Context c = make_context({{"A", {"unrelated words here", "river flows past castle"}}, {"B", {"nothing"}}});
  RelevancePrediction rp = select_facts("Which river flows past the castle?", c, 1);
  EXPECT_EQ(rp.relevant, (std::set<FactId>{{"A", 1}}));
  EXPECT_DOUBLE_EQ(rp.scores.at({"A", 1}), 1.0);
  EXPECT_DOUBLE_EQ(rp.scores.at({"B", 0}), 0.0);
}

TEST(SelectFacts, AllZeroPicksFirstInFactIdOrder) {
  Context c = make_context({{"Zed", {"p", "q"}}, {"Alpha", {"r", "s"}}});
  RelevancePrediction rp = select_facts("unrelated question", c, 2);
  EXPECT_EQ(rp.relevant, (std::set<FactId>{{"Alpha", 0}, {"Alpha", 1}}));
  for (const auto &[f, s] : rp.scores) EXPECT_EQ(s, 0.0);
}

TEST(SelectFacts, LargeMSelectsEverything) {
  Context c = make_context({{"A", {"x", "y"}}, {"B", {"z"}}});
  EXPECT_EQ(select_facts("x", c, 3).relevant.size(), 3u);
  EXPECT_EQ(select_facts("x", c, 10).relevant.size(), 3u);
  EXPECT_THROW(select_facts("x", c, 0), DomainError);
  EXPECT_THROW(lexical_selector(0), DomainError);
}

TEST(SelectFacts, ScoresStayInUnitInterval) {
  Corpus corpus = load_corpus(testing::data_path("fixture20.json"));
  for (const Instance &inst : corpus.instances) {
    RelevancePrediction rp = select_facts(inst.question, inst.context, 2);
    EXPECT_EQ(rp.relevant.size(), 2u);
    double max = 0.0;
    for (const auto &[f, s] : rp.scores) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      max = std::max(max, s);
    }
    EXPECT_EQ(max, 1.0);
  }
}

TEST(ExtractAnswer, YesNoOpener) {
  Context c = make_context({{"A", {"X is Y."}}});
  Extraction e = extract_answer("is X Y?", c);
  EXPECT_EQ(e.answer, Answer::yes());
  EXPECT_FALSE(e.span.has_value());
  EXPECT_EQ(extract_answer("Did it rain?", c).answer, Answer::yes());
}

TEST(ExtractAnswer, SingleSentenceTrace) {
  Context c = make_context({{"A", {"john likes mary"}}});
  Extraction e = extract_answer("who likes mary", c);
  EXPECT_EQ(e.answer, Answer::span("john"));
  ASSERT_TRUE(e.span.has_value());
  EXPECT_EQ(*e.span, (SpanLocation{0, 0, 4}));
}

TEST(ExtractAnswer, EmptyContextIsYesSentinel) {
  EXPECT_EQ(extract_answer("who?", {}).answer, Answer::yes());
  Extraction e = extract_answer("who?", make_context({{"A", {}}}));
  EXPECT_EQ(e.answer, Answer::yes());
  EXPECT_FALSE(e.span.has_value());
}

TEST(ExtractAnswer, WholeSentenceWhenEveryTokenIsInQuestion) {
  Context c = make_context({{"A", {"x"}}, {"B", {"The castle!"}}});
  Extraction e = extract_answer("which castle", c);
  EXPECT_EQ(e.answer, Answer::span("The castle!"));
  EXPECT_EQ(*e.span, (SpanLocation{1, 0, 11}));
}

TEST(ExtractAnswer, RunIsCappedAtEightTokens) {
  Context c = make_context({{"A", {"castle one two three four five six seven eight nine ten"}}});
  Extraction e = extract_answer("which castle", c);
  EXPECT_EQ(e.answer, Answer::span("one two three four five six seven eight"));
}

TEST(ExtractAnswer, LongestRunWinsEarliestOnTies) {
  Context c = make_context({{"A", {"alpha river beta gamma river delta"}}});
  EXPECT_EQ(extract_answer("which river", c).answer, Answer::span("beta gamma"));
  Context tie = make_context({{"A", {"alpha river beta"}}});
  EXPECT_EQ(extract_answer("which river", tie).answer, Answer::span("alpha"));
}

TEST(ExtractAnswer, OffsetsPointIntoCanonicalRendering) {
  Context c = make_context({{"A", {"Nothing here.", "The river Kelvane flows past the castle."}}});
  Extraction e = extract_answer("Which river flows past the castle?", c);
  EXPECT_EQ(e.answer, Answer::span("Kelvane"));
  RenderedArticle r = render_article(c[0]);
  EXPECT_EQ(r.text.substr(e.span->start, e.span->end - e.span->start), "Kelvane");
}

TEST(PerturbQuestion, ReversesEachToken) {
  EXPECT_EQ(perturb_question("Which river flows?"), "hcihw revir swolf");
  EXPECT_EQ(perturb_question("Zoë"), "ëoz");
  EXPECT_EQ(perturb_question("did anna"), "did anna");
}

TEST(SfWrap, SpanMapsIntoSelectedSentence) {
  Context c = make_context({{"A", {"Sheep graze here.", "The river Kelvane flows past the castle."}},
                            {"B", {"The castle is old."}}});
  PredictFn fn = sf_wrap(lexical_selector(1), lexical_extractor());
  ModelPrediction p = fn("Which river flows past the castle?", c);
  EXPECT_EQ(p.relevance.relevant, (std::set<FactId>{{"A", 1}}));
  EXPECT_EQ(p.answer, Answer::span("Kelvane"));
  ASSERT_TRUE(p.span.has_value());
  EXPECT_NO_THROW(validate_prediction(p, c));
  EXPECT_EQ(locate_answer(p, c, p.relevance), AnswerLocation::kInRelevantFact);
}

TEST(SfWrap, EmptySelectionGivesYes) {
  Selector none = [](std::string_view, const Context &c) {
    RelevancePrediction rp;
    for (const FactId &f : enumerate_facts(c)) rp.scores[f] = 0.0;
    return rp;
  };
  ModelPrediction p = sf_wrap(none, lexical_extractor())("Which river?", make_context({{"A", {"x"}}}));
  EXPECT_EQ(p.answer, Answer::yes());
  EXPECT_TRUE(p.relevance.relevant.empty());
}

TEST(SfWrap, EverySpanIsInsideARelevantFact) {
  Corpus corpus = load_corpus(testing::data_path("fixture20.json"));
  for (int m : {1, 2, 3, 5}) {
    PredictFn fn = sf_wrap(lexical_selector(m), lexical_extractor());
    for (const Instance &inst : corpus.instances) {
      ModelPrediction p = fn(inst.question, inst.context);
      ASSERT_TRUE(p.span.has_value()) << inst.id;
      EXPECT_NO_THROW(validate_prediction(p, inst.context));
      EXPECT_EQ(locate_answer(p, inst.context, p.relevance), AnswerLocation::kInRelevantFact) << inst.id;
    }
  }
}

TEST(Decoupled, AnswerComesFromFullContext) {
  Corpus corpus = load_corpus(testing::data_path("fixture20.json"));
  PredictFn fn = decoupled(lexical_selector(2), lexical_extractor());
  int outside = 0;
  for (const Instance &inst : corpus.instances) {
    ModelPrediction p = fn(inst.question, inst.context);
    Extraction e = extract_answer(inst.question, inst.context);
    EXPECT_EQ(p.answer, e.answer);
    EXPECT_EQ(p.span, e.span);
    EXPECT_EQ(p.relevance, select_facts(perturb_question(inst.question), inst.context, 2));
    outside += locate_answer(p, inst.context, p.relevance) == AnswerLocation::kOutsideRelevantFacts;
  }
  EXPECT_GT(outside, 0);
}

TEST(Decoupled, PalindromicQuestionMatchesCoupledSelection) {
  Context c = make_context({{"A", {"anna did level", "other words"}}, {"B", {"noon anna"}}});
  std::string q = "anna did noon";
  ModelPrediction p = decoupled(lexical_selector(2), lexical_extractor())(q, c);
  EXPECT_EQ(p.relevance, select_facts(q, c, 2));
}

TEST(Decoupled, ConstantExtractorNeverChangesAnswer) {
  Extractor constant = [](std::string_view, const Context &) { return Extraction{Answer::no(), std::nullopt}; };
  InProcessAdapter adapter(decoupled(lexical_selector(2), constant), 1);
  RemovalCurve curve = removal_curve(adapter, load_corpus(testing::data_path("micro5.json")), 4);
  EXPECT_EQ(curve.c_rel, std::vector<double>(5, 0.0));
}

TEST(ReferenceMode, Parsing) {
  EXPECT_EQ(parse_reference_mode("coupled"), ReferenceMode::kCoupled);
  EXPECT_EQ(parse_reference_mode("decoupled"), ReferenceMode::kDecoupled);
  EXPECT_THROW(parse_reference_mode("other"), InputError);
  EXPECT_STREQ(to_string(ReferenceMode::kDecoupled), "decoupled");
}

TEST(ReferenceMode, AdapterDeclaresConcurrency) {
  EXPECT_EQ(make_reference_adapter(ReferenceMode::kCoupled, 2, 7)->max_concurrency(), 7);
}

}  // namespace
}  // namespace xqa
