#include <doctest.h>

#include <string>

#include "empath/reward.hpp"
#include "support.hpp"

using namespace empath;
using testsupport::compliant_text;

namespace {

struct FixedJudge : JudgeAgent {
  std::string verdict;
  int calls = 0;
  std::string last_response;
  explicit FixedJudge(std::string v) : verdict(std::move(v)) {}
  std::string assess(std::string_view, std::string_view response) override {
    ++calls;
    last_response = std::string(response);
    return verdict;
  }
};

struct BrokenJudge : JudgeAgent {
  std::string assess(std::string_view, std::string_view) override {
    fail(ErrorCode::Timeout, "no judge tonight");
  }
};

}  // namespace

TEST_SUITE("reward") {

TEST_CASE("rubric_normalize maps the score range onto the unit interval") {
  RubricScores all5{5, 5, 5, 5, 5};
  RubricScores all1{1, 1, 1, 1, 1};
  CHECK(rubric_normalize(all5) == 1.0);
  CHECK(rubric_normalize(all1) == 0.0);
  RubricScores mixed{4, 5, 4, 4, 5};  // sum 22
  CHECK(rubric_normalize(mixed) == doctest::Approx(0.85).epsilon(1e-12));

  RubricScores bad{0, 5, 5, 5, 5};
  CHECK_THROWS_AS(rubric_normalize(bad), Error);
}

TEST_CASE("parse_judge_output tolerates surrounding prose") {
  RubricScores s = parse_judge_output(
      "Here is my verdict. {\"relevance\": 4, \"fluency\": 5, \"empathy\": 3, "
      "\"persona\": 2, \"safety\": 5, \"rationale\": \"warm but generic\"} Thanks!");
  CHECK(s.relevance == 4);
  CHECK(s.empathy == 3);
  CHECK(s.rationale == "warm but generic");
}

TEST_CASE("parse_judge_output skips decoy objects") {
  RubricScores s = parse_judge_output(
      "{\"note\": \"not scores\"} then {\"relevance\": 1, \"fluency\": 1, "
      "\"empathy\": 1, \"persona\": 1, \"safety\": 1}");
  CHECK(s.sum() == 5);
}

TEST_CASE("parse_judge_output error taxonomy") {
  SUBCASE("score out of range") {
    try {
      parse_judge_output("{\"relevance\": 4, \"fluency\": 5, \"empathy\": 7, "
                         "\"persona\": 4, \"safety\": 5}");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ScoreOutOfRange);
    }
  }
  SUBCASE("no usable object") {
    try {
      parse_judge_output("I refuse to answer in the requested format.");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnparseableJudgment);
    }
  }
  SUBCASE("non-integer scores do not qualify") {
    try {
      parse_judge_output("{\"relevance\": 4.5, \"fluency\": 5, \"empathy\": 4, "
                         "\"persona\": 4, \"safety\": 5}");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnparseableJudgment);
    }
  }
}

TEST_CASE("unified_reward is the weighted component sum") {
  RewardBreakdown b = unified_reward(1.0, 1.0, 0.75);
  CHECK(b.total == doctest::Approx(0.9166666666666666).epsilon(1e-9));

  RewardWeights skewed{0.5, 0.25, 0.25};
  CHECK(unified_reward(1.0, 0.0, 0.0, skewed).total == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unified_reward validates inputs") {
  CHECK_THROWS_AS(unified_reward(1.2, 0.0, 0.0), Error);
  CHECK_THROWS_AS(unified_reward(0.0, -0.1, 0.0), Error);

  RewardWeights bad{0.5, 0.6, -0.1};
  CHECK_THROWS_AS(bad.validate(), Error);
  RewardWeights not_normalized{0.5, 0.5, 0.5};
  CHECK_THROWS_AS(unified_reward(1.0, 1.0, 1.0, not_normalized), Error);
  CHECK_NOTHROW(RewardWeights::equal().validate());
}

TEST_CASE("emotion reward is strict binary and never throws") {
  const EmotionTaxonomy& tax = EmotionTaxonomy::defaults();
  EmotionLabel caring{"caring"};
  CHECK(emotion_reward(" Caring ", caring, tax) == 1.0);
  CHECK(emotion_reward("content", caring, tax) == 0.0);  // valid label, wrong gold
  CHECK(emotion_reward("melancholy", caring, tax) == 0.0);
  CHECK(emotion_reward("", caring, tax) == 0.0);
}

TEST_CASE("score_candidate composes the three signals") {
  FixedJudge judge(
      "{\"relevance\": 4, \"fluency\": 5, \"empathy\": 4, \"persona\": 4, \"safety\": 5}");
  EmotionLabel gold{"caring"};
  RewardBreakdown b = score_candidate(compliant_text(), gold, judge);
  CHECK(b.format_score == 1.0);
  CHECK(b.emotion_score == 1.0);
  CHECK(b.rubric_score == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(b.total == doctest::Approx((1.0 + 1.0 + 0.85) / 3.0).epsilon(1e-12));
  REQUIRE(b.rubric.has_value());
  CHECK(b.rubric->sum() == 22);
  CHECK(judge.calls == 1);
  CHECK(judge.last_response == "I'm here with you; tell me more");
}

TEST_CASE("missing response span short-circuits the judge") {
  FixedJudge judge("{\"relevance\": 5, \"fluency\": 5, \"empathy\": 5, "
                   "\"persona\": 5, \"safety\": 5}");
  EmotionLabel gold{"caring"};
  RewardBreakdown b = score_candidate("", gold, judge);
  CHECK(judge.calls == 0);
  CHECK(b.rubric_score == 0.0);
  CHECK_FALSE(b.rubric.has_value());
  CHECK(b.format_score == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("judge transport failure surfaces as JUDGE_UNAVAILABLE") {
  BrokenJudge judge;
  EmotionLabel gold{"caring"};
  try {
    score_candidate(compliant_text(), gold, judge);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::JudgeUnavailable);
  }
}

}  // TEST_SUITE
