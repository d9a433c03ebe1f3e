#include <doctest.h>

#include "empath/types.hpp"
#include "support.hpp"

using namespace empath;
using testsupport::make_trajectory;

TEST_SUITE("types") {

TEST_CASE("mbti codes match case-insensitively and normalize to uppercase") {
  CHECK(is_mbti_code("INFJ"));
  CHECK_FALSE(is_mbti_code("INFX"));

  UserProfile p;
  p.user_id = "u1";
  p.mbti = "enfp";
  p = validate_profile(p);
  CHECK(p.mbti == "ENFP");
}

TEST_CASE("validate_profile collects every violation before throwing") {
  UserProfile p;  // empty user_id AND bad mbti
  p.mbti = "ABCD";
  try {
    validate_profile(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.violations().size() == 2);
    bool saw_id = false, saw_mbti = false;
    for (const auto& v : e.violations()) {
      if (v.code == ErrorCode::MissingId) saw_id = true;
      if (v.code == ErrorCode::InvalidMbti) saw_mbti = true;
    }
    CHECK(saw_id);
    CHECK(saw_mbti);
  }
}

TEST_CASE("profile without mbti is fine") {
  UserProfile p;
  p.user_id = "u2";
  CHECK_NOTHROW(validate_profile(p));
}

TEST_CASE("default taxonomy has 32 labels and matches the bundled file") {
  const EmotionTaxonomy& tax = EmotionTaxonomy::defaults();
  CHECK(tax.size() == 32);
  CHECK(tax.contains("caring"));
  CHECK(tax.contains("nostalgic"));
  CHECK_FALSE(tax.contains("melancholy"));

  EmotionTaxonomy from_file = EmotionTaxonomy::load(EMPATH_DATA_DIR "/emotions_32.txt");
  CHECK(from_file.labels() == tax.labels());
}

TEST_CASE("canonical_emotion trims and lowercases") {
  const EmotionTaxonomy& tax = EmotionTaxonomy::defaults();
  CHECK(canonical_emotion("  CaRing \n", tax).canonical == "caring");
  CHECK_FALSE(try_canonical_emotion("melancholy", tax).has_value());
  CHECK_THROWS_AS(canonical_emotion("carring", tax), Error);
  CHECK(tax.nearest("carring") == "caring");
}

TEST_CASE("decision and status strings round trip") {
  CHECK(rubric_decision_from("solved") == RubricDecision::Solved);
  CHECK(rubric_decision_from(" PASS \n") == RubricDecision::Pass);
  CHECK_FALSE(rubric_decision_from("maybe").has_value());
  CHECK(to_string(RubricDecision::Fail) == "fail");
  CHECK(trajectory_status_from("exhausted") == TrajectoryStatus::Exhausted);
  CHECK(to_string(TrajectoryStatus::Filtered) == "filtered");
}

TEST_CASE("validate_trajectory accepts a well formed record") {
  CHECK_NOTHROW(validate_trajectory(make_trajectory()));
}

TEST_CASE("validate_trajectory rejects each broken invariant") {
  SUBCASE("no turns") {
    Trajectory t = make_trajectory();
    t.turns.clear();
    t.decision_path.clear();
    CHECK_THROWS_AS(validate_trajectory(t), Error);
  }
  SUBCASE("decision_path length mismatch") {
    Trajectory t = make_trajectory();
    t.decision_path.push_back(RubricDecision::Pass);
    CHECK_THROWS_AS(validate_trajectory(t), Error);
  }
  SUBCASE("turn decision not the last inner decision") {
    Trajectory t = make_trajectory();
    t.turns[0].decision = RubricDecision::Fail;
    t.decision_path[0] = RubricDecision::Fail;
    CHECK_THROWS_AS(validate_trajectory(t), Error);
  }
  SUBCASE("solved before the final turn") {
    Trajectory t = make_trajectory();
    Turn second = t.turns[0];
    second.index = 2;
    second.inner_decisions = {RubricDecision::Pass};
    second.decision = RubricDecision::Pass;
    t.turns.push_back(second);  // turn 1 is solved, turn 2 follows
    t.decision_path = {RubricDecision::Solved, RubricDecision::Pass};
    t.status = TrajectoryStatus::Exhausted;
    CHECK_THROWS_AS(validate_trajectory(t), Error);
  }
  SUBCASE("status solved without a solved finish") {
    Trajectory t = make_trajectory();
    t.turns[0].inner_decisions = {RubricDecision::Pass};
    t.turns[0].decision = RubricDecision::Pass;
    t.decision_path = {RubricDecision::Pass};
    t.status = TrajectoryStatus::Solved;
    CHECK_THROWS_AS(validate_trajectory(t), Error);
  }
  SUBCASE("status exhausted despite a solved finish") {
    Trajectory t = make_trajectory();
    t.status = TrajectoryStatus::Exhausted;
    CHECK_THROWS_AS(validate_trajectory(t), Error);
  }
}

}  // TEST_SUITE
