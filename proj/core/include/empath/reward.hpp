// Composite reward: format adherence, affect correctness, and judge-scored
// rubric quality, combined as a weighted sum.
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "empath/span_format.hpp"
#include "empath/types.hpp"

namespace empath {

// Five 1..5 integer dimensions.
struct RubricScores {
  int relevance = 1;
  int fluency = 1;
  int empathy = 1;
  int persona = 1;
  int safety = 1;
  std::optional<std::string> rationale;

  int sum() const { return relevance + fluency + empathy + persona + safety; }
  bool operator==(const RubricScores&) const = default;
};

struct RewardWeights {
  double format_weight = 1.0 / 3.0;
  double emotion_weight = 1.0 / 3.0;
  double rubric_weight = 1.0 / 3.0;

  static RewardWeights equal() { return RewardWeights{}; }
  // Non-negative and summing to 1 within 1e-12; throws BAD_WEIGHTS.
  void validate() const;
};

struct RewardBreakdown {
  double format_score = 0.0;
  double emotion_score = 0.0;
  double rubric_score = 0.0;
  double total = 0.0;
  RewardWeights weights;
  std::optional<RubricScores> rubric;  // raw judge scores when a judge ran
};

// 1 when the predicted span canonicalizes to the gold label, else 0.
// Unknown or missing labels never raise here; they score 0.
double emotion_reward(std::string_view predicted_span, const EmotionLabel& gold,
                      const EmotionTaxonomy& taxonomy);

// (sum - 5) / 20, mapping [5,25] onto [0,1]. Throws OUT_OF_RANGE.
double rubric_normalize(const RubricScores& scores);

// Extracts the first well-formed JSON object carrying the five integer
// fields; tolerates surrounding prose. Throws UNPARSEABLE_JUDGMENT when no
// such object exists and SCORE_OUT_OF_RANGE when a field leaves 1..5.
RubricScores parse_judge_output(std::string_view raw);

// Weighted sum of the three components, each already in [0,1].
// Throws COMPONENT_OUT_OF_RANGE / BAD_WEIGHTS.
RewardBreakdown unified_reward(double format_score, double emotion_score, double rubric_score,
                               const RewardWeights& weights = RewardWeights::equal());

class JudgeAgent {
 public:
  virtual ~JudgeAgent() = default;
  // Raw verdict text for one candidate response span.
  virtual std::string assess(std::string_view user_utterance, std::string_view response_span) = 0;
};

// Full candidate scoring: format reward over the raw text, emotion reward
// from the extracted emotion span, rubric reward from the judge over the
// extracted response span. A missing response span yields rubric_score 0
// without consulting the judge. Judge transport failures surface as
// JUDGE_UNAVAILABLE.
RewardBreakdown score_candidate(std::string_view candidate_raw, const EmotionLabel& gold_emotion,
                                JudgeAgent& judge,
                                const RewardWeights& weights = RewardWeights::equal(),
                                const EmotionTaxonomy& taxonomy = EmotionTaxonomy::defaults(),
                                const TagSpec& tags = TagSpec::defaults(),
                                std::string_view user_utterance = {});

}  // namespace empath
