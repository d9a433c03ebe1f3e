#include "empath/reward.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "json_scan.hpp"

namespace empath {

using nlohmann::json;

void RewardWeights::validate() const {
  if (format_weight < 0 || emotion_weight < 0 || rubric_weight < 0) {
    fail(ErrorCode::BadWeights, "reward weights must be non-negative");
  }
  double sum = format_weight + emotion_weight + rubric_weight;
  if (std::abs(sum - 1.0) > 1e-12) {
    fail(ErrorCode::BadWeights, "reward weights must sum to 1, got " + std::to_string(sum));
  }
}

double emotion_reward(std::string_view predicted_span, const EmotionLabel& gold,
                      const EmotionTaxonomy& taxonomy) {
  auto predicted = try_canonical_emotion(predicted_span, taxonomy);
  if (!predicted) return 0.0;
  return *predicted == gold ? 1.0 : 0.0;
}

double rubric_normalize(const RubricScores& scores) {
  const int dims[5] = {scores.relevance, scores.fluency, scores.empathy, scores.persona,
                       scores.safety};
  for (int d : dims) {
    if (d < 1 || d > 5) {
      fail(ErrorCode::OutOfRange, "rubric dimension " + std::to_string(d) + " outside 1..5");
    }
  }
  return static_cast<double>(scores.sum() - 5) / 20.0;
}

namespace {

const char* kRubricFields[5] = {"relevance", "fluency", "empathy", "persona", "safety"};

bool has_rubric_fields(const json& obj) {
  for (const char* f : kRubricFields) {
    if (!obj.contains(f) || !obj[f].is_number_integer()) return false;
  }
  return true;
}

RubricScores scores_from_json(const json& obj) {
  RubricScores s;
  int* slots[5] = {&s.relevance, &s.fluency, &s.empathy, &s.persona, &s.safety};
  for (int i = 0; i < 5; ++i) {
    long long v = obj[kRubricFields[i]].get<long long>();
    if (v < 1 || v > 5) {
      fail(ErrorCode::ScoreOutOfRange, std::string("judge field '") + kRubricFields[i] + "' = " +
                                           std::to_string(v) + " outside 1..5");
    }
    *slots[i] = static_cast<int>(v);
  }
  if (obj.contains("rationale") && obj["rationale"].is_string()) {
    s.rationale = obj["rationale"].get<std::string>();
  }
  return s;
}

}  // namespace

RubricScores parse_judge_output(std::string_view raw) {
  for (std::size_t pos = raw.find('{'); pos != std::string_view::npos;
       pos = raw.find('{', pos + 1)) {
    std::size_t close = detail::matching_brace(raw, pos);
    if (close == std::string_view::npos) continue;
    json obj = json::parse(raw.substr(pos, close - pos + 1), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) continue;
    if (has_rubric_fields(obj)) return scores_from_json(obj);
  }
  fail(ErrorCode::UnparseableJudgment,
       "no JSON object with the five rubric fields found in judge output");
}

RewardBreakdown unified_reward(double format_score, double emotion_score, double rubric_score,
                               const RewardWeights& weights) {
  weights.validate();
  const double components[3] = {format_score, emotion_score, rubric_score};
  for (double c : components) {
    if (!(c >= 0.0 && c <= 1.0)) {
      fail(ErrorCode::ComponentOutOfRange,
           "reward component " + std::to_string(c) + " outside [0,1]");
    }
  }
  RewardBreakdown out;
  out.format_score = format_score;
  out.emotion_score = emotion_score;
  out.rubric_score = rubric_score;
  out.weights = weights;
  out.total = weights.format_weight * format_score + weights.emotion_weight * emotion_score +
              weights.rubric_weight * rubric_score;
  return out;
}

RewardBreakdown score_candidate(std::string_view candidate_raw, const EmotionLabel& gold_emotion,
                                JudgeAgent& judge, const RewardWeights& weights,
                                const EmotionTaxonomy& taxonomy, const TagSpec& tags,
                                std::string_view user_utterance) {
  double fmt = format_reward(candidate_raw, tags);

  double emo = 0.0;
  if (auto span = extract_span(candidate_raw, kEmotionSpan, tags)) {
    emo = emotion_reward(*span, gold_emotion, taxonomy);
  }

  double rub = 0.0;
  std::optional<RubricScores> rubric;
  auto response = extract_span(candidate_raw, kResponseSpan, tags);
  if (response && !response->empty()) {
    std::string verdict;
    try {
      verdict = judge.assess(user_utterance, *response);
    } catch (const Error& e) {
      fail(ErrorCode::JudgeUnavailable, std::string("judge call failed: ") + e.what());
    }
    rubric = parse_judge_output(verdict);
    rub = rubric_normalize(*rubric);
  }

  RewardBreakdown out = unified_reward(fmt, emo, rub, weights);
  out.rubric = std::move(rubric);
  return out;
}

}  // namespace empath
