#include "empath/types.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace empath {

bool is_mbti_code(std::string_view upper) {
  return std::find(kMbtiCodes.begin(), kMbtiCodes.end(), upper) != kMbtiCodes.end();
}

namespace {

std::string join_violations(const std::vector<FieldViolation>& violations) {
  std::ostringstream out;
  out << "profile validation failed:";
  for (const auto& v : violations) {
    out << " [" << error_code_name(v.code) << " " << v.field;
    if (!v.detail.empty()) out << ": " << v.detail;
    out << "]";
  }
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<FieldViolation> violations)
    : Error(violations.empty() ? ErrorCode::SchemaViolation : violations.front().code,
            join_violations(violations)),
      violations_(std::move(violations)) {}

UserProfile validate_profile(UserProfile raw) {
  std::vector<FieldViolation> violations;
  raw.user_id = trim_copy(raw.user_id);
  if (raw.user_id.empty()) {
    violations.push_back({ErrorCode::MissingId, "user_id", "must be non-empty"});
  }
  if (raw.mbti) {
    std::string code = upper_copy(trim_view(*raw.mbti));
    if (!is_mbti_code(code)) {
      violations.push_back({ErrorCode::InvalidMbti, "mbti", "'" + *raw.mbti +
                            "' is not one of the 16 type codes"});
    } else {
      raw.mbti = code;
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return raw;
}

namespace {

// EmpatheticDialogues label inventory, 32 entries.
const std::vector<std::string> kDefaultEmotions = {
    "surprised",   "excited",     "angry",     "proud",       "sad",
    "annoyed",     "grateful",    "lonely",    "afraid",      "terrified",
    "guilty",      "impressed",   "disgusted", "hopeful",     "confident",
    "furious",     "anxious",     "anticipating", "joyful",   "nostalgic",
    "disappointed", "prepared",   "jealous",   "content",     "devastated",
    "embarrassed", "caring",      "sentimental", "trusting",  "ashamed",
    "apprehensive", "faithful"};

}  // namespace

const EmotionTaxonomy& EmotionTaxonomy::defaults() {
  static const EmotionTaxonomy instance = EmotionTaxonomy::from_labels(kDefaultEmotions);
  return instance;
}

EmotionTaxonomy EmotionTaxonomy::from_labels(std::vector<std::string> labels) {
  EmotionTaxonomy t;
  for (auto& raw : labels) {
    std::string label = lower_copy(trim_view(raw));
    if (label.empty()) continue;
    if (t.index_.insert(label).second) t.labels_.push_back(label);
  }
  if (t.labels_.empty()) fail(ErrorCode::InvalidArgument, "emotion taxonomy is empty");
  return t;
}

EmotionTaxonomy EmotionTaxonomy::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::IoError, "cannot open taxonomy file: " + file.string());
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim_view(line);
    if (t.empty() || t.front() == '#') continue;
    labels.emplace_back(t);
  }
  return from_labels(std::move(labels));
}

bool EmotionTaxonomy::contains(std::string_view canonical) const {
  return index_.count(std::string(canonical)) > 0;
}

std::string EmotionTaxonomy::nearest(std::string_view candidate) const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::string best_label;
  for (const auto& label : labels_) {
    std::size_t d = edit_distance(candidate, label);
    if (d < best) {
      best = d;
      best_label = label;
    }
  }
  return best_label;
}

EmotionLabel canonical_emotion(std::string_view raw, const EmotionTaxonomy& taxonomy) {
  std::string canonical = lower_copy(trim_view(raw));
  if (!taxonomy.contains(canonical)) {
    fail(ErrorCode::UnknownLabel, "emotion '" + canonical + "' is not in the taxonomy (closest: '" +
                                      taxonomy.nearest(canonical) + "')");
  }
  return EmotionLabel{std::move(canonical)};
}

std::optional<EmotionLabel> try_canonical_emotion(std::string_view raw,
                                                  const EmotionTaxonomy& taxonomy) {
  std::string canonical = lower_copy(trim_view(raw));
  if (!taxonomy.contains(canonical)) return std::nullopt;
  return EmotionLabel{std::move(canonical)};
}

std::string_view to_string(RubricDecision d) {
  switch (d) {
    case RubricDecision::Fail: return "fail";
    case RubricDecision::Pass: return "pass";
    case RubricDecision::Solved: return "solved";
  }
  return "fail";
}

std::optional<RubricDecision> rubric_decision_from(std::string_view s) {
  std::string v = lower_copy(trim_view(s));
  if (v == "fail") return RubricDecision::Fail;
  if (v == "pass") return RubricDecision::Pass;
  if (v == "solved") return RubricDecision::Solved;
  return std::nullopt;
}

std::string_view to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Solved: return "solved";
    case TrajectoryStatus::Exhausted: return "exhausted";
    case TrajectoryStatus::Filtered: return "filtered";
  }
  return "exhausted";
}

std::optional<TrajectoryStatus> trajectory_status_from(std::string_view s) {
  std::string v = lower_copy(trim_view(s));
  if (v == "solved") return TrajectoryStatus::Solved;
  if (v == "exhausted") return TrajectoryStatus::Exhausted;
  if (v == "filtered") return TrajectoryStatus::Filtered;
  return std::nullopt;
}

void validate_trajectory(const Trajectory& t) {
  if (t.turns.empty()) fail(ErrorCode::SchemaViolation, "trajectory has no turns");
  if (t.decision_path.size() != t.turns.size()) {
    fail(ErrorCode::SchemaViolation, "decision_path length does not match turn count");
  }
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    const Turn& turn = t.turns[i];
    if (turn.inner_decisions.empty()) {
      fail(ErrorCode::SchemaViolation, "turn " + std::to_string(i + 1) + " has no inner decisions");
    }
    if (turn.inner_decisions.back() != turn.decision) {
      fail(ErrorCode::SchemaViolation,
           "turn " + std::to_string(i + 1) + " decision is not the last inner decision");
    }
    if (t.decision_path[i] != turn.decision) {
      fail(ErrorCode::SchemaViolation,
           "decision_path[" + std::to_string(i) + "] does not match turn decision");
    }
    // SOLVED ends the dialogue; it may only appear on the final turn.
    if (turn.decision == RubricDecision::Solved && i + 1 != t.turns.size()) {
      fail(ErrorCode::SchemaViolation, "solved decision before the final turn");
    }
  }
  bool last_solved = t.decision_path.back() == RubricDecision::Solved;
  if (t.status == TrajectoryStatus::Solved && !last_solved) {
    fail(ErrorCode::SchemaViolation, "status solved but last decision is not solved");
  }
  if (t.status == TrajectoryStatus::Exhausted && last_solved) {
    fail(ErrorCode::SchemaViolation, "status exhausted but last decision is solved");
  }
}

}  // namespace empath
