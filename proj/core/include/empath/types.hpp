// Domain model: user profiles, emotion taxonomy, rubric decisions, turns and
// trajectories. Wire formats live in corpus.hpp.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "empath/common.hpp"

namespace empath {

inline constexpr std::array<std::string_view, 16> kMbtiCodes = {
    "ISTJ", "ISFJ", "INFJ", "INTJ", "ISTP", "ISFP", "INFP", "INTP",
    "ESTP", "ESFP", "ENFP", "ENTP", "ESTJ", "ESFJ", "ENFJ", "ENTJ"};

bool is_mbti_code(std::string_view upper);

struct UserProfile {
  std::string user_id;
  std::optional<std::string> mbti;  // stored uppercase
  std::optional<std::string> gender;
  std::optional<std::string> relationship;
  std::optional<std::string> occupation;
  std::string about;
  std::vector<std::string> recent_activities;

  bool operator==(const UserProfile&) const = default;
};

struct FieldViolation {
  ErrorCode code = ErrorCode::SchemaViolation;
  std::string field;
  std::string detail;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldViolation> violations);
  const std::vector<FieldViolation>& violations() const { return violations_; }

 private:
  std::vector<FieldViolation> violations_;
};

// Normalizes and checks a decoded profile record: non-empty user_id, MBTI
// (when present) matched case-insensitively against the 16 codes and stored
// uppercase. Collects every violated field before throwing.
UserProfile validate_profile(UserProfile raw);

class EmotionTaxonomy {
 public:
  // The bundled 32-label affect set (mirrors data/emotions_32.txt).
  static const EmotionTaxonomy& defaults();
  // One label per line; blank lines and lines starting with # are skipped.
  static EmotionTaxonomy load(const std::filesystem::path& file);
  static EmotionTaxonomy from_labels(std::vector<std::string> labels);

  bool contains(std::string_view canonical) const;
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  // Closest label by edit distance; diagnostics for UNKNOWN_LABEL.
  std::string nearest(std::string_view candidate) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_set<std::string> index_;
};

struct EmotionLabel {
  std::string canonical;
  bool operator==(const EmotionLabel&) const = default;
};

// Trim + ASCII lowercase, then exact membership. No fuzzy matching: the
// emotion reward is a strict binary signal.
EmotionLabel canonical_emotion(std::string_view raw, const EmotionTaxonomy& taxonomy);
std::optional<EmotionLabel> try_canonical_emotion(std::string_view raw,
                                                  const EmotionTaxonomy& taxonomy);

struct Situation {
  std::string text;
  EmotionLabel emotion;
  bool operator==(const Situation&) const = default;
};

// Ordered for reporting: FAIL < PASS < SOLVED.
enum class RubricDecision { Fail = 0, Pass = 1, Solved = 2 };

std::string_view to_string(RubricDecision d);
std::optional<RubricDecision> rubric_decision_from(std::string_view s);

struct FourSpanOutput {
  std::string understanding;
  std::string reasoning;
  std::string emotion;
  std::string response;
  bool operator==(const FourSpanOutput&) const = default;
};

struct Turn {
  int index = 0;  // 1-based
  std::string user_utterance;
  std::string assistant_raw;
  std::optional<FourSpanOutput> parsed;
  RubricDecision decision = RubricDecision::Fail;  // last inner decision
  std::vector<RubricDecision> inner_decisions;

  int refinement_count() const { return static_cast<int>(inner_decisions.size()); }
  bool operator==(const Turn&) const = default;
};

enum class TrajectoryStatus { Solved, Exhausted, Filtered };

std::string_view to_string(TrajectoryStatus s);
std::optional<TrajectoryStatus> trajectory_status_from(std::string_view s);

struct Trajectory {
  std::string dialogue_id;
  UserProfile profile;
  Situation situation;
  std::vector<Turn> turns;
  std::vector<RubricDecision> decision_path;  // one outer decision per turn
  TrajectoryStatus status = TrajectoryStatus::Exhausted;
  std::uint64_t rng_seed = 0;
  std::optional<std::string> split;

  bool operator==(const Trajectory&) const = default;
};

// Structural invariants: at least one turn, decision_path mirrors the turns'
// final decisions, each turn's decision is the last of its inner decisions,
// and status is solved iff the last outer decision is solved (a trajectory
// may instead be marked filtered). Throws SCHEMA_VIOLATION.
void validate_trajectory(const Trajectory& t);

}  // namespace empath
