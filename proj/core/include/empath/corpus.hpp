// Corpus operations over trajectories: resolution rates, difficulty
// partitioning, single-pass mergeable statistics, SFT pair emission, and the
// JSONL wire format.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "empath/span_format.hpp"
#include "empath/types.hpp"

namespace empath {

struct ResolutionRates {
  double fail = 0.0;
  double pass = 0.0;
  double solved = 0.0;
};

// Empirical decision frequencies. All rubric decisions count, including the
// inner refinement rounds; outer_only restricts to the final decision per
// turn. Throws EMPTY_TRAJECTORY.
ResolutionRates resolution_rates(const Trajectory& t, bool outer_only = false);

enum class DifficultyBin { Easy, Hard };
std::string_view to_string(DifficultyBin bin);

// Easy iff failures are outweighed: p_fail < p_pass + p_solved, or
// p_fail + p_pass < p_solved. Strict comparisons; ties are hard.
DifficultyBin partition(const ResolutionRates& rates);

struct CorpusStats {
  std::uint64_t dialogue_count = 0;
  std::uint64_t utterance_count = 0;  // two utterances per turn
  double avg_turns = 0.0;
  double avg_query_len = 0.0;          // whitespace tokens per user utterance
  double avg_understanding_len = 0.0;  // over turns with parsed spans
  double avg_reasoning_len = 0.0;
  double avg_response_len = 0.0;
  std::uint64_t emotion_label_count = 0;  // distinct situation labels
  std::uint64_t profile_count = 0;        // distinct profile ids
};

// Single streaming pass; partial accumulators merge associatively, so shards
// can be folded in any order.
class StatsAccumulator {
 public:
  void add(const Trajectory& t);
  void merge(const StatsAccumulator& other);
  CorpusStats finalize() const;

 private:
  std::uint64_t dialogues_ = 0;
  std::uint64_t turns_ = 0;
  std::uint64_t query_tokens_ = 0;
  std::uint64_t span_turns_ = 0;  // turns contributing parsed spans
  std::uint64_t understanding_tokens_ = 0;
  std::uint64_t reasoning_tokens_ = 0;
  std::uint64_t response_tokens_ = 0;
  std::set<std::string> emotions_;
  std::set<std::string> profiles_;
};

// Fixed-width two-column table of the stats fields.
std::string format_stats_table(const CorpusStats& stats);

struct SftPair {
  std::string dialogue_id;
  int turn_index = 0;
  std::string context;  // profile block, situation block, transcript, query
  std::string target;   // canonical four-span rendering
};

// One pair per turn. Every turn must carry parsed spans (emit after
// filtering); otherwise UNPARSEABLE_TURN names the turn.
std::vector<SftPair> emit_sft_pairs(const Trajectory& t, const TagSpec& tags = TagSpec::defaults());

// JSONL wire format. Lines round-trip: from(to(x)) == x.
std::string to_json_line(const Trajectory& t);
Trajectory trajectory_from_json_line(std::string_view line, std::uint64_t line_number = 0);
std::string to_json_line(const SftPair& pair);
SftPair sft_pair_from_json_line(std::string_view line, std::uint64_t line_number = 0);

class TrajectoryReader {
 public:
  // Strict mode throws SCHEMA_VIOLATION naming the line; lenient mode skips
  // bad lines and counts them.
  explicit TrajectoryReader(const std::filesystem::path& file, bool lenient = false);
  std::optional<Trajectory> next();
  std::uint64_t lines_skipped() const { return skipped_; }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  bool lenient_;
  std::uint64_t line_number_ = 0;
  std::uint64_t skipped_ = 0;
};

class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::filesystem::path& file);
  void write(const Trajectory& t);
  std::uint64_t count() const { return count_; }

 private:
  std::ofstream out_;
  std::uint64_t count_ = 0;
};

std::vector<UserProfile> read_profiles_jsonl(const std::filesystem::path& file,
                                             bool lenient = false);
std::vector<Situation> read_situations_jsonl(const std::filesystem::path& file,
                                             const EmotionTaxonomy& taxonomy,
                                             bool lenient = false);

// Exact duplicate key over (profile id, situation text, user utterances).
std::uint64_t dedup_key(const Trajectory& t);

}  // namespace empath
