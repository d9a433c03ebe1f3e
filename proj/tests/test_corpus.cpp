#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "empath/corpus.hpp"
#include "support.hpp"

using namespace empath;
using testsupport::make_trajectory;
using testsupport::make_turn;

namespace {

namespace fs = std::filesystem;

fs::path fixture(const char* name) { return fs::path(EMPATH_FIXTURE_DIR) / name; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("empath_corpus_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::vector<Trajectory> read_all(const fs::path& file, bool lenient = false) {
  TrajectoryReader reader(file, lenient);
  std::vector<Trajectory> out;
  while (auto t = reader.next()) out.push_back(std::move(*t));
  return out;
}

Trajectory with_pattern(std::vector<std::vector<RubricDecision>> pattern, std::string id) {
  Trajectory t = make_trajectory(std::move(id));
  t.turns.clear();
  t.decision_path.clear();
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    t.turns.push_back(make_turn(static_cast<int>(i) + 1, pattern[i]));
    t.decision_path.push_back(pattern[i].back());
  }
  t.status = t.decision_path.back() == RubricDecision::Solved ? TrajectoryStatus::Solved
                                                              : TrajectoryStatus::Exhausted;
  validate_trajectory(t);
  return t;
}

constexpr auto F = RubricDecision::Fail;
constexpr auto P = RubricDecision::Pass;
constexpr auto S = RubricDecision::Solved;

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("resolution rates count decisions exactly") {
  // five decisions spread over two turns: F F P | F S
  Trajectory t = with_pattern({{F, F, P}, {F, S}}, "dlg_rates01");
  ResolutionRates r = resolution_rates(t);
  CHECK(r.fail == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.pass == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.solved == doctest::Approx(0.2).epsilon(1e-12));

  ResolutionRates outer = resolution_rates(t, /*outer_only=*/true);
  CHECK(outer.fail == 0.0);
  CHECK(outer.pass == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(outer.solved == doctest::Approx(0.5).epsilon(1e-12));

  Trajectory empty;
  CHECK_THROWS_AS(resolution_rates(empty), Error);
}

TEST_CASE("partition is the failure-majority rule") {
  CHECK(partition({0.5, 0.2, 0.3}) == DifficultyBin::Hard);  // tie goes hard
  CHECK(partition({0.2, 0.5, 0.3}) == DifficultyBin::Easy);
  CHECK(partition({0.6, 0.3, 0.1}) == DifficultyBin::Hard);
  CHECK(partition({0.0, 0.0, 1.0}) == DifficultyBin::Easy);
  CHECK(to_string(DifficultyBin::Easy) == "easy");

  // full 0.05 grid: the rule collapses to p_fail < 0.5
  int points = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; i + j <= 20; ++j) {
      int k = 20 - i - j;
      ResolutionRates r{i / 20.0, j / 20.0, k / 20.0};
      ++points;
      DifficultyBin expected = r.fail < 0.5 ? DifficultyBin::Easy : DifficultyBin::Hard;
      CHECK(partition(r) == expected);
    }
  }
  CHECK(points == 231);
}

TEST_CASE("bundled fixture reproduces the hand-computed stats") {
  StatsAccumulator acc;
  for (const Trajectory& t : read_all(fixture("dialogues.jsonl"))) acc.add(t);
  CorpusStats s = acc.finalize();
  CHECK(s.dialogue_count == 12);
  CHECK(s.utterance_count == 60);
  CHECK(s.avg_turns == 2.5);
  CHECK(s.avg_query_len == 5.0);
  CHECK(s.avg_understanding_len == 4.0);
  CHECK(s.avg_reasoning_len == 6.0);
  CHECK(s.avg_response_len == 7.0);
  CHECK(s.emotion_label_count == 4);
  CHECK(s.profile_count == 6);

  // two utterances per turn
  CHECK(static_cast<double>(s.utterance_count) ==
        2.0 * static_cast<double>(s.dialogue_count) * s.avg_turns);

  std::string table = format_stats_table(s);
  CHECK(table.find("# Dialogues") != std::string::npos);
  CHECK(table.find("12") != std::string::npos);
}

TEST_CASE("stats accumulators merge associatively") {
  std::vector<Trajectory> all = read_all(fixture("dialogues.jsonl"));
  REQUIRE(all.size() == 12);

  StatsAccumulator left, right, pairwise;
  for (std::size_t i = 0; i < all.size(); ++i) {
    (i < 5 ? left : right).add(all[i]);
  }
  left.merge(right);

  for (std::size_t i = 0; i < all.size(); i += 2) {
    StatsAccumulator shard;
    shard.add(all[i]);
    if (i + 1 < all.size()) shard.add(all[i + 1]);
    pairwise.merge(shard);
  }

  CorpusStats a = left.finalize();
  CorpusStats b = pairwise.finalize();
  CHECK(a.dialogue_count == b.dialogue_count);
  CHECK(a.utterance_count == b.utterance_count);
  CHECK(a.avg_turns == b.avg_turns);
  CHECK(a.avg_query_len == b.avg_query_len);
  CHECK(a.avg_understanding_len == b.avg_understanding_len);
  CHECK(a.avg_reasoning_len == b.avg_reasoning_len);
  CHECK(a.avg_response_len == b.avg_response_len);
  CHECK(a.emotion_label_count == b.emotion_label_count);
  CHECK(a.profile_count == b.profile_count);
}

TEST_CASE("json lines round trip") {
  for (const Trajectory& t : read_all(fixture("dialogues.jsonl"))) {
    Trajectory again = trajectory_from_json_line(to_json_line(t));
    CHECK(again == t);
  }

  Trajectory custom = make_trajectory("dlg_roundtrip");
  custom.split = "easy";
  custom.turns[0].user_utterance = "quotes \" and \\ backslashes \n survive";
  custom.decision_path = {RubricDecision::Solved};
  Trajectory again = trajectory_from_json_line(to_json_line(custom));
  CHECK(again == custom);
}

TEST_CASE("strict reader names the offending line") {
  TempDir dir;
  fs::path file = dir.path / "mixed.jsonl";
  {
    std::ofstream out(file);
    out << to_json_line(make_trajectory("dlg_ok0001")) << "\n";
    out << "{\"dialogue_id\": \"broken\"}" << "\n";
    out << to_json_line(make_trajectory("dlg_ok0002")) << "\n";
  }

  SUBCASE("strict throws with position") {
    TrajectoryReader reader(file);
    CHECK(reader.next().has_value());
    try {
      reader.next();
      FAIL("expected schema violation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaViolation);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("lenient skips and counts") {
    std::vector<Trajectory> rows = read_all(file, /*lenient=*/true);
    CHECK(rows.size() == 2);
    TrajectoryReader reader(file, true);
    while (reader.next()) {
    }
    CHECK(reader.lines_skipped() == 1);
  }
  SUBCASE("missing file is an io error") {
    CHECK_THROWS_AS(TrajectoryReader(dir.path / "absent.jsonl"), Error);
  }
}

TEST_CASE("refinement_count must agree with the inner decisions") {
  std::string line = to_json_line(make_trajectory("dlg_badcount"));
  auto pos = line.find("\"refinement_count\":2");
  REQUIRE(pos != std::string::npos);
  line.replace(pos, 20, "\"refinement_count\":3");
  CHECK_THROWS_AS(trajectory_from_json_line(line, 1), Error);
}

TEST_CASE("writer counts what it wrote") {
  TempDir dir;
  fs::path file = dir.path / "out.jsonl";
  {
    TrajectoryWriter writer(file);
    writer.write(make_trajectory("dlg_w1"));
    writer.write(make_trajectory("dlg_w2"));
    CHECK(writer.count() == 2);
  }
  CHECK(read_all(file).size() == 2);
}

TEST_CASE("profile and situation readers accept the bundled fixtures") {
  std::vector<UserProfile> profiles = read_profiles_jsonl(fixture("profiles.jsonl"));
  REQUIRE(profiles.size() == 6);
  CHECK(profiles[0].user_id == "user_fx0001");
  CHECK_FALSE(profiles[2].mbti.has_value());  // one record has no mbti

  std::vector<Situation> situations =
      read_situations_jsonl(fixture("situations.jsonl"), EmotionTaxonomy::defaults());
  REQUIRE(situations.size() == 12);
  CHECK(situations[0].emotion.canonical == "caring");
}

TEST_CASE("situation reader rejects unknown emotions unless lenient") {
  TempDir dir;
  fs::path file = dir.path / "situations.jsonl";
  {
    std::ofstream out(file);
    out << R"({"text": "fine", "emotion": "caring"})" << "\n";
    out << R"({"text": "odd", "emotion": "melancholy"})" << "\n";
  }
  CHECK_THROWS_AS(read_situations_jsonl(file, EmotionTaxonomy::defaults()), Error);
  CHECK(read_situations_jsonl(file, EmotionTaxonomy::defaults(), true).size() == 1);
}

TEST_CASE("sft pairs carry the transcript and the canonical target") {
  Trajectory t = with_pattern({{F, P}, {S}}, "dlg_sft0001");
  t.turns[0].user_utterance = "first question here";
  t.turns[1].user_utterance = "second question here";
  std::vector<SftPair> pairs = emit_sft_pairs(t);
  REQUIRE(pairs.size() == 2);

  CHECK(pairs[0].dialogue_id == "dlg_sft0001");
  CHECK(pairs[0].turn_index == 1);
  CHECK(pairs[0].context.find("[profile]") != std::string::npos);
  CHECK(pairs[0].context.find("[situation]") != std::string::npos);
  CHECK(pairs[0].context.find("first question here") != std::string::npos);
  CHECK(pairs[0].context.find("second question here") == std::string::npos);
  CHECK(pairs[0].target == render_four_span(*t.turns[0].parsed));
  CHECK(format_reward(pairs[0].target) == 1.0);

  // the second pair sees the first exchange in its context
  CHECK(pairs[1].context.find("first question here") != std::string::npos);
  CHECK(pairs[1].context.find(t.turns[0].parsed->response) != std::string::npos);

  SftPair back = sft_pair_from_json_line(to_json_line(pairs[0]));
  CHECK(back.dialogue_id == pairs[0].dialogue_id);
  CHECK(back.turn_index == pairs[0].turn_index);
  CHECK(back.context == pairs[0].context);
  CHECK(back.target == pairs[0].target);
}

TEST_CASE("sft emission refuses unparsed turns") {
  Trajectory t = make_trajectory("dlg_sftbad");
  t.turns[0].parsed.reset();
  t.turns[0].assistant_raw = "free text, no tags";
  try {
    emit_sft_pairs(t);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnparseableTurn);
    CHECK(std::string(e.what()).find("turn 1") != std::string::npos);
  }
}

TEST_CASE("dedup key tracks profile, situation and utterances") {
  Trajectory a = make_trajectory("dlg_a");
  Trajectory b = make_trajectory("dlg_b");  // same content, different id
  CHECK(dedup_key(a) == dedup_key(b));

  Trajectory c = make_trajectory("dlg_c");
  c.turns[0].user_utterance = "something else entirely";
  CHECK(dedup_key(a) != dedup_key(c));

  Trajectory d = make_trajectory("dlg_d");
  d.profile.user_id = "user_t0002";
  CHECK(dedup_key(a) != dedup_key(d));
}

}  // TEST_SUITE
