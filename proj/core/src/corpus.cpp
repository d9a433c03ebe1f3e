#include "empath/corpus.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace empath {

using nlohmann::json;

ResolutionRates resolution_rates(const Trajectory& t, bool outer_only) {
  std::uint64_t n_fail = 0, n_pass = 0, n_solved = 0;
  auto tally = [&](RubricDecision d) {
    switch (d) {
      case RubricDecision::Fail: ++n_fail; break;
      case RubricDecision::Pass: ++n_pass; break;
      case RubricDecision::Solved: ++n_solved; break;
    }
  };
  for (const Turn& turn : t.turns) {
    if (outer_only) {
      tally(turn.decision);
    } else {
      for (RubricDecision d : turn.inner_decisions) tally(d);
    }
  }
  std::uint64_t total = n_fail + n_pass + n_solved;
  if (total == 0) {
    fail(ErrorCode::EmptyTrajectory, t.dialogue_id + ": no rubric decisions to count");
  }
  ResolutionRates rates;
  rates.fail = static_cast<double>(n_fail) / total;
  rates.pass = static_cast<double>(n_pass) / total;
  rates.solved = static_cast<double>(n_solved) / total;
  return rates;
}

std::string_view to_string(DifficultyBin bin) {
  return bin == DifficultyBin::Easy ? "easy" : "hard";
}

DifficultyBin partition(const ResolutionRates& r) {
  if (r.fail < r.pass + r.solved || r.fail + r.pass < r.solved) return DifficultyBin::Easy;
  return DifficultyBin::Hard;
}

void StatsAccumulator::add(const Trajectory& t) {
  ++dialogues_;
  turns_ += t.turns.size();
  for (const Turn& turn : t.turns) {
    query_tokens_ += whitespace_token_count(turn.user_utterance);
    if (turn.parsed) {
      ++span_turns_;
      understanding_tokens_ += whitespace_token_count(turn.parsed->understanding);
      reasoning_tokens_ += whitespace_token_count(turn.parsed->reasoning);
      response_tokens_ += whitespace_token_count(turn.parsed->response);
    }
  }
  emotions_.insert(t.situation.emotion.canonical);
  profiles_.insert(t.profile.user_id);
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  dialogues_ += other.dialogues_;
  turns_ += other.turns_;
  query_tokens_ += other.query_tokens_;
  span_turns_ += other.span_turns_;
  understanding_tokens_ += other.understanding_tokens_;
  reasoning_tokens_ += other.reasoning_tokens_;
  response_tokens_ += other.response_tokens_;
  emotions_.insert(other.emotions_.begin(), other.emotions_.end());
  profiles_.insert(other.profiles_.begin(), other.profiles_.end());
}

CorpusStats StatsAccumulator::finalize() const {
  CorpusStats s;
  s.dialogue_count = dialogues_;
  s.utterance_count = 2 * turns_;
  s.avg_turns = dialogues_ ? static_cast<double>(turns_) / dialogues_ : 0.0;
  s.avg_query_len = turns_ ? static_cast<double>(query_tokens_) / turns_ : 0.0;
  if (span_turns_) {
    s.avg_understanding_len = static_cast<double>(understanding_tokens_) / span_turns_;
    s.avg_reasoning_len = static_cast<double>(reasoning_tokens_) / span_turns_;
    s.avg_response_len = static_cast<double>(response_tokens_) / span_turns_;
  }
  s.emotion_label_count = emotions_.size();
  s.profile_count = profiles_.size();
  return s;
}

std::string format_stats_table(const CorpusStats& s) {
  std::ostringstream out;
  char buf[64];
  auto row = [&](const char* label, const std::string& value) {
    out << label;
    for (std::size_t i = std::string(label).size(); i < 28; ++i) out << ' ';
    out << value << "\n";
  };
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  row("# Dialogues", std::to_string(s.dialogue_count));
  row("# Utterances", std::to_string(s.utterance_count));
  row("Avg. Multi-turns", num(s.avg_turns));
  row("Avg. Query Length", num(s.avg_query_len));
  row("Avg. Understanding Length", num(s.avg_understanding_len));
  row("Avg. Reasoning Length", num(s.avg_reasoning_len));
  row("Avg. Response Length", num(s.avg_response_len));
  row("Emotion Labels", std::to_string(s.emotion_label_count));
  row("User Profiles", std::to_string(s.profile_count));
  return out.str();
}

std::vector<SftPair> emit_sft_pairs(const Trajectory& t, const TagSpec& tags) {
  std::vector<SftPair> pairs;
  std::ostringstream context;
  context << "[profile]\n";
  context << "user_id: " << t.profile.user_id << "\n";
  if (t.profile.mbti) context << "mbti: " << *t.profile.mbti << "\n";
  if (t.profile.gender) context << "gender: " << *t.profile.gender << "\n";
  if (t.profile.relationship) context << "relationship: " << *t.profile.relationship << "\n";
  if (t.profile.occupation) context << "occupation: " << *t.profile.occupation << "\n";
  if (!t.profile.about.empty()) context << "about: " << t.profile.about << "\n";
  for (const std::string& activity : t.profile.recent_activities) {
    context << "recent: " << activity << "\n";
  }
  context << "[situation]\n";
  context << t.situation.text << "\n";
  context << "emotion: " << t.situation.emotion.canonical << "\n";
  context << "[dialogue]\n";

  std::string transcript = context.str();
  for (const Turn& turn : t.turns) {
    if (!turn.parsed) {
      fail(ErrorCode::UnparseableTurn,
           t.dialogue_id + ": turn " + std::to_string(turn.index) + " has no parsed spans");
    }
    SftPair pair;
    pair.dialogue_id = t.dialogue_id;
    pair.turn_index = turn.index;
    pair.context = transcript + "user: " + turn.user_utterance + "\n";
    pair.target = render_four_span(*turn.parsed, tags);
    transcript = pair.context + "assistant: " + pair.target + "\n";
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

namespace {

[[noreturn]] void schema_error(std::uint64_t line, const std::string& detail) {
  std::string where = line ? "line " + std::to_string(line) + ": " : "";
  fail(ErrorCode::SchemaViolation, where + detail);
}

const json& require_field(const json& obj, const char* field, std::uint64_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) schema_error(line, std::string("missing field '") + field + "'");
  return *it;
}

std::string require_string(const json& obj, const char* field, std::uint64_t line) {
  const json& v = require_field(obj, field, line);
  if (!v.is_string()) schema_error(line, std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field,
                                           std::uint64_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_error(line, std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

RubricDecision decision_from_json(const json& v, std::uint64_t line, const char* field) {
  if (!v.is_string()) schema_error(line, std::string("field '") + field + "' must be a string");
  auto d = rubric_decision_from(v.get<std::string>());
  if (!d) schema_error(line, std::string("field '") + field + "' must be fail/pass/solved");
  return *d;
}

json profile_to_json(const UserProfile& p) {
  json j;
  j["user_id"] = p.user_id;
  if (p.mbti) j["mbti"] = *p.mbti;
  if (p.gender) j["gender"] = *p.gender;
  if (p.relationship) j["relationship"] = *p.relationship;
  if (p.occupation) j["occupation"] = *p.occupation;
  j["about"] = p.about;
  j["recent_activities"] = p.recent_activities;
  return j;
}

UserProfile profile_from_json(const json& j, std::uint64_t line) {
  if (!j.is_object()) schema_error(line, "profile must be an object");
  UserProfile p;
  p.user_id = require_string(j, "user_id", line);
  p.mbti = optional_string(j, "mbti", line);
  p.gender = optional_string(j, "gender", line);
  p.relationship = optional_string(j, "relationship", line);
  p.occupation = optional_string(j, "occupation", line);
  if (auto about = optional_string(j, "about", line)) p.about = *about;
  if (auto it = j.find("recent_activities"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) schema_error(line, "recent_activities must be an array");
    for (const json& v : *it) {
      if (!v.is_string()) schema_error(line, "recent_activities entries must be strings");
      p.recent_activities.push_back(v.get<std::string>());
    }
  }
  try {
    return validate_profile(std::move(p));
  } catch (const ValidationError& e) {
    schema_error(line, e.what());
  }
}

}  // namespace

std::string to_json_line(const Trajectory& t) {
  json j;
  j["dialogue_id"] = t.dialogue_id;
  j["profile"] = profile_to_json(t.profile);
  j["situation"] = {{"text", t.situation.text}, {"emotion", t.situation.emotion.canonical}};
  json turns = json::array();
  for (const Turn& turn : t.turns) {
    json tj;
    tj["index"] = turn.index;
    tj["user"] = turn.user_utterance;
    tj["assistant_raw"] = turn.assistant_raw;
    if (turn.parsed) {
      tj["spans"] = {{"understanding", turn.parsed->understanding},
                     {"reasoning", turn.parsed->reasoning},
                     {"emotion", turn.parsed->emotion},
                     {"response", turn.parsed->response}};
    }
    tj["decision"] = std::string(to_string(turn.decision));
    json inner = json::array();
    for (RubricDecision d : turn.inner_decisions) inner.push_back(std::string(to_string(d)));
    tj["inner_decisions"] = std::move(inner);
    tj["refinement_count"] = turn.refinement_count();
    turns.push_back(std::move(tj));
  }
  j["turns"] = std::move(turns);
  json path = json::array();
  for (RubricDecision d : t.decision_path) path.push_back(std::string(to_string(d)));
  j["decision_path"] = std::move(path);
  j["status"] = std::string(to_string(t.status));
  j["rng_seed"] = t.rng_seed;
  if (t.split) j["split"] = *t.split;
  return j.dump();
}

Trajectory trajectory_from_json_line(std::string_view line, std::uint64_t line_number) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) schema_error(line_number, "line is not a JSON object");

  Trajectory t;
  t.dialogue_id = require_string(j, "dialogue_id", line_number);
  t.profile = profile_from_json(require_field(j, "profile", line_number), line_number);

  const json& sit = require_field(j, "situation", line_number);
  if (!sit.is_object()) schema_error(line_number, "situation must be an object");
  t.situation.text = require_string(sit, "text", line_number);
  t.situation.emotion.canonical = require_string(sit, "emotion", line_number);

  const json& turns = require_field(j, "turns", line_number);
  if (!turns.is_array()) schema_error(line_number, "turns must be an array");
  for (const json& tj : turns) {
    if (!tj.is_object()) schema_error(line_number, "turn must be an object");
    Turn turn;
    const json& idx = require_field(tj, "index", line_number);
    if (!idx.is_number_integer()) schema_error(line_number, "turn index must be an integer");
    turn.index = idx.get<int>();
    turn.user_utterance = require_string(tj, "user", line_number);
    turn.assistant_raw = require_string(tj, "assistant_raw", line_number);
    if (auto it = tj.find("spans"); it != tj.end() && !it->is_null()) {
      if (!it->is_object()) schema_error(line_number, "spans must be an object");
      FourSpanOutput spans;
      spans.understanding = require_string(*it, "understanding", line_number);
      spans.reasoning = require_string(*it, "reasoning", line_number);
      spans.emotion = require_string(*it, "emotion", line_number);
      spans.response = require_string(*it, "response", line_number);
      turn.parsed = std::move(spans);
    }
    turn.decision = decision_from_json(require_field(tj, "decision", line_number), line_number,
                                       "decision");
    const json& inner = require_field(tj, "inner_decisions", line_number);
    if (!inner.is_array()) schema_error(line_number, "inner_decisions must be an array");
    for (const json& d : inner) {
      turn.inner_decisions.push_back(decision_from_json(d, line_number, "inner_decisions"));
    }
    const json& rc = require_field(tj, "refinement_count", line_number);
    if (!rc.is_number_integer() || rc.get<int>() != turn.refinement_count()) {
      schema_error(line_number, "refinement_count must equal the number of inner decisions");
    }
    t.turns.push_back(std::move(turn));
  }

  const json& path = require_field(j, "decision_path", line_number);
  if (!path.is_array()) schema_error(line_number, "decision_path must be an array");
  for (const json& d : path) {
    t.decision_path.push_back(decision_from_json(d, line_number, "decision_path"));
  }

  auto status = trajectory_status_from(require_string(j, "status", line_number));
  if (!status) schema_error(line_number, "status must be solved/exhausted/filtered");
  t.status = *status;

  const json& seed = require_field(j, "rng_seed", line_number);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    schema_error(line_number, "rng_seed must be an integer");
  }
  t.rng_seed = seed.get<std::uint64_t>();
  t.split = optional_string(j, "split", line_number);

  try {
    validate_trajectory(t);
  } catch (const Error& e) {
    schema_error(line_number, e.what());
  }
  return t;
}

std::string to_json_line(const SftPair& pair) {
  json j;
  j["dialogue_id"] = pair.dialogue_id;
  j["turn_index"] = pair.turn_index;
  j["context"] = pair.context;
  j["target"] = pair.target;
  return j.dump();
}

SftPair sft_pair_from_json_line(std::string_view line, std::uint64_t line_number) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) schema_error(line_number, "line is not a JSON object");
  SftPair pair;
  pair.dialogue_id = require_string(j, "dialogue_id", line_number);
  const json& idx = require_field(j, "turn_index", line_number);
  if (!idx.is_number_integer()) schema_error(line_number, "turn_index must be an integer");
  pair.turn_index = idx.get<int>();
  pair.context = require_string(j, "context", line_number);
  pair.target = require_string(j, "target", line_number);
  return pair;
}

TrajectoryReader::TrajectoryReader(const std::filesystem::path& file, bool lenient)
    : in_(file), path_(file), lenient_(lenient) {
  if (!in_) fail(ErrorCode::IoError, "cannot open trajectory file: " + file.string());
}

std::optional<Trajectory> TrajectoryReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (trim_view(line).empty()) continue;
    if (!lenient_) return trajectory_from_json_line(line, line_number_);
    try {
      return trajectory_from_json_line(line, line_number_);
    } catch (const Error&) {
      ++skipped_;
    }
  }
  return std::nullopt;
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& file) : out_(file) {
  if (!out_) fail(ErrorCode::IoError, "cannot open output file: " + file.string());
}

void TrajectoryWriter::write(const Trajectory& t) {
  out_ << to_json_line(t) << "\n";
  if (!out_) fail(ErrorCode::IoError, "write failed");
  ++count_;
}

std::vector<UserProfile> read_profiles_jsonl(const std::filesystem::path& file, bool lenient) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::IoError, "cannot open profile file: " + file.string());
  std::vector<UserProfile> out;
  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim_view(line).empty()) continue;
    try {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) schema_error(line_number, "line is not valid JSON");
      out.push_back(profile_from_json(j, line_number));
    } catch (const Error&) {
      if (!lenient) throw;
    }
  }
  return out;
}

std::vector<Situation> read_situations_jsonl(const std::filesystem::path& file,
                                             const EmotionTaxonomy& taxonomy, bool lenient) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::IoError, "cannot open situation file: " + file.string());
  std::vector<Situation> out;
  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim_view(line).empty()) continue;
    try {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) schema_error(line_number, "line is not a JSON object");
      Situation s;
      s.text = require_string(j, "text", line_number);
      s.emotion = canonical_emotion(require_string(j, "emotion", line_number), taxonomy);
      out.push_back(std::move(s));
    } catch (const Error&) {
      if (!lenient) throw;
    }
  }
  return out;
}

std::uint64_t dedup_key(const Trajectory& t) {
  std::string key = t.profile.user_id;
  key += '\x1f';
  key += t.situation.text;
  for (const Turn& turn : t.turns) {
    key += '\x1f';
    key += turn.user_utterance;
  }
  return fnv1a64(key);
}

}  // namespace empath
