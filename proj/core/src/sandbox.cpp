#include "empath/sandbox.hpp"

#include <algorithm>

namespace empath {

void AgentTriple::validate() const {
  if (!user_simulator) fail(ErrorCode::AgentFailure, "user simulator agent not configured");
  if (!responder) fail(ErrorCode::AgentFailure, "responder agent not configured");
  if (!evaluator) fail(ErrorCode::AgentFailure, "rubric evaluator agent not configured");
}

void SandboxConfig::validate() const {
  if (max_refinements < 1) fail(ErrorCode::InvalidArgument, "max_refinements must be >= 1");
  if (max_turns < 1) fail(ErrorCode::InvalidArgument, "max_turns must be >= 1");
}

Turn run_turn(std::span<const DialogueExchange> history, std::string_view pending_user_utterance,
              const UserProfile& profile, const AgentTriple& agents, const SandboxConfig& config,
              int turn_index, const TagSpec& tags) {
  agents.validate();
  config.validate();

  Turn turn;
  turn.index = turn_index;
  turn.user_utterance = std::string(pending_user_utterance);

  std::string critique;
  for (int attempt = 1; attempt <= config.max_refinements; ++attempt) {
    std::string reply =
        agents.responder->respond(profile, history, pending_user_utterance, critique, attempt);
    EvalResult eval = agents.evaluator->evaluate(pending_user_utterance, reply);

    turn.assistant_raw = std::move(reply);
    turn.inner_decisions.push_back(eval.decision);
    critique = eval.critique;

    if (eval.decision != RubricDecision::Fail) break;
  }

  turn.decision = turn.inner_decisions.back();
  if (auto parsed = try_parse_four_span(turn.assistant_raw, tags)) turn.parsed = std::move(*parsed);
  return turn;
}

Trajectory run_trajectory(const UserProfile& profile, const Situation& situation,
                          const AgentTriple& agents, const SandboxConfig& config,
                          std::string dialogue_id, const TagSpec& tags) {
  agents.validate();
  config.validate();

  Trajectory t;
  t.dialogue_id = std::move(dialogue_id);
  t.profile = profile;
  t.situation = situation;
  t.rng_seed = config.rng_seed;

  std::vector<DialogueExchange> history;
  std::string pending = agents.user_simulator->next_utterance(profile, situation, history, {});

  for (int turn_index = 1; turn_index <= config.max_turns; ++turn_index) {
    Turn turn = run_turn(history, pending, profile, agents, config, turn_index, tags);
    std::string last_reply = turn.assistant_raw;
    RubricDecision decision = turn.decision;

    history.push_back({turn.user_utterance, turn.assistant_raw});
    t.decision_path.push_back(decision);
    t.turns.push_back(std::move(turn));

    if (decision == RubricDecision::Solved) {
      t.status = TrajectoryStatus::Solved;
      return t;
    }
    if (turn_index < config.max_turns) {
      // Rubric feedback stays hidden: the simulator sees only the transcript.
      pending = agents.user_simulator->next_utterance(profile, situation, history, last_reply);
    }
  }

  t.status = TrajectoryStatus::Exhausted;
  return t;
}

FilterSet FilterSet::defaults(const EmotionTaxonomy& taxonomy, const TagSpec& tags) {
  FilterSet set;
  set.add("parseable", [tags](const Trajectory& t) {
    return std::all_of(t.turns.begin(), t.turns.end(), [&](const Turn& turn) {
      return turn.parsed.has_value() || try_parse_four_span(turn.assistant_raw, tags).has_value();
    });
  });
  set.add("emotion_canonical", [taxonomy, tags](const Trajectory& t) {
    return std::all_of(t.turns.begin(), t.turns.end(), [&](const Turn& turn) {
      auto span = turn.parsed ? std::optional<std::string>(turn.parsed->emotion)
                              : extract_span(turn.assistant_raw, kEmotionSpan, tags);
      return span && try_canonical_emotion(*span, taxonomy).has_value();
    });
  });
  set.add("non_degenerate", [](const Trajectory& t) {
    if (t.turns.empty()) return false;
    return std::all_of(t.turns.begin(), t.turns.end(), [](const Turn& turn) {
      return !trim_view(turn.user_utterance).empty();
    });
  });
  return set;
}

void FilterSet::add(std::string name, FilterPredicate predicate) {
  if (filters_.emplace(name, std::move(predicate)).second) order_.push_back(std::move(name));
}

std::vector<std::string> FilterSet::names() const { return order_; }

FilterSet::Verdict FilterSet::apply(const Trajectory& t, std::span<const std::string> names) const {
  Verdict verdict;
  auto run_one = [&](const std::string& name) {
    auto it = filters_.find(name);
    if (it == filters_.end()) fail(ErrorCode::UnknownFilterName, "unknown filter: " + name);
    if (!it->second(t)) {
      verdict.kept = false;
      verdict.failed.push_back(name);
    }
  };
  if (names.empty()) {
    for (const auto& name : order_) run_one(name);
  } else {
    for (const auto& name : names) run_one(name);
  }
  return verdict;
}

}  // namespace empath
