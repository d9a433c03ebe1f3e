// Shared builders for valid domain objects used across the unit suites.
#pragma once

#include <string>
#include <vector>

#include "empath/span_format.hpp"
#include "empath/types.hpp"

namespace testsupport {

inline empath::UserProfile make_profile(std::string id = "user_t0001") {
  empath::UserProfile p;
  p.user_id = std::move(id);
  p.mbti = "INFJ";
  p.gender = "female";
  p.relationship = "married";
  p.occupation = "nurse";
  p.about = "checks on everyone else first";
  p.recent_activities = {"picked up an extra shift"};
  return p;
}

inline empath::Situation make_situation(std::string emotion = "caring") {
  empath::Situation s;
  s.text = "my neighbor just lost her husband";
  s.emotion.canonical = std::move(emotion);
  return s;
}

inline std::string compliant_text(const std::string& emotion = "caring") {
  empath::FourSpanOutput spans;
  spans.understanding = "that sounds really heavy";
  spans.reasoning = "naming the feeling makes it manageable";
  spans.emotion = emotion;
  spans.response = "I'm here with you; tell me more";
  return empath::render_four_span(spans);
}

inline empath::Turn make_turn(int index, std::vector<empath::RubricDecision> inner,
                              const std::string& emotion = "caring") {
  empath::Turn t;
  t.index = index;
  t.user_utterance = "it still weighs on me";
  t.assistant_raw = compliant_text(emotion);
  t.parsed = empath::parse_four_span(t.assistant_raw);
  t.inner_decisions = std::move(inner);
  t.decision = t.inner_decisions.back();
  return t;
}

// One-turn solved trajectory that passes validate_trajectory.
inline empath::Trajectory make_trajectory(std::string id = "dlg_t00001") {
  empath::Trajectory t;
  t.dialogue_id = std::move(id);
  t.profile = make_profile();
  t.situation = make_situation();
  t.turns.push_back(make_turn(1, {empath::RubricDecision::Fail, empath::RubricDecision::Solved}));
  t.decision_path = {empath::RubricDecision::Solved};
  t.status = empath::TrajectoryStatus::Solved;
  t.rng_seed = 7;
  return t;
}

}  // namespace testsupport
