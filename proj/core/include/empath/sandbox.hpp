// Rubric-guided dialogue synthesis sandbox: an outer loop over user turns and
// an inner refinement loop over candidate replies, driven by three agent
// handles. The evaluator sees exactly one (user utterance, reply) pair per
// call and the user simulator never sees rubric decisions; both contracts are
// fixed by the interface signatures below.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "empath/reward.hpp"
#include "empath/types.hpp"

namespace empath {

struct DialogueExchange {
  std::string user;
  std::string assistant;
};

class UserSimulatorAgent {
 public:
  virtual ~UserSimulatorAgent() = default;
  // Opening utterance when history is empty and last_reply is empty;
  // otherwise the reaction to the latest reply given the full transcript.
  virtual std::string next_utterance(const UserProfile& profile, const Situation& situation,
                                     std::span<const DialogueExchange> history,
                                     std::string_view last_reply) = 0;
};

class ResponderAgent {
 public:
  virtual ~ResponderAgent() = default;
  // critique is empty on the first attempt of a turn; attempt is 1-based.
  virtual std::string respond(const UserProfile& profile,
                              std::span<const DialogueExchange> history,
                              std::string_view pending_user_utterance, std::string_view critique,
                              int attempt) = 0;
};

struct EvalResult {
  RubricDecision decision = RubricDecision::Fail;
  std::optional<RubricScores> scores;
  std::string critique;
};

class RubricEvaluatorAgent {
 public:
  virtual ~RubricEvaluatorAgent() = default;
  virtual EvalResult evaluate(std::string_view user_utterance,
                              std::string_view assistant_reply) = 0;
};

struct AgentTriple {
  std::shared_ptr<UserSimulatorAgent> user_simulator;
  std::shared_ptr<ResponderAgent> responder;
  std::shared_ptr<RubricEvaluatorAgent> evaluator;

  void validate() const;  // AGENT_FAILURE when a handle is missing
};

struct SandboxConfig {
  int max_refinements = 5;  // inner attempts per turn
  int max_turns = 10;       // outer turns per dialogue
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Runs one turn: up to max_refinements responder/evaluator rounds, stopping
// early on PASS or SOLVED. PASS and FAIL continue the dialogue identically;
// only SOLVED ends it. The returned turn keeps the last candidate reply, its
// parse attempt, and every inner decision.
Turn run_turn(std::span<const DialogueExchange> history, std::string_view pending_user_utterance,
              const UserProfile& profile, const AgentTriple& agents, const SandboxConfig& config,
              int turn_index, const TagSpec& tags = TagSpec::defaults());

// Full rollout: opening utterance, then turns until SOLVED or max_turns.
Trajectory run_trajectory(const UserProfile& profile, const Situation& situation,
                          const AgentTriple& agents, const SandboxConfig& config,
                          std::string dialogue_id = {},
                          const TagSpec& tags = TagSpec::defaults());

// Quality filters. A predicate returns true when the trajectory is kept.
using FilterPredicate = std::function<bool(const Trajectory&)>;

class FilterSet {
 public:
  // f1 all turns parse into four spans, f2 every emotion span canonicalizes,
  // f3 at least one turn and all user utterances non-empty.
  static FilterSet defaults(const EmotionTaxonomy& taxonomy = EmotionTaxonomy::defaults(),
                            const TagSpec& tags = TagSpec::defaults());

  void add(std::string name, FilterPredicate predicate);
  std::vector<std::string> names() const;

  struct Verdict {
    bool kept = true;
    std::vector<std::string> failed;
  };

  // Applies the named filters (all registered ones when names is empty).
  // Throws UNKNOWN_FILTER_NAME.
  Verdict apply(const Trajectory& t, std::span<const std::string> names = {}) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, FilterPredicate> filters_;
};

}  // namespace empath
