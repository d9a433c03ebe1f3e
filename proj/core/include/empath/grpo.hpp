// Desk-scale group-relative policy optimization lab: tabular softmax policies
// over tiny vocabularies, group-normalized advantages, a clipped surrogate
// with an exact KL anchor, analytic gradients, and a reference trainer. Small
// enough that every quantity can be checked against enumeration or finite
// differences.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "empath/common.hpp"
#include "empath/span_format.hpp"

namespace empath {

struct GrpoConfig {
  double advantage_epsilon = 1e-4;  // added to the group standard deviation
  double clip_epsilon = 0.2;
  double kl_beta = 0.04;
  double learning_rate = 0.1;
  int steps = 500;
  int group_size = 8;
  // Sample candidate groups from the frozen anchor instead of the live
  // policy. With a frozen sampler the clip window caps how far the policy can
  // move, so this is off by default.
  bool sample_from_anchor = false;

  void validate() const;
};

// Sparse gradient over policy logits, keyed by state.
class GradientTable {
 public:
  std::vector<double>& row(std::uint64_t state_key, int vocab_size);
  const std::unordered_map<std::uint64_t, std::vector<double>>& rows() const { return rows_; }
  double value(std::uint64_t state_key, int token) const;  // 0 when absent
  void accumulate(const GradientTable& other, double scale);
  double max_abs() const;
  bool all_finite() const;

 private:
  std::unordered_map<std::uint64_t, std::vector<double>> rows_;
};

// Tabular softmax policy. The conditioning state is one of: a single shared
// state, the position in the sequence, or the full emitted prefix. Logits
// default to zero (uniform distribution) and rows are materialized on write.
class ToyPolicy {
 public:
  enum class StateMode { SingleState, PositionConditioned, PrefixConditioned };

  ToyPolicy(std::vector<std::string> vocabulary, StateMode mode, int horizon,
            int context_count = 1);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  int vocab_size() const { return static_cast<int>(vocabulary_.size()); }
  int horizon() const { return horizon_; }
  int context_count() const { return context_count_; }
  StateMode mode() const { return mode_; }
  int token_id(std::string_view name) const;  // UNKNOWN_TOKEN

  std::vector<double> probabilities(int context, std::span<const int> prefix) const;
  double log_prob(int context, std::span<const int> prefix, int token) const;
  double sequence_log_prob(int context, std::span<const int> tokens) const;
  std::vector<int> sample_sequence(int context, std::mt19937_64& rng) const;

  double logit(int context, std::span<const int> prefix, int token) const;
  void set_logit(int context, std::span<const int> prefix, int token, double value);
  void nudge(std::uint64_t state_key, int token, double delta);
  // logits += scale * grad
  void apply_update(const GradientTable& grad, double scale);

  std::uint64_t state_key(int context, std::span<const int> prefix) const;
  // Logical states of one context (prefix mode: all prefixes shorter than the
  // horizon). Throws ENUMERATION_TOO_LARGE beyond the desk-scale guard.
  void for_each_state(int context,
                      const std::function<void(std::span<const int>, std::uint64_t)>& fn) const;
  std::uint64_t states_per_context() const;

 private:
  std::vector<double> row_or_zero(std::uint64_t key) const;

  std::vector<std::string> vocabulary_;
  StateMode mode_;
  int horizon_;
  int context_count_;
  std::unordered_map<std::uint64_t, std::vector<double>> rows_;
};

struct CandidateGroup {
  int context = 0;
  std::vector<std::vector<int>> candidates;
  std::vector<double> sampling_log_probs;  // under the sampling snapshot
  std::vector<double> rewards;
  std::vector<double> advantages;

  std::size_t size() const { return candidates.size(); }
  void validate() const;  // consistent sizes, at least two members
};

// (r_j - mean) / (population std + epsilon); all-equal groups map to zeros.
std::vector<double> normalize_advantages(std::span<const double> rewards,
                                         double advantage_epsilon);

// exp(logp_current - logp_reference); throws NONFINITE_LOGPROB.
double importance_ratio(double logp_current, double logp_reference);

// min(rho * advantage, clamp(rho, 1-eps, 1+eps) * advantage)
double clipped_term(double rho, double advantage, double clip_epsilon);

// Exact KL(p || q) of the induced sequence distributions: per-state KL
// weighted by p's visitation, enumerated exactly. Policies must share
// vocabulary, mode and horizon. Throws SUPPORT_MISMATCH when q assigns zero
// mass where p does not.
double kl_categorical(const ToyPolicy& p, const ToyPolicy& q, int context = 0);

// (1/N) sum_j min(rho_j A_j, clip(rho_j) A_j) - beta * KL(policy || anchor).
double grpo_objective(const CandidateGroup& group, const ToyPolicy& policy,
                      const ToyPolicy& anchor, const GrpoConfig& config);

// Analytic gradient of grpo_objective with respect to the policy logits.
GradientTable grpo_gradient(const CandidateGroup& group, const ToyPolicy& policy,
                            const ToyPolicy& anchor, const GrpoConfig& config);

// Negative log-likelihood of a fixed target sequence, and its logit gradient.
double sft_nll(const ToyPolicy& policy, int context, std::span<const int> target);
GradientTable sft_nll_gradient(const ToyPolicy& policy, int context, std::span<const int> target);

struct ToyTask {
  std::string name;
  std::vector<std::string> vocabulary;
  ToyPolicy::StateMode mode = ToyPolicy::StateMode::SingleState;
  int horizon = 1;
  int context_count = 1;
  std::function<double(std::span<const int>)> reward;  // over token ids
  // Optional cold start applied to the fresh policy before the anchor
  // freezes, mirroring the SFT-then-RL pipeline: the KL anchor is the
  // warmed policy, not the uniform one.
  std::function<void(ToyPolicy&)> init;
};

// Rewards 1 for the first arm, 0 for the second.
ToyTask make_two_armed_bandit();
// Vocabulary of the eight span tags plus one content token; reward is the
// format reward of the concatenated emission. The horizon of 12 is the
// shortest length that can satisfy all nine constraints (eight tags plus a
// content token inside each span). Ships with a brief SFT cold start on the
// canonical demonstration (the ordering constraint alone gives no gradient),
// leaving initial mean reward below 0.5.
ToyTask make_tag_sequence_task(const TagSpec& tags = TagSpec::defaults(), int horizon = 12);

struct TrainStep {
  int step = 0;
  double objective = 0.0;
  double mean_reward = 0.0;     // over the sampled group
  double kl = 0.0;              // against the frozen anchor
  double expected_reward = 0.0; // exact when enumerable, NaN otherwise
};

struct TrainResult {
  std::vector<TrainStep> trace;
  ToyPolicy policy;  // final parameters
  ToyPolicy anchor;  // frozen snapshot from trainer start
};

// Iterates sample -> score -> normalize -> ascend. Each group is sampled from
// a snapshot of the live policy (or the anchor, per config) and ratios are
// taken against that snapshot; the KL penalty always anchors to the frozen
// start policy. Bit-reproducible for a given seed. Throws DIVERGED on
// non-finite numbers.
TrainResult grpo_train(const ToyTask& task, const GrpoConfig& config, std::uint64_t seed);

// Exact expected task reward under the policy, by sequence enumeration.
double expected_reward_exact(const ToyPolicy& policy, const ToyTask& task, int context = 0);

void write_trace_csv(const std::vector<TrainStep>& trace, std::ostream& out);

struct GradCheckReport {
  double max_rel_error = 0.0;
  int instances = 0;
  int comparisons = 0;
};

// Compares grpo_gradient against central finite differences of
// grpo_objective on randomized instances (mixed modes, horizons, betas).
GradCheckReport run_gradient_check(int instances, std::uint64_t seed, double fd_step = 1e-5);

}  // namespace empath
