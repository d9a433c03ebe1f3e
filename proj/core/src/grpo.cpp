#include "empath/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace empath {

namespace {

constexpr std::uint64_t kEnumerationGuard = 2'000'000;

double logsumexp(std::span<const double> xs) {
  double m = *std::max_element(xs.begin(), xs.end());
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

std::vector<double> softmax(std::span<const double> logits) {
  double lse = logsumexp(logits);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = std::exp(logits[i] - lse);
  return out;
}

// Uniform double in [0,1) from the top 53 bits; portable across platforms.
double canonical_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void GrpoConfig::validate() const {
  if (!(advantage_epsilon > 0)) fail(ErrorCode::InvalidArgument, "advantage_epsilon must be > 0");
  if (!(clip_epsilon > 0 && clip_epsilon < 1)) {
    fail(ErrorCode::InvalidArgument, "clip_epsilon must lie in (0,1)");
  }
  if (kl_beta < 0) fail(ErrorCode::InvalidArgument, "kl_beta must be >= 0");
  if (!(learning_rate > 0)) fail(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  if (steps < 1) fail(ErrorCode::InvalidArgument, "steps must be >= 1");
  if (group_size < 2) fail(ErrorCode::InvalidArgument, "group_size must be >= 2");
}

std::vector<double>& GradientTable::row(std::uint64_t state_key, int vocab_size) {
  auto [it, inserted] = rows_.try_emplace(state_key);
  if (inserted) it->second.assign(vocab_size, 0.0);
  return it->second;
}

double GradientTable::value(std::uint64_t state_key, int token) const {
  auto it = rows_.find(state_key);
  if (it == rows_.end()) return 0.0;
  return it->second[token];
}

void GradientTable::accumulate(const GradientTable& other, double scale) {
  for (const auto& [key, src] : other.rows_) {
    auto& dst = row(key, static_cast<int>(src.size()));
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
  }
}

double GradientTable::max_abs() const {
  double m = 0.0;
  for (const auto& [key, row] : rows_) {
    for (double v : row) m = std::max(m, std::abs(v));
  }
  return m;
}

bool GradientTable::all_finite() const {
  for (const auto& [key, row] : rows_) {
    for (double v : row) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ToyPolicy::ToyPolicy(std::vector<std::string> vocabulary, StateMode mode, int horizon,
                     int context_count)
    : vocabulary_(std::move(vocabulary)),
      mode_(mode),
      horizon_(horizon),
      context_count_(context_count) {
  if (vocabulary_.size() < 2) fail(ErrorCode::InvalidArgument, "vocabulary needs >= 2 tokens");
  if (horizon_ < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  if (context_count_ < 1) fail(ErrorCode::InvalidArgument, "context_count must be >= 1");
  if (mode_ == StateMode::SingleState && horizon_ != 1) {
    fail(ErrorCode::InvalidArgument, "single-state policies are one-step policies");
  }
  if (mode_ == StateMode::PrefixConditioned) {
    // Key encoding must stay collision-free: contexts * (V+1)^horizon < 2^63.
    long double keys = static_cast<long double>(context_count_);
    for (int t = 0; t < horizon_; ++t) keys *= vocabulary_.size() + 1;
    if (keys >= 9.2e18L) {
      fail(ErrorCode::EnumerationTooLarge, "prefix state space exceeds the key budget");
    }
  }
}

int ToyPolicy::token_id(std::string_view name) const {
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (vocabulary_[i] == name) return static_cast<int>(i);
  }
  fail(ErrorCode::UnknownToken, "token not in vocabulary: " + std::string(name));
}

std::uint64_t ToyPolicy::state_key(int context, std::span<const int> prefix) const {
  if (context < 0 || context >= context_count_) {
    fail(ErrorCode::InvalidArgument, "context out of range");
  }
  switch (mode_) {
    case StateMode::SingleState:
      return static_cast<std::uint64_t>(context);
    case StateMode::PositionConditioned:
      return static_cast<std::uint64_t>(context) * horizon_ + prefix.size();
    case StateMode::PrefixConditioned: {
      std::uint64_t key = static_cast<std::uint64_t>(context);
      for (int token : prefix) {
        key = key * (vocabulary_.size() + 1) + static_cast<std::uint64_t>(token) + 1;
      }
      return key;
    }
  }
  return 0;
}

std::vector<double> ToyPolicy::row_or_zero(std::uint64_t key) const {
  auto it = rows_.find(key);
  if (it != rows_.end()) return it->second;
  return std::vector<double>(vocabulary_.size(), 0.0);
}

std::vector<double> ToyPolicy::probabilities(int context, std::span<const int> prefix) const {
  std::vector<double> logits = row_or_zero(state_key(context, prefix));
  return softmax(logits);
}

double ToyPolicy::log_prob(int context, std::span<const int> prefix, int token) const {
  if (token < 0 || token >= vocab_size()) fail(ErrorCode::UnknownToken, "token id out of range");
  std::vector<double> logits = row_or_zero(state_key(context, prefix));
  return logits[token] - logsumexp(logits);
}

double ToyPolicy::sequence_log_prob(int context, std::span<const int> tokens) const {
  if (tokens.empty() || static_cast<int>(tokens.size()) > horizon_) {
    fail(ErrorCode::InvalidArgument, "sequence length must lie in [1, horizon]");
  }
  double lp = 0.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    lp += log_prob(context, tokens.subspan(0, t), tokens[t]);
  }
  if (!std::isfinite(lp)) fail(ErrorCode::NonfiniteLogProb, "sequence log-probability not finite");
  return lp;
}

std::vector<int> ToyPolicy::sample_sequence(int context, std::mt19937_64& rng) const {
  std::vector<int> tokens;
  tokens.reserve(horizon_);
  for (int t = 0; t < horizon_; ++t) {
    std::vector<double> p = probabilities(context, tokens);
    double u = canonical_uniform(rng);
    double acc = 0.0;
    int chosen = vocab_size() - 1;
    for (int v = 0; v < vocab_size(); ++v) {
      acc += p[v];
      if (u < acc) {
        chosen = v;
        break;
      }
    }
    tokens.push_back(chosen);
  }
  return tokens;
}

double ToyPolicy::logit(int context, std::span<const int> prefix, int token) const {
  if (token < 0 || token >= vocab_size()) fail(ErrorCode::UnknownToken, "token id out of range");
  return row_or_zero(state_key(context, prefix))[token];
}

void ToyPolicy::set_logit(int context, std::span<const int> prefix, int token, double value) {
  if (token < 0 || token >= vocab_size()) fail(ErrorCode::UnknownToken, "token id out of range");
  auto [it, inserted] = rows_.try_emplace(state_key(context, prefix));
  if (inserted) it->second.assign(vocab_size(), 0.0);
  it->second[token] = value;
}

void ToyPolicy::nudge(std::uint64_t key, int token, double delta) {
  auto [it, inserted] = rows_.try_emplace(key);
  if (inserted) it->second.assign(vocab_size(), 0.0);
  it->second[token] += delta;
}

void ToyPolicy::apply_update(const GradientTable& grad, double scale) {
  for (const auto& [key, src] : grad.rows()) {
    auto [it, inserted] = rows_.try_emplace(key);
    if (inserted) it->second.assign(vocab_size(), 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) it->second[i] += scale * src[i];
  }
}

std::uint64_t ToyPolicy::states_per_context() const {
  switch (mode_) {
    case StateMode::SingleState:
      return 1;
    case StateMode::PositionConditioned:
      return static_cast<std::uint64_t>(horizon_);
    case StateMode::PrefixConditioned: {
      std::uint64_t total = 0;
      std::uint64_t level = 1;
      for (int t = 0; t < horizon_; ++t) {
        total += level;
        if (total > kEnumerationGuard) {
          fail(ErrorCode::EnumerationTooLarge,
               "prefix state space exceeds the enumeration guard");
        }
        level *= vocab_size();
      }
      return total;
    }
  }
  return 0;
}

void ToyPolicy::for_each_state(
    int context, const std::function<void(std::span<const int>, std::uint64_t)>& fn) const {
  states_per_context();  // guard
  switch (mode_) {
    case StateMode::SingleState: {
      fn({}, state_key(context, {}));
      return;
    }
    case StateMode::PositionConditioned: {
      // One representative prefix per position; the key depends only on size.
      std::vector<int> prefix;
      for (int t = 0; t < horizon_; ++t) {
        fn(prefix, state_key(context, prefix));
        prefix.push_back(0);
      }
      return;
    }
    case StateMode::PrefixConditioned: {
      std::vector<int> prefix;
      std::function<void()> recurse = [&]() {
        fn(prefix, state_key(context, prefix));
        if (static_cast<int>(prefix.size()) >= horizon_ - 1) return;
        for (int v = 0; v < vocab_size(); ++v) {
          prefix.push_back(v);
          recurse();
          prefix.pop_back();
        }
      };
      recurse();
      return;
    }
  }
}

void CandidateGroup::validate() const {
  if (candidates.size() < 2) fail(ErrorCode::InvalidArgument, "candidate group needs >= 2 members");
  if (sampling_log_probs.size() != candidates.size() || rewards.size() != candidates.size() ||
      advantages.size() != candidates.size()) {
    fail(ErrorCode::InvalidArgument, "candidate group field lengths disagree");
  }
  for (const auto& c : candidates) {
    if (c.empty()) fail(ErrorCode::InvalidArgument, "candidate sequence is empty");
  }
}

std::vector<double> normalize_advantages(std::span<const double> rewards,
                                         double advantage_epsilon) {
  if (rewards.empty()) fail(ErrorCode::InvalidArgument, "cannot normalize an empty group");
  if (!(advantage_epsilon > 0)) fail(ErrorCode::InvalidArgument, "advantage_epsilon must be > 0");
  // Exactly-equal groups carry no signal; return zeros outright rather than
  // letting an inexact mean leak in as a spurious advantage.
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); })) {
    return std::vector<double>(rewards.size(), 0.0);
  }
  double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / rewards.size();
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= rewards.size();  // population variance
  double denom = std::sqrt(var) + advantage_epsilon;
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

double importance_ratio(double logp_current, double logp_reference) {
  if (!std::isfinite(logp_current) || !std::isfinite(logp_reference)) {
    fail(ErrorCode::NonfiniteLogProb, "importance ratio over non-finite log-probabilities");
  }
  double rho = std::exp(logp_current - logp_reference);
  if (!std::isfinite(rho)) fail(ErrorCode::NonfiniteLogProb, "importance ratio overflowed");
  return rho;
}

double clipped_term(double rho, double advantage, double clip_epsilon) {
  if (!(clip_epsilon > 0 && clip_epsilon < 1)) {
    fail(ErrorCode::InvalidArgument, "clip_epsilon must lie in (0,1)");
  }
  double clipped = std::clamp(rho, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  return std::min(rho * advantage, clipped * advantage);
}

namespace {

void check_comparable(const ToyPolicy& p, const ToyPolicy& q) {
  if (p.vocabulary() != q.vocabulary() || p.mode() != q.mode() || p.horizon() != q.horizon()) {
    fail(ErrorCode::InvalidArgument, "policies are not defined over the same space");
  }
}

double state_kl(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p[v] <= 0.0) continue;
    if (q[v] <= 0.0) {
      fail(ErrorCode::SupportMismatch, "q assigns zero mass where p does not");
    }
    kl += p[v] * (std::log(p[v]) - std::log(q[v]));
  }
  return kl;
}

}  // namespace

double kl_categorical(const ToyPolicy& p, const ToyPolicy& q, int context) {
  check_comparable(p, q);
  double kl = 0.0;
  switch (p.mode()) {
    case ToyPolicy::StateMode::SingleState:
    case ToyPolicy::StateMode::PositionConditioned: {
      std::vector<int> prefix;
      int positions = p.mode() == ToyPolicy::StateMode::SingleState ? 1 : p.horizon();
      for (int t = 0; t < positions; ++t) {
        kl += state_kl(p.probabilities(context, prefix), q.probabilities(context, prefix));
        prefix.push_back(0);
      }
      break;
    }
    case ToyPolicy::StateMode::PrefixConditioned: {
      p.states_per_context();  // guard
      // sum over states of P(reach) * KL at the state
      std::vector<int> prefix;
      std::function<void(double)> recurse = [&](double weight) {
        std::vector<double> pp = p.probabilities(context, prefix);
        std::vector<double> qq = q.probabilities(context, prefix);
        kl += weight * state_kl(pp, qq);
        if (static_cast<int>(prefix.size()) >= p.horizon() - 1) return;
        for (int v = 0; v < p.vocab_size(); ++v) {
          prefix.push_back(v);
          recurse(weight * pp[v]);
          prefix.pop_back();
        }
      };
      recurse(1.0);
      break;
    }
  }
  // Floor tiny negative rounding; KL is non-negative by Gibbs' inequality.
  if (kl < 0.0 && kl > -1e-12) kl = 0.0;
  return kl;
}

namespace {

// The min(rho*A, clip(rho)*A) branch passes gradient iff the unclipped term
// is active: rho <= 1+eps for positive advantages, rho >= 1-eps for negative.
bool surrogate_gradient_active(double rho, double advantage, double clip_epsilon) {
  if (advantage >= 0.0) return rho <= 1.0 + clip_epsilon;
  return rho >= 1.0 - clip_epsilon;
}

void add_logp_gradient(GradientTable& grad, const ToyPolicy& policy, int context,
                       std::span<const int> tokens, double coeff) {
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    auto prefix = tokens.subspan(0, t);
    std::uint64_t key = policy.state_key(context, prefix);
    std::vector<double> p = policy.probabilities(context, prefix);
    auto& row = grad.row(key, policy.vocab_size());
    for (int v = 0; v < policy.vocab_size(); ++v) {
      double indicator = (v == tokens[t]) ? 1.0 : 0.0;
      row[v] += coeff * (indicator - p[v]);
    }
  }
}

// d KL(p||q) / d logits for one state with upstream visitation weight w and
// accumulated downstream correction; closed form for position/single modes.
void add_state_kl_gradient(GradientTable& grad, const ToyPolicy& policy, const ToyPolicy& anchor,
                           int context, std::span<const int> prefix, double scale) {
  std::uint64_t key = policy.state_key(context, prefix);
  std::vector<double> p = policy.probabilities(context, prefix);
  std::vector<double> q = anchor.probabilities(context, prefix);
  double kl = state_kl(p, q);
  auto& row = grad.row(key, policy.vocab_size());
  for (int v = 0; v < policy.vocab_size(); ++v) {
    if (p[v] <= 0.0) continue;
    row[v] += scale * p[v] * ((std::log(p[v]) - std::log(q[v])) - kl);
  }
}

// Exact gradient of sequence-level KL for prefix policies:
// grad = E_p[(log p(seq) - log q(seq)) * grad log p(seq)], by enumeration.
void add_prefix_kl_gradient(GradientTable& grad, const ToyPolicy& policy, const ToyPolicy& anchor,
                            int context, double scale) {
  policy.states_per_context();  // guard
  std::vector<int> seq;
  std::function<void(double, double, double)> recurse = [&](double weight, double lp, double lq) {
    if (static_cast<int>(seq.size()) == policy.horizon()) {
      double f = lp - lq;
      add_logp_gradient(grad, policy, context, seq, scale * weight * f);
      return;
    }
    std::vector<double> p = policy.probabilities(context, seq);
    std::vector<double> q = anchor.probabilities(context, seq);
    for (int v = 0; v < policy.vocab_size(); ++v) {
      if (p[v] <= 0.0) continue;
      if (q[v] <= 0.0) fail(ErrorCode::SupportMismatch, "q assigns zero mass where p does not");
      seq.push_back(v);
      recurse(weight * p[v], lp + std::log(p[v]), lq + std::log(q[v]));
      seq.pop_back();
    }
  };
  recurse(1.0, 0.0, 0.0);
}

}  // namespace

double grpo_objective(const CandidateGroup& group, const ToyPolicy& policy,
                      const ToyPolicy& anchor, const GrpoConfig& config) {
  group.validate();
  config.validate();
  double surrogate = 0.0;
  for (std::size_t j = 0; j < group.size(); ++j) {
    double lp = policy.sequence_log_prob(group.context, group.candidates[j]);
    double rho = importance_ratio(lp, group.sampling_log_probs[j]);
    surrogate += clipped_term(rho, group.advantages[j], config.clip_epsilon);
  }
  surrogate /= static_cast<double>(group.size());
  double objective = surrogate;
  if (config.kl_beta > 0.0) {
    objective -= config.kl_beta * kl_categorical(policy, anchor, group.context);
  }
  if (!std::isfinite(objective)) fail(ErrorCode::Diverged, "objective is not finite");
  return objective;
}

GradientTable grpo_gradient(const CandidateGroup& group, const ToyPolicy& policy,
                            const ToyPolicy& anchor, const GrpoConfig& config) {
  group.validate();
  config.validate();
  GradientTable grad;
  double inv_n = 1.0 / static_cast<double>(group.size());
  for (std::size_t j = 0; j < group.size(); ++j) {
    double lp = policy.sequence_log_prob(group.context, group.candidates[j]);
    double rho = importance_ratio(lp, group.sampling_log_probs[j]);
    if (!surrogate_gradient_active(rho, group.advantages[j], config.clip_epsilon)) continue;
    // d(rho*A)/dtheta = rho * A * dlogp/dtheta
    add_logp_gradient(grad, policy, group.context, group.candidates[j],
                      inv_n * rho * group.advantages[j]);
  }
  if (config.kl_beta > 0.0) {
    switch (policy.mode()) {
      case ToyPolicy::StateMode::SingleState:
      case ToyPolicy::StateMode::PositionConditioned: {
        std::vector<int> prefix;
        int positions =
            policy.mode() == ToyPolicy::StateMode::SingleState ? 1 : policy.horizon();
        for (int t = 0; t < positions; ++t) {
          add_state_kl_gradient(grad, policy, anchor, group.context, prefix, -config.kl_beta);
          prefix.push_back(0);
        }
        break;
      }
      case ToyPolicy::StateMode::PrefixConditioned:
        add_prefix_kl_gradient(grad, policy, anchor, group.context, -config.kl_beta);
        break;
    }
  }
  if (!grad.all_finite()) fail(ErrorCode::Diverged, "gradient is not finite");
  return grad;
}

double sft_nll(const ToyPolicy& policy, int context, std::span<const int> target) {
  if (target.empty() || static_cast<int>(target.size()) > policy.horizon()) {
    fail(ErrorCode::InvalidArgument, "target length must lie in [1, horizon]");
  }
  return -policy.sequence_log_prob(context, target);
}

GradientTable sft_nll_gradient(const ToyPolicy& policy, int context, std::span<const int> target) {
  if (target.empty() || static_cast<int>(target.size()) > policy.horizon()) {
    fail(ErrorCode::InvalidArgument, "target length must lie in [1, horizon]");
  }
  GradientTable grad;
  // d(-log p)/d logits at each visited state: softmax minus one-hot.
  add_logp_gradient(grad, policy, context, target, -1.0);
  return grad;
}

ToyTask make_two_armed_bandit() {
  ToyTask task;
  task.name = "two-armed";
  task.vocabulary = {"arm_a", "arm_b"};
  task.mode = ToyPolicy::StateMode::SingleState;
  task.horizon = 1;
  task.reward = [](std::span<const int> tokens) { return tokens[0] == 0 ? 1.0 : 0.0; };
  return task;
}

ToyTask make_tag_sequence_task(const TagSpec& tags, int horizon) {
  ToyTask task;
  task.name = "tag-seq";
  for (int i = 0; i < 8; ++i) task.vocabulary.emplace_back(tags.tag(i));
  task.vocabulary.emplace_back("ok");
  task.mode = ToyPolicy::StateMode::PositionConditioned;
  task.horizon = horizon;
  std::vector<std::string> vocab = task.vocabulary;
  task.reward = [vocab, tags](std::span<const int> tokens) {
    std::string text;
    for (int t : tokens) text += vocab[static_cast<std::size_t>(t)];
    return format_reward(text, tags);
  };
  // The ordering constraint is a single all-or-nothing bit, so pure RL from
  // a uniform policy locks onto "all tags present, wrong order" and stalls at
  // 8/9. A brief SFT cold start on the one canonical demonstration points
  // every position at the right token while leaving the policy broad (mean
  // reward stays below 0.5); RL then sharpens it the rest of the way.
  if (horizon >= 12) {
    std::vector<int> demo;
    const int filler = 8;
    for (int span = 0; span < 4; ++span) {
      demo.push_back(2 * span);
      demo.push_back(filler);
      demo.push_back(2 * span + 1);
    }
    while (static_cast<int>(demo.size()) < horizon) demo.push_back(filler);
    task.init = [demo](ToyPolicy& policy) {
      for (int i = 0; i < 7; ++i) {
        GradientTable grad = sft_nll_gradient(policy, 0, demo);
        policy.apply_update(grad, -0.25);
      }
    };
  }
  return task;
}

double expected_reward_exact(const ToyPolicy& policy, const ToyTask& task, int context) {
  long double sequences = 1.0L;
  for (int t = 0; t < policy.horizon(); ++t) sequences *= policy.vocab_size();
  if (sequences > 200'000.0L) {
    fail(ErrorCode::EnumerationTooLarge, "sequence space too large for exact expectation");
  }
  double total = 0.0;
  std::vector<int> seq;
  std::function<void(double)> recurse = [&](double weight) {
    if (static_cast<int>(seq.size()) == policy.horizon()) {
      total += weight * task.reward(seq);
      return;
    }
    std::vector<double> p = policy.probabilities(context, seq);
    for (int v = 0; v < policy.vocab_size(); ++v) {
      if (p[v] <= 0.0) continue;
      seq.push_back(v);
      recurse(weight * p[v]);
      seq.pop_back();
    }
  };
  recurse(1.0);
  return total;
}

TrainResult grpo_train(const ToyTask& task, const GrpoConfig& config, std::uint64_t seed) {
  config.validate();
  if (!task.reward) fail(ErrorCode::InvalidArgument, "task has no reward function");

  ToyPolicy policy(task.vocabulary, task.mode, task.horizon, task.context_count);
  if (task.init) task.init(policy);
  ToyPolicy anchor = policy;  // frozen after the task's cold start
  std::mt19937_64 rng(seed);

  bool enumerable = true;
  {
    long double sequences = 1.0L;
    for (int t = 0; t < task.horizon; ++t) sequences *= task.vocabulary.size();
    enumerable = sequences <= 4096.0L;
  }

  TrainResult result{{}, policy, anchor};
  result.trace.reserve(config.steps);

  for (int step = 1; step <= config.steps; ++step) {
    int context = (step - 1) % task.context_count;
    const ToyPolicy& sampler = config.sample_from_anchor ? anchor : policy;

    CandidateGroup group;
    group.context = context;
    for (int j = 0; j < config.group_size; ++j) {
      std::vector<int> tokens = sampler.sample_sequence(context, rng);
      group.sampling_log_probs.push_back(sampler.sequence_log_prob(context, tokens));
      double r = task.reward(tokens);
      if (!std::isfinite(r)) {
        fail(ErrorCode::Diverged,
             "non-finite reward from the task at step " + std::to_string(step));
      }
      group.rewards.push_back(r);
      group.candidates.push_back(std::move(tokens));
    }
    group.advantages = normalize_advantages(group.rewards, config.advantage_epsilon);

    TrainStep entry;
    entry.step = step;
    entry.objective = grpo_objective(group, policy, anchor, config);
    entry.mean_reward =
        std::accumulate(group.rewards.begin(), group.rewards.end(), 0.0) / group.rewards.size();

    GradientTable grad = grpo_gradient(group, policy, anchor, config);
    policy.apply_update(grad, config.learning_rate);

    entry.kl = kl_categorical(policy, anchor, context);
    entry.expected_reward = enumerable
                                ? expected_reward_exact(policy, task, context)
                                : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(entry.objective) || !std::isfinite(entry.kl)) {
      fail(ErrorCode::Diverged, "training diverged at step " + std::to_string(step));
    }
    result.trace.push_back(entry);
  }

  result.policy = std::move(policy);
  return result;
}

void write_trace_csv(const std::vector<TrainStep>& trace, std::ostream& out) {
  out << "step,objective,mean_reward,kl\n";
  out.precision(17);
  for (const TrainStep& s : trace) {
    out << s.step << "," << s.objective << "," << s.mean_reward << "," << s.kl << "\n";
  }
}

GradCheckReport run_gradient_check(int instances, std::uint64_t seed, double fd_step) {
  if (instances < 1) fail(ErrorCode::InvalidArgument, "instances must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  GradCheckReport report;
  int produced = 0;
  while (produced < instances) {
    int vocab_size = 2 + static_cast<int>(rng() % 3);
    std::vector<std::string> vocab;
    for (int v = 0; v < vocab_size; ++v) vocab.push_back("t" + std::to_string(v));

    auto mode = static_cast<ToyPolicy::StateMode>(rng() % 3);
    int horizon = mode == ToyPolicy::StateMode::SingleState ? 1 : 1 + static_cast<int>(rng() % 3);
    int contexts = 1 + static_cast<int>(rng() % 2);
    int context = static_cast<int>(rng() % contexts);

    ToyPolicy policy(vocab, mode, horizon, contexts);
    ToyPolicy sampler(vocab, mode, horizon, contexts);
    ToyPolicy anchor(vocab, mode, horizon, contexts);
    std::vector<std::uint64_t> keys;
    policy.for_each_state(context, [&](std::span<const int> prefix, std::uint64_t key) {
      keys.push_back(key);
      for (int v = 0; v < vocab_size; ++v) {
        policy.set_logit(context, prefix, v, noise(rng));
        sampler.set_logit(context, prefix, v, noise(rng) * 0.5);
        anchor.set_logit(context, prefix, v, noise(rng) * 0.5);
      }
    });

    GrpoConfig config;
    config.clip_epsilon = 0.2;
    const double betas[3] = {0.0, 0.04, 0.5};
    config.kl_beta = betas[rng() % 3];

    CandidateGroup group;
    group.context = context;
    int n = 4 + static_cast<int>(rng() % 5);
    for (int j = 0; j < n; ++j) {
      std::vector<int> tokens = sampler.sample_sequence(context, rng);
      group.sampling_log_probs.push_back(sampler.sequence_log_prob(context, tokens));
      group.rewards.push_back(canonical_uniform(rng));
      group.candidates.push_back(std::move(tokens));
    }
    group.advantages = normalize_advantages(group.rewards, 1e-4);

    // Keep clear of the clip kinks where the objective is non-differentiable.
    bool near_kink = false;
    for (std::size_t j = 0; j < group.size(); ++j) {
      double rho = importance_ratio(policy.sequence_log_prob(context, group.candidates[j]),
                                    group.sampling_log_probs[j]);
      if (std::abs(rho - (1.0 - config.clip_epsilon)) < 1e-3 ||
          std::abs(rho - (1.0 + config.clip_epsilon)) < 1e-3) {
        near_kink = true;
        break;
      }
    }
    if (near_kink) continue;

    GradientTable analytic = grpo_gradient(group, policy, anchor, config);

    for (std::uint64_t key : keys) {
      for (int v = 0; v < vocab_size; ++v) {
        ToyPolicy plus = policy;
        plus.nudge(key, v, fd_step);
        ToyPolicy minus = policy;
        minus.nudge(key, v, -fd_step);
        double fd = (grpo_objective(group, plus, anchor, config) -
                     grpo_objective(group, minus, anchor, config)) /
                    (2.0 * fd_step);
        double a = analytic.value(key, v);
        double rel = std::abs(a - fd) / (std::abs(a) + std::abs(fd) + 1e-6);
        report.max_rel_error = std::max(report.max_rel_error, rel);
        ++report.comparisons;
      }
    }
    ++produced;
  }
  report.instances = produced;
  return report;
}

}  // namespace empath
