#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "empath/grpo.hpp"

using namespace empath;

TEST_SUITE("grpo") {

TEST_CASE("advantage normalization") {
  SUBCASE("the 0/1 pair lands at +-0.99980") {
    std::vector<double> r{0.0, 1.0};
    std::vector<double> a = normalize_advantages(r, 1e-4);
    CHECK(a[0] == doctest::Approx(-0.99980).epsilon(1e-5));
    CHECK(a[1] == doctest::Approx(0.99980).epsilon(1e-5));
  }
  SUBCASE("all-equal groups normalize to zero") {
    std::vector<double> r{0.3, 0.3, 0.3, 0.3};
    for (double a : normalize_advantages(r, 1e-4)) CHECK(a == 0.0);
  }
  SUBCASE("zero mean and preserved ranks on random groups") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int g = 0; g < 300; ++g) {
      std::vector<double> r(8);
      for (double& x : r) x = uni(rng);
      std::vector<double> a = normalize_advantages(r, 1e-4);
      double mean = 0.0;
      for (double x : a) mean += x;
      CHECK(std::abs(mean / 8.0) < 1e-9);
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          CHECK((r[i] < r[j]) == (a[i] < a[j]));
        }
      }
    }
  }
}

TEST_CASE("importance ratio and the clipped surrogate term") {
  CHECK(importance_ratio(std::log(2.0), 0.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(importance_ratio(std::nan(""), 0.0), Error);

  CHECK(clipped_term(1.5, 1.0, 0.2) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(clipped_term(0.5, -1.0, 0.2) == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(clipped_term(1.0, 0.7, 0.2) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(clipped_term(0.5, 1.0, 0.2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact KL between toy policies") {
  ToyPolicy p({"a", "b"}, ToyPolicy::StateMode::SingleState, 1);
  ToyPolicy q = p;
  // p stays uniform; q moves to (0.25, 0.75)
  q.set_logit(0, {}, 1, std::log(3.0));

  SUBCASE("closed form for the half/half vs quarter/three-quarter case") {
    double expected = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
    CHECK(expected == doctest::Approx(0.14384).epsilon(1e-4));
    CHECK(kl_categorical(p, q) == doctest::Approx(expected).epsilon(1e-5));
  }
  SUBCASE("zero on identical policies, nonnegative in general") {
    CHECK(kl_categorical(p, p) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(kl_categorical(q, q) == doctest::Approx(0.0).epsilon(1e-12));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      ToyPolicy x({"a", "b", "c"}, ToyPolicy::StateMode::PositionConditioned, 2);
      ToyPolicy y = x;
      for (int pos = 0; pos < 2; ++pos) {
        std::vector<int> prefix(pos, 0);
        for (int v = 0; v < 3; ++v) {
          x.set_logit(0, std::span<const int>(prefix), v, uni(rng));
          y.set_logit(0, std::span<const int>(prefix), v, uni(rng));
        }
      }
      CHECK(kl_categorical(x, y) >= -1e-12);
    }
  }
  SUBCASE("zero mass in the reference is a support mismatch") {
    ToyPolicy zeroed = p;
    zeroed.set_logit(0, {}, 0, -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(kl_categorical(p, zeroed), Error);
  }
}

TEST_CASE("sft loss closed form and descent") {
  ToyPolicy policy({"w", "x", "y", "z"}, ToyPolicy::StateMode::PositionConditioned, 3);
  std::vector<int> target{1, 2, 3};
  CHECK(sft_nll(policy, 0, target) == doctest::Approx(3.0 * std::log(4.0)).epsilon(1e-9));

  double prev = sft_nll(policy, 0, target);
  for (int step = 0; step < 100; ++step) {
    GradientTable g = sft_nll_gradient(policy, 0, target);
    policy.apply_update(g, -0.1);  // descend the NLL
    double now = sft_nll(policy, 0, target);
    REQUIRE(now < prev);
    prev = now;
  }
}

TEST_CASE("toy policy bookkeeping") {
  ToyPolicy policy({"a", "b", "c"}, ToyPolicy::StateMode::PrefixConditioned, 2);
  std::vector<double> uniform = policy.probabilities(0, {});
  CHECK(uniform[0] == doctest::Approx(1.0 / 3.0));

  CHECK(policy.token_id("c") == 2);
  CHECK_THROWS_AS(policy.token_id("nope"), Error);

  std::vector<int> pa{0}, pb{1};
  CHECK(policy.state_key(0, std::span<const int>(pa)) !=
        policy.state_key(0, std::span<const int>(pb)));

  // prefixes shorter than the horizon: "" plus one per first token
  CHECK(policy.states_per_context() == 4);
  int visited = 0;
  policy.for_each_state(0, [&](std::span<const int>, std::uint64_t) { ++visited; });
  CHECK(visited == 4);

  std::mt19937_64 rng(5);
  std::vector<int> seq = policy.sample_sequence(0, rng);
  CHECK(seq.size() == 2);

  double lp = policy.sequence_log_prob(0, seq);
  CHECK(lp == doctest::Approx(2.0 * std::log(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches finite differences") {
  GradCheckReport report = run_gradient_check(10, 91);
  CHECK(report.instances == 10);
  CHECK(report.comparisons > 0);
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("bandit training finds the rewarded arm") {
  ToyTask task = make_two_armed_bandit();
  GrpoConfig cfg;
  cfg.steps = 500;
  cfg.group_size = 8;
  cfg.kl_beta = 0.0;
  TrainResult result = grpo_train(task, cfg, 11);
  double p_good = expected_reward_exact(result.policy, task);
  CHECK(p_good >= 0.95);
  CHECK(result.trace.size() == 500);
  CHECK(result.trace.back().expected_reward == doctest::Approx(p_good).epsilon(1e-9));
}

TEST_CASE("sampling from the frozen anchor caps how far the policy moves") {
  ToyTask task = make_two_armed_bandit();
  GrpoConfig cfg;
  cfg.steps = 500;
  cfg.kl_beta = 0.0;
  cfg.sample_from_anchor = true;
  double anchored = expected_reward_exact(grpo_train(task, cfg, 11).policy, task);
  cfg.sample_from_anchor = false;
  double live = expected_reward_exact(grpo_train(task, cfg, 11).policy, task);
  CHECK(anchored < live);
  CHECK(anchored < 0.75);
}

TEST_CASE("task init runs before the anchor freezes") {
  ToyTask task = make_two_armed_bandit();
  task.init = [](ToyPolicy& p) { p.set_logit(0, {}, 0, 1.5); };
  GrpoConfig cfg;
  cfg.steps = 1;
  TrainResult result = grpo_train(task, cfg, 3);
  CHECK(result.anchor.logit(0, {}, 0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("tag sequence task rewards exactly the canonical emission") {
  ToyTask task = make_tag_sequence_task();
  CHECK(task.vocabulary.size() == 9);
  CHECK(task.horizon == 12);
  REQUIRE(bool(task.init));

  // begin/content/end per span, in canonical span order
  std::vector<int> canonical{0, 8, 1, 2, 8, 3, 4, 8, 5, 6, 8, 7};
  CHECK(task.reward(canonical) == 1.0);

  std::vector<int> scrambled{2, 8, 3, 0, 8, 1, 4, 8, 5, 6, 8, 7};
  CHECK(task.reward(scrambled) == doctest::Approx(8.0 / 9.0));

  // 9^12 sequences: too many to enumerate, so the exact expectation refuses
  CHECK_THROWS_AS(expected_reward_exact(
                      ToyPolicy(task.vocabulary, task.mode, task.horizon, task.context_count),
                      task),
                  Error);

  ToyPolicy policy(task.vocabulary, task.mode, task.horizon, task.context_count);
  task.init(policy);
  std::mt19937_64 rng(404);
  double mean = 0.0;
  for (int i = 0; i < 400; ++i) mean += task.reward(policy.sample_sequence(0, rng));
  mean /= 400.0;
  CHECK(mean < 0.5);   // cold start stays short of the passing band
  CHECK(mean > 0.05);  // but it does move the policy
}

TEST_CASE("diverging training reports instead of emitting garbage") {
  // A reward function that returns non-finite values poisons the advantages;
  // the trainer must stop with DIVERGED rather than keep walking on NaNs.
  ToyTask task = make_two_armed_bandit();
  task.reward = [](std::span<const int>) { return std::numeric_limits<double>::infinity(); };
  GrpoConfig cfg;
  cfg.steps = 50;
  cfg.kl_beta = 0.0;
  try {
    grpo_train(task, cfg, 1);
    FAIL("expected DIVERGED");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Diverged);
  }
}

TEST_CASE("trace csv carries one row per step") {
  ToyTask task = make_two_armed_bandit();
  GrpoConfig cfg;
  cfg.steps = 3;
  TrainResult result = grpo_train(task, cfg, 2);
  std::ostringstream out;
  write_trace_csv(result.trace, out);
  std::string text = out.str();
  CHECK(text.rfind("step,objective,mean_reward,kl\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("training is bit reproducible for a fixed seed") {
  ToyTask task = make_two_armed_bandit();
  GrpoConfig cfg;
  cfg.steps = 40;
  TrainResult a = grpo_train(task, cfg, 123);
  TrainResult b = grpo_train(task, cfg, 123);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].objective == b.trace[i].objective);
    CHECK(a.trace[i].mean_reward == b.trace[i].mean_reward);
  }
}

}  // TEST_SUITE
