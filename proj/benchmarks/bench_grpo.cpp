#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "empath/grpo.hpp"

namespace {

void BM_NormalizeAdvantages(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> rewards(static_cast<std::size_t>(state.range(0)));
  for (double& r : rewards) r = uni(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::normalize_advantages(rewards, 1e-4));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalizeAdvantages)->Arg(8)->Arg(64)->Arg(512);

void BM_GrpoTrainStepBandit(benchmark::State& state) {
  empath::ToyTask task = empath::make_two_armed_bandit();
  empath::GrpoConfig config;
  config.steps = 1;
  config.group_size = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::grpo_train(task, config, seed++));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GrpoTrainStepBandit)->Arg(8)->Arg(64);

void BM_GrpoTrainStepTagSequence(benchmark::State& state) {
  empath::ToyTask task = empath::make_tag_sequence_task();
  empath::GrpoConfig config;
  config.steps = 1;
  config.group_size = 8;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::grpo_train(task, config, seed++));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GrpoTrainStepTagSequence);

void BM_SftGradient(benchmark::State& state) {
  empath::ToyPolicy policy({"a", "b", "c", "d"},
                           empath::ToyPolicy::StateMode::PositionConditioned, 6);
  std::vector<int> target{0, 1, 2, 3, 0, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::sft_nll_gradient(policy, 0, target));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SftGradient);

}  // namespace
