#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "empath/corpus.hpp"
#include "empath/span_format.hpp"
#include "empath/types.hpp"

namespace {

empath::Trajectory make_trajectory(int turns) {
  empath::Trajectory t;
  t.dialogue_id = "dlg_bench01";
  t.profile.user_id = "user_bench1";
  t.situation.text = "a long week at work and nobody noticed";
  t.situation.emotion.canonical = "sad";
  t.rng_seed = 5;
  for (int i = 1; i <= turns; ++i) {
    empath::Turn turn;
    turn.index = i;
    turn.user_utterance = "it keeps happening again and again";
    empath::FourSpanOutput spans;
    spans.understanding = "that sounds exhausting and invisible";
    spans.reasoning = "acknowledge effort before asking for detail";
    spans.emotion = "sad";
    spans.response = "I hear how worn down you are; I'm listening";
    turn.assistant_raw = empath::render_four_span(spans);
    turn.parsed = spans;
    bool last = i == turns;
    turn.inner_decisions = {empath::RubricDecision::Fail,
                            last ? empath::RubricDecision::Solved : empath::RubricDecision::Pass};
    turn.decision = turn.inner_decisions.back();
    t.turns.push_back(std::move(turn));
    t.decision_path.push_back(t.turns.back().decision);
  }
  t.status = empath::TrajectoryStatus::Solved;
  return t;
}

void BM_StatsAccumulate(benchmark::State& state) {
  std::vector<empath::Trajectory> batch;
  for (int i = 0; i < 100; ++i) batch.push_back(make_trajectory(1 + i % 5));
  for (auto _ : state) {
    empath::StatsAccumulator acc;
    for (const auto& t : batch) acc.add(t);
    benchmark::DoNotOptimize(acc.finalize());
  }
  state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK(BM_StatsAccumulate);

void BM_TrajectoryRoundTrip(benchmark::State& state) {
  empath::Trajectory t = make_trajectory(3);
  for (auto _ : state) {
    std::string line = empath::to_json_line(t);
    benchmark::DoNotOptimize(empath::trajectory_from_json_line(line));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrajectoryRoundTrip);

void BM_EmitSftPairs(benchmark::State& state) {
  empath::Trajectory t = make_trajectory(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::emit_sft_pairs(t));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EmitSftPairs);

}  // namespace
