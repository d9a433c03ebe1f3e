#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "empath/span_format.hpp"

namespace {

std::string compliant_text() {
  const empath::TagSpec& tags = empath::TagSpec::defaults();
  auto wrap = [&](int span, const char* content) {
    return std::string(tags.begin_tag(span)) + content + std::string(tags.end_tag(span));
  };
  return wrap(empath::kUnderstandingSpan, "that sounds like a lot to carry alone") +
         wrap(empath::kReasoningSpan, "naming the feeling before advising keeps trust") +
         wrap(empath::kEmotionSpan, "caring") +
         wrap(empath::kResponseSpan, "I'm here with you; tell me what happened");
}

// A mix of clean and broken inputs, roughly what the scorer sees in practice.
std::vector<std::string> sample_inputs() {
  std::vector<std::string> out;
  std::string clean = compliant_text();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 64; ++i) {
    std::string s = clean;
    if (i % 4 == 1) s.erase(rng() % s.size(), 12);
    if (i % 4 == 2) s.insert(rng() % s.size(), "<|response_begin|>");
    if (i % 4 == 3) s = s.substr(s.size() / 3);
    out.push_back(std::move(s));
  }
  return out;
}

void BM_FormatReward(benchmark::State& state) {
  std::vector<std::string> inputs = sample_inputs();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::format_reward(inputs[i % inputs.size()]));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FormatReward);

void BM_TryParseFourSpan(benchmark::State& state) {
  std::vector<std::string> inputs = sample_inputs();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::try_parse_four_span(inputs[i % inputs.size()]));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TryParseFourSpan);

void BM_RenderFourSpan(benchmark::State& state) {
  empath::FourSpanOutput spans;
  spans.understanding = "that sounds like a lot to carry alone";
  spans.reasoning = "naming the feeling before advising keeps trust";
  spans.emotion = "caring";
  spans.response = "I'm here with you; tell me what happened";
  for (auto _ : state) {
    benchmark::DoNotOptimize(empath::render_four_span(spans));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RenderFourSpan);

}  // namespace
