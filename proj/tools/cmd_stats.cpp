#include <iostream>
#include <memory>
#include <string>

#include <json.hpp>

#include "empath/corpus.hpp"
#include "util.hpp"

namespace empath::cli {

namespace {

struct StatsOptions {
  std::string in;
  bool json = false;
};

void run_stats(const StatsOptions& opts, const GlobalOptions& global) {
  TrajectoryReader reader(opts.in, global.lenient);
  StatsAccumulator acc;
  while (auto t = reader.next()) acc.add(*t);
  CorpusStats stats = acc.finalize();
  if (opts.json) {
    nlohmann::json j = {{"dialogue_count", stats.dialogue_count},
                        {"utterance_count", stats.utterance_count},
                        {"avg_turns", stats.avg_turns},
                        {"avg_query_len", stats.avg_query_len},
                        {"avg_understanding_len", stats.avg_understanding_len},
                        {"avg_reasoning_len", stats.avg_reasoning_len},
                        {"avg_response_len", stats.avg_response_len},
                        {"emotion_label_count", stats.emotion_label_count},
                        {"profile_count", stats.profile_count}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << format_stats_table(stats);
  }
}

}  // namespace

void register_stats(CLI::App& app, const GlobalOptions& global) {
  auto opts = std::make_shared<StatsOptions>();
  CLI::App* cmd = app.add_subcommand("stats", "Corpus statistics over a trajectory file");
  cmd->add_option("--in", opts->in, "Trajectories (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--json", opts->json, "Emit JSON instead of the table");
  cmd->callback([opts, &global] { run_stats(*opts, global); });
}

}  // namespace empath::cli
