#include <iostream>
#include <memory>
#include <string>

#include <json.hpp>

#include "empath/common.hpp"
#include "empath/corpus.hpp"
#include "util.hpp"

namespace empath::cli {

namespace {

struct PartitionOptions {
  std::string in;
  std::string out_easy;
  std::string out_hard;
  bool outer_only = false;
};

void run_partition(const PartitionOptions& opts, const GlobalOptions& global) {
  nlohmann::json config_json = {{"in", opts.in},
                                {"out_easy", opts.out_easy},
                                {"out_hard", opts.out_hard},
                                {"outer_only", opts.outer_only}};
  RunManifest manifest = start_manifest("partition", global, config_json.dump());
  manifest.inputs.push_back(record_input(opts.in));

  TrajectoryReader reader(opts.in, global.lenient);
  TrajectoryWriter easy(opts.out_easy);
  TrajectoryWriter hard(opts.out_hard);
  while (auto t = reader.next()) {
    ++manifest.counts.records_in;
    ResolutionRates rates = resolution_rates(*t, opts.outer_only);
    DifficultyBin bin = partition(rates);
    t->split = std::string(to_string(bin));
    (bin == DifficultyBin::Easy ? easy : hard).write(*t);
  }
  manifest.counts.errored = reader.lines_skipped();
  manifest.counts.records_out = easy.count() + hard.count();
  manifest.outputs = {opts.out_easy, opts.out_hard};
  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest, opts.out_easy);
  write_manifest(manifest, opts.out_hard);

  std::cout << "easy " << easy.count() << " -> " << opts.out_easy << ", hard " << hard.count()
            << " -> " << opts.out_hard << "\n";
}

}  // namespace

void register_partition(CLI::App& app, const GlobalOptions& global) {
  auto opts = std::make_shared<PartitionOptions>();
  CLI::App* cmd = app.add_subcommand(
      "partition", "Split trajectories into easy/hard by resolution rates");
  cmd->add_option("--in", opts->in, "Trajectories (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out-easy", opts->out_easy, "Easy bin (JSONL)")->required();
  cmd->add_option("--out-hard", opts->out_hard, "Hard bin (JSONL)")->required();
  cmd->add_flag("--outer-only", opts->outer_only,
                "Count only each turn's final decision, not refinement rounds");
  cmd->callback([opts, &global] { run_partition(*opts, global); });
}

}  // namespace empath::cli
