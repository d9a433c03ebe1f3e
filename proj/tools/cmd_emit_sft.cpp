#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <json.hpp>

#include "empath/common.hpp"
#include "empath/corpus.hpp"
#include "util.hpp"

namespace empath::cli {

namespace {

struct EmitSftOptions {
  std::string in;
  std::string out;
};

void run_emit_sft(const EmitSftOptions& opts, const GlobalOptions& global) {
  nlohmann::json config_json = {{"in", opts.in}, {"out", opts.out}};
  RunManifest manifest = start_manifest("emit-sft", global, config_json.dump());
  manifest.inputs.push_back(record_input(opts.in));

  std::ofstream out(opts.out, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open output: " + opts.out);

  TrajectoryReader reader(opts.in, global.lenient);
  while (auto t = reader.next()) {
    ++manifest.counts.records_in;
    if (t->status == TrajectoryStatus::Filtered) {
      ++manifest.counts.filtered;
      continue;
    }
    try {
      for (const SftPair& pair : emit_sft_pairs(*t)) {
        out << to_json_line(pair) << "\n";
        ++manifest.counts.records_out;
      }
    } catch (const Error&) {
      if (!global.lenient) throw;
      ++manifest.counts.errored;
    }
  }

  manifest.counts.errored += reader.lines_skipped();
  manifest.outputs.push_back(opts.out);
  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest, opts.out);
  std::cout << "emitted " << manifest.counts.records_out << " pairs to " << opts.out << "\n";
}

}  // namespace

void register_emit_sft(CLI::App& app, const GlobalOptions& global) {
  auto opts = std::make_shared<EmitSftOptions>();
  CLI::App* cmd = app.add_subcommand(
      "emit-sft", "Turn trajectories into (context, target) fine-tuning pairs");
  cmd->add_option("--in", opts->in, "Trajectories (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "SFT pairs (JSONL)")->required();
  cmd->callback([opts, &global] { run_emit_sft(*opts, global); });
}

}  // namespace empath::cli
