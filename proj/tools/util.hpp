#pragma once

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "empath/manifest.hpp"

namespace empath::cli {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config;  // agents config file (synth, score)
  bool lenient = false;
  bool dry_run = false;
};

void register_synth(CLI::App& app, const GlobalOptions& global);
void register_score(CLI::App& app, const GlobalOptions& global);
void register_partition(CLI::App& app, const GlobalOptions& global);
void register_stats(CLI::App& app, const GlobalOptions& global);
void register_emit_sft(CLI::App& app, const GlobalOptions& global);
void register_train_toy(CLI::App& app, const GlobalOptions& global);
void register_gradcheck(CLI::App& app, const GlobalOptions& global);

RunManifest start_manifest(const std::string& subcommand, const GlobalOptions& global,
                           std::string config_json);

}  // namespace empath::cli
