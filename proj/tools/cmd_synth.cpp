#include <atomic>
#include <exception>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include <json.hpp>

#include "empath/common.hpp"
#include "empath/corpus.hpp"
#include "empath/gateway.hpp"
#include "empath/sandbox.hpp"
#include "util.hpp"

namespace empath::cli {

namespace {

struct SynthOptions {
  std::string profiles;
  std::string situations;
  std::string out;
  int max_turns = 10;
  int max_refinements = 5;
  int parallel = 1;
  std::vector<std::string> filters;  // empty = every registered filter
  bool dedup = false;
};

struct ItemResult {
  std::optional<Trajectory> trajectory;
  std::string error;  // non-empty when the item failed in lenient mode
};

void run_synth(const SynthOptions& opts, const GlobalOptions& global) {
  if (global.config.empty()) {
    fail(ErrorCode::InvalidArgument, "synth needs --config with the agents config");
  }
  auto profiles = read_profiles_jsonl(opts.profiles, global.lenient);
  auto situations =
      read_situations_jsonl(opts.situations, EmotionTaxonomy::defaults(), global.lenient);
  if (profiles.empty()) fail(ErrorCode::InvalidArgument, opts.profiles + ": no profiles");
  if (situations.empty()) fail(ErrorCode::InvalidArgument, opts.situations + ": no situations");

  AgentsConfig agents_config = load_agents_config(global.config);
  AgentFactoryOptions factory_options;
  factory_options.dry_run = global.dry_run;
  AgentFactory factory(std::move(agents_config), std::move(factory_options));

  SandboxConfig sandbox;
  sandbox.max_turns = opts.max_turns;
  sandbox.max_refinements = opts.max_refinements;
  sandbox.validate();

  FilterSet filter_set = FilterSet::defaults();
  // Surface unknown names before spending time on rollouts.
  filter_set.apply(Trajectory{}, opts.filters);

  nlohmann::json config_json = {
      {"profiles", opts.profiles},   {"situations", opts.situations},
      {"out", opts.out},             {"max_turns", opts.max_turns},
      {"max_refinements", opts.max_refinements}, {"parallel", opts.parallel},
      {"filters", opts.filters.empty() ? filter_set.names() : opts.filters},
      {"dedup", opts.dedup},         {"agents", global.config},
      {"dry_run", global.dry_run},
  };
  RunManifest manifest = start_manifest("synth", global, config_json.dump());
  manifest.inputs.push_back(record_input(opts.profiles));
  manifest.inputs.push_back(record_input(opts.situations));
  manifest.inputs.push_back(record_input(global.config));

  const std::size_t n = situations.size();
  std::vector<ItemResult> results(n);
  std::atomic<std::size_t> next{0};
  std::mutex first_error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      {
        std::lock_guard<std::mutex> lk(first_error_mutex);
        if (first_error) return;
      }
      try {
        SandboxConfig item = sandbox;
        item.rng_seed = mix_seed(global.seed, i);
        char id[32];
        std::snprintf(id, sizeof(id), "dlg_%06zu", i + 1);
        AgentTriple triple = factory.make_triple();
        Trajectory t = run_trajectory(profiles[i % profiles.size()], situations[i], triple, item,
                                      id);
        auto verdict = filter_set.apply(t, opts.filters);
        if (!verdict.kept) t.status = TrajectoryStatus::Filtered;
        results[i].trajectory = std::move(t);
      } catch (...) {
        if (global.lenient) {
          try {
            throw;
          } catch (const std::exception& e) {
            results[i].error = e.what();
          } catch (...) {
            results[i].error = "unknown failure";
          }
        } else {
          std::lock_guard<std::mutex> lk(first_error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    }
  };

  int thread_count = std::max(1, opts.parallel);
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (int i = 0; i < thread_count; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  // Single ordered pass keeps the output file identical however many workers ran.
  TrajectoryWriter writer(opts.out);
  std::set<std::uint64_t> seen;
  manifest.counts.records_in = n;
  for (std::size_t i = 0; i < n; ++i) {
    ItemResult& item = results[i];
    if (!item.trajectory) {
      ++manifest.counts.errored;
      std::cerr << "dlg_" << i + 1 << ": " << item.error << "\n";
      continue;
    }
    if (opts.dedup && !seen.insert(dedup_key(*item.trajectory)).second) {
      ++manifest.counts.filtered;
      continue;
    }
    if (item.trajectory->status == TrajectoryStatus::Filtered) ++manifest.counts.filtered;
    writer.write(*item.trajectory);
  }
  manifest.counts.records_out = writer.count();
  manifest.outputs.push_back(opts.out);
  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest, opts.out);

  std::cout << "wrote " << writer.count() << " trajectories to " << opts.out << "\n";
}

}  // namespace

void register_synth(CLI::App& app, const GlobalOptions& global) {
  auto opts = std::make_shared<SynthOptions>();
  CLI::App* cmd = app.add_subcommand(
      "synth", "Roll out dialogues: situations are paired with profiles round-robin");
  cmd->add_option("--profiles", opts->profiles, "User profiles (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--situations", opts->situations, "Seed situations (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "Output trajectories (JSONL)")->required();
  cmd->add_option("--max-turns", opts->max_turns, "Outer dialogue turns")
      ->default_val(10)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-refinements", opts->max_refinements, "Inner refinement rounds per turn")
      ->default_val(5)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--parallel", opts->parallel, "Concurrent rollouts")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--filters", opts->filters,
                  "Quality filters to apply (default: all registered)")
      ->delimiter(',');
  cmd->add_flag("--dedup", opts->dedup,
                "Drop exact repeats of (profile, situation, user utterances)");
  cmd->callback([opts, &global] { run_synth(*opts, global); });
}

}  // namespace empath::cli
