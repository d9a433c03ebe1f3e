#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <json.hpp>

#include "empath/common.hpp"
#include "empath/corpus.hpp"
#include "empath/gateway.hpp"
#include "empath/reward.hpp"
#include "util.hpp"

namespace empath::cli {

namespace {

struct ScoreOptions {
  std::string in;
  std::string out;
  std::vector<double> weights;  // format, emotion, rubric
};

nlohmann::json breakdown_to_json(const RewardBreakdown& b) {
  nlohmann::json j;
  j["r_fmt"] = b.format_score;
  j["r_emo"] = b.emotion_score;
  j["r_rub"] = b.rubric_score;
  j["r_total"] = b.total;
  if (b.rubric) {
    j["rubric"] = {{"relevance", b.rubric->relevance},
                   {"fluency", b.rubric->fluency},
                   {"empathy", b.rubric->empathy},
                   {"persona", b.rubric->persona},
                   {"safety", b.rubric->safety}};
  }
  return j;
}

void run_score(const ScoreOptions& opts, const GlobalOptions& global) {
  if (global.config.empty()) {
    fail(ErrorCode::InvalidArgument, "score needs --config with the agents config (judge role)");
  }
  RewardWeights weights = RewardWeights::equal();
  if (!opts.weights.empty()) {
    if (opts.weights.size() != 3) {
      fail(ErrorCode::BadWeights, "--weights takes exactly three values: format,emotion,rubric");
    }
    weights = RewardWeights{opts.weights[0], opts.weights[1], opts.weights[2]};
  }
  weights.validate();

  AgentsConfig agents_config = load_agents_config(global.config);
  AgentFactoryOptions factory_options;
  factory_options.dry_run = global.dry_run;
  AgentFactory factory(std::move(agents_config), std::move(factory_options));
  std::unique_ptr<JudgeAgent> judge = factory.make_judge();

  nlohmann::json config_json = {{"in", opts.in},
                                {"out", opts.out},
                                {"weights", {weights.format_weight, weights.emotion_weight, weights.rubric_weight}},
                                {"agents", global.config},
                                {"dry_run", global.dry_run}};
  RunManifest manifest = start_manifest("score", global, config_json.dump());
  manifest.inputs.push_back(record_input(opts.in));
  manifest.inputs.push_back(record_input(global.config));

  std::ifstream in(opts.in);
  if (!in) fail(ErrorCode::IoError, "cannot open input: " + opts.in);
  std::ofstream out(opts.out, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open output: " + opts.out);

  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim_view(line).empty()) continue;
    ++manifest.counts.records_in;
    try {
      nlohmann::json record = nlohmann::json::parse(line);
      if (record.contains("turns")) {
        // Trajectory line: one scored row per turn.
        Trajectory t = trajectory_from_json_line(line, line_number);
        for (const Turn& turn : t.turns) {
          RewardBreakdown b =
              score_candidate(turn.assistant_raw, t.situation.emotion, *judge, weights,
                              EmotionTaxonomy::defaults(), TagSpec::defaults(),
                              turn.user_utterance);
          nlohmann::json row = breakdown_to_json(b);
          row["dialogue_id"] = t.dialogue_id;
          row["turn_index"] = turn.index;
          out << row.dump() << "\n";
          ++manifest.counts.records_out;
        }
      } else {
        // Bare candidate: {"text": ..., "gold_emotion": ..., "user": ...?}.
        if (!record.contains("text") || !record["text"].is_string()) {
          fail(ErrorCode::SchemaViolation,
               "line " + std::to_string(line_number) + ": candidate needs a string 'text'");
        }
        if (!record.contains("gold_emotion") || !record["gold_emotion"].is_string()) {
          fail(ErrorCode::SchemaViolation,
               "line " + std::to_string(line_number) + ": candidate needs a string 'gold_emotion'");
        }
        EmotionLabel gold = canonical_emotion(record["gold_emotion"].get<std::string>(),
                                              EmotionTaxonomy::defaults());
        std::string user = record.value("user", std::string{});
        RewardBreakdown b = score_candidate(record["text"].get<std::string>(), gold, *judge,
                                            weights, EmotionTaxonomy::defaults(),
                                            TagSpec::defaults(), user);
        nlohmann::json row = record;
        row.update(breakdown_to_json(b));
        out << row.dump() << "\n";
        ++manifest.counts.records_out;
      }
    } catch (const nlohmann::json::parse_error&) {
      if (!global.lenient) {
        fail(ErrorCode::SchemaViolation,
             "line " + std::to_string(line_number) + ": not valid JSON");
      }
      ++manifest.counts.errored;
    } catch (const Error&) {
      if (!global.lenient) throw;
      ++manifest.counts.errored;
    }
  }

  manifest.outputs.push_back(opts.out);
  manifest.finished_at = iso8601_utc_now();
  write_manifest(manifest, opts.out);
  std::cout << "scored " << manifest.counts.records_out << " rows to " << opts.out << "\n";
}

}  // namespace

void register_score(CLI::App& app, const GlobalOptions& global) {
  auto opts = std::make_shared<ScoreOptions>();
  CLI::App* cmd = app.add_subcommand(
      "score", "Score candidates or trajectory turns: format, emotion, rubric, total");
  cmd->add_option("--in", opts->in, "Candidates or trajectories (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "Scored rows (JSONL)")->required();
  cmd->add_option("--weights", opts->weights, "Reward weights: format,emotion,rubric")
      ->delimiter(',')
      ->expected(3);
  cmd->callback([opts, &global] { run_score(*opts, global); });
}

}  // namespace empath::cli
