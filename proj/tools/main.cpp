#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "empath/common.hpp"
#include "util.hpp"

namespace {

// 1: the invocation or its inputs are wrong; 2: the run itself fell over.
int exit_code_for(empath::ErrorCode code) {
  using empath::ErrorCode;
  switch (code) {
    case ErrorCode::MissingId:
    case ErrorCode::InvalidMbti:
    case ErrorCode::UnknownLabel:
    case ErrorCode::OutOfRange:
    case ErrorCode::ScoreOutOfRange:
    case ErrorCode::ComponentOutOfRange:
    case ErrorCode::BadWeights:
    case ErrorCode::Malformed:
    case ErrorCode::UnknownFilterName:
    case ErrorCode::EmptyTrajectory:
    case ErrorCode::UnparseableTurn:
    case ErrorCode::IoError:
    case ErrorCode::SchemaViolation:
    case ErrorCode::AuthMissing:
    case ErrorCode::InvalidArgument:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dialogue synthesis, scoring, and policy-lab toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(empath::kToolVersion));

  empath::cli::GlobalOptions global;
  app.add_option("--seed", global.seed, "Root seed; every random draw derives from it");
  app.add_option("--config", global.config, "Agents config JSON (synth, score)");
  app.add_flag("--lenient", global.lenient, "Skip malformed records instead of aborting");
  app.add_flag("--dry-run", global.dry_run,
               "Route every agent role to its scripted fixture; never touch the network");

  empath::cli::register_synth(app, global);
  empath::cli::register_score(app, global);
  empath::cli::register_partition(app, global);
  empath::cli::register_stats(app, global);
  empath::cli::register_emit_sft(app, global);
  empath::cli::register_train_toy(app, global);
  empath::cli::register_gradcheck(app, global);

  // Accept global flags on either side of the subcommand.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error_code=INVALID_ARGUMENT: " << e.what() << "\n";
    return 1;
  } catch (const empath::Error& e) {
    std::cerr << "error_code=" << empath::error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error_code=INTERNAL: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
