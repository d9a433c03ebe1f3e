#include <iostream>
#include <memory>

#include "empath/common.hpp"
#include "empath/grpo.hpp"
#include "util.hpp"

namespace empath::cli {

namespace {

struct GradcheckOptions {
  int trials = 100;
  double fd_step = 1e-5;
  double tolerance = 1e-4;
};

void run_gradcheck(const GradcheckOptions& opts, const GlobalOptions& global) {
  GradCheckReport report = run_gradient_check(opts.trials, global.seed, opts.fd_step);
  std::cout << "gradcheck: " << report.instances << " instances, " << report.comparisons
            << " comparisons, max relative error " << report.max_rel_error << "\n";
  if (!(report.max_rel_error < opts.tolerance)) {
    fail(ErrorCode::Diverged, "analytic gradient disagrees with finite differences");
  }
}

}  // namespace

void register_gradcheck(CLI::App& app, const GlobalOptions& global) {
  auto opts = std::make_shared<GradcheckOptions>();
  CLI::App* cmd = app.add_subcommand(
      "gradcheck", "Compare the analytic policy gradient against finite differences");
  cmd->add_option("--trials", opts->trials)->default_val(100)->check(CLI::PositiveNumber);
  cmd->add_option("--fd-step", opts->fd_step)->default_val(1e-5);
  cmd->add_option("--tolerance", opts->tolerance)->default_val(1e-4);
  cmd->callback([opts, &global] { run_gradcheck(*opts, global); });
}

}  // namespace empath::cli
