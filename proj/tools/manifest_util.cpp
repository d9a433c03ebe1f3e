#include "empath/common.hpp"
#include "util.hpp"

namespace empath::cli {

RunManifest start_manifest(const std::string& subcommand, const GlobalOptions& global,
                           std::string config_json) {
  RunManifest m;
  m.subcommand = subcommand;
  m.config_json = std::move(config_json);
  m.seed = global.seed;
  m.tool_version = std::string(kToolVersion);
  m.started_at = iso8601_utc_now();
  return m;
}

}  // namespace empath::cli
