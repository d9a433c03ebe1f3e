#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace empath {

// Provenance sidecar written next to every output file. Each input is
// recorded with its content hash, plus the hash of the input's own manifest
// when one sits beside it, so a chain of runs can be re-verified end to end.

struct InputRecord {
  std::string path;          // as given on the command line
  std::string content_hash;  // fnv1a64 of the file bytes, hex
  std::optional<std::string> manifest_hash;  // hash of sibling manifest, if any
};

struct RunCounts {
  std::uint64_t records_in = 0;
  std::uint64_t records_out = 0;
  std::uint64_t filtered = 0;
  std::uint64_t errored = 0;
};

struct RunManifest {
  std::string subcommand;
  std::string config_json;  // the effective options, serialized
  std::vector<InputRecord> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;  // ISO-8601 UTC
  RunCounts counts;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& output);

std::string iso8601_utc_now();

// Hashes the file and, when a sibling manifest exists, records its hash too.
InputRecord record_input(const std::filesystem::path& path);

// Atomic: writes to a temp file in the same directory, then renames.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& output_file);

RunManifest read_manifest(const std::filesystem::path& manifest_file);

// Re-hashes every recorded input (and, recursively, the inputs of their own
// manifests). Returns the list of mismatches, empty when the chain holds.
std::vector<std::string> verify_manifest_chain(const std::filesystem::path& output_file);

}  // namespace empath
