#include "empath/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "empath/common.hpp"

namespace empath {

using nlohmann::json;

namespace {

std::string file_hash_or_fail(const std::filesystem::path& path) {
  auto h = fnv1a64_of_file(path);
  if (!h) fail(ErrorCode::IoError, "cannot hash file: " + path.string());
  return hash_hex(*h);
}

}  // namespace

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p += ".manifest.json";
  return p;
}

std::string iso8601_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

InputRecord record_input(const std::filesystem::path& path) {
  InputRecord rec;
  rec.path = path.string();
  rec.content_hash = file_hash_or_fail(path);
  std::filesystem::path sidecar = manifest_path_for(path);
  std::error_code ec;
  if (std::filesystem::exists(sidecar, ec)) {
    rec.manifest_hash = file_hash_or_fail(sidecar);
  }
  return rec;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& output_file) {
  json j;
  j["subcommand"] = manifest.subcommand;
  j["config"] = json::parse(manifest.config_json.empty() ? "{}" : manifest.config_json, nullptr,
                            false);
  if (j["config"].is_discarded()) j["config"] = manifest.config_json;
  json inputs = json::array();
  for (const InputRecord& rec : manifest.inputs) {
    json r;
    r["path"] = rec.path;
    r["content_hash"] = rec.content_hash;
    if (rec.manifest_hash) r["manifest_hash"] = *rec.manifest_hash;
    inputs.push_back(std::move(r));
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = manifest.outputs;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["counts"] = {{"records_in", manifest.counts.records_in},
                 {"records_out", manifest.counts.records_out},
                 {"filtered", manifest.counts.filtered},
                 {"errored", manifest.counts.errored}};

  std::filesystem::path target = manifest_path_for(output_file);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write manifest: " + tmp.string());
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, target);
}

RunManifest read_manifest(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) fail(ErrorCode::IoError, "cannot open manifest: " + manifest_file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::SchemaViolation, "manifest is not a JSON object: " + manifest_file.string());
  }
  RunManifest m;
  auto str = [&](const char* field) -> std::string {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string()) {
      fail(ErrorCode::SchemaViolation,
           std::string("manifest missing string field '") + field + "'");
    }
    return it->get<std::string>();
  };
  m.subcommand = str("subcommand");
  if (auto it = j.find("config"); it != j.end()) m.config_json = it->dump();
  if (auto it = j.find("inputs"); it != j.end() && it->is_array()) {
    for (const json& r : *it) {
      InputRecord rec;
      rec.path = r.at("path").get<std::string>();
      rec.content_hash = r.at("content_hash").get<std::string>();
      if (r.contains("manifest_hash")) rec.manifest_hash = r["manifest_hash"].get<std::string>();
      m.inputs.push_back(std::move(rec));
    }
  }
  if (auto it = j.find("outputs"); it != j.end() && it->is_array()) {
    for (const json& o : *it) m.outputs.push_back(o.get<std::string>());
  }
  if (auto it = j.find("seed"); it != j.end()) m.seed = it->get<std::uint64_t>();
  m.tool_version = str("tool_version");
  m.started_at = str("started_at");
  m.finished_at = str("finished_at");
  if (auto it = j.find("counts"); it != j.end() && it->is_object()) {
    const json& c = *it;
    m.counts.records_in = c.value("records_in", std::uint64_t{0});
    m.counts.records_out = c.value("records_out", std::uint64_t{0});
    m.counts.filtered = c.value("filtered", std::uint64_t{0});
    m.counts.errored = c.value("errored", std::uint64_t{0});
  }
  return m;
}

namespace {

void verify_chain_impl(const std::filesystem::path& manifest_file,
                       std::vector<std::string>& problems) {
  RunManifest m;
  try {
    m = read_manifest(manifest_file);
  } catch (const Error& e) {
    problems.push_back(manifest_file.string() + ": " + e.what());
    return;
  }
  for (const InputRecord& rec : m.inputs) {
    std::filesystem::path input = rec.path;
    if (input.is_relative()) input = manifest_file.parent_path() / input;
    std::error_code ec;
    if (!std::filesystem::exists(input, ec)) {
      problems.push_back(rec.path + ": input file is gone");
      continue;
    }
    std::string actual = file_hash_or_fail(input);
    if (actual != rec.content_hash) {
      problems.push_back(rec.path + ": content hash changed (" + rec.content_hash + " -> " +
                         actual + ")");
    }
    if (rec.manifest_hash) {
      std::filesystem::path sidecar = manifest_path_for(input);
      if (!std::filesystem::exists(sidecar, ec)) {
        problems.push_back(sidecar.string() + ": recorded manifest is gone");
        continue;
      }
      std::string actual_sidecar = file_hash_or_fail(sidecar);
      if (actual_sidecar != *rec.manifest_hash) {
        problems.push_back(sidecar.string() + ": manifest hash changed");
        continue;
      }
      verify_chain_impl(sidecar, problems);
    }
  }
}

}  // namespace

std::vector<std::string> verify_manifest_chain(const std::filesystem::path& output_file) {
  std::vector<std::string> problems;
  std::filesystem::path manifest_file = manifest_path_for(output_file);
  std::error_code ec;
  if (!std::filesystem::exists(manifest_file, ec)) {
    problems.push_back(manifest_file.string() + ": manifest not found");
    return problems;
  }
  verify_chain_impl(manifest_file, problems);
  return problems;
}

}  // namespace empath
