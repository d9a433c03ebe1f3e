// Agent gateway: a chat-completions client with bounded retries, exponential
// backoff with full jitter, and an in-flight cap, plus scripted agents for
// offline runs. Transport and clock are injectable so every failure mode is
// testable without a network.
#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "empath/reward.hpp"
#include "empath/sandbox.hpp"

namespace empath {

struct SamplingParams {
  double temperature = 0.7;
  int max_tokens = 1024;
};

struct EndpointConfig {
  std::string base_url;  // e.g. http://localhost:8000
  std::string chat_path = "/v1/chat/completions";
  std::string model_name;
  // Name of the environment variable holding the API key. Keys are only ever
  // read from the environment; they never appear in configs, logs or outputs.
  std::string api_key_env;
  double timeout_seconds = 30.0;
  int max_retries = 3;
  double backoff_base_seconds = 0.5;
  int max_inflight = 4;
  SamplingParams sampling;

  void validate() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Throws Error(TIMEOUT / IO_ERROR) on transport-level failure.
  virtual HttpResponse post_json(const std::string& url,
                                 const std::vector<std::pair<std::string, std::string>>& headers,
                                 const std::string& body, double timeout_seconds) = 0;
};

std::unique_ptr<Transport> make_http_transport();

class Clock {
 public:
  virtual ~Clock() = default;
  virtual void sleep_for_seconds(double seconds) = 0;
};

std::unique_ptr<Clock> make_system_clock();

using LogSink = std::function<void(std::string_view)>;

// One endpoint with admission control. Retries transport failures and
// retryable statuses (429 and 5xx) with delay ~ U(0, base * 2^attempt).
class ChatClient {
 public:
  ChatClient(EndpointConfig config, std::shared_ptr<Transport> transport,
             std::shared_ptr<Clock> clock, LogSink log = {}, std::uint64_t jitter_seed = 1);

  std::string complete(const std::vector<ChatMessage>& messages);
  std::string complete(const std::vector<ChatMessage>& messages, const SamplingParams& params);

  const EndpointConfig& config() const { return config_; }

 private:
  void log(const std::string& message);

  EndpointConfig config_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<Clock> clock_;
  LogSink log_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
  std::mutex admission_mutex_;
  std::condition_variable admission_cv_;
  int inflight_ = 0;
};

enum class ExhaustionPolicy { Error, RepeatLast };

struct ScriptKey {
  int turn = 0;     // 1-based; 0 = unkeyed
  int attempt = 0;  // 1-based; 0 = unkeyed
};

// Deterministic fixture playback: keyed entries ("t3.k2" then "t3") win over
// the ordered list. Exhaustion either repeats the final entry or raises
// FIXTURE_EXHAUSTED.
class ScriptedAgent {
 public:
  static ScriptedAgent from_json_file(const std::filesystem::path& file);
  static ScriptedAgent from_entries(std::vector<std::string> entries,
                                    ExhaustionPolicy policy = ExhaustionPolicy::RepeatLast);

  std::string next(const ScriptKey& key = {});
  std::size_t consumed() const { return cursor_; }

 private:
  std::vector<std::string> entries_;
  std::map<std::string, std::string> keyed_;
  ExhaustionPolicy policy_ = ExhaustionPolicy::RepeatLast;
  std::size_t cursor_ = 0;
};

// Decision text from an evaluator: either a bare fail/pass/solved word or a
// JSON object {"decision": ..., "critique": ..., "scores": {...}}.
EvalResult parse_eval_result(std::string_view raw);

struct RoleConfig {
  std::optional<EndpointConfig> endpoint;
  std::optional<std::filesystem::path> script;  // scripted fixture file
  std::optional<std::filesystem::path> prompt_file;
};

struct AgentsConfig {
  RoleConfig user;
  RoleConfig responder;
  RoleConfig evaluator;
  RoleConfig judge;
};

// Parses the agents config; relative script/prompt paths resolve against the
// config file's directory.
AgentsConfig load_agents_config(const std::filesystem::path& file);

struct AgentFactoryOptions {
  bool dry_run = false;  // route every role to its scripted fixture
  std::shared_ptr<Transport> transport;  // defaults to the real HTTP transport
  std::shared_ptr<Clock> clock;
  LogSink log;
  TagSpec tags = TagSpec::defaults();
};

// Builds sandbox agents from a config. Scripted roles get a fresh fixture
// cursor per make_triple() call so trajectories replay independently;
// endpoint roles share one ChatClient per role so the in-flight cap is
// global.
class AgentFactory {
 public:
  AgentFactory(AgentsConfig config, AgentFactoryOptions options = {});

  AgentTriple make_triple() const;
  std::unique_ptr<JudgeAgent> make_judge() const;
  bool uses_endpoints() const;

 private:
  std::shared_ptr<ChatClient> client_for(const char* role, const RoleConfig& cfg) const;

  AgentsConfig config_;
  AgentFactoryOptions options_;
  mutable std::mutex clients_mutex_;
  mutable std::map<std::string, std::shared_ptr<ChatClient>> clients_;
};

}  // namespace empath
