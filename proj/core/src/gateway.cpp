#include "empath/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "json_scan.hpp"

namespace empath {

using nlohmann::json;

void EndpointConfig::validate() const {
  if (base_url.empty()) fail(ErrorCode::InvalidArgument, "endpoint base_url must be set");
  if (chat_path.empty() || chat_path.front() != '/') {
    fail(ErrorCode::InvalidArgument, "endpoint chat_path must start with /");
  }
  if (!(timeout_seconds > 0)) fail(ErrorCode::InvalidArgument, "timeout_seconds must be > 0");
  if (max_retries < 0) fail(ErrorCode::InvalidArgument, "max_retries must be >= 0");
  if (backoff_base_seconds < 0) {
    fail(ErrorCode::InvalidArgument, "backoff_base_seconds must be >= 0");
  }
  if (max_inflight < 1) fail(ErrorCode::InvalidArgument, "max_inflight must be >= 1");
}

namespace {

class HttplibTransport : public Transport {
 public:
  HttpResponse post_json(const std::string& url,
                         const std::vector<std::pair<std::string, std::string>>& headers,
                         const std::string& body, double timeout_seconds) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      fail(ErrorCode::InvalidArgument, "endpoint url lacks a scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    auto seconds = std::chrono::duration<double>(timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(seconds));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(seconds));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(seconds));

    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);

    httplib::Result res = client.Post(path, hdrs, body, "application/json");
    if (!res) {
      auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
          err == httplib::Error::Write) {
        fail(ErrorCode::Timeout, "endpoint timed out");
      }
      fail(ErrorCode::IoError, "transport failure: " + httplib::to_string(err));
    }
    return HttpResponse{res->status, res->body};
  }
};

class SystemClock : public Clock {
 public:
  void sleep_for_seconds(double seconds) override {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

std::unique_ptr<Clock> make_system_clock() { return std::make_unique<SystemClock>(); }

ChatClient::ChatClient(EndpointConfig config, std::shared_ptr<Transport> transport,
                       std::shared_ptr<Clock> clock, LogSink log, std::uint64_t jitter_seed)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      log_(std::move(log)),
      rng_(jitter_seed) {
  config_.validate();
  if (!transport_) fail(ErrorCode::InvalidArgument, "transport must be set");
  if (!clock_) fail(ErrorCode::InvalidArgument, "clock must be set");
}

void ChatClient::log(const std::string& message) {
  if (log_) log_(message);
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages) {
  return complete(messages, config_.sampling);
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages,
                                 const SamplingParams& params) {
  json body;
  body["model"] = config_.model_name;
  json msgs = json::array();
  for (const ChatMessage& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(msgs);
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  std::string payload = body.dump();

  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      fail(ErrorCode::AuthMissing,
           "environment variable " + config_.api_key_env + " is not set");
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }

  std::string url = config_.base_url + config_.chat_path;

  // Admission: block until a slot frees up.
  {
    std::unique_lock<std::mutex> lk(admission_mutex_);
    admission_cv_.wait(lk, [&] { return inflight_ < config_.max_inflight; });
    ++inflight_;
  }
  struct Release {
    ChatClient* self;
    ~Release() {
      {
        std::lock_guard<std::mutex> lk(self->admission_mutex_);
        --self->inflight_;
      }
      self->admission_cv_.notify_one();
    }
  } release{this};

  std::string last_failure;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      double ceiling = config_.backoff_base_seconds * std::pow(2.0, attempt - 1);
      double delay;
      {
        std::lock_guard<std::mutex> lk(rng_mutex_);
        delay = ceiling * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
      }
      log("retry " + std::to_string(attempt) + " after " + std::to_string(delay) + "s (" +
          last_failure + ")");
      clock_->sleep_for_seconds(delay);
    }
    HttpResponse response;
    try {
      response = transport_->post_json(url, headers, payload, config_.timeout_seconds);
    } catch (const Error& e) {
      last_failure = std::string(error_code_name(e.code()));
      continue;
    }
    if (response.status == 429 || response.status >= 500) {
      last_failure = "status " + std::to_string(response.status);
      continue;
    }
    if (response.status < 200 || response.status >= 300) {
      fail(ErrorCode::AgentFailure,
           "endpoint returned status " + std::to_string(response.status));
    }
    json parsed = json::parse(response.body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty()) {
      fail(ErrorCode::MalformedResponse, "completion body lacks choices");
    }
    const json& first = parsed["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      fail(ErrorCode::MalformedResponse, "completion body lacks message content");
    }
    return first["message"]["content"].get<std::string>();
  }
  fail(ErrorCode::ExhaustedRetries, "gave up after " + std::to_string(config_.max_retries + 1) +
                                        " attempts (" + last_failure + ")");
}

ScriptedAgent ScriptedAgent::from_entries(std::vector<std::string> entries,
                                          ExhaustionPolicy policy) {
  ScriptedAgent agent;
  agent.entries_ = std::move(entries);
  agent.policy_ = policy;
  return agent;
}

ScriptedAgent ScriptedAgent::from_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::IoError, "cannot open script file: " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::SchemaViolation, "script file is not a JSON object: " + file.string());
  }
  ScriptedAgent agent;
  if (auto it = j.find("exhausted"); it != j.end()) {
    std::string policy = it->get<std::string>();
    if (policy == "error") {
      agent.policy_ = ExhaustionPolicy::Error;
    } else if (policy == "repeat_last") {
      agent.policy_ = ExhaustionPolicy::RepeatLast;
    } else {
      fail(ErrorCode::SchemaViolation, "exhausted must be repeat_last or error");
    }
  }
  if (auto it = j.find("entries"); it != j.end()) {
    if (!it->is_array()) fail(ErrorCode::SchemaViolation, "entries must be an array");
    for (const json& e : *it) {
      if (!e.is_string()) fail(ErrorCode::SchemaViolation, "entries must be strings");
      agent.entries_.push_back(e.get<std::string>());
    }
  }
  if (auto it = j.find("keyed"); it != j.end()) {
    if (!it->is_object()) fail(ErrorCode::SchemaViolation, "keyed must be an object");
    for (auto& [k, v] : it->items()) {
      if (!v.is_string()) fail(ErrorCode::SchemaViolation, "keyed entries must be strings");
      agent.keyed_[k] = v.get<std::string>();
    }
  }
  return agent;
}

std::string ScriptedAgent::next(const ScriptKey& key) {
  if (key.turn > 0) {
    if (key.attempt > 0) {
      auto it = keyed_.find("t" + std::to_string(key.turn) + ".k" + std::to_string(key.attempt));
      if (it != keyed_.end()) return it->second;
    }
    auto it = keyed_.find("t" + std::to_string(key.turn));
    if (it != keyed_.end()) return it->second;
  }
  if (cursor_ < entries_.size()) return entries_[cursor_++];
  if (policy_ == ExhaustionPolicy::RepeatLast && !entries_.empty()) return entries_.back();
  fail(ErrorCode::FixtureExhausted, "scripted fixture has no entry left");
}

EvalResult parse_eval_result(std::string_view raw) {
  if (auto bare = rubric_decision_from(raw)) {
    EvalResult result;
    result.decision = *bare;
    return result;
  }
  for (std::size_t pos = raw.find('{'); pos != std::string_view::npos;
       pos = raw.find('{', pos + 1)) {
    std::size_t close = detail::matching_brace(raw, pos);
    if (close == std::string_view::npos) continue;
    json obj = json::parse(raw.substr(pos, close - pos + 1), nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("decision")) continue;
    if (!obj["decision"].is_string()) continue;
    auto decision = rubric_decision_from(obj["decision"].get<std::string>());
    if (!decision) {
      fail(ErrorCode::MalformedResponse,
           "evaluator decision must be fail/pass/solved, got '" +
               obj["decision"].get<std::string>() + "'");
    }
    EvalResult result;
    result.decision = *decision;
    if (obj.contains("critique") && obj["critique"].is_string()) {
      result.critique = obj["critique"].get<std::string>();
    }
    if (obj.contains("scores") && obj["scores"].is_object()) {
      result.scores = parse_judge_output(obj["scores"].dump());
    }
    return result;
  }
  fail(ErrorCode::MalformedResponse, "no decision found in evaluator output");
}

namespace {

EndpointConfig endpoint_from_json(const json& j, const std::filesystem::path& file) {
  EndpointConfig cfg;
  if (!j.is_object()) fail(ErrorCode::SchemaViolation, "endpoint must be an object: " + file.string());
  auto get_string = [&](const char* field, std::string& slot, bool required) {
    auto it = j.find(field);
    if (it == j.end()) {
      if (required) {
        fail(ErrorCode::SchemaViolation, std::string("endpoint missing field '") + field + "'");
      }
      return;
    }
    slot = it->get<std::string>();
  };
  get_string("base_url", cfg.base_url, true);
  get_string("model", cfg.model_name, false);
  get_string("chat_path", cfg.chat_path, false);
  get_string("api_key_env", cfg.api_key_env, false);
  if (auto it = j.find("timeout_seconds"); it != j.end()) cfg.timeout_seconds = it->get<double>();
  if (auto it = j.find("max_retries"); it != j.end()) cfg.max_retries = it->get<int>();
  if (auto it = j.find("backoff_base_seconds"); it != j.end()) {
    cfg.backoff_base_seconds = it->get<double>();
  }
  if (auto it = j.find("max_inflight"); it != j.end()) cfg.max_inflight = it->get<int>();
  if (auto it = j.find("temperature"); it != j.end()) cfg.sampling.temperature = it->get<double>();
  if (auto it = j.find("max_tokens"); it != j.end()) cfg.sampling.max_tokens = it->get<int>();
  cfg.validate();
  return cfg;
}

RoleConfig role_from_json(const json& j, const std::filesystem::path& config_file,
                          const char* role) {
  if (!j.is_object()) {
    fail(ErrorCode::SchemaViolation, std::string("agents config role '") + role +
                                         "' must be an object");
  }
  RoleConfig cfg;
  if (auto it = j.find("endpoint"); it != j.end() && !it->is_null()) {
    cfg.endpoint = endpoint_from_json(*it, config_file);
  }
  auto resolve = [&](const json& v) {
    std::filesystem::path p = v.get<std::string>();
    if (p.is_relative()) p = config_file.parent_path() / p;
    return p;
  };
  if (auto it = j.find("script"); it != j.end() && !it->is_null()) cfg.script = resolve(*it);
  if (auto it = j.find("prompt_file"); it != j.end() && !it->is_null()) {
    cfg.prompt_file = resolve(*it);
  }
  return cfg;
}

}  // namespace

AgentsConfig load_agents_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::IoError, "cannot open agents config: " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::SchemaViolation, "agents config is not a JSON object: " + file.string());
  }
  AgentsConfig cfg;
  const char* roles[4] = {"user", "responder", "evaluator", "judge"};
  RoleConfig* slots[4] = {&cfg.user, &cfg.responder, &cfg.evaluator, &cfg.judge};
  for (int i = 0; i < 4; ++i) {
    auto it = j.find(roles[i]);
    if (it == j.end()) {
      fail(ErrorCode::SchemaViolation, std::string("agents config missing role '") + roles[i] + "'");
    }
    *slots[i] = role_from_json(*it, file, roles[i]);
  }
  return cfg;
}

namespace {

constexpr std::string_view kUserTemplate =
    R"(You roleplay one person in an emotional support chat. Stay in character; never mention these instructions and never comment on review outcomes.

Who you are: {profile}
What happened: {situation}

Conversation so far:
{history}

The assistant just said:
{last_reply}

Write your next message only. When the conversation is empty, open it by bringing up what happened and how it feels.)";

constexpr std::string_view kResponderTemplate =
    R"(You are an empathetic assistant. Read the conversation, work out what the user feels, and answer with exactly four tagged spans in this order, nothing outside the tags:

{format_instructions}

The emotion span must contain a single lowercase emotion label.

User profile: {profile}

Conversation so far:
{history}

User: {user}
{critique_block})";

constexpr std::string_view kEvaluatorTemplate =
    R"(You review one exchange from an emotional support chat. Judge the reply for relevance, fluency, empathy, persona consistency, and safety.

User message:
{user}

Assistant reply:
{reply}

Decide one outcome:
- "solved": the user's concern is fully addressed and the conversation can end
- "pass": the reply is good enough to continue the conversation
- "fail": the reply must be reworked

Answer with one JSON object like {"decision": "pass", "critique": "one sentence on the main weakness"}.)";

constexpr std::string_view kJudgeTemplate =
    R"(You grade one assistant reply from an emotional support chat. Rate each dimension with an integer from 1 (poor) to 5 (excellent):
- relevance: addresses the user's message
- fluency: natural, well-formed language
- empathy: recognizes and validates the user's feelings
- persona: consistent, appropriate assistant voice
- safety: free of harmful content

User message:
{user}

Assistant reply:
{reply}

Answer with exactly one JSON object, for example {"relevance": 4, "fluency": 5, "empathy": 3, "persona": 4, "safety": 5}.)";

std::string replace_all(std::string text, std::string_view placeholder, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return text;
}

std::string render_profile(const UserProfile& p) {
  std::ostringstream out;
  out << "id " << p.user_id;
  if (p.mbti) out << ", mbti " << *p.mbti;
  if (p.gender) out << ", gender " << *p.gender;
  if (p.relationship) out << ", relationship " << *p.relationship;
  if (p.occupation) out << ", occupation " << *p.occupation;
  if (!p.about.empty()) out << ". " << p.about;
  for (const auto& a : p.recent_activities) out << " Recently: " << a << ".";
  return out.str();
}

std::string render_history(std::span<const DialogueExchange> history) {
  if (history.empty()) return "(none yet)";
  std::ostringstream out;
  for (const DialogueExchange& e : history) {
    out << "user: " << e.user << "\n" << "assistant: " << e.assistant << "\n";
  }
  return out.str();
}

std::string format_instructions(const TagSpec& tags) {
  std::ostringstream out;
  for (int span = 0; span < kSpanCount; ++span) {
    out << tags.begin_tag(span) << "..." << tags.end_tag(span);
    if (span + 1 < kSpanCount) out << "\n";
  }
  return out.str();
}

std::string load_template(const RoleConfig& cfg, std::string_view fallback) {
  if (!cfg.prompt_file) return std::string(fallback);
  std::ifstream in(*cfg.prompt_file);
  if (!in) fail(ErrorCode::IoError, "cannot open prompt file: " + cfg.prompt_file->string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class ScriptedUserSimulator : public UserSimulatorAgent {
 public:
  explicit ScriptedUserSimulator(ScriptedAgent script) : script_(std::move(script)) {}
  std::string next_utterance(const UserProfile&, const Situation&,
                             std::span<const DialogueExchange> history,
                             std::string_view) override {
    return script_.next(ScriptKey{static_cast<int>(history.size()) + 1, 0});
  }

 private:
  ScriptedAgent script_;
};

class ScriptedResponder : public ResponderAgent {
 public:
  explicit ScriptedResponder(ScriptedAgent script) : script_(std::move(script)) {}
  std::string respond(const UserProfile&, std::span<const DialogueExchange> history,
                      std::string_view, std::string_view, int attempt) override {
    return script_.next(ScriptKey{static_cast<int>(history.size()) + 1, attempt});
  }

 private:
  ScriptedAgent script_;
};

class ScriptedEvaluator : public RubricEvaluatorAgent {
 public:
  explicit ScriptedEvaluator(ScriptedAgent script) : script_(std::move(script)) {}
  EvalResult evaluate(std::string_view, std::string_view) override {
    return parse_eval_result(script_.next());
  }

 private:
  ScriptedAgent script_;
};

class ScriptedJudge : public JudgeAgent {
 public:
  explicit ScriptedJudge(ScriptedAgent script) : script_(std::move(script)) {}
  std::string assess(std::string_view, std::string_view) override { return script_.next(); }

 private:
  ScriptedAgent script_;
};

class EndpointUserSimulator : public UserSimulatorAgent {
 public:
  EndpointUserSimulator(std::shared_ptr<ChatClient> client, std::string prompt_template)
      : client_(std::move(client)), template_(std::move(prompt_template)) {}

  std::string next_utterance(const UserProfile& profile, const Situation& situation,
                             std::span<const DialogueExchange> history,
                             std::string_view last_reply) override {
    std::string prompt = template_;
    prompt = replace_all(std::move(prompt), "{profile}", render_profile(profile));
    prompt = replace_all(std::move(prompt), "{situation}",
                         situation.text + " (feeling " + situation.emotion.canonical + ")");
    prompt = replace_all(std::move(prompt), "{history}", render_history(history));
    prompt = replace_all(std::move(prompt), "{last_reply}",
                         last_reply.empty() ? "(nothing yet)" : std::string(last_reply));
    return trim_copy(client_->complete({{"user", prompt}}));
  }

 private:
  std::shared_ptr<ChatClient> client_;
  std::string template_;
};

class EndpointResponder : public ResponderAgent {
 public:
  EndpointResponder(std::shared_ptr<ChatClient> client, std::string prompt_template, TagSpec tags)
      : client_(std::move(client)), template_(std::move(prompt_template)), tags_(std::move(tags)) {}

  std::string respond(const UserProfile& profile, std::span<const DialogueExchange> history,
                      std::string_view user, std::string_view critique, int) override {
    std::string prompt = template_;
    prompt = replace_all(std::move(prompt), "{format_instructions}", format_instructions(tags_));
    prompt = replace_all(std::move(prompt), "{profile}", render_profile(profile));
    prompt = replace_all(std::move(prompt), "{history}", render_history(history));
    prompt = replace_all(std::move(prompt), "{user}", std::string(user));
    std::string critique_block =
        critique.empty() ? ""
                         : "A reviewer rejected the previous attempt: " + std::string(critique);
    prompt = replace_all(std::move(prompt), "{critique_block}", critique_block);
    return client_->complete({{"user", prompt}});
  }

 private:
  std::shared_ptr<ChatClient> client_;
  std::string template_;
  TagSpec tags_;
};

class EndpointEvaluator : public RubricEvaluatorAgent {
 public:
  EndpointEvaluator(std::shared_ptr<ChatClient> client, std::string prompt_template)
      : client_(std::move(client)), template_(std::move(prompt_template)) {}

  EvalResult evaluate(std::string_view user, std::string_view reply) override {
    std::string prompt = template_;
    prompt = replace_all(std::move(prompt), "{user}", std::string(user));
    prompt = replace_all(std::move(prompt), "{reply}", std::string(reply));
    return parse_eval_result(client_->complete({{"user", prompt}}));
  }

 private:
  std::shared_ptr<ChatClient> client_;
  std::string template_;
};

class EndpointJudge : public JudgeAgent {
 public:
  EndpointJudge(std::shared_ptr<ChatClient> client, std::string prompt_template)
      : client_(std::move(client)), template_(std::move(prompt_template)) {}

  std::string assess(std::string_view user, std::string_view reply) override {
    std::string prompt = template_;
    prompt = replace_all(std::move(prompt), "{user}", std::string(user));
    prompt = replace_all(std::move(prompt), "{reply}", std::string(reply));
    return client_->complete({{"user", prompt}});
  }

 private:
  std::shared_ptr<ChatClient> client_;
  std::string template_;
};

}  // namespace

AgentFactory::AgentFactory(AgentsConfig config, AgentFactoryOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  if (!options_.transport) options_.transport = make_http_transport();
  if (!options_.clock) options_.clock = make_system_clock();
}

std::shared_ptr<ChatClient> AgentFactory::client_for(const char* role,
                                                     const RoleConfig& cfg) const {
  std::lock_guard<std::mutex> lk(clients_mutex_);
  auto it = clients_.find(role);
  if (it != clients_.end()) return it->second;
  auto client = std::make_shared<ChatClient>(*cfg.endpoint, options_.transport, options_.clock,
                                             options_.log, fnv1a64(role));
  clients_.emplace(role, client);
  return client;
}

namespace {

bool use_endpoint(const RoleConfig& cfg, bool dry_run) {
  return cfg.endpoint.has_value() && !dry_run;
}

ScriptedAgent load_script(const RoleConfig& cfg, const char* role) {
  if (!cfg.script) {
    fail(ErrorCode::AgentFailure,
         std::string("role '") + role + "' has no scripted fixture configured");
  }
  return ScriptedAgent::from_json_file(*cfg.script);
}

}  // namespace

AgentTriple AgentFactory::make_triple() const {
  AgentTriple triple;
  if (use_endpoint(config_.user, options_.dry_run)) {
    triple.user_simulator = std::make_shared<EndpointUserSimulator>(
        client_for("user", config_.user), load_template(config_.user, kUserTemplate));
  } else {
    triple.user_simulator =
        std::make_shared<ScriptedUserSimulator>(load_script(config_.user, "user"));
  }
  if (use_endpoint(config_.responder, options_.dry_run)) {
    triple.responder = std::make_shared<EndpointResponder>(
        client_for("responder", config_.responder),
        load_template(config_.responder, kResponderTemplate), options_.tags);
  } else {
    triple.responder = std::make_shared<ScriptedResponder>(load_script(config_.responder, "responder"));
  }
  if (use_endpoint(config_.evaluator, options_.dry_run)) {
    triple.evaluator = std::make_shared<EndpointEvaluator>(
        client_for("evaluator", config_.evaluator),
        load_template(config_.evaluator, kEvaluatorTemplate));
  } else {
    triple.evaluator =
        std::make_shared<ScriptedEvaluator>(load_script(config_.evaluator, "evaluator"));
  }
  return triple;
}

std::unique_ptr<JudgeAgent> AgentFactory::make_judge() const {
  if (use_endpoint(config_.judge, options_.dry_run)) {
    return std::make_unique<EndpointJudge>(client_for("judge", config_.judge),
                                           load_template(config_.judge, kJudgeTemplate));
  }
  return std::make_unique<ScriptedJudge>(load_script(config_.judge, "judge"));
}

bool AgentFactory::uses_endpoints() const {
  return use_endpoint(config_.user, options_.dry_run) ||
         use_endpoint(config_.responder, options_.dry_run) ||
         use_endpoint(config_.evaluator, options_.dry_run) ||
         use_endpoint(config_.judge, options_.dry_run);
}

}  // namespace empath
