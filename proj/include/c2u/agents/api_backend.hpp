#pragma once

// Remote model backend over a messages-style HTTP API. Each turn is one
// request rebuilt from the session history; tool_use blocks in the reply
// become tool-call records. HTTPS needs CPPHTTPLIB_OPENSSL_SUPPORT.

#include <cstdlib>
#include <regex>
#include <string>

#include <httplib.h>

#include "c2u/agents/protocol.hpp"

namespace c2u::agents {

struct ApiConfig {
  std::string url = "https://api.anthropic.com/v1/messages";
  std::string model = "claude-sonnet-4-5";
  std::string api_key;
  int max_tokens = 8192;
  int timeout_s = 300;
  double input_cost_per_mtok = 3.0;
  double output_cost_per_mtok = 15.0;

  // C2U_API_KEY is required; C2U_API_URL and C2U_MODEL override the defaults.
  static ApiConfig from_env() {
    ApiConfig c;
    const char* key = std::getenv("C2U_API_KEY");
    if (!key || !*key) throw BackendError("C2U_API_KEY is not set");
    c.api_key = key;
    if (const char* u = std::getenv("C2U_API_URL"); u && *u) c.url = u;
    if (const char* m = std::getenv("C2U_MODEL"); m && *m) c.model = m;
    return c;
  }
};

inline json tool_definition(const std::string& name) {
  auto str = json{{"type", "string"}};
  if (name == "Read")
    return {{"name", name},
            {"description", "Read a file from the repository or the output directory."},
            {"input_schema", {{"type", "object"}, {"properties", {{"path", str}}}, {"required", {"path"}}}}};
  if (name == "Write")
    return {{"name", name},
            {"description", "Write a file into the output directory."},
            {"input_schema",
             {{"type", "object"}, {"properties", {{"path", str}, {"content", str}}}, {"required", {"path", "content"}}}}};
  if (name == "Glob")
    return {{"name", name},
            {"description", "List repository files matching a glob pattern."},
            {"input_schema", {{"type", "object"}, {"properties", {{"pattern", str}}}, {"required", {"pattern"}}}}};
  return {{"name", name},
          {"description", "Search repository files for a regular expression."},
          {"input_schema",
           {{"type", "object"}, {"properties", {{"pattern", str}, {"glob", str}}}, {"required", {"pattern"}}}}};
}

// Alternating user/assistant messages: the task prompt, then each turn's
// assistant records followed by a user message carrying its tool results.
inline json build_messages(const AgentRequest& req) {
  json messages = json::array();
  messages.push_back({{"role", "user"}, {"content", req.task_prompt}});
  json assistant = json::array(), results = json::array();
  auto flush = [&] {
    if (!assistant.empty()) messages.push_back({{"role", "assistant"}, {"content", assistant}});
    if (!results.empty()) messages.push_back({{"role", "user"}, {"content", results}});
    assistant = json::array();
    results = json::array();
  };
  for (const auto& h : req.history) {
    const std::string type = h.value("type", "");
    if (type == "tool_result") {
      results.push_back({{"type", "tool_result"},
                         {"tool_use_id", h.value("id", "")},
                         {"content", h.value("output", "")},
                         {"is_error", !h.value("ok", true)}});
      continue;
    }
    if (!results.empty()) flush();
    if (type == "text") assistant.push_back({{"type", "text"}, {"text", h.value("text", "")}});
    else if (type == "tool_call")
      assistant.push_back(
          {{"type", "tool_use"}, {"id", h.value("id", "")}, {"name", h.value("tool", "")}, {"input", h.value("input", json::object())}});
  }
  flush();
  return messages;
}

class ApiBackend : public Backend {
 public:
  explicit ApiBackend(ApiConfig cfg) : cfg_(std::move(cfg)) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(cfg_.url, m, re)) throw BackendError("malformed API url: " + cfg_.url);
    origin_ = m[1];
    path_ = m[2].matched ? std::string(m[2]) : "/";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (origin_.rfind("https://", 0) == 0) throw BackendError("this build has no TLS support; use an http:// url");
#endif
  }

  std::string name() const override { return "api"; }
  bool live() const override { return true; }

  double cost(const Usage& u) const override {
    return (static_cast<double>(u.input_tokens) * cfg_.input_cost_per_mtok +
            static_cast<double>(u.output_tokens) * cfg_.output_cost_per_mtok) /
           1e6;
  }

  json request_body(const AgentRequest& req) const {
    json tools = json::array();
    for (const auto& t : req.tools) tools.push_back(tool_definition(t));
    return json{{"model", cfg_.model},
                {"max_tokens", cfg_.max_tokens},
                {"system", req.system_prompt},
                {"messages", build_messages(req)},
                {"tools", tools}};
  }

  void respond(const AgentRequest& req, const RecordSink& sink) override {
    httplib::Client cli(origin_);
    cli.set_read_timeout(cfg_.timeout_s, 0);
    cli.set_write_timeout(cfg_.timeout_s, 0);
    httplib::Headers headers{{"x-api-key", cfg_.api_key}, {"anthropic-version", "2023-06-01"}};
    auto res = cli.Post(path_, headers, request_body(req).dump(), "application/json");
    if (!res) throw BackendError("API request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw BackendError("API returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 512));
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw BackendError("API returned malformed JSON");
    for (const auto& block : body.value("content", json::array())) {
      const std::string type = block.value("type", "");
      if (type == "text") sink(ResponseRecord::make_text(block.value("text", "")));
      else if (type == "tool_use")
        sink(ResponseRecord::make_call(ToolCall{block.value("id", ""), block.value("name", ""), block.value("input", json::object())}));
    }
    Usage u;
    if (body.contains("usage")) {
      u.input_tokens = body["usage"].value("input_tokens", 0L);
      u.output_tokens = body["usage"].value("output_tokens", 0L);
    }
    sink(ResponseRecord::make_done(u));
  }

 private:
  ApiConfig cfg_;
  std::string origin_;
  std::string path_;
};

}  // namespace c2u::agents
