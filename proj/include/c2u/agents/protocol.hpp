#pragma once

// Backend wire protocol. A request carries the role, prompts, allowed tools
// and the tool results of the previous turn; the backend answers with a
// stream of records: assistant text, tool calls, and a terminating `done`.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/ir.hpp"

namespace c2u::agents {

inline constexpr std::string_view kProtocolVersion = "c2u.agent.v1";
inline constexpr int kMaxTurns = 16;

enum class Role { Planner, Analyzer, Diagram, Corrector, DependencyAnalyzer };

inline constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::Planner: return "planner";
    case Role::Analyzer: return "analyzer";
    case Role::Diagram: return "diagram";
    case Role::Corrector: return "corrector";
    case Role::DependencyAnalyzer: return "dependency_analyzer";
  }
  return "planner";
}

inline std::optional<Role> parse_role(std::string_view s) {
  for (Role r : {Role::Planner, Role::Analyzer, Role::Diagram, Role::Corrector, Role::DependencyAnalyzer})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

inline std::vector<std::string> allowed_tools(Role r) {
  if (r == Role::Corrector) return {"Read", "Write"};
  return {"Read", "Write", "Glob", "Grep"};
}

struct ToolCall {
  std::string id;
  std::string tool;
  json input = json::object();
};

struct ToolResult {
  std::string id;
  std::string tool;
  bool ok = true;
  std::string output;

  json to_json() const { return json{{"id", id}, {"tool", tool}, {"ok", ok}, {"output", output}}; }
};

struct Usage {
  long input_tokens = 0;
  long output_tokens = 0;
};

struct ResponseRecord {
  enum class Kind { Text, ToolCall, Done };
  Kind kind = Kind::Text;
  std::string text;
  ToolCall call;
  Usage usage;

  static ResponseRecord make_text(std::string t) {
    ResponseRecord r;
    r.kind = Kind::Text;
    r.text = std::move(t);
    return r;
  }
  static ResponseRecord make_call(ToolCall c) {
    ResponseRecord r;
    r.kind = Kind::ToolCall;
    r.call = std::move(c);
    return r;
  }
  static ResponseRecord make_done(Usage u) {
    ResponseRecord r;
    r.kind = Kind::Done;
    r.usage = u;
    return r;
  }

  json to_json() const {
    switch (kind) {
      case Kind::Text: return json{{"type", "text"}, {"text", text}};
      case Kind::ToolCall: return json{{"type", "tool_call"}, {"id", call.id}, {"tool", call.tool}, {"input", call.input}};
      case Kind::Done:
        return json{{"type", "done"},
                    {"usage", {{"input_tokens", usage.input_tokens}, {"output_tokens", usage.output_tokens}}}};
    }
    return json::object();
  }

  static ResponseRecord from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "text") return make_text(j.at("text").get<std::string>());
    if (type == "tool_call") {
      ToolCall c;
      c.id = j.value("id", "");
      c.tool = j.at("tool").get<std::string>();
      c.input = j.value("input", json::object());
      return make_call(std::move(c));
    }
    if (type == "done") {
      Usage u;
      if (j.contains("usage")) {
        u.input_tokens = j["usage"].value("input_tokens", 0L);
        u.output_tokens = j["usage"].value("output_tokens", 0L);
      }
      return make_done(u);
    }
    throw std::invalid_argument("unknown response record type '" + type + "'");
  }
};

struct AgentRequest {
  Role role = Role::Planner;
  std::string system_prompt;
  std::string task_prompt;
  std::vector<std::string> tools;
  std::vector<ToolResult> tool_results;  // results for the previous turn's calls
  std::vector<json> history;             // records and tool results of earlier turns, oldest first
  int turn = 0;

  json to_json() const {
    json results = json::array();
    for (const auto& r : tool_results) results.push_back(r.to_json());
    return json{{"protocol", std::string(kProtocolVersion)},
                {"role", std::string(to_string(role))},
                {"system_prompt", system_prompt},
                {"task_prompt", task_prompt},
                {"tools", tools},
                {"tool_results", results},
                {"history", history},
                {"turn", turn}};
  }
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RecordSink = std::function<void(const ResponseRecord&)>;

class Backend {
 public:
  virtual ~Backend() = default;
  // Streams one turn's records into `sink`; the last record is `done`.
  // Throws BackendError on failure (records already streamed stay valid).
  virtual void respond(const AgentRequest& req, const RecordSink& sink) = 0;
  virtual std::string name() const = 0;
  virtual bool live() const { return false; }
  virtual double cost(const Usage&) const { return 0.0; }
};

// `KEY: value` lines of a task prompt.
inline std::vector<std::pair<std::string, std::string>> prompt_fields(std::string_view prompt) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  while (start < prompt.size()) {
    std::size_t nl = prompt.find('\n', start);
    std::string_view line = prompt.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? prompt.size() : nl + 1;
    std::size_t colon = line.find(": ");
    if (colon == std::string_view::npos || colon == 0) continue;
    std::string_view key = line.substr(0, colon);
    bool ok = true;
    for (char c : key) ok = ok && ((c >= 'A' && c <= 'Z') || c == '_' || (c >= '0' && c <= '9'));
    if (ok) out.emplace_back(std::string(key), std::string(line.substr(colon + 2)));
  }
  return out;
}

inline std::optional<std::string> prompt_field(std::string_view prompt, std::string_view key) {
  for (auto& [k, v] : prompt_fields(prompt))
    if (k == key) return v;
  return std::nullopt;
}

}  // namespace c2u::agents
