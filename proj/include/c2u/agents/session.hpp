#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "c2u/agents/events.hpp"
#include "c2u/agents/protocol.hpp"
#include "c2u/agents/sandbox.hpp"

namespace c2u::agents {

struct SessionStats {
  double duration_s = 0;
  long input_tokens = 0;
  long output_tokens = 0;
  double cost = 0;

  json to_json() const {
    return json{{"duration_s", duration_s},
                {"input_tokens", input_tokens},
                {"output_tokens", output_tokens},
                {"cost", cost}};
  }
};

struct Hooks {
  std::function<void(const AgentRequest&)> before_execution;
  std::function<void(const ResponseRecord&)> after_message;
  std::function<void(const std::string&)> on_error;
};

struct SessionSpec {
  std::string id;  // event-log session id
  Role role = Role::Planner;
  std::string system_prompt;
  std::string task_prompt;
  std::vector<std::string> tools;  // defaults to the role's allow-list when empty
};

struct SessionResult {
  std::string text;               // concatenated assistant text
  std::vector<json> transcript;   // normalized records, in order
  SessionStats stats;
  bool failed = false;
  std::string error;
  int turns = 0;
  int executed_tool_calls = 0;
  int rejected_tool_calls = 0;
};

inline SessionResult run_session(SessionSpec spec, Backend& backend, const ToolSandbox& sandbox, EventLog* log = nullptr,
                                 const Hooks& hooks = {}) {
  const auto allow = allowed_tools(spec.role);
  if (spec.tools.empty()) spec.tools = allow;
  for (const auto& t : spec.tools)
    if (std::find(allow.begin(), allow.end(), t) == allow.end())
      throw std::invalid_argument("tool " + t + " is not allowed for role " + std::string(to_string(spec.role)));

  auto emit = [&](EventKind k, json payload) {
    if (log) log->append(k, spec.id, std::move(payload));
  };
  const bool det = log && log->deterministic();

  SessionResult res;
  const auto t0 = std::chrono::steady_clock::now();
  emit(EventKind::SessionStart, {{"role", std::string(to_string(spec.role))}, {"tools", spec.tools}});

  AgentRequest req{spec.role, spec.system_prompt, spec.task_prompt, spec.tools, {}, {}, 0};
  Usage usage;
  try {
    for (int turn = 0; turn < kMaxTurns; ++turn) {
      req.turn = turn;
      if (hooks.before_execution) hooks.before_execution(req);
      std::vector<ToolCall> calls;
      std::vector<json> turn_records;
      backend.respond(req, [&](const ResponseRecord& rec) {
        json j = rec.to_json();
        turn_records.push_back(j);
        switch (rec.kind) {
          case ResponseRecord::Kind::Text:
            res.text += rec.text;
            res.transcript.push_back(j);
            emit(EventKind::Message, {{"turn", turn}, {"chars", rec.text.size()}});
            break;
          case ResponseRecord::Kind::ToolCall:
            calls.push_back(rec.call);
            break;
          case ResponseRecord::Kind::Done:
            usage.input_tokens += rec.usage.input_tokens;
            usage.output_tokens += rec.usage.output_tokens;
            break;
        }
        if (hooks.after_message) hooks.after_message(rec);
      });
      ++res.turns;
      if (calls.empty()) break;

      std::vector<ToolResult> results;
      for (auto& c : calls) {
        if (c.id.empty()) c.id = "call_" + std::to_string(turn) + "_" + std::to_string(results.size());
        json rec{{"type", "tool_call"}, {"id", c.id}, {"tool", c.tool}, {"input", c.input}};
        if (std::find(spec.tools.begin(), spec.tools.end(), c.tool) == spec.tools.end()) {
          ToolResult r{c.id, c.tool, false, "tool '" + c.tool + "' is not allowed for this role"};
          rec["status"] = "rejected";
          ++res.rejected_tool_calls;
          emit(EventKind::ToolCall, {{"tool", c.tool}, {"status", "rejected"}});
          results.push_back(r);
        } else {
          ToolResult r = sandbox.execute(c);
          rec["status"] = r.ok ? "ok" : "failed";
          if (!r.ok) rec["error"] = r.output;
          ++res.executed_tool_calls;
          emit(EventKind::ToolCall, {{"tool", c.tool}, {"status", r.ok ? "ok" : "failed"}});
          results.push_back(r);
        }
        res.transcript.push_back(rec);
      }
      for (auto& j : turn_records) req.history.push_back(std::move(j));
      for (const auto& r : results) {
        json j = r.to_json();
        j["type"] = "tool_result";
        req.history.push_back(std::move(j));
      }
      req.tool_results = std::move(results);
    }
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
    emit(EventKind::Error, {{"error", res.error}});
    if (hooks.on_error) hooks.on_error(res.error);
  }
  res.stats.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.stats.input_tokens = usage.input_tokens;
  res.stats.output_tokens = usage.output_tokens;
  res.stats.cost = backend.cost(usage);
  json stats = res.stats.to_json();
  if (det) stats["duration_s"] = 0.0;
  emit(EventKind::SessionEnd, {{"failed", res.failed}, {"turns", res.turns}, {"stats", stats}});
  return res;
}

}  // namespace c2u::agents
