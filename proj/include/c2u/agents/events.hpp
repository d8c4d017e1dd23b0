#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/ir.hpp"

namespace c2u::agents {

enum class EventKind { SessionStart, Message, ToolCall, SessionEnd, CorrectionStart, CorrectionEnd, Error, Warning };

inline constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::SessionStart: return "session_start";
    case EventKind::Message: return "message";
    case EventKind::ToolCall: return "tool_call";
    case EventKind::SessionEnd: return "session_end";
    case EventKind::CorrectionStart: return "correction_start";
    case EventKind::CorrectionEnd: return "correction_end";
    case EventKind::Error: return "error";
    case EventKind::Warning: return "warning";
  }
  return "message";
}

struct RunEvent {
  double timestamp = 0;  // seconds since the log was created
  EventKind kind = EventKind::Message;
  std::string session;   // stable id derived from type/role/scope
  long seq = 0;          // per-session order
  long index = 0;        // global append order
  json payload = json::object();

  json to_json(bool deterministic) const {
    return json{{"timestamp", deterministic ? 0.0 : timestamp},
                {"kind", std::string(to_string(kind))},
                {"session", session},
                {"seq", seq},
                {"payload", payload}};
  }
};

// Append-only, thread-safe sink shared by every session of a run.
class EventLog {
 public:
  explicit EventLog(bool deterministic = false)
      : deterministic_(deterministic), start_(std::chrono::steady_clock::now()) {}

  void append(EventKind kind, const std::string& session, json payload = json::object()) {
    std::lock_guard lock(mu_);
    RunEvent e;
    e.timestamp = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    e.kind = kind;
    e.session = session;
    e.seq = next_seq_[session]++;
    e.index = static_cast<long>(events_.size());
    e.payload = std::move(payload);
    events_.push_back(std::move(e));
  }

  std::vector<RunEvent> snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
  }

  bool deterministic() const { return deterministic_; }

  // Newline-delimited JSON. Deterministic logs are ordered by session then
  // per-session sequence, with timestamps zeroed, so reruns are identical.
  std::string to_jsonl() const {
    auto evs = snapshot();
    if (deterministic_)
      std::stable_sort(evs.begin(), evs.end(), [](const RunEvent& a, const RunEvent& b) {
        return a.session != b.session ? a.session < b.session : a.seq < b.seq;
      });
    std::string out;
    for (const auto& e : evs) out += canonical_dump(e.to_json(deterministic_)) + "\n";
    return out;
  }

  std::size_t count(EventKind kind) const {
    std::lock_guard lock(mu_);
    return static_cast<std::size_t>(
        std::count_if(events_.begin(), events_.end(), [&](const RunEvent& e) { return e.kind == kind; }));
  }

 private:
  bool deterministic_;
  std::chrono::steady_clock::time_point start_;
  mutable std::mutex mu_;
  std::vector<RunEvent> events_;
  std::map<std::string, long> next_seq_;
};

}  // namespace c2u::agents
