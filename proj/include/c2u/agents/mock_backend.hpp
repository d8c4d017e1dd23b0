#pragma once

// Hermetic backend. A request is answered from a script file when one
// matches, else by a deterministic generator that drives the same tool-call
// workflow a live model would (read inputs, write the diagram).
//
// Script lookup in `scripts_dir`, first hit wins:
//   <role>_<fingerprint>.json   fingerprint = fnv1a64(role + task prompt minus *_PATH lines)
//   <role>_<scope slug>.json
//   <role>_<diagram type>.json
//   <role>.json
// Script format: {"turns": [[record, ...], ...], "delay_ms": n, "fail_at_turn": n}
// or a bare array of records (one turn). String values may contain {{KEY}}
// placeholders filled from the task prompt's `KEY: value` lines.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "c2u/agents/protocol.hpp"
#include "c2u/agents/synth.hpp"

namespace c2u::agents {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Path lines vary with the output root, so they are left out.
inline std::string prompt_fingerprint(Role role, std::string_view task_prompt) {
  std::string basis(to_string(role));
  basis += '\n';
  std::istringstream in{std::string(task_prompt)};
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(": ");
    if (colon != std::string::npos && colon >= 5 && line.compare(colon - 5, 5, "_PATH") == 0) continue;
    basis += line + '\n';
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(basis)));
  return buf;
}

struct MockOptions {
  std::optional<std::filesystem::path> scripts_dir;
  bool generative = true;    // fall back to the generator when no script matches
  double defect_rate = 0.0;  // fraction of generated diagrams seeded with a lint defect
  int readability_threshold = 40;
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockOptions opt = {}) : opt_(std::move(opt)) {}

  std::string name() const override { return "mock"; }

  void respond(const AgentRequest& req, const RecordSink& sink) override {
    const auto fields = prompt_fields(req.task_prompt);
    if (auto script = find_script(req)) {
      play(*script, req, fields, sink);
      return;
    }
    if (!opt_.generative)
      throw BackendError("no mock script for role " + std::string(to_string(req.role)));
    generate(req, sink);
  }

  std::optional<std::filesystem::path> script_path(const AgentRequest& req) const {
    if (!opt_.scripts_dir) return std::nullopt;
    const std::string role(to_string(req.role));
    std::vector<std::string> names{role + "_" + prompt_fingerprint(req.role, req.task_prompt)};
    if (auto s = prompt_field(req.task_prompt, "SCOPE")) names.push_back(role + "_" + scope_slug(*s));
    if (auto t = prompt_field(req.task_prompt, "DIAGRAM_TYPE")) names.push_back(role + "_" + *t);
    names.push_back(role);
    for (const auto& n : names) {
      auto p = *opt_.scripts_dir / (n + ".json");
      if (std::filesystem::exists(p)) return p;
    }
    return std::nullopt;
  }

 private:
  MockOptions opt_;

  std::optional<json> find_script(const AgentRequest& req) const {
    auto p = script_path(req);
    if (!p) return std::nullopt;
    std::ifstream in(*p);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw BackendError("malformed mock script " + p->string());
    return j;
  }

  static void substitute(json& j, const std::vector<std::pair<std::string, std::string>>& fields) {
    if (j.is_string()) {
      std::string s = j.get<std::string>();
      for (const auto& [k, v] : fields) {
        const std::string key = "{{" + k + "}}";
        for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + v.size()))
          s.replace(pos, key.size(), v);
      }
      j = s;
    } else if (j.is_structured()) {
      for (auto& x : j) substitute(x, fields);
    }
  }

  void play(const json& script, const AgentRequest& req, const std::vector<std::pair<std::string, std::string>>& fields,
            const RecordSink& sink) const {
    json turns = script.is_array() ? json::array({script}) : script.value("turns", json::array());
    const int delay = script.is_object() ? script.value("delay_ms", 0) : 0;
    const int fail_at = script.is_object() ? script.value("fail_at_turn", -1) : -1;
    if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    Usage u{static_cast<long>((req.system_prompt.size() + req.task_prompt.size()) / 4), 0};
    if (req.turn < static_cast<int>(turns.size())) {
      json records = turns[static_cast<std::size_t>(req.turn)];
      substitute(records, fields);
      for (const auto& r : records) {
        auto rec = ResponseRecord::from_json(r);
        if (rec.kind == ResponseRecord::Kind::Done) continue;
        u.output_tokens += static_cast<long>(r.dump().size() / 4);
        sink(rec);
      }
    }
    if (req.turn == fail_at) throw BackendError("scripted failure at turn " + std::to_string(fail_at));
    sink(ResponseRecord::make_done(u));
  }

  // --- generator ------------------------------------------------------------

  void generate(const AgentRequest& req, const RecordSink& sink) const {
    const auto field = [&](const char* k) { return prompt_field(req.task_prompt, k).value_or(""); };
    Usage u{static_cast<long>((req.system_prompt.size() + req.task_prompt.size()) / 4), 0};
    auto emit = [&](ResponseRecord r) {
      u.output_tokens += static_cast<long>((r.text.size() + r.call.input.dump().size()) / 4);
      sink(r);
    };
    auto read = [&](const std::string& path) {
      if (!path.empty()) emit(ResponseRecord::make_call(ToolCall{"read:" + path, "Read", json{{"path", path}}}));
    };
    auto got = [&](const std::string& path) -> std::optional<std::string> {
      for (const auto& r : req.tool_results)
        if (r.ok && r.id == "read:" + path) return r.output;
      return std::nullopt;
    };
    auto view_json = [&]() {
      auto v = got(field("VIEW_PATH"));
      json j = v ? json::parse(*v, nullptr, false) : json::object();
      return j.is_discarded() ? json::object() : j;
    };

    switch (req.role) {
      case Role::Planner: {
        if (req.turn == 0) {
          read(field("VIEW_PATH"));
          break;
        }
        Band band{1, 3};
        std::sscanf(field("BAND").c_str(), "%d-%d", &band.lo, &band.hi);
        emit(ResponseRecord::make_text(canonical_dump(synth::plan_from_view(view_json(), band).to_json())));
        break;
      }
      case Role::Analyzer: {
        const auto files = split_list(field("FILES"));
        if (req.turn == 0) {
          read(field("VIEW_PATH"));
          for (const auto& f : files) read(f);
          break;
        }
        std::vector<std::string> readable;
        for (const auto& f : files)
          if (got(f)) readable.push_back(f);
        auto ctx = synth::context_from_view(view_json(), field("SCOPE"), readable, opt_.readability_threshold);
        if (readable.empty()) ctx = EnrichedContext{field("SCOPE"), {}, {}, {}, {}};
        emit(ResponseRecord::make_text(ctx.serialized()));
        break;
      }
      case Role::Diagram: {
        const std::string ctx_path = field("CONTEXT_PATH");
        if (req.turn == 0) {
          read(field("VIEW_PATH"));
          read(ctx_path);
          break;
        }
        if (req.turn == 1) {
          auto dt = parse_diagram_type(field("DIAGRAM_TYPE")).value_or(DiagramType::Class);
          std::optional<EnrichedContext> ctx;
          if (!ctx_path.empty())
            if (auto c = got(ctx_path)) ctx = parse_context(*c);
          const json view = view_json();
          std::string text = synth::puml_for(dt, ctx, view, view.value("project_name", field("PROJECT")));
          const std::string out = field("OUTPUT_PATH");
          const std::uint64_t h = fnv1a64(std::filesystem::path(out).filename().string() + field("DIAGRAM_TYPE") +
                                          field("PROJECT"));
          if (opt_.defect_rate > 0 && static_cast<double>(h % 10000) < opt_.defect_rate * 10000.0)
            text = synth::inject_defect(dt, text, static_cast<unsigned>((h >> 20) % 7));
          emit(ResponseRecord::make_call(ToolCall{"write", "Write", json{{"path", out}, {"content", text}}}));
          break;
        }
        emit(ResponseRecord::make_text("wrote " + field("OUTPUT_PATH")));
        break;
      }
      case Role::Corrector: {
        if (req.turn == 0) {
          read(field("PUML_PATH"));
          break;
        }
        emit(ResponseRecord::make_text(got(field("PUML_PATH")) ? "reviewed; no further changes" : "file not readable"));
        break;
      }
      case Role::DependencyAnalyzer: {
        const std::string p = field("DEPENDENCY_SUMMARY_PATH");
        if (req.turn == 0) {
          read(p);
          break;
        }
        std::string names;
        if (auto s = got(p)) {
          json j = json::parse(*s, nullptr, false);
          if (!j.is_discarded())
            for (const auto& c : j.value("classes", json::array())) names += c.value("name", "") + "\n";
        }
        emit(ResponseRecord::make_text(names));
        break;
      }
    }
    sink(ResponseRecord::make_done(u));
  }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  }
};

}  // namespace c2u::agents
