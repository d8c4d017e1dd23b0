#pragma once

// Two-tier routing. SINGLE: one diagram session then one correction. DEEP:
// planner -> analyzers (parallel) -> one task per scope that generates its
// diagram and immediately corrects it, so corrections overlap the remaining
// generations. Every backend session holds a slot from a bounded pool;
// corrections are granted slots ahead of waiting generations.
//
// Output layout under <out>/<project>/<type>/:
//   view_<type>.json, plan.json, contexts/NN_<slug>.json,
//   NN_<slug>.puml, NN_<slug>.lint.json, events.jsonl

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "c2u/agents/events.hpp"
#include "c2u/agents/plan.hpp"
#include "c2u/agents/prompts.hpp"
#include "c2u/agents/protocol.hpp"
#include "c2u/agents/sandbox.hpp"
#include "c2u/agents/session.hpp"
#include "c2u/extraction.hpp"
#include "c2u/metrics.hpp"
#include "c2u/normalization.hpp"
#include "c2u/puml.hpp"
#include "c2u/view.hpp"

namespace c2u::agents {

namespace fs = std::filesystem;

class SlotPool {
 public:
  explicit SlotPool(int slots) : free_(std::max(1, slots)) {}

  void acquire(bool priority) {
    std::unique_lock lock(mu_);
    if (priority) {
      ++waiting_priority_;
      cv_.wait(lock, [&] { return free_ > 0; });
      --waiting_priority_;
    } else {
      cv_.wait(lock, [&] { return free_ > 0 && waiting_priority_ == 0; });
    }
    --free_;
    in_flight_ = std::max(in_flight_, ++active_);
  }

  void release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
      --active_;
    }
    cv_.notify_all();
  }

  int peak() const {
    std::lock_guard lock(mu_);
    return in_flight_;
  }

  class Guard {
   public:
    Guard(SlotPool& p, bool priority) : p_(p) { p_.acquire(priority); }
    ~Guard() { p_.release(); }
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    SlotPool& p_;
  };

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int free_;
  int waiting_priority_ = 0;
  int active_ = 0;
  int in_flight_ = 0;
};

class OrchestrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OrchestratorOptions {
  int concurrency_limit = 4;
  PromptOptions prompts;
  ViewOptions view;
  std::optional<fs::path> deps_root;
  bool deterministic = false;
};

struct DiagramResult {
  int index = 0;  // 1-based scope position
  std::string scope;
  fs::path path;
  bool ok = false;
  std::string error;
  puml::LintReport initial;  // before any fix: the validity datum
  puml::LintReport final_report;
  puml::DiagramArtifact artifact;  // parsed from the final file
};

struct CorrectionOutcome {
  puml::LintReport initial;
  puml::LintReport final_report;
  bool session_failed = false;
};

struct OrchestrationResult {
  DiagramType diagram_type = DiagramType::Class;
  std::string project;
  fs::path dir;
  std::optional<DiagramPlan> plan;
  std::vector<DiagramResult> diagrams;  // in scope order, including failed ones
  std::vector<std::string> errors;
  std::shared_ptr<EventLog> log;
  int sessions = 0;
  int peak_sessions = 0;
  SessionStats totals;

  bool failed() const { return std::none_of(diagrams.begin(), diagrams.end(), [](const auto& d) { return d.ok; }); }

  metrics::Observation observation(const ProjectIR& ir) const {
    metrics::Observation o;
    o.project = project;
    o.diagram_type = diagram_type;
    o.ir_entities = metrics::ir_entity_names(ir);
    for (const auto& d : diagrams)
      if (d.ok) o.diagrams.push_back({d.artifact, d.initial, d.path.string()});
    return o;
  }
};

inline std::string two_digit(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", n);
  return buf;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

class Orchestrator {
 public:
  Orchestrator(Backend& backend, OrchestratorOptions opt = {})
      : backend_(backend), opt_(std::move(opt)), pool_(opt_.concurrency_limit) {}

  // `ir` must be normalized. Writes everything under out_root/<project>/<type>.
  OrchestrationResult run(const ProjectIR& ir, const fs::path& repo_root, DiagramType dt, const fs::path& out_root) {
    OrchestrationResult res;
    res.diagram_type = dt;
    res.project = ir.project_name;
    res.dir = out_root / (ir.project_name.empty() ? std::string("project") : ir.project_name) / std::string(to_string(dt));
    res.log = std::make_shared<EventLog>(opt_.deterministic);
    fs::create_directories(res.dir);
    Ctx c{ir, repo_root, dt, res, ToolSandbox(repo_root, res.dir), {}, json::object(), std::nullopt};

    const IRView view = generate_view(ir, dt, opt_.view);
    c.view_path = res.dir / ("view_" + std::string(to_string(dt)) + ".json");
    write_text(c.view_path, view.text);
    c.view = view_to_json(view);

    if (opt_.deps_root) c.deps_context = analyze_dependencies(c, *opt_.deps_root);

    try {
      if (route_of(dt) == Route::Single) run_single(c);
      else run_deep(c);
    } catch (const std::exception& e) {
      res.errors.push_back(e.what());
      res.log->append(EventKind::Error, session_id(dt, "orchestrator"), {{"error", e.what()}});
    }
    res.peak_sessions = pool_.peak();
    write_text(res.dir / "events.jsonl", res.log->to_jsonl());
    return res;
  }

  static std::string session_id(DiagramType dt, const std::string& role, int index = 0) {
    std::string s = std::string(to_string(dt)) + "/" + role;
    return index > 0 ? s + "/" + two_digit(index) : s;
  }

 private:
  struct Ctx {
    const ProjectIR& ir;
    fs::path repo;
    DiagramType dt;
    OrchestrationResult& res;
    ToolSandbox sandbox;
    fs::path view_path;
    json view;
    std::optional<fs::path> deps_context;
  };

  Backend& backend_;
  OrchestratorOptions opt_;
  SlotPool pool_;
  std::mutex res_mu_;

  SessionResult session(Ctx& c, const std::string& id, Role role, const std::string& task, bool priority) {
    SessionSpec spec{id, role, system_prompt(role, c.dt, opt_.prompts), task, {}};
    SessionResult r;
    {
      SlotPool::Guard g(pool_, priority);
      r = run_session(spec, backend_, c.sandbox, c.res.log.get());
    }
    std::lock_guard lock(res_mu_);
    ++c.res.sessions;
    c.res.totals.duration_s += r.stats.duration_s;
    c.res.totals.input_tokens += r.stats.input_tokens;
    c.res.totals.output_tokens += r.stats.output_tokens;
    c.res.totals.cost += r.stats.cost;
    return r;
  }

  void warn(Ctx& c, const std::string& id, const std::string& msg) {
    c.res.log->append(EventKind::Warning, id, {{"warning", msg}});
  }

  void fail(Ctx& c, const std::string& id, const std::string& msg) {
    c.res.log->append(EventKind::Error, id, {{"error", msg}});
    std::lock_guard lock(res_mu_);
    c.res.errors.push_back(msg);
  }

  std::vector<std::pair<std::string, std::string>> base_fields(const Ctx& c) const {
    return {{"PROJECT", c.ir.project_name}, {"DIAGRAM_TYPE", std::string(to_string(c.dt))}};
  }

  // --- SINGLE ---------------------------------------------------------------

  void run_single(Ctx& c) {
    DiagramResult d;
    d.index = 1;
    d.scope = std::string(to_string(c.dt));
    d.path = c.res.dir / ("01_" + scope_slug(d.scope) + ".puml");
    generate_and_correct(c, d, std::nullopt);
    c.res.diagrams.push_back(std::move(d));
  }

  // --- DEEP -----------------------------------------------------------------

  void run_deep(Ctx& c) {
    DiagramPlan plan = make_plan(c);
    c.res.plan = plan;
    write_text(c.res.dir / "plan.json", plan.to_json().dump(2) + "\n");

    const int n = static_cast<int>(plan.scopes.size());
    std::vector<std::optional<fs::path>> contexts(static_cast<std::size_t>(n));
    {
      std::vector<std::jthread> workers;
      for (int i = 0; i < n; ++i)
        workers.emplace_back([&, i] { contexts[static_cast<std::size_t>(i)] = analyze(c, plan.scopes[static_cast<std::size_t>(i)], i + 1); });
    }

    std::vector<DiagramResult> results(static_cast<std::size_t>(n));
    {
      std::vector<std::jthread> workers;
      for (int i = 0; i < n; ++i) {
        auto& d = results[static_cast<std::size_t>(i)];
        d.index = i + 1;
        d.scope = plan.scopes[static_cast<std::size_t>(i)].label;
        d.path = c.res.dir / (two_digit(i + 1) + "_" + scope_slug(d.scope) + ".puml");
        if (!contexts[static_cast<std::size_t>(i)]) {
          d.error = "analysis failed; scope dropped";
          continue;
        }
        workers.emplace_back([&, i] { generate_and_correct(c, results[static_cast<std::size_t>(i)], contexts[static_cast<std::size_t>(i)]); });
      }
    }
    c.res.diagrams = std::move(results);
  }

  DiagramPlan make_plan(Ctx& c) {
    const std::size_t classes = c.ir.classes.size();
    const Band band = plan_band(classes);
    auto fields = base_fields(c);
    fields.emplace_back("VIEW_PATH", fs::absolute(c.view_path).string());
    fields.emplace_back("CLASS_COUNT", std::to_string(classes));
    fields.emplace_back("BAND", std::to_string(band.lo) + "-" + std::to_string(band.hi));
    const std::string id = session_id(c.dt, "planner");
    std::optional<DiagramPlan> plan;
    for (int attempt = 0; attempt < 2 && !plan; ++attempt) {
      auto r = session(c, attempt == 0 ? id : id + "/retry", Role::Planner,
                       task_prompt(fields, "Produce the diagram plan as JSON."), false);
      if (!r.failed) plan = parse_plan(r.text);
      if (!plan) warn(c, id, attempt == 0 ? "unparseable plan; retrying" : "unparseable plan after retry");
    }
    if (!plan) throw OrchestrationError("planner output could not be parsed");
    auto clamped = clamp_plan(*plan, classes, c.view);
    if (clamped.clamped) warn(c, id, clamped.warning);
    return clamped.plan;
  }

  std::optional<fs::path> analyze(Ctx& c, const Scope& scope, int index) {
    const std::string id = session_id(c.dt, "analyzer", index);
    std::string files;
    for (const auto& f : scope.files) files += (files.empty() ? "" : ",") + f;
    auto fields = base_fields(c);
    fields.emplace_back("SCOPE", scope.label);
    fields.emplace_back("FILES", files);
    fields.emplace_back("RATIONALE", scope.rationale);
    fields.emplace_back("VIEW_PATH", fs::absolute(c.view_path).string());
    auto r = session(c, id, Role::Analyzer, task_prompt(fields, "Summarize this scope as JSON."), false);
    if (r.failed) {
      fail(c, id, "analyzer for scope '" + scope.label + "' failed: " + r.error);
      return std::nullopt;
    }
    auto ctx = parse_context(r.text);
    if (!ctx) {
      fail(c, id, "analyzer for scope '" + scope.label + "' returned no context");
      return std::nullopt;
    }
    if (ctx->scope.empty()) ctx->scope = scope.label;
    const auto repo_files = list_repository_files(c.repo);
    const std::set<std::string> known(repo_files.begin(), repo_files.end());
    std::erase_if(ctx->files, [&](const std::string& f) { return !known.count(f); });
    if (ctx->empty()) warn(c, id, "empty context for scope '" + scope.label + "'");
    const std::size_t before = ctx->serialized().size();
    if (cap_context(*ctx))
      warn(c, id, "context truncated from " + std::to_string(before) + " to " + std::to_string(ctx->serialized().size()) +
                      " bytes");
    fs::path p = c.res.dir / "contexts" / (two_digit(index) + "_" + scope_slug(scope.label) + ".json");
    write_text(p, ctx->serialized());
    return p;
  }

  void generate_and_correct(Ctx& c, DiagramResult& d, const std::optional<fs::path>& context) {
    const std::string id = session_id(c.dt, "diagram", d.index);
    if (!fs::exists(c.view_path) || (context && !fs::exists(*context))) {
      d.error = "input artifact missing";
      fail(c, id, d.error);
      return;
    }
    std::error_code ec;
    fs::remove(d.path, ec);
    auto fields = base_fields(c);
    if (context) {
      fields.emplace_back("SCOPE", d.scope);
      fields.emplace_back("SCOPE_INDEX", std::to_string(d.index));
    }
    fields.emplace_back("VIEW_PATH", fs::absolute(c.view_path).string());
    if (context) fields.emplace_back("CONTEXT_PATH", fs::absolute(*context).string());
    if (c.deps_context) fields.emplace_back("DEPENDENCY_CONTEXT_PATH", fs::absolute(*c.deps_context).string());
    fields.emplace_back("OUTPUT_PATH", fs::absolute(d.path).string());
    auto r = session(c, id, Role::Diagram, task_prompt(fields, "Write the PlantUML diagram."), false);
    if (!fs::exists(d.path)) {
      d.error = r.failed ? "diagram session failed: " + r.error : "diagram session wrote no file";
      if (!r.failed) fail(c, id, d.error);
      return;
    }
    auto outcome = correct(c, d);
    d.initial = outcome.initial;
    d.final_report = outcome.final_report;
    d.artifact = puml::parse_artifact(read_text(d.path), c.dt, d.scope);
    d.ok = true;
  }

  // Deterministic lint and fix first (its pre-fix verdict is the validity
  // datum), then the corrector session, then a final lint; if the session
  // left correctable violations behind they are fixed again.
  CorrectionOutcome correct(Ctx& c, const DiagramResult& d) {
    const std::string id = session_id(c.dt, "corrector", d.index);
    c.res.log->append(EventKind::CorrectionStart, id, {{"diagram", d.index}, {"path", d.path.filename().string()}});
    CorrectionOutcome out;
    auto first = puml::lint_and_fix(read_text(d.path), c.dt);
    out.initial = first.report;
    if (first.report.verdict == puml::Verdict::Corrected) write_text(d.path, first.text);

    auto fields = base_fields(c);
    if (route_of(c.dt) == Route::Deep) fields.emplace_back("SCOPE", d.scope);
    fields.emplace_back("VERDICT", std::string(puml::to_string(first.final_report.verdict)));
    fields.emplace_back("PUML_PATH", fs::absolute(d.path).string());
    auto r = session(c, id, Role::Corrector, task_prompt(fields, "Validate and correct the diagram."), true);
    out.session_failed = r.failed;

    std::string text = fs::exists(d.path) ? read_text(d.path) : first.text;
    auto final = puml::lint_and_fix(text, c.dt);
    if (final.report.verdict == puml::Verdict::Corrected) write_text(d.path, final.text);
    else if (!fs::exists(d.path)) write_text(d.path, text);
    out.final_report = final.final_report;
    out.final_report.fixes_applied = first.report.fixes_applied + final.report.fixes_applied;

    json lint{{"initial", out.initial.to_json()}, {"final", out.final_report.to_json()}, {"corrector_failed", r.failed}};
    fs::path lint_path = d.path;
    lint_path.replace_extension(".lint.json");
    write_text(lint_path, lint.dump(2) + "\n");
    c.res.log->append(EventKind::CorrectionEnd, id,
                      {{"diagram", d.index},
                       {"initial", std::string(puml::to_string(out.initial.verdict))},
                       {"final", std::string(puml::to_string(out.final_report.verdict))}});
    return out;
  }

  // --- dependencies -----------------------------------------------------------

  // Extracts the dependency tree and writes a capped summary plus the
  // dependency analyzer's notes; returns the summary path, or nothing when
  // the tree is absent.
  std::optional<fs::path> analyze_dependencies(Ctx& c, const fs::path& deps_root) {
    if (!fs::is_directory(deps_root)) return std::nullopt;
    json summary = dependency_summary(deps_root);
    fs::path p = c.res.dir / "dependency_summary.json";
    write_text(p, canonical_dump(summary));
    auto fields = base_fields(c);
    fields.emplace_back("DEPENDENCY_SUMMARY_PATH", fs::absolute(p).string());
    auto r = session(c, session_id(c.dt, "dependency_analyzer"), Role::DependencyAnalyzer,
                     task_prompt(fields, "List the library classes the project most likely uses."), false);
    if (!r.failed) {
      summary["notes"] = r.text.substr(0, 2048);
      while (canonical_dump(summary).size() > kMaxContextBytes && !summary["classes"].empty())
        summary["classes"].erase(summary["classes"].size() - 1);
      write_text(p, canonical_dump(summary));
    }
    return p;
  }


 public:
  static json dependency_summary(const fs::path& deps_root) {
    auto langs = detect_languages(deps_root);
    json classes = json::array();
    json libraries = json::array();
    if (!langs.empty()) {
      auto ir = normalize(extract_project(deps_root, langs).ir);
      std::set<std::string> libs;
      for (const auto& cl : ir.classes) {
        libs.insert(c2u::detail::top_directory(cl.source_file));
        json methods = json::array();
        for (const auto& m : cl.methods)
          if (m.visibility == "public" && methods.size() < 8) methods.push_back(m.name);
        classes.push_back({{"name", cl.name}, {"source_file", cl.source_file}, {"methods", methods}});
      }
      for (const auto& l : libs) libraries.push_back(l);
    }
    json summary{{"libraries", libraries}, {"classes", classes}};
    while (canonical_dump(summary).size() > kMaxContextBytes && !summary["classes"].empty())
      summary["classes"].erase(summary["classes"].size() - 1);
    return summary;
  }
};

}  // namespace c2u::agents
