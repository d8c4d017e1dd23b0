#pragma once

// Command-line surface: extract, view, generate, lint, metrics, evaluate.
//
// Exit codes: 0 ok / valid, 1 error or usage, 2 empty IR,
//             3 lint verdict corrected, 4 lint verdict uncorrectable.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "c2u/agents/api_backend.hpp"
#include "c2u/agents/mock_backend.hpp"
#include "c2u/agents/orchestrator.hpp"
#include "c2u/cli/config.hpp"
#include "c2u/extraction.hpp"
#include "c2u/metrics.hpp"
#include "c2u/normalization.hpp"
#include "c2u/puml.hpp"
#include "c2u/view.hpp"

namespace c2u::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitEmptyIr = 2;
inline constexpr int kExitCorrected = 3;
inline constexpr int kExitUncorrectable = 4;

using agents::read_text;
using agents::write_text;

struct LoadedIr {
  ProjectIR ir;
  std::optional<fs::path> repo;  // set when the input was a source tree
};

inline ProjectIR extract_normalized(const fs::path& repo, const std::set<std::string>& langs, std::ostream* log = nullptr) {
  auto use = langs.empty() ? detect_languages(repo) : langs;
  auto res = extract_project(repo, use);
  if (log)
    *log << "extracted " << res.report.files_scanned << " files (" << res.report.files_with_errors
         << " with errors): " << res.ir.classes.size() << " classes, " << res.ir.functions.size() << " functions\n";
  return normalize(std::move(res.ir));
}

// A directory is extracted; a file is read as an IR document.
inline LoadedIr load_ir(const fs::path& input, std::ostream* log = nullptr) {
  if (fs::is_directory(input)) return {extract_normalized(input, {}, log), input};
  ProjectIR ir = deserialize(read_text(input));
  if (!ir.normalized) ir = normalize(std::move(ir));
  return {std::move(ir), std::nullopt};
}

inline std::unique_ptr<agents::Backend> make_backend(const RunConfig& cfg) {
  if (cfg.backend == "api") return std::make_unique<agents::ApiBackend>(agents::ApiConfig::from_env());
  agents::MockOptions m;
  m.scripts_dir = cfg.mock_scripts;
  m.defect_rate = cfg.defect_rate;
  m.readability_threshold = cfg.readability_threshold;
  return std::make_unique<agents::MockBackend>(m);
}

inline agents::OrchestratorOptions orchestrator_options(const RunConfig& cfg, DiagramType dt,
                                                        const std::optional<fs::path>& deps) {
  agents::OrchestratorOptions o;
  o.concurrency_limit = cfg.concurrency;
  o.prompts.override_dir = cfg.prompts_dir;
  o.prompts.readability_threshold = cfg.readability_threshold;
  o.view = cfg.view_options(dt);
  o.deps_root = deps;
  o.deterministic = cfg.deterministic;
  return o;
}

// Rebuilds an observation from a diagram directory. The pre-fix verdict
// comes from the `.lint.json` written during correction when present.
inline metrics::Observation load_observation(const fs::path& dir, const ProjectIR& ir, DiagramType dt) {
  metrics::Observation o;
  o.project = ir.project_name;
  o.diagram_type = dt;
  o.ir_entities = metrics::ir_entity_names(ir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".puml") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string text = read_text(f);
    fs::path lint = f;
    lint.replace_extension(".lint.json");
    puml::LintReport report;
    if (fs::exists(lint)) report = puml::LintReport::from_json(json::parse(read_text(lint)).at("initial"));
    else report = puml::lint_text(text, dt);
    o.diagrams.push_back({puml::parse_artifact(text, dt, f.stem().string()), report, f.string()});
  }
  return o;
}

inline std::string metrics_document(const metrics::MetricsReport& r) { return r.to_json().dump(2) + "\n"; }

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"c2u: source code to UML diagrams"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all");

    std::string config_path;
    bool deterministic = false;
    app.add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
    app.add_flag("--deterministic", deterministic, "zero timestamps and keep outputs byte-identical");

    // extract
    auto* ex = app.add_subcommand("extract", "extract and normalize a repository into an IR file");
    std::string ex_repo, ex_out = ".";
    std::string ex_langs;
    bool ex_raw = false, ex_stamp = false;
    ex->add_option("repo", ex_repo, "repository root")->required();
    ex->add_option("-o,--out", ex_out, "output directory");
    ex->add_option("--languages", ex_langs, "comma-separated languages (default: detect)");
    ex->add_flag("--raw", ex_raw, "skip normalization");
    ex->add_flag("--timestamp", ex_stamp, "record the extraction time in the IR metadata");

    // view
    auto* vw = app.add_subcommand("view", "compact an IR into diagram-type views");
    std::string vw_ir, vw_type, vw_out = ".";
    bool vw_explain = false;
    vw->add_option("ir", vw_ir, "IR file or repository")->required();
    vw->add_option("-d,--diagram", vw_type, "diagram type or 'all'")->required();
    vw->add_option("-o,--out", vw_out, "output directory");
    vw->add_flag("--explain", vw_explain, "also write the ranking as CSV");

    // generate
    auto* gen = app.add_subcommand("generate", "run the agent pipeline");
    std::string gen_in, gen_type, gen_backend, gen_out, gen_scripts, gen_deps;
    int gen_conc = 0;
    gen->add_option("input", gen_in, "repository or IR file")->required();
    gen->add_option("-d,--diagram", gen_type, "diagram type or 'all'")->required();
    gen->add_option("--backend", gen_backend, "mock or api (default: C2U_BACKEND or mock)");
    gen->add_option("-o,--out", gen_out, "output root");
    gen->add_option("--scripts", gen_scripts, "mock script directory");
    gen->add_option("--deps", gen_deps, "third-party source tree to summarize");
    gen->add_option("--concurrency", gen_conc, "maximum concurrent sessions");

    // lint
    auto* li = app.add_subcommand("lint", "validate a PlantUML file");
    std::string li_file, li_type;
    bool li_fix = false, li_json = false;
    li->add_option("file", li_file, ".puml file")->required()->check(CLI::ExistingFile);
    li->add_option("-t,--type", li_type, "diagram type (default: parent directory name)");
    li->add_flag("--fix", li_fix, "rewrite correctable violations in place");
    li->add_flag("--json", li_json, "print the report as JSON");

    // metrics
    auto* me = app.add_subcommand("metrics", "score generated diagrams against an IR");
    std::string me_ir, me_dir, me_type, me_out;
    me->add_option("--ir", me_ir, "IR file or repository")->required();
    me->add_option("--diagrams", me_dir, "diagram directory, or a project directory of type subdirectories")->required();
    me->add_option("-t,--type", me_type, "diagram type (default: directory name)");
    me->add_option("-o,--out", me_out, "directory for metrics.json and CSV tables");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "run every (project, type) observation of a corpus");
    std::string ev_corpus, ev_out;
    bool ev_resume = false;
    ev->add_option("--corpus", ev_corpus, "corpus INI file")->required();
    ev->add_option("-o,--out", ev_out, "output root (default: from the corpus file)");
    ev->add_flag("--resume", ev_resume, "skip observations that already have metrics.json");

    std::vector<const char*> argv{"c2u"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n" << app.help();
      return kExitError;
    }

    try {
      RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
      if (deterministic) cfg.deterministic = true;
      if (*ex) return extract(ex_repo, ex_out, ex_langs, ex_raw, ex_stamp && !cfg.deterministic);
      if (*vw) return view(cfg, vw_ir, vw_type, vw_out, vw_explain, *vw);
      if (*gen) {
        if (!gen_backend.empty()) cfg.backend = gen_backend;
        else if (const char* b = std::getenv("C2U_BACKEND"); b && *b) cfg.backend = b;
        if (!gen_out.empty()) cfg.output = gen_out;
        if (!gen_scripts.empty()) cfg.mock_scripts = gen_scripts;
        if (gen_conc > 0) cfg.concurrency = gen_conc;
        cfg.validate();
        return generate(cfg, gen_in, gen_type, gen_deps.empty() ? std::nullopt : std::optional<fs::path>(gen_deps), *gen);
      }
      if (*li) return lint(li_file, li_type, li_fix, li_json);
      if (*me) return metrics_cmd(cfg, me_ir, me_dir, me_type, me_out);
      if (*ev) {
        RunConfig corpus = RunConfig::load(ev_corpus);
        if (deterministic) corpus.deterministic = true;
        if (!ev_out.empty()) corpus.output = ev_out;
        return evaluate(corpus, ev_resume);
      }
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitError;
    }
    return kExitError;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;

  std::optional<std::vector<DiagramType>> parse_types(const std::string& s, const CLI::App& sub) {
    if (s == "all") return std::vector<DiagramType>(kAllDiagramTypes.begin(), kAllDiagramTypes.end());
    if (auto dt = parse_diagram_type(s)) return std::vector<DiagramType>{*dt};
    err_ << "error: unknown diagram type '" << s << "'\n" << sub.help();
    return std::nullopt;
  }

  int extract(const std::string& repo, const std::string& out, const std::string& langs, bool raw, bool stamp) {
    if (!fs::is_directory(repo)) {
      err_ << "error: cannot read repository " << repo << "\n";
      return kExitError;
    }
    std::set<std::string> ls;
    for (const auto& l : split_csv_list(langs)) ls.insert(l);
    if (ls.empty()) ls = detect_languages(repo);
    ExtractOptions opts;
    if (stamp) {
      auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      opts.timestamp = buf;
    }
    auto res = extract_project(repo, ls, opts);
    ProjectIR ir = raw ? std::move(res.ir) : normalize(std::move(res.ir));
    const auto& r = res.report;
    json report{{"files_scanned", r.files_scanned},
                {"files_with_errors", r.files_with_errors},
                {"error_files", r.error_files},
                {"files_per_language", r.files_per_language}};
    json skipped = json::array();
    for (const auto& s : r.skipped) skipped.push_back({{"path", s.path}, {"reason", s.reason}});
    report["skipped"] = skipped;
    fs::create_directories(out);
    const fs::path ir_path = fs::path(out) / (ir.project_name + (raw ? ".raw.ir.json" : ".norm.ir.json"));
    write_text(ir_path, serialize(ir));
    write_text(fs::path(out) / (ir.project_name + ".extraction.json"), report.dump(2) + "\n");
    out_ << "files scanned: " << r.files_scanned << ", with errors: " << r.files_with_errors << "\n"
         << "classes: " << ir.classes.size() << ", functions: " << ir.functions.size() << "\n"
         << "wrote " << ir_path.string() << "\n";
    if (ir.element_count() == 0) {
      err_ << "error: no classes or functions extracted\n";
      return kExitEmptyIr;
    }
    return kExitOk;
  }

  int view(const RunConfig& cfg, const std::string& in, const std::string& type, const std::string& out, bool explain,
           const CLI::App& sub) {
    auto types = parse_types(type, sub);
    if (!types) return kExitError;
    auto loaded = load_ir(in);
    fs::create_directories(out);
    for (auto dt : *types) {
      auto v = generate_view(loaded.ir, dt, cfg.view_options(dt));
      write_text(fs::path(out) / ("view_" + std::string(to_string(dt)) + ".json"), v.text);
      if (explain)
        write_text(fs::path(out) / ("view_" + std::string(to_string(dt)) + ".explain.csv"),
                   explain_csv(loaded.ir, dt, v, cfg.weights));
      out_ << to_string(dt) << ": " << v.byte_size << " bytes (budget " << v.budget << "), " << v.shrink_iterations
           << " shrink iterations, " << v.retained.size() << " elements\n";
    }
    return kExitOk;
  }

  int generate(const RunConfig& cfg, const std::string& in, const std::string& type,
               const std::optional<fs::path>& deps, const CLI::App& sub) {
    auto types = parse_types(type, sub);
    if (!types) return kExitError;
    auto backend = make_backend(cfg);  // fails fast without credentials
    auto loaded = load_ir(in, &out_);
    if (loaded.ir.element_count() == 0) {
      err_ << "error: IR is empty\n";
      return kExitEmptyIr;
    }
    const fs::path repo = loaded.repo.value_or(fs::path(in).parent_path());
    bool errors = false;
    for (auto dt : *types) {
      agents::Orchestrator orch(*backend, orchestrator_options(cfg, dt, deps));
      auto res = orch.run(loaded.ir, repo, dt, cfg.output);
      auto rep = metrics::compute_report(res.observation(loaded.ir), cfg.metrics);
      write_text(res.dir / "metrics.json", metrics_document(rep));
      report_run(res);
      errors = errors || !res.errors.empty() || res.failed();
    }
    return errors ? kExitError : kExitOk;
  }

  void report_run(const agents::OrchestrationResult& res) {
    out_ << to_string(res.diagram_type) << ": " << res.sessions << " sessions, "
         << std::count_if(res.diagrams.begin(), res.diagrams.end(), [](const auto& d) { return d.ok; }) << "/"
         << res.diagrams.size() << " diagrams\n";
    for (const auto& d : res.diagrams) {
      out_ << "  " << d.path.filename().string() << ": ";
      if (d.ok) out_ << puml::to_string(d.initial.verdict) << " -> " << puml::to_string(d.final_report.verdict) << "\n";
      else out_ << "failed (" << d.error << ")\n";
    }
    for (const auto& e : res.errors) err_ << "  error: " << e << "\n";
  }

  int lint(const std::string& file, std::string type, bool fix, bool as_json) {
    if (type.empty()) type = fs::path(file).parent_path().filename().string();
    auto dt = parse_diagram_type(type);
    if (!dt) {
      err_ << "error: unknown diagram type '" << type << "'; pass --type\n";
      return kExitError;
    }
    const std::string text = read_text(file);
    auto outcome = puml::lint_and_fix(text, *dt);
    if (fix && outcome.report.verdict == puml::Verdict::Corrected) write_text(file, outcome.text);
    if (as_json) {
      out_ << json{{"report", outcome.report.to_json()}, {"final", outcome.final_report.to_json()}}.dump(2) << "\n";
    } else {
      out_ << file << ": " << puml::to_string(outcome.report.verdict) << "\n";
      for (const auto& v : outcome.report.violations) out_ << "  line " << v.line << " [" << v.rule << "] " << v.excerpt << "\n";
      if (fix && outcome.report.verdict == puml::Verdict::Corrected)
        out_ << "  fixed " << outcome.report.fixes_applied << " violation(s); now "
             << puml::to_string(outcome.final_report.verdict) << "\n";
    }
    switch (outcome.report.verdict) {
      case puml::Verdict::Valid: return kExitOk;
      case puml::Verdict::Corrected: return kExitCorrected;
      case puml::Verdict::Uncorrectable: return kExitUncorrectable;
    }
    return kExitError;
  }

  int metrics_cmd(const RunConfig& cfg, const std::string& ir_in, const std::string& dir, const std::string& type,
                  const std::string& out) {
    auto loaded = load_ir(ir_in);
    if (!fs::is_directory(dir)) {
      err_ << "error: no such directory " << dir << "\n";
      return kExitError;
    }
    std::vector<std::pair<DiagramType, fs::path>> targets;
    if (!type.empty()) {
      auto dt = parse_diagram_type(type);
      if (!dt) {
        err_ << "error: unknown diagram type '" << type << "'\n";
        return kExitError;
      }
      targets.emplace_back(*dt, dir);
    } else if (auto dt = parse_diagram_type(fs::path(dir).lexically_normal().filename().string())) {
      targets.emplace_back(*dt, dir);
    } else {
      for (auto t : kAllDiagramTypes)
        if (fs::is_directory(fs::path(dir) / std::string(to_string(t)))) targets.emplace_back(t, fs::path(dir) / std::string(to_string(t)));
    }
    std::vector<metrics::Observation> obs;
    std::vector<metrics::MetricsReport> reports;
    for (const auto& [dt, d] : targets) {
      auto o = load_observation(d, loaded.ir, dt);
      if (o.diagrams.empty()) continue;
      reports.push_back(metrics::compute_report(o, cfg.metrics));
      obs.push_back(std::move(o));
    }
    if (obs.empty()) {
      err_ << "error: no .puml files found under " << dir << "\n";
      return kExitError;
    }
    json docs = json::array();
    for (const auto& r : reports) docs.push_back(r.to_json());
    const std::string doc = (reports.size() == 1 ? reports.front().to_json() : docs).dump(2) + "\n";
    if (!out.empty()) {
      write_text(fs::path(out) / "metrics.json", doc);
      write_tables(out, reports, obs);
    }
    out_ << doc;
    return kExitOk;
  }

  static void write_tables(const fs::path& out, const std::vector<metrics::MetricsReport>& reports,
                           const std::vector<metrics::Observation>& obs) {
    write_text(out / "observations.csv", metrics::observations_csv(reports));
    write_text(out / "summary.csv", metrics::summary_csv(reports, obs));
    write_text(out / "ablation.csv", metrics::ablation_csv(obs));
  }

  int evaluate(const RunConfig& cfg, bool resume) {
    if (cfg.corpus.empty()) {
      err_ << "error: corpus has no [project:<name>] entries\n";
      return kExitError;
    }
    auto backend = make_backend(cfg);
    std::vector<metrics::Observation> obs;
    std::vector<metrics::MetricsReport> reports;
    bool errors = false;
    for (const auto& p : cfg.corpus) {
      ProjectIR ir = extract_normalized(p.path, p.languages);
      ir.project_name = p.name;
      const fs::path pdir = cfg.output / p.name;
      write_text(pdir / (p.name + ".norm.ir.json"), serialize(ir));
      if (ir.element_count() == 0) {
        err_ << "error: project '" << p.name << "' produced an empty IR\n";
        errors = true;
      }
      for (auto dt : cfg.types) {
        const fs::path tdir = pdir / std::string(to_string(dt));
        metrics::Observation o;
        if (resume && fs::exists(tdir / "metrics.json")) {
          o = load_observation(tdir, ir, dt);
          out_ << p.name << "/" << to_string(dt) << ": resumed\n";
        } else {
          agents::Orchestrator orch(*backend, orchestrator_options(cfg, dt, p.deps));
          auto res = orch.run(ir, p.path, dt, cfg.output);
          errors = errors || !res.errors.empty() || res.failed();
          o = res.observation(ir);
          out_ << p.name << "/";
          report_run(res);
        }
        auto rep = metrics::compute_report(o, cfg.metrics);
        write_text(tdir / "metrics.json", metrics_document(rep));
        reports.push_back(std::move(rep));
        obs.push_back(std::move(o));
      }
    }
    write_tables(cfg.output, reports, obs);
    out_ << "\n" << metrics::summary_csv(reports, obs) << "\n" << metrics::ablation_csv(obs);
    out_ << "observations: " << obs.size() << "\n";
    return errors ? kExitError : kExitOk;
  }
};

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Cli(out, err).run(args);
}

}  // namespace c2u::cli
