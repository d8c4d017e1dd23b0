#pragma once

// Embedded prompt templates. System prompts are a four-part base block
// (role, workflow, quality rules, readability threshold) plus a per-type
// extension; any template can be replaced by a file in an override
// directory named `<role>.txt` or `<role>_<type>.txt`.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "c2u/agents/protocol.hpp"
#include "c2u/puml.hpp"
#include "c2u/view.hpp"

namespace c2u::agents {

inline constexpr std::string_view kPromptVersion = "v1";
inline constexpr int kDefaultReadabilityThreshold = 40;

struct PromptOptions {
  std::optional<std::filesystem::path> override_dir;
  int readability_threshold = kDefaultReadabilityThreshold;
};

namespace detail {

inline std::string role_block(Role r) {
  switch (r) {
    case Role::Planner:
      return "You are the planner. You split a project into logical scopes (workflows, modules or functional "
             "areas), each of which gets its own diagram.";
    case Role::Analyzer:
      return "You are a source analyzer. You read the files of one scope and return a compact summary of its key "
             "participants, interaction flows and relationships.";
    case Role::Diagram:
      return "You are a diagram author. You turn an IR view or an enriched context into one complete PlantUML file.";
    case Role::Corrector:
      return "You are the corrector. You validate a PlantUML file against syntax rules and rewrite it in place when "
             "corrections are needed.";
    case Role::DependencyAnalyzer:
      return "You are the dependency analyzer. You summarize third-party library code the project depends on.";
  }
  return {};
}

inline std::string workflow_block(Role r) {
  switch (r) {
    case Role::Planner:
      return "1. Read the view at VIEW_PATH.\n2. Group related elements by file and responsibility.\n"
             "3. Reply with JSON only: {\"scopes\": [{\"label\": str, \"files\": [str], \"rationale\": str}]}.\n"
             "The number of scopes must lie within BAND.";
    case Role::Analyzer:
      return "1. Read each file listed in FILES (use Glob/Grep to locate callers if needed).\n"
             "2. Reply with JSON only: {\"scope\": str, \"participants\": [str], \"flows\": [{\"from\": str, \"to\": "
             "str, \"label\": str}], \"relationships\": [{\"source\": str, \"target\": str, \"kind\": str}], "
             "\"files\": [str]}.\nKeep the reply under 16 KB.";
    case Role::Diagram:
      return "1. Read the input at VIEW_PATH or CONTEXT_PATH (and DEPENDENCY_CONTEXT_PATH when given).\n"
             "2. Write exactly one PlantUML file to OUTPUT_PATH.\n3. Reply with a one-line summary.";
    case Role::Corrector:
      return "1. Read the file at PUML_PATH.\n2. Check every rule below.\n"
             "3. If any rule is violated, write the corrected file back to PUML_PATH.\n4. Reply with the list of fixes.";
    case Role::DependencyAnalyzer:
      return "1. Read the summary at DEPENDENCY_SUMMARY_PATH.\n2. Reply with the library classes most likely used "
             "by the project, one per line.";
  }
  return {};
}

inline std::string quality_block() {
  return "- Use only names that exist in the inputs; never invent entities.\n"
         "- No placeholder names (Foo, Bar, TODO, Placeholder, Example).\n"
         "- Label relationships with the action they perform.\n"
         "- Start with @startuml and end with @enduml; no markdown fences.";
}

inline std::string type_extension(DiagramType dt) {
  switch (dt) {
    case DiagramType::Class:
      return "Class diagram: declare classes with their key members; show inheritance (--|>), realization (..|>) "
             "and composition (*--).";
    case DiagramType::Sequence:
      return "Sequence diagram: declare every participant before use; no stereotypes or arrow modifiers in "
             "participant declarations; show activations.";
    case DiagramType::Activity:
      return "Activity diagram: use the new syntax with start/stop; write 'elseif', never 'else if'; do not use "
             "'continue'; close every if with endif.";
    case DiagramType::Usecase:
      return "Use case diagram: declare actors and use cases; link every use case to an actor.";
    case DiagramType::Component:
      return "Component diagram: one component per module; connect components with labeled dependencies.";
    case DiagramType::Deployment:
      return "Deployment diagram: use node/database/cloud/artifact, never 'device'; nest artifacts in nodes; give "
             "nodes a stereotype.";
    case DiagramType::SystemContext:
      return "System context diagram: one central system rectangle with <<system>>, external systems as "
             "<<external>> rectangles, users as actors. Plain PlantUML only: no C4 macros or !include.";
  }
  return {};
}

inline std::optional<std::string> read_override(const PromptOptions& opt, const std::string& name) {
  if (!opt.override_dir) return std::nullopt;
  std::ifstream in(*opt.override_dir / (name + ".txt"));
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// Corrector rules assembled from the base set plus the rules for `dt`.
inline std::string corrector_rules(DiagramType dt) {
  std::string out;
  for (const auto& r : puml::lint_rules()) {
    if (!r.applies(dt)) continue;
    out += "- [" + r.id + "] " + r.description + (r.correctable ? "" : " (cannot be fixed; report it)") + "\n";
  }
  return out;
}

inline std::string system_prompt(Role role, DiagramType dt, const PromptOptions& opt = {}) {
  const std::string r(to_string(role));
  const std::string t(to_string(dt));
  if (auto o = detail::read_override(opt, r + "_" + t)) return *o;
  std::string base;
  if (auto o = detail::read_override(opt, r)) base = *o;
  else {
    base = "# Role\n" + detail::role_block(role) + "\n\n# Workflow\n" + detail::workflow_block(role) +
           "\n\n# Quality rules\n" + detail::quality_block() + "\n\n# Readability\nKeep each diagram at or below " +
           std::to_string(opt.readability_threshold) + " elements; split into scopes rather than crowding.\n";
  }
  base += "\n# Diagram type\n" + detail::type_extension(dt) + "\n";
  if (role == Role::Corrector) base += "\n# Syntax rules\n" + corrector_rules(dt);
  base += "\n(prompt " + std::string(kPromptVersion) + ")\n";
  return base;
}

// Task prompts are `KEY: value` lines followed by a short instruction.
inline std::string task_prompt(const std::vector<std::pair<std::string, std::string>>& fields,
                               const std::string& instruction) {
  std::string out;
  for (const auto& [k, v] : fields) out += k + ": " + v + "\n";
  out += "\n" + instruction + "\n";
  return out;
}

}  // namespace c2u::agents
