#pragma once

// Deterministic stand-ins for model output, used by the mock backend when no
// script matches: plans from view file groups, contexts from view records,
// and PlantUML built only from names present in the inputs.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "c2u/agents/plan.hpp"
#include "c2u/view.hpp"

namespace c2u::agents::synth {

inline DiagramPlan plan_from_view(const json& view, Band band) {
  std::vector<std::string> files;
  for (const auto& [dir, fs] : view_file_groups(view)) files.insert(files.end(), fs.begin(), fs.end());
  const auto groups = view_file_groups(view);
  int target = std::clamp(static_cast<int>(groups.size()), band.lo, band.hi);
  DiagramPlan p;
  if (static_cast<int>(groups.size()) == target) {
    for (const auto& [dir, fs] : groups) p.scopes.push_back({dir == "." ? "root" : dir, fs, "files in " + dir});
  } else {
    // Contiguous chunks of the sorted file list.
    target = std::min<int>(target, std::max<int>(1, static_cast<int>(files.size())));
    const std::size_t per = (files.size() + static_cast<std::size_t>(target) - 1) / static_cast<std::size_t>(target);
    for (int k = 0; k < target; ++k) {
      std::size_t b = static_cast<std::size_t>(k) * per;
      if (b >= files.size() && !files.empty()) break;
      std::vector<std::string> chunk(files.begin() + static_cast<std::ptrdiff_t>(std::min(b, files.size())),
                                     files.begin() + static_cast<std::ptrdiff_t>(std::min(b + per, files.size())));
      std::string label = chunk.empty() ? "overview" : chunk.front();
      auto slash = label.rfind('/');
      if (slash != std::string::npos) label = label.substr(0, slash) + " part " + std::to_string(k + 1);
      else label = "part " + std::to_string(k + 1);
      p.scopes.push_back({label, chunk, "contiguous file group"});
    }
  }
  p.target_count = static_cast<int>(p.scopes.size());
  return p;
}

inline EnrichedContext context_from_view(const json& view, const std::string& scope,
                                         const std::vector<std::string>& files, int max_participants) {
  EnrichedContext c;
  c.scope = scope;
  const std::set<std::string> fileset(files.begin(), files.end());
  std::map<std::string, std::string> owner;  // method or function name -> participant
  std::vector<const json*> chosen;
  if (view.contains("elements"))
    for (const auto& e : view["elements"]) {
      if (!e.contains("name")) continue;
      const std::string name = e["name"].get<std::string>();
      const std::string file = e.value("source_file", std::string());
      if (!fileset.empty() && !fileset.count(file)) continue;
      if (static_cast<int>(chosen.size()) >= max_participants) break;
      chosen.push_back(&e);
      c.participants.push_back(name);
      owner.emplace(name, name);
      if (e.contains("methods"))
        for (const auto& m : e["methods"])
          if (m.contains("name")) owner.emplace(m["name"].get<std::string>(), name);
    }
  std::set<std::pair<std::string, std::string>> seen;
  for (const json* e : chosen) {
    const std::string from = (*e)["name"].get<std::string>();
    auto add_call = [&](const std::string& callee) {
      auto it = owner.find(callee);
      if (it == owner.end() || it->second == from) return;
      if (!seen.insert({from, callee}).second) return;
      c.flows.push_back({from, it->second, callee});
    };
    if (e->contains("calls"))
      for (const auto& k : (*e)["calls"]) add_call(k.get<std::string>());
    if (e->contains("methods"))
      for (const auto& m : (*e)["methods"])
        if (m.contains("calls"))
          for (const auto& k : m["calls"]) add_call(k.get<std::string>());
    if (e->contains("extends"))
      for (const auto& t : (*e)["extends"]) c.relationships.push_back({from, t.get<std::string>(), "extends"});
    if (e->contains("implements"))
      for (const auto& t : (*e)["implements"]) c.relationships.push_back({from, t.get<std::string>(), "implements"});
    if (e->contains("attributes"))
      for (const auto& a : (*e)["attributes"]) {
        const std::string type = a.value("type", std::string());
        if (type != from && std::find(c.participants.begin(), c.participants.end(), type) != c.participants.end())
          c.relationships.push_back({from, type, "composition"});
      }
  }
  std::set<std::string> fs;
  for (const json* e : chosen)
    if (e->contains("source_file")) fs.insert((*e)["source_file"].get<std::string>());
  c.files.assign(fs.begin(), fs.end());
  return c;
}

namespace detail {

inline std::string q(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? '\'' : c;
  return out + "\"";
}

inline const json* find_record(const json& view, const std::string& name) {
  if (!view.contains("elements")) return nullptr;
  for (const auto& e : view["elements"])
    if (e.value("name", std::string()) == name) return &e;
  return nullptr;
}

inline std::string alias(const std::string& prefix, std::size_t i) { return prefix + std::to_string(i); }

}  // namespace detail

inline std::string puml_class(const EnrichedContext& c, const json& view) {
  std::string out = "@startuml\n";
  std::set<std::string> declared;
  for (const auto& p : c.participants) {
    const json* rec = detail::find_record(view, p);
    std::string kind = rec ? rec->value("kind", std::string("class")) : "class";
    if (kind != "interface" && kind != "enum") kind = "class";
    out += kind + " " + p;
    if (rec && (rec->contains("methods") || rec->contains("attributes"))) {
      out += " {\n";
      int n = 0;
      if (rec->contains("attributes"))
        for (const auto& a : (*rec)["attributes"]) {
          if (n++ >= 8) break;
          out += "  " + std::string(a.value("visibility", "public") == "private" ? "-" : "+") + a["name"].get<std::string>();
          if (a.contains("type")) out += " : " + a["type"].get<std::string>();
          out += "\n";
        }
      n = 0;
      if (rec->contains("methods"))
        for (const auto& m : (*rec)["methods"]) {
          if (n++ >= 8) break;
          out += "  " + std::string(m.value("visibility", "public") == "private" ? "-" : "+") +
                 m["name"].get<std::string>() + "()\n";
        }
      out += "}\n";
    } else {
      out += "\n";
    }
    declared.insert(p);
  }
  for (const auto& r : c.relationships) {
    if (r.kind == "composition") out += r.source + " *-- " + r.target + " : has\n";
    else out += r.source + (r.kind == "implements" ? " ..|> " : " --|> ") + r.target + "\n";
  }
  for (const auto& f : c.flows) out += f.from + " --> " + f.to + " : " + f.label + "\n";
  return out + "@enduml\n";
}

inline std::string puml_sequence(const EnrichedContext& c) {
  std::string out = "@startuml\n";
  std::vector<std::string> parts;
  std::set<std::string> seen;
  for (const auto& f : c.flows)
    for (const auto& n : {f.from, f.to})
      if (seen.insert(n).second) parts.push_back(n);
  if (parts.empty())
    for (const auto& p : c.participants)
      if (seen.insert(p).second && parts.size() < 8) parts.push_back(p);
  for (const auto& p : parts) out += "participant " + p + "\n";
  if (!c.flows.empty()) out += "activate " + c.flows.front().from + "\n";
  for (const auto& f : c.flows) out += f.from + " -> " + f.to + " : " + f.label + "()\n";
  if (!c.flows.empty()) out += "deactivate " + c.flows.front().from + "\n";
  return out + "@enduml\n";
}

inline std::string puml_activity(const EnrichedContext& c) {
  std::string out = "@startuml\nstart\n";
  std::map<std::string, std::vector<std::string>> steps;
  std::vector<std::string> order;
  for (const auto& f : c.flows) {
    if (!steps.count(f.from)) order.push_back(f.from);
    steps[f.from].push_back(f.label);
  }
  if (order.empty())
    for (const auto& p : c.participants) {
      order.push_back(p);
      steps[p];
    }
  for (const auto& who : order) {
    out += ":" + who + ";\n";
    const auto& s = steps[who];
    const std::size_t half = (s.size() + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) out += ":" + s[i] + ";\n";
    if (s.size() > half) {
      out += "if (" + s[half] + " needed?) then (yes)\n";
      for (std::size_t i = half; i < s.size(); ++i) out += "  :" + s[i] + ";\n";
      out += "else (no)\nendif\n";
    }
  }
  return out + "stop\n@enduml\n";
}

inline std::string puml_usecase(const EnrichedContext& c, const json& view) {
  std::string out = "@startuml\nleft to right direction\nactor User\n";
  std::size_t i = 0;
  for (const auto& p : c.participants) {
    const json* rec = detail::find_record(view, p);
    std::string label;
    if (rec && rec->contains("public_methods") && !(*rec)["public_methods"].empty())
      label = (*rec)["public_methods"][0].get<std::string>();
    const std::string a = detail::alias("UC", ++i);
    out += "usecase " + detail::q(p) + " as " + a + "\n";
    out += "User --> " + a + (label.empty() ? "" : " : " + label) + "\n";
  }
  return out + "@enduml\n";
}

inline std::string puml_component(const json& view) {
  std::map<std::string, std::vector<const json*>> by_dir;
  std::set<std::string> names;
  const json elements = view.value("elements", json::array());
  for (const auto& e : elements) {
    by_dir[e.value("directory", std::string("."))].push_back(&e);
    names.insert(e.value("name", std::string()));
  }
  std::string out = "@startuml\n";
  for (const auto& [dir, es] : by_dir) {
    out += "package " + detail::q(dir) + " {\n";
    for (const json* e : es) out += "  [" + (*e)["name"].get<std::string>() + "]\n";
    out += "}\n";
  }
  for (const auto& [dir, es] : by_dir)
    for (const json* e : es)
      for (const char* key : {"extends", "implements"})
        for (const auto& t : e->value(key, json::array())) {
          std::string target = t.get<std::string>();
          if (names.count(target))
            out += "[" + (*e)["name"].get<std::string>() + "] ..> [" + target + "] : " + key + "\n";
        }
  return out + "@enduml\n";
}

inline std::string puml_deployment(const json& view, const std::string& project) {
  std::string out = "@startuml\nnode " + detail::q(project + " runtime") + " as N0 <<server>> {\n";
  std::vector<std::string> infra;
  const json elements = view.value("elements", json::array());
  for (const auto& e : elements) {
    if (e.value("kind", "") == "directory") out += "  artifact " + detail::q(e.value("name", "")) + "\n";
    if (e.value("kind", "") == "infrastructure") infra.push_back(e.value("key", ""));
  }
  out += "}\n";
  std::size_t i = 0;
  for (const auto& k : infra) {
    const std::string a = detail::alias("I", ++i);
    out += "node " + detail::q(k) + " as " + a + " <<config>>\n";
    out += "N0 --> " + a + " : configured by\n";
  }
  return out + "@enduml\n";
}

inline std::string puml_system_context(const json& view, const std::string& project) {
  std::string out = "@startuml\nactor User\nrectangle " + detail::q(project) + " as SYS <<system>>\nUser --> SYS : uses\n";
  std::size_t i = 0;
  const json elements = view.value("elements", json::array());
  for (const auto& e : elements) {
    if (e.value("kind", "") != "external") continue;
    if (i >= 20) break;
    const std::string a = detail::alias("X", ++i);
    out += "rectangle " + detail::q(e.value("name", "")) + " as " + a + " <<external>>\n";
    out += "SYS --> " + a + " : calls\n";
  }
  return out + "@enduml\n";
}

inline std::string puml_for(DiagramType dt, const std::optional<EnrichedContext>& ctx, const json& view,
                            const std::string& project) {
  EnrichedContext c = ctx.value_or(EnrichedContext{});
  switch (dt) {
    case DiagramType::Class: return puml_class(c, view);
    case DiagramType::Sequence: return puml_sequence(c);
    case DiagramType::Activity: return puml_activity(c);
    case DiagramType::Usecase: return puml_usecase(c, view);
    case DiagramType::Component: return puml_component(view);
    case DiagramType::Deployment: return puml_deployment(view, project);
    case DiagramType::SystemContext: return puml_system_context(view, project);
  }
  return "@startuml\n@enduml\n";
}

// Seeds one of the pitfalls the linter knows about, chosen per type.
inline std::string inject_defect(DiagramType dt, const std::string& text, unsigned variant) {
  auto insert_after_start = [&](const std::string& line) {
    auto nl = text.find('\n');
    return text.substr(0, nl + 1) + line + "\n" + text.substr(nl + 1);
  };
  switch (dt) {
    case DiagramType::Deployment: {
      auto pos = text.find("\nnode ");
      if (pos != std::string::npos) return text.substr(0, pos + 1) + "device" + text.substr(pos + 5);
      break;
    }
    case DiagramType::Sequence: {
      auto pos = text.find("\nparticipant ");
      if (pos != std::string::npos) {
        auto eol = text.find('\n', pos + 1);
        return text.substr(0, eol) + " <<Service>>" + text.substr(eol);
      }
      break;
    }
    case DiagramType::Activity:
      if (variant % 2 == 0) {
        auto pos = text.find("\nelse (no)\n");
        if (pos != std::string::npos) return text.substr(0, pos + 1) + "else if (retry?) then (yes)\n  continue\n" + text.substr(pos + 1);
      }
      break;
    case DiagramType::SystemContext:
      if (variant % 2 == 0) {
        auto pos = text.find("rectangle ");
        if (pos != std::string::npos) {
          auto eol = text.find('\n', pos);
          return text.substr(0, pos) + "!include <C4/C4_Context>\n" + text.substr(pos, eol - pos) + " {\n}" + text.substr(eol);
        }
      }
      break;
    case DiagramType::Class:
    case DiagramType::Component:
    case DiagramType::Usecase:
      if (variant % 2 == 0) {
        auto pos = text.rfind("@enduml");
        if (pos != std::string::npos) return text.substr(0, pos);
      }
      break;
  }
  return insert_after_start("skinparam linetype ortho");
}

}  // namespace c2u::agents::synth
