#pragma once

// Planner output (scopes), the project-size bands that bound the scope
// count, and analyzer output (enriched contexts) with its size cap.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "c2u/ir.hpp"
#include "c2u/view.hpp"

namespace c2u::agents {

struct Scope {
  std::string label;
  std::vector<std::string> files;
  std::string rationale;

  bool operator==(const Scope&) const = default;
};

struct DiagramPlan {
  std::vector<Scope> scopes;
  int target_count = 0;

  json to_json() const {
    json s = json::array();
    for (const auto& x : scopes) s.push_back({{"label", x.label}, {"files", x.files}, {"rationale", x.rationale}});
    return json{{"scopes", s}, {"target_count", target_count}};
  }
};

struct Band {
  int lo;
  int hi;

  bool contains(int n) const { return n >= lo && n <= hi; }
  bool operator==(const Band&) const = default;
};

inline Band plan_band(std::size_t class_count) {
  if (class_count < 20) return {1, 3};
  if (class_count < 200) return {3, 6};
  if (class_count < 1000) return {6, 12};
  if (class_count < 2000) return {10, 15};
  return {15, 30};
}

// First balanced `{...}` in `text` that parses as JSON.
inline std::optional<json> extract_json_object(const std::string& text) {
  for (std::size_t start = text.find('{'); start != std::string::npos; start = text.find('{', start + 1)) {
    int depth = 0;
    bool q = false, esc = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (q) {
        if (esc) esc = false;
        else if (c == '\\') esc = true;
        else if (c == '"') q = false;
        continue;
      }
      if (c == '"') q = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) {
        auto j = json::parse(text.substr(start, i - start + 1), nullptr, false);
        if (!j.is_discarded() && j.is_object()) return j;
        break;
      }
    }
  }
  return std::nullopt;
}

inline std::optional<DiagramPlan> parse_plan(const std::string& text) {
  auto j = extract_json_object(text);
  if (!j || !j->contains("scopes") || !(*j)["scopes"].is_array()) return std::nullopt;
  DiagramPlan p;
  for (const auto& s : (*j)["scopes"]) {
    if (!s.is_object() || !s.contains("label") || !s["label"].is_string()) return std::nullopt;
    Scope sc;
    sc.label = s["label"].get<std::string>();
    if (s.contains("files") && s["files"].is_array())
      for (const auto& f : s["files"])
        if (f.is_string()) sc.files.push_back(f.get<std::string>());
    if (s.contains("rationale") && s["rationale"].is_string()) sc.rationale = s["rationale"].get<std::string>();
    p.scopes.push_back(std::move(sc));
  }
  p.target_count = static_cast<int>(p.scopes.size());
  return p;
}

// Source files of the view's elements grouped by directory, sorted.
inline std::vector<std::pair<std::string, std::vector<std::string>>> view_file_groups(const json& view) {
  std::map<std::string, std::set<std::string>> groups;
  if (view.contains("elements"))
    for (const auto& e : view["elements"])
      if (e.contains("source_file") && e["source_file"].is_string()) {
        std::string f = e["source_file"].get<std::string>();
        auto slash = f.rfind('/');
        groups[slash == std::string::npos ? std::string(".") : f.substr(0, slash)].insert(f);
      }
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (auto& [d, fs] : groups) out.emplace_back(d, std::vector<std::string>(fs.begin(), fs.end()));
  return out;
}

struct ClampResult {
  DiagramPlan plan;
  bool clamped = false;
  std::string warning;
};

// Forces the scope count into the band: extra scopes are dropped from the
// end; missing ones are padded from the view's directory groups, then single
// files, then empty overview scopes.
inline ClampResult clamp_plan(DiagramPlan plan, std::size_t class_count, const json& view) {
  ClampResult r;
  const Band band = plan_band(class_count);
  const int n = static_cast<int>(plan.scopes.size());
  if (n > band.hi) {
    plan.scopes.resize(static_cast<std::size_t>(band.hi));
    r.clamped = true;
    r.warning = "plan had " + std::to_string(n) + " scopes; truncated to " + std::to_string(band.hi);
  } else if (n < band.lo) {
    std::set<std::string> labels;
    std::set<std::vector<std::string>> file_sets;
    for (const auto& s : plan.scopes) {
      labels.insert(s.label);
      file_sets.insert(s.files);
    }
    auto add = [&](Scope s) {
      if (static_cast<int>(plan.scopes.size()) >= band.lo) return;
      if (labels.count(s.label) || (!s.files.empty() && file_sets.count(s.files))) return;
      labels.insert(s.label);
      file_sets.insert(s.files);
      plan.scopes.push_back(std::move(s));
    };
    const auto groups = view_file_groups(view);
    for (const auto& [dir, files] : groups) add({dir == "." ? "root" : dir, files, "padding: directory group"});
    for (const auto& [dir, files] : groups)
      for (const auto& f : files) add({f, {f}, "padding: single file"});
    for (int k = 1; static_cast<int>(plan.scopes.size()) < band.lo; ++k)
      add({"overview " + std::to_string(k), {}, "padding: overview"});
    r.clamped = true;
    r.warning = "plan had " + std::to_string(n) + " scopes; padded to " + std::to_string(band.lo);
  }
  plan.target_count = static_cast<int>(plan.scopes.size());
  r.plan = std::move(plan);
  return r;
}

inline std::string scope_slug(const std::string& label) {
  std::string out;
  for (char c : label) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) out += static_cast<char>(std::tolower(u));
    else if (!out.empty() && out.back() != '_') out += '_';
    if (out.size() >= 40) break;
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "scope" : out;
}

// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxContextBytes = 16 * 1024;

struct Flow {
  std::string from, to, label;
  bool operator==(const Flow&) const = default;
};

struct ContextRelationship {
  std::string source, target, kind;
  bool operator==(const ContextRelationship&) const = default;
};

struct EnrichedContext {
  std::string scope;
  std::vector<std::string> participants;
  std::vector<Flow> flows;
  std::vector<ContextRelationship> relationships;
  std::vector<std::string> files;

  json to_json() const {
    json f = json::array(), r = json::array();
    for (const auto& x : flows) f.push_back({{"from", x.from}, {"to", x.to}, {"label", x.label}});
    for (const auto& x : relationships) r.push_back({{"source", x.source}, {"target", x.target}, {"kind", x.kind}});
    return json{{"scope", scope}, {"participants", participants}, {"flows", f}, {"relationships", r}, {"files", files}};
  }

  std::string serialized() const { return canonical_dump(to_json()); }

  bool empty() const { return participants.empty() && flows.empty() && relationships.empty(); }
};

inline std::optional<EnrichedContext> parse_context(const std::string& text) {
  auto j = extract_json_object(text);
  if (!j) return std::nullopt;
  auto str = [](const json& o, const char* k) {
    return o.contains(k) && o[k].is_string() ? o[k].get<std::string>() : std::string();
  };
  EnrichedContext c;
  c.scope = str(*j, "scope");
  auto strings = [&](const char* k, std::vector<std::string>& out) {
    if (j->contains(k) && (*j)[k].is_array())
      for (const auto& x : (*j)[k])
        if (x.is_string()) out.push_back(x.get<std::string>());
  };
  strings("participants", c.participants);
  strings("files", c.files);
  if (j->contains("flows") && (*j)["flows"].is_array())
    for (const auto& f : (*j)["flows"])
      if (f.is_object()) c.flows.push_back({str(f, "from"), str(f, "to"), str(f, "label")});
  if (j->contains("relationships") && (*j)["relationships"].is_array())
    for (const auto& r : (*j)["relationships"])
      if (r.is_object()) c.relationships.push_back({str(r, "source"), str(r, "target"), str(r, "kind")});
  return c;
}

// Shrinks a context under the cap: long strings are clipped, then entries
// are dropped from the tail of flows, relationships, participants, files.
inline bool cap_context(EnrichedContext& c, std::size_t cap = kMaxContextBytes) {
  if (c.serialized().size() <= cap) return false;
  constexpr std::size_t kMaxString = 512;
  auto clip = [](std::string& s) {
    if (s.size() > kMaxString) s.resize(kMaxString);
  };
  clip(c.scope);
  for (auto& p : c.participants) clip(p);
  for (auto& f : c.files) clip(f);
  for (auto& f : c.flows) {
    clip(f.from);
    clip(f.to);
    clip(f.label);
  }
  for (auto& r : c.relationships) {
    clip(r.source);
    clip(r.target);
    clip(r.kind);
  }
  std::size_t size = c.serialized().size();
  while (size > cap) {
    if (!c.flows.empty()) c.flows.pop_back();
    else if (!c.relationships.empty()) c.relationships.pop_back();
    else if (!c.participants.empty()) c.participants.pop_back();
    else if (!c.files.empty()) c.files.pop_back();
    else break;
    size = c.serialized().size();
  }
  return true;
}

}  // namespace c2u::agents
