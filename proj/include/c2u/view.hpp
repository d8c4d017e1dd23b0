#pragma once

// Deterministic, importance-weighted compaction of a normalized IR into a
// diagram-specific view that fits a byte budget. No model calls.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/ir.hpp"

namespace c2u {

enum class DiagramType { Class, Sequence, Activity, Usecase, Component, Deployment, SystemContext };

inline constexpr std::array<DiagramType, 7> kAllDiagramTypes = {
    DiagramType::Class,     DiagramType::Sequence,   DiagramType::Activity,     DiagramType::Usecase,
    DiagramType::Component, DiagramType::Deployment, DiagramType::SystemContext};

inline constexpr std::string_view to_string(DiagramType dt) {
  switch (dt) {
    case DiagramType::Class: return "class";
    case DiagramType::Sequence: return "sequence";
    case DiagramType::Activity: return "activity";
    case DiagramType::Usecase: return "usecase";
    case DiagramType::Component: return "component";
    case DiagramType::Deployment: return "deployment";
    case DiagramType::SystemContext: return "system_context";
  }
  return "class";
}

inline std::optional<DiagramType> parse_diagram_type(std::string_view s) {
  for (auto dt : kAllDiagramTypes)
    if (to_string(dt) == s) return dt;
  if (s == "use_case") return DiagramType::Usecase;
  if (s == "system-context" || s == "systemcontext") return DiagramType::SystemContext;
  return std::nullopt;
}

enum class Route { Single, Deep };

inline constexpr Route route_of(DiagramType dt) {
  return dt == DiagramType::Component || dt == DiagramType::Deployment || dt == DiagramType::SystemContext
             ? Route::Single
             : Route::Deep;
}

inline constexpr bool is_behavioral(DiagramType dt) {
  return dt == DiagramType::Sequence || dt == DiagramType::Activity;
}

inline constexpr std::size_t kSingleBudgetBytes = 60 * 1024;
inline constexpr std::size_t kDeepBudgetBytes = 100 * 1024;

inline constexpr std::size_t budget_bytes(DiagramType dt) {
  return route_of(dt) == Route::Single ? kSingleBudgetBytes : kDeepBudgetBytes;
}

struct ScoringWeights {
  double inheritance = 10.0;
  double name_bonus = 15.0;
  double call_chain = 3.0;
  std::vector<std::string> patterns = {"Service", "Controller", "Manager",  "Orchestrator", "Handler",
                                       "Repository", "Model",   "Agent", "Factory"};
};

struct ImportanceScore {
  std::string name;
  double score = 0;
  double member_weight = 0;
  double inheritance_weight = 0;
  double name_bonus = 0;
  double call_chain_weight = 0;
};

namespace detail {

inline bool icontains(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return true;
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  });
  return it != hay.end();
}

}  // namespace detail

inline bool matches_architectural_pattern(std::string_view name, const ScoringWeights& w = {}) {
  return std::any_of(w.patterns.begin(), w.patterns.end(),
                     [&](const std::string& p) { return detail::icontains(name, p); });
}

inline ImportanceScore score_class(const ClassDef& c, DiagramType /*dt*/, const ScoringWeights& w = {}) {
  ImportanceScore s;
  s.name = c.name;
  s.member_weight = static_cast<double>(c.methods.size() + c.attributes.size());
  s.inheritance_weight = (!c.extends.empty() || !c.implements.empty()) ? w.inheritance : 0.0;
  s.name_bonus = matches_architectural_pattern(c.name, w) ? w.name_bonus : 0.0;
  s.score = s.member_weight + s.inheritance_weight + s.name_bonus + s.call_chain_weight;
  return s;
}

inline ImportanceScore score_function(const FunctionDef& f, DiagramType dt, const ScoringWeights& w = {}) {
  ImportanceScore s;
  s.name = f.name;
  s.member_weight = static_cast<double>(std::max(f.line_count, 0));
  s.call_chain_weight = is_behavioral(dt) ? w.call_chain * static_cast<double>(f.calls.size()) : 0.0;
  s.score = s.member_weight + s.inheritance_weight + s.name_bonus + s.call_chain_weight;
  return s;
}

struct ElementRef {
  enum class Kind { Class, Function };
  Kind kind;
  std::size_t index;  // into ProjectIR::classes or ::functions
  ImportanceScore score;
};

// IR elements that compete for a slot in a view of this type.
inline std::vector<ElementRef> candidate_elements(const ProjectIR& ir, DiagramType dt, const ScoringWeights& w = {}) {
  std::vector<ElementRef> out;
  out.reserve(ir.element_count());
  for (std::size_t i = 0; i < ir.classes.size(); ++i)
    out.push_back({ElementRef::Kind::Class, i, score_class(ir.classes[i], dt, w)});
  if (dt != DiagramType::Class && dt != DiagramType::Component)
    for (std::size_t i = 0; i < ir.functions.size(); ++i)
      out.push_back({ElementRef::Kind::Function, i, score_function(ir.functions[i], dt, w)});
  return out;
}

// Total order: score descending, then name ascending; kind and index settle
// the remaining ties (a class and a function may share a name).
inline bool ranks_before(const ElementRef& a, const ElementRef& b) {
  if (a.score.score != b.score.score) return a.score.score > b.score.score;
  if (a.score.name != b.score.name) return a.score.name < b.score.name;
  if (a.kind != b.kind) return a.kind == ElementRef::Kind::Class;
  return a.index < b.index;
}

inline std::vector<ElementRef> rank_elements(const ProjectIR& ir, DiagramType dt, const ScoringWeights& w = {}) {
  auto all = candidate_elements(ir, dt, w);
  std::sort(all.begin(), all.end(), ranks_before);
  return all;
}

inline std::vector<ElementRef> select_elements(const ProjectIR& ir, DiagramType dt, std::size_t budget,
                                               const ScoringWeights& w = {}) {
  if (budget < 1) throw std::invalid_argument("select_elements: budget must be >= 1");
  auto ranked = rank_elements(ir, dt, w);
  if (ranked.size() > budget) ranked.resize(budget);
  return ranked;
}

struct DetailCaps {
  int max_methods = 20;
  int max_attributes = 20;

  bool operator==(const DetailCaps&) const = default;
};

inline constexpr DetailCaps scale_detail(std::size_t element_count) {
  if (element_count < 50) return {20, 20};
  if (element_count < 200) return {12, 12};
  if (element_count < 1000) return {8, 8};
  return {5, 5};
}

namespace detail {

inline std::string top_directory(const std::string& path) {
  auto slash = path.find('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

inline std::string parent_directory(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

template <typename T>
std::vector<T> capped(const std::vector<T>& v, int cap) {
  std::size_t n = std::min(v.size(), static_cast<std::size_t>(std::max(cap, 0)));
  return std::vector<T>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
}

inline json param_strings(const std::vector<Parameter>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(p.type.empty() ? p.name : p.name + ": " + p.type);
  return out;
}

inline bool is_infrastructure_key(std::string_view key) {
  static constexpr std::string_view pats[] = {"docker", "compose", "yaml", "config", "port", "image"};
  return std::any_of(std::begin(pats), std::end(pats), [&](std::string_view p) { return icontains(key, p); });
}

inline constexpr std::size_t kMaxInfraEntries = 32;
inline constexpr std::size_t kMaxInfraSummary = 256;

// One record per element, for the types whose projection is element-wise.
inline json project_one(const ProjectIR& ir, const ElementRef& e, DiagramType dt, DetailCaps caps) {
  if (e.kind == ElementRef::Kind::Function) {
    const FunctionDef& f = ir.functions[e.index];
    switch (dt) {
      case DiagramType::Usecase: return json{{"kind", "function"}, {"name", f.name}, {"source_file", f.source_file}};
      default:
        return json{{"kind", "function"},
                    {"name", f.name},
                    {"source_file", f.source_file},
                    {"calls", capped(f.calls, caps.max_methods)}};
    }
  }
  const ClassDef& c = ir.classes[e.index];
  switch (dt) {
    case DiagramType::Class: {
      json methods = json::array();
      for (const auto& m : capped(c.methods, caps.max_methods)) {
        json mj{{"name", m.name}, {"visibility", m.visibility}, {"params", param_strings(m.parameters)}};
        if (m.type_annotation) mj["type"] = *m.type_annotation;
        methods.push_back(std::move(mj));
      }
      json attrs = json::array();
      for (const auto& a : capped(c.attributes, caps.max_attributes)) {
        json aj{{"name", a.name}, {"visibility", a.visibility}};
        if (a.type_annotation) aj["type"] = *a.type_annotation;
        attrs.push_back(std::move(aj));
      }
      return json{{"name", c.name},
                  {"kind", std::string(to_string(c.kind))},
                  {"visibility", c.visibility},
                  {"methods", std::move(methods)},
                  {"attributes", std::move(attrs)},
                  {"extends", c.extends},
                  {"implements", c.implements},
                  {"source_file", c.source_file}};
    }
    case DiagramType::Sequence:
    case DiagramType::Activity: {
      json methods = json::array();
      for (const auto& m : capped(c.methods, caps.max_methods))
        methods.push_back(json{{"name", m.name}, {"calls", capped(m.calls, caps.max_methods)}});
      return json{{"kind", "class"}, {"name", c.name}, {"source_file", c.source_file}, {"methods", std::move(methods)}};
    }
    case DiagramType::Usecase: {
      json pub = json::array();
      for (const auto& m : c.methods) {
        if (static_cast<int>(pub.size()) >= caps.max_methods) break;
        if (m.visibility == "public") pub.push_back(m.name);
      }
      return json{{"kind", "class"}, {"name", c.name}, {"source_file", c.source_file}, {"public_methods", std::move(pub)}};
    }
    case DiagramType::Component:
      return json{{"name", c.name},
                  {"kind", std::string(to_string(c.kind))},
                  {"directory", parent_directory(c.source_file)},
                  {"extends", c.extends},
                  {"implements", c.implements}};
    default: break;
  }
  return json{{"name", c.name}};
}

inline bool is_elementwise(DiagramType dt) {
  return dt != DiagramType::Deployment && dt != DiagramType::SystemContext;
}

// Simple names the IR itself defines; call targets outside it are external.
inline std::set<std::string> defined_names(const ProjectIR& ir) {
  std::set<std::string> defined;
  for (const auto& c : ir.classes) {
    defined.insert(c.name);
    for (const auto& m : c.methods) defined.insert(m.name);
  }
  for (const auto& f : ir.functions) defined.insert(f.name);
  return defined;
}

inline json project_aggregate(const ProjectIR& ir, const std::vector<ElementRef>& elements, DiagramType dt,
                              const std::set<std::string>* known = nullptr) {
  json out = json::array();
  if (dt == DiagramType::Deployment) {
    std::size_t n = 0;
    for (const auto& [k, v] : ir.metadata) {
      if (!is_infrastructure_key(k)) continue;
      if (n++ >= kMaxInfraEntries) break;
      out.push_back(json{{"kind", "infrastructure"}, {"key", k}, {"summary", v.substr(0, kMaxInfraSummary)}});
    }
    std::map<std::string, int> dirs;
    for (const auto& e : elements) {
      const std::string& file = e.kind == ElementRef::Kind::Class ? ir.classes[e.index].source_file
                                                                   : ir.functions[e.index].source_file;
      ++dirs[top_directory(file)];
    }
    for (const auto& [d, count] : dirs) out.push_back(json{{"kind", "directory"}, {"name", d}, {"elements", count}});
    return out;
  }
  // System context: public classes plus call targets the IR does not define.
  std::set<std::string> own;
  if (!known) own = defined_names(ir);
  const std::set<std::string>& defined = known ? *known : own;
  std::set<std::string> external;
  for (const auto& e : elements) {
    if (e.kind == ElementRef::Kind::Class) {
      const ClassDef& c = ir.classes[e.index];
      if (c.visibility == "public") out.push_back(json{{"kind", "class"}, {"name", c.name}});
      for (const auto& m : c.methods)
        for (const auto& call : m.calls)
          if (!defined.count(call)) external.insert(call);
    } else {
      for (const auto& call : ir.functions[e.index].calls)
        if (!defined.count(call)) external.insert(call);
    }
  }
  for (const auto& x : external) out.push_back(json{{"kind", "external"}, {"name", x}});
  return out;
}

}  // namespace detail

inline json project(const ProjectIR& ir, const std::vector<ElementRef>& elements, DiagramType dt, DetailCaps caps) {
  if (!detail::is_elementwise(dt)) return detail::project_aggregate(ir, elements, dt);
  json out = json::array();
  for (const auto& e : elements) out.push_back(detail::project_one(ir, e, dt, caps));
  return out;
}

class IrreducibleView : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ViewOptions {
  ScoringWeights weights;
  std::optional<std::size_t> budget_bytes;  // overrides the per-type default
};

struct IRView {
  DiagramType diagram_type = DiagramType::Class;
  std::string project_name;
  json elements = json::array();
  DetailCaps detail_caps;
  std::size_t byte_size = 0;
  std::size_t budget = 0;
  int shrink_iterations = 0;
  std::size_t element_budget = 0;
  std::size_t source_element_count = 0;
  std::vector<std::string> retained;  // names of the selected IR elements, in rank order
  std::string text;                   // canonical serialization, exactly byte_size bytes
};

namespace detail {

inline json view_document(const IRView& v, const json& elements) {
  return json{{"schema_version", kIrSchemaVersion},
              {"project_name", v.project_name},
              {"diagram_type", std::string(to_string(v.diagram_type))},
              {"budget_bytes", v.budget},
              {"byte_size", v.byte_size},
              {"detail_caps", {{"max_methods", v.detail_caps.max_methods}, {"max_attributes", v.detail_caps.max_attributes}}},
              {"shrink_iterations", v.shrink_iterations},
              {"element_budget", v.element_budget},
              {"source_element_count", v.source_element_count},
              {"elements", elements}};
}

inline std::size_t decimal_digits(std::size_t n) {
  std::size_t d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

// Exact size of the document carrying its own byte_size.
inline std::size_t self_sized(std::size_t size_with_zero) {
  std::size_t n = size_with_zero;
  for (;;) {
    std::size_t next = size_with_zero - 1 + decimal_digits(n);
    if (next == n) return n;
    n = next;
  }
}

}  // namespace detail

inline std::size_t ceil_half(std::size_t n) { return (n + 1) / 2; }

inline IRView generate_view(const ProjectIR& ir, DiagramType dt, const ViewOptions& opts = {}) {
  IRView v;
  v.diagram_type = dt;
  v.project_name = ir.project_name;
  v.budget = opts.budget_bytes.value_or(budget_bytes(dt));
  v.source_element_count = ir.element_count();
  v.detail_caps = scale_detail(v.source_element_count);

  const auto ranked = rank_elements(ir, dt, opts.weights);

  // Element-wise records are serialized lazily, in rank order, and only
  // until their running size passes the budget: no longer prefix can fit.
  // System-context content also only grows with the prefix (new public
  // classes, new external targets), so it is sized the same way; deployment
  // is re-projected per iteration.
  std::vector<std::string> record_text;
  std::vector<std::size_t> prefix{0}, records{0};
  const bool elementwise = detail::is_elementwise(dt);
  const bool incremental = elementwise || dt == DiagramType::SystemContext;
  std::set<std::string> defined, seen_external;
  if (dt == DiagramType::SystemContext) defined = detail::defined_names(ir);
  auto grow = [&](const ElementRef& e) {
    std::size_t bytes = 0, n = 0;
    auto add = [&](const json& rec) {
      bytes += canonical_dump(rec).size();
      ++n;
    };
    if (elementwise) {
      record_text.push_back(canonical_dump(detail::project_one(ir, e, dt, v.detail_caps)));
      bytes = record_text.back().size();
      n = 1;
    } else if (e.kind == ElementRef::Kind::Class) {
      const ClassDef& c = ir.classes[e.index];
      if (c.visibility == "public") add(json{{"kind", "class"}, {"name", c.name}});
      for (const auto& m : c.methods)
        for (const auto& call : m.calls)
          if (!defined.count(call) && seen_external.insert(call).second) add(json{{"kind", "external"}, {"name", call}});
    } else {
      for (const auto& call : ir.functions[e.index].calls)
        if (!defined.count(call) && seen_external.insert(call).second) add(json{{"kind", "external"}, {"name", call}});
    }
    prefix.push_back(prefix.back() + bytes);
    records.push_back(records.back() + n);
  };
  auto extend_to = [&](std::size_t take) {
    while (prefix.size() <= take && prefix.back() <= v.budget) grow(ranked[prefix.size() - 1]);
    return prefix.size() > take;
  };

  std::size_t element_budget = std::max<std::size_t>(ranked.size(), 1);
  for (int k = 0;; ++k) {
    const std::size_t take = std::min(element_budget, ranked.size());
    v.shrink_iterations = k;
    v.element_budget = element_budget;
    v.byte_size = 0;
    std::size_t size = 0;
    json aggregate;
    if (incremental) {
      const std::size_t shell = canonical_dump(detail::view_document(v, json::array())).size();
      size = extend_to(take) ? shell + prefix[take] + (records[take] > 0 ? records[take] - 1 : 0) : v.budget + 1;
    } else {
      std::vector<ElementRef> chosen(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take));
      aggregate = detail::project_aggregate(ir, chosen, dt, &defined);
      size = canonical_dump(detail::view_document(v, aggregate)).size();
    }
    size = detail::self_sized(size);
    if (size <= v.budget) {
      v.byte_size = size;
      v.retained.clear();
      for (std::size_t i = 0; i < take; ++i) v.retained.push_back(ranked[i].score.name);
      if (elementwise) {
        v.elements = json::array();
        for (std::size_t i = 0; i < take; ++i) v.elements.push_back(json::parse(record_text[i]));
      } else if (incremental) {
        std::vector<ElementRef> chosen(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take));
        v.elements = detail::project_aggregate(ir, chosen, dt, &defined);
      } else {
        v.elements = std::move(aggregate);
      }
      v.text = canonical_dump(detail::view_document(v, v.elements));
      if (v.text.size() != v.byte_size) throw std::logic_error("view size accounting drifted");
      return v;
    }
    if (element_budget <= 1)
      throw IrreducibleView("irreducible view: a single-element " + std::string(to_string(dt)) + " view needs " +
                            std::to_string(size) + " bytes, budget is " + std::to_string(v.budget));
    element_budget = ceil_half(element_budget);
  }
}

// Ranked score table for `--explain`.
inline std::string explain_csv(const ProjectIR& ir, DiagramType dt, const IRView& view, const ScoringWeights& w = {}) {
  std::ostringstream out;
  out << "rank,name,kind,score,member_weight,inheritance_weight,name_bonus,call_chain_weight,retained\n";
  auto ranked = rank_elements(ir, dt, w);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& e = ranked[i];
    out << (i + 1) << ',' << e.score.name << ',' << (e.kind == ElementRef::Kind::Class ? "class" : "function") << ','
        << e.score.score << ',' << e.score.member_weight << ',' << e.score.inheritance_weight << ','
        << e.score.name_bonus << ',' << e.score.call_chain_weight << ',' << (i < view.retained.size() ? 1 : 0) << '\n';
  }
  return out.str();
}

inline json view_to_json(const IRView& v) { return json::parse(v.text); }

}  // namespace c2u
