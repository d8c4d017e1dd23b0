#pragma once

// Language-agnostic intermediate representation of a repository plus its
// canonical JSON form (`.ir.json`).

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace c2u {

using json = nlohmann::json;

inline constexpr int kIrSchemaVersion = 1;

enum class Visibility { Public, Private, Protected, Package };

inline constexpr std::string_view to_string(Visibility v) {
  switch (v) {
    case Visibility::Public: return "public";
    case Visibility::Private: return "private";
    case Visibility::Protected: return "protected";
    case Visibility::Package: return "package";
  }
  return "package";
}

inline std::optional<Visibility> parse_visibility(std::string_view s) {
  if (s == "public") return Visibility::Public;
  if (s == "private") return Visibility::Private;
  if (s == "protected") return Visibility::Protected;
  if (s == "package") return Visibility::Package;
  return std::nullopt;
}

inline bool is_canonical_visibility(std::string_view s) {
  return parse_visibility(s).has_value();
}

enum class ClassKind { Class, Interface, Enum };

inline constexpr std::string_view to_string(ClassKind k) {
  switch (k) {
    case ClassKind::Class: return "class";
    case ClassKind::Interface: return "interface";
    case ClassKind::Enum: return "enum";
  }
  return "class";
}

inline std::optional<ClassKind> parse_class_kind(std::string_view s) {
  if (s == "class") return ClassKind::Class;
  if (s == "interface") return ClassKind::Interface;
  if (s == "enum") return ClassKind::Enum;
  return std::nullopt;
}

struct Parameter {
  std::string name;
  std::string type;  // empty when the source carries no annotation

  bool operator==(const Parameter&) const = default;
};

// `visibility` holds the raw modifier text until normalization maps it onto
// the four canonical values. Raw IRs may carry "", "#", "var", ...
struct AttributeDef {
  std::string name;
  std::string visibility;
  std::optional<std::string> type_annotation;

  bool operator==(const AttributeDef&) const = default;
};

struct MethodDef {
  std::string name;
  std::string visibility;
  std::optional<std::string> type_annotation;
  std::vector<Parameter> parameters;
  std::vector<std::string> calls;

  bool operator==(const MethodDef&) const = default;
};

struct ClassDef {
  std::string name;
  std::optional<std::string> qualified_name;
  ClassKind kind = ClassKind::Class;
  std::string visibility;
  std::vector<MethodDef> methods;
  std::vector<AttributeDef> attributes;
  std::vector<std::string> extends;
  std::vector<std::string> implements;
  std::string source_file;

  bool operator==(const ClassDef&) const = default;
};

struct FunctionDef {
  std::string name;
  std::string source_file;
  std::vector<Parameter> parameters;
  std::vector<std::string> calls;
  int line_count = 0;

  bool operator==(const FunctionDef&) const = default;
};

struct ProjectIR {
  std::string project_name;
  std::set<std::string> languages;
  std::vector<ClassDef> classes;
  std::vector<FunctionDef> functions;
  std::map<std::string, std::string> metadata;
  bool normalized = false;

  std::size_t element_count() const { return classes.size() + functions.size(); }

  bool operator==(const ProjectIR&) const = default;
};

// Thrown by deserialize/validate. `path()` is a JSON pointer to the offending
// location, e.g. "/classes/3/methods/0/visibility".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// JSON mapping

inline json to_json_value(const Parameter& p) {
  return json{{"name", p.name}, {"type", p.type}};
}

inline json to_json_value(const std::vector<Parameter>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(to_json_value(p));
  return out;
}

inline json to_json_value(const AttributeDef& a) {
  json j{{"name", a.name}, {"visibility", a.visibility}};
  if (a.type_annotation) j["type"] = *a.type_annotation;
  return j;
}

inline json to_json_value(const MethodDef& m) {
  json j{{"name", m.name},
         {"visibility", m.visibility},
         {"parameters", to_json_value(m.parameters)},
         {"calls", m.calls}};
  if (m.type_annotation) j["type"] = *m.type_annotation;
  return j;
}

inline json to_json_value(const ClassDef& c) {
  json methods = json::array();
  for (const auto& m : c.methods) methods.push_back(to_json_value(m));
  json attributes = json::array();
  for (const auto& a : c.attributes) attributes.push_back(to_json_value(a));
  json j{{"name", c.name},
         {"kind", std::string(to_string(c.kind))},
         {"visibility", c.visibility},
         {"methods", std::move(methods)},
         {"attributes", std::move(attributes)},
         {"extends", c.extends},
         {"implements", c.implements},
         {"source_file", c.source_file}};
  if (c.qualified_name) j["qualified_name"] = *c.qualified_name;
  return j;
}

inline json to_json_value(const FunctionDef& f) {
  return json{{"name", f.name},
              {"source_file", f.source_file},
              {"parameters", to_json_value(f.parameters)},
              {"calls", f.calls},
              {"line_count", f.line_count}};
}

inline json to_json_value(const ProjectIR& ir) {
  json classes = json::array();
  for (const auto& c : ir.classes) classes.push_back(to_json_value(c));
  json functions = json::array();
  for (const auto& f : ir.functions) functions.push_back(to_json_value(f));
  return json{{"schema_version", kIrSchemaVersion},
              {"project_name", ir.project_name},
              {"languages", ir.languages},
              {"classes", std::move(classes)},
              {"functions", std::move(functions)},
              {"metadata", ir.metadata},
              {"normalized", ir.normalized}};
}

// Canonical text: sorted keys, no insignificant whitespace, invalid UTF-8
// replaced so serialization is total.
inline std::string canonical_dump(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

inline std::string serialize(const ProjectIR& ir) {
  return canonical_dump(to_json_value(ir));
}

namespace detail {

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing required key");
  return *it;
}

inline std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected string");
  return v.get<std::string>();
}

inline std::optional<std::string> get_optional_string(const json& obj, const char* key,
                                                      const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(path + "/" + key, "expected string");
  return it->get<std::string>();
}

inline std::vector<std::string> get_string_list(const json& obj, const char* key,
                                                const std::string& path) {
  const json& v = require(obj, key, path);
  const std::string here = path + "/" + key;
  if (!v.is_array()) throw SchemaError(here, "expected array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw SchemaError(here + "/" + std::to_string(i), "expected string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

inline const json& get_array(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "/" + key, "expected array");
  return v;
}

inline std::vector<Parameter> parameters_from(const json& obj, const std::string& path) {
  const json& arr = get_array(obj, "parameters", path);
  std::vector<Parameter> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "/parameters/" + std::to_string(i);
    out.push_back(Parameter{get_string(arr[i], "name", p), get_string(arr[i], "type", p)});
  }
  return out;
}

}  // namespace detail

inline ProjectIR from_json_value(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw SchemaError("", "IR document must be an object");
  ProjectIR ir;
  ir.project_name = get_string(doc, "project_name", "");
  for (auto& l : get_string_list(doc, "languages", "")) ir.languages.insert(std::move(l));

  const json& classes = get_array(doc, "classes", "");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string p = "/classes/" + std::to_string(i);
    const json& cj = classes[i];
    ClassDef c;
    c.name = get_string(cj, "name", p);
    c.qualified_name = get_optional_string(cj, "qualified_name", p);
    const std::string kind = get_string(cj, "kind", p);
    auto k = parse_class_kind(kind);
    if (!k) throw SchemaError(p + "/kind", "unknown class kind '" + kind + "'");
    c.kind = *k;
    c.visibility = get_string(cj, "visibility", p);
    c.extends = get_string_list(cj, "extends", p);
    c.implements = get_string_list(cj, "implements", p);
    c.source_file = get_string(cj, "source_file", p);
    const json& methods = get_array(cj, "methods", p);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const std::string mp = p + "/methods/" + std::to_string(m);
      MethodDef md;
      md.name = get_string(methods[m], "name", mp);
      md.visibility = get_string(methods[m], "visibility", mp);
      md.type_annotation = get_optional_string(methods[m], "type", mp);
      md.parameters = parameters_from(methods[m], mp);
      md.calls = get_string_list(methods[m], "calls", mp);
      c.methods.push_back(std::move(md));
    }
    const json& attrs = get_array(cj, "attributes", p);
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const std::string ap = p + "/attributes/" + std::to_string(a);
      AttributeDef ad;
      ad.name = get_string(attrs[a], "name", ap);
      ad.visibility = get_string(attrs[a], "visibility", ap);
      ad.type_annotation = get_optional_string(attrs[a], "type", ap);
      c.attributes.push_back(std::move(ad));
    }
    ir.classes.push_back(std::move(c));
  }

  const json& functions = get_array(doc, "functions", "");
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const std::string p = "/functions/" + std::to_string(i);
    FunctionDef f;
    f.name = get_string(functions[i], "name", p);
    if (f.name.empty()) throw SchemaError(p + "/name", "function name must be non-empty");
    f.source_file = get_string(functions[i], "source_file", p);
    f.parameters = parameters_from(functions[i], p);
    f.calls = get_string_list(functions[i], "calls", p);
    const json& lc = require(functions[i], "line_count", p);
    if (!lc.is_number_integer()) throw SchemaError(p + "/line_count", "expected integer");
    f.line_count = lc.get<int>();
    ir.functions.push_back(std::move(f));
  }

  const json& meta = require(doc, "metadata", "");
  if (!meta.is_object()) throw SchemaError("/metadata", "expected object");
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    if (!it.value().is_string()) throw SchemaError("/metadata/" + it.key(), "expected string");
    ir.metadata.emplace(it.key(), it.value().get<std::string>());
  }

  const json& norm = require(doc, "normalized", "");
  if (!norm.is_boolean()) throw SchemaError("/normalized", "expected boolean");
  ir.normalized = norm.get<bool>();
  return ir;
}

// Checks the invariants a normalized IR promises. Raw IRs only need to be
// structurally well formed, which from_json_value already enforces.
inline void validate(const ProjectIR& ir) {
  if (!ir.normalized) return;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ir.classes.size(); ++i) {
    const auto& c = ir.classes[i];
    const std::string p = "/classes/" + std::to_string(i);
    if (!seen.insert(c.name).second) throw SchemaError(p + "/name", "duplicate class name '" + c.name + "'");
    if (!is_canonical_visibility(c.visibility))
      throw SchemaError(p + "/visibility", "non-canonical visibility '" + c.visibility + "'");
    for (std::size_t m = 0; m < c.methods.size(); ++m)
      if (!is_canonical_visibility(c.methods[m].visibility))
        throw SchemaError(p + "/methods/" + std::to_string(m) + "/visibility",
                          "non-canonical visibility '" + c.methods[m].visibility + "'");
    for (std::size_t a = 0; a < c.attributes.size(); ++a)
      if (!is_canonical_visibility(c.attributes[a].visibility))
        throw SchemaError(p + "/attributes/" + std::to_string(a) + "/visibility",
                          "non-canonical visibility '" + c.attributes[a].visibility + "'");
    auto check_simple = [&](const std::vector<std::string>& names, const char* key) {
      for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k].find_first_of(".\\") != std::string::npos || names[k].find("::") != std::string::npos)
          throw SchemaError(p + "/" + key + "/" + std::to_string(k),
                            "qualified inheritance target '" + names[k] + "' in normalized IR");
    };
    check_simple(c.extends, "extends");
    check_simple(c.implements, "implements");
  }
}

inline ProjectIR deserialize(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  ProjectIR ir = from_json_value(doc);
  validate(ir);
  return ir;
}

// Language identifier for a source path, by extension. Empty when unknown.
inline std::string language_of(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return {};
  std::string_view ext = path.substr(dot);
  if (ext == ".java") return "java";
  if (ext == ".py") return "python";
  if (ext == ".js" || ext == ".mjs") return "javascript";
  if (ext == ".php") return "php";
  return {};
}

// Union of several IRs of the same repository. Class names defined in more
// than one language are renamed `<name>_<language>`.
inline ProjectIR merge(const std::vector<ProjectIR>& irs) {
  if (irs.empty()) throw std::invalid_argument("merge: empty IR list");
  ProjectIR out;
  out.project_name = irs.front().project_name;
  for (const auto& ir : irs) {
    out.languages.insert(ir.languages.begin(), ir.languages.end());
    out.classes.insert(out.classes.end(), ir.classes.begin(), ir.classes.end());
    out.functions.insert(out.functions.end(), ir.functions.begin(), ir.functions.end());
    for (const auto& [k, v] : ir.metadata) out.metadata.emplace(k, v);
  }
  out.normalized = std::all_of(irs.begin(), irs.end(), [](const ProjectIR& ir) { return ir.normalized; });

  auto lang_of_class = [](const ClassDef& c) {
    std::string l = language_of(c.source_file);
    return l.empty() ? std::string("unknown") : l;
  };
  std::map<std::string, std::set<std::string>> langs_by_name;
  for (const auto& c : out.classes) langs_by_name[c.name].insert(lang_of_class(c));

  std::set<std::string> taken;
  for (const auto& c : out.classes)
    if (langs_by_name[c.name].size() < 2) taken.insert(c.name);
  for (auto& c : out.classes) {
    if (langs_by_name[c.name].size() < 2) continue;
    std::string base = c.name + "_" + lang_of_class(c);
    std::string candidate = base;
    for (int n = 2; taken.count(candidate); ++n) candidate = base + "_" + std::to_string(n);
    taken.insert(candidate);
    c.name = candidate;
  }
  return out;
}

}  // namespace c2u
