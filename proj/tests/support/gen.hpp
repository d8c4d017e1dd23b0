#pragma once

// Seeded generators for raw IRs, shared by the property suites and the
// acceptance binary.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "c2u/ir.hpp"

namespace c2u::testgen {

struct GenOptions {
  int min_classes = 0;
  int max_classes = 40;
  int min_functions = 0;
  int max_functions = 40;
  int max_methods = 10;
  int max_attributes = 8;
  int max_calls = 6;
  int name_len = 8;       // base length of generated identifiers
  bool noisy = true;      // raw-only defects: odd visibilities, qualified bases
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  std::string ident(int len) {
    static const std::string first = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_";
    static const std::string rest = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
    std::string s(1, first[static_cast<std::size_t>(uniform(0, static_cast<int>(first.size()) - 1))]);
    for (int i = 1; i < len; ++i) s += rest[static_cast<std::size_t>(uniform(0, static_cast<int>(rest.size()) - 1))];
    return s;
  }

  std::string visibility(bool noisy) {
    static const std::vector<std::string> canonical{"public", "private", "protected", "package"};
    static const std::vector<std::string> raw{"public", "private", "protected", "package", "", "#", "var", "pub", "internal"};
    return noisy ? pick(raw) : pick(canonical);
  }

  ProjectIR ir(const GenOptions& o) {
    static const std::vector<std::string> exts{".java", ".py", ".js", ".php"};
    static const std::vector<std::string> suffixes{"Service", "Controller", "Manager", "Model", "Util", "Helper", "", ""};
    static const std::vector<std::string> dirs{"src/core", "src/api", "lib", "app/models", "app", "tools/x"};
    ProjectIR ir;
    ir.project_name = "gen_" + ident(5);
    const int nc = uniform(o.min_classes, o.max_classes);
    const int nf = uniform(o.min_functions, o.max_functions);
    std::vector<std::string> class_names;
    std::vector<std::string> callables;
    for (int i = 0; i < nc; ++i) {
      // Index suffix keeps names unique, as extraction guarantees.
      class_names.push_back(ident(std::max(1, uniform(o.name_len / 2, o.name_len))) + pick(suffixes) + "_" + std::to_string(i));
    }
    for (int i = 0; i < nc; ++i) {
      ClassDef c;
      c.name = class_names[static_cast<std::size_t>(i)];
      c.kind = chance(0.8) ? ClassKind::Class : (chance(0.5) ? ClassKind::Interface : ClassKind::Enum);
      c.visibility = visibility(o.noisy);
      const std::string ext = pick(exts);
      c.source_file = pick(dirs) + "/" + c.name + ext;
      if (chance(0.3)) c.qualified_name = "pkg." + c.name;
      const int nm = uniform(0, o.max_methods);
      for (int m = 0; m < nm; ++m) {
        MethodDef md;
        md.name = ident(uniform(2, o.name_len));
        md.visibility = visibility(o.noisy);
        if (chance(0.4)) md.type_annotation = pick(std::vector<std::string>{"int", "str", "void", "List<String>"});
        for (int p = uniform(0, 3); p > 0; --p) md.parameters.push_back({ident(3), chance(0.5) ? "int" : ""});
        for (int k = uniform(0, o.max_calls); k > 0; --k)
          md.calls.push_back(!callables.empty() && chance(0.6) ? pick(callables) : ident(5));
        callables.push_back(md.name);
        c.methods.push_back(std::move(md));
      }
      const int na = uniform(0, o.max_attributes);
      for (int a = 0; a < na; ++a) {
        AttributeDef ad{ident(uniform(2, o.name_len)), visibility(o.noisy), std::nullopt};
        if (chance(0.5)) ad.type_annotation = chance(0.5) && !class_names.empty() ? pick(class_names) : "int";
        c.attributes.push_back(std::move(ad));
      }
      if (i > 0 && chance(0.35)) {
        const std::string& base = class_names[static_cast<std::size_t>(uniform(0, i - 1))];
        c.extends.push_back(o.noisy && chance(0.5) ? "org.example." + base : base);
        if (o.noisy && chance(0.2)) c.extends.push_back("other::" + base);
      }
      if (chance(0.2)) c.implements.push_back(o.noisy && chance(0.5) ? "Ns\\Api\\Iface" : "Iface");
      ir.classes.push_back(std::move(c));
    }
    for (int i = 0; i < nf; ++i) {
      FunctionDef f;
      f.name = ident(uniform(2, o.name_len)) + "_fn" + std::to_string(i);
      f.source_file = pick(dirs) + "/mod" + std::to_string(i % 7) + pick(exts);
      f.line_count = uniform(0, 60);
      for (int p = uniform(0, 3); p > 0; --p) f.parameters.push_back({ident(3), ""});
      for (int k = uniform(0, o.max_calls); k > 0; --k)
        f.calls.push_back(!callables.empty() && chance(0.5) ? pick(callables) : ident(6));
      callables.push_back(f.name);
      ir.functions.push_back(std::move(f));
    }
    for (const auto& c : ir.classes) ir.languages.insert(language_of(c.source_file));
    for (const auto& f : ir.functions) ir.languages.insert(language_of(f.source_file));
    if (chance(0.5)) ir.metadata["docker:Dockerfile"] = "FROM alpine; EXPOSE 80";
    if (chance(0.5)) ir.metadata["compose:docker-compose.yml"] = "services: web, db";
    if (chance(0.3)) ir.metadata["repository"] = "/tmp/" + ir.project_name;
    return ir;
  }

 private:
  std::mt19937_64 rng_;
};

// Reference serializer written against the documented layout (sorted keys,
// compact separators). ASCII-only inputs; used as an independent oracle.
namespace ref {

inline std::string str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string list(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + str(v[i]);
  return out + "]";
}

inline std::string params(const std::vector<Parameter>& ps) {
  std::string out = "[";
  for (std::size_t i = 0; i < ps.size(); ++i)
    out += std::string(i ? "," : "") + "{\"name\":" + str(ps[i].name) + ",\"type\":" + str(ps[i].type) + "}";
  return out + "]";
}

inline std::string serialize(const ProjectIR& ir) {
  std::string classes = "[";
  for (std::size_t i = 0; i < ir.classes.size(); ++i) {
    const auto& c = ir.classes[i];
    std::string attrs = "[";
    for (std::size_t a = 0; a < c.attributes.size(); ++a) {
      const auto& x = c.attributes[a];
      attrs += std::string(a ? "," : "") + "{\"name\":" + str(x.name);
      if (x.type_annotation) attrs += ",\"type\":" + str(*x.type_annotation);
      attrs += ",\"visibility\":" + str(x.visibility) + "}";
    }
    attrs += "]";
    std::string methods = "[";
    for (std::size_t m = 0; m < c.methods.size(); ++m) {
      const auto& x = c.methods[m];
      methods += std::string(m ? "," : "") + "{\"calls\":" + list(x.calls) + ",\"name\":" + str(x.name) +
                 ",\"parameters\":" + params(x.parameters);
      if (x.type_annotation) methods += ",\"type\":" + str(*x.type_annotation);
      methods += ",\"visibility\":" + str(x.visibility) + "}";
    }
    methods += "]";
    classes += std::string(i ? "," : "") + "{\"attributes\":" + attrs + ",\"extends\":" + list(c.extends) +
               ",\"implements\":" + list(c.implements) + ",\"kind\":" + str(std::string(to_string(c.kind))) +
               ",\"methods\":" + methods + ",\"name\":" + str(c.name);
    if (c.qualified_name) classes += ",\"qualified_name\":" + str(*c.qualified_name);
    classes += ",\"source_file\":" + str(c.source_file) + ",\"visibility\":" + str(c.visibility) + "}";
  }
  classes += "]";
  std::string functions = "[";
  for (std::size_t i = 0; i < ir.functions.size(); ++i) {
    const auto& f = ir.functions[i];
    functions += std::string(i ? "," : "") + "{\"calls\":" + list(f.calls) +
                 ",\"line_count\":" + std::to_string(f.line_count) + ",\"name\":" + str(f.name) +
                 ",\"parameters\":" + params(f.parameters) + ",\"source_file\":" + str(f.source_file) + "}";
  }
  functions += "]";
  std::string meta = "{";
  bool first = true;
  for (const auto& [k, v] : ir.metadata) {
    meta += std::string(first ? "" : ",") + str(k) + ":" + str(v);
    first = false;
  }
  meta += "}";
  return "{\"classes\":" + classes + ",\"functions\":" + functions + ",\"languages\":" +
         list(std::vector<std::string>(ir.languages.begin(), ir.languages.end())) + ",\"metadata\":" + meta +
         ",\"normalized\":" + (ir.normalized ? "true" : "false") + ",\"project_name\":" + str(ir.project_name) +
         ",\"schema_version\":" + std::to_string(kIrSchemaVersion) + "}";
}

}  // namespace ref

}  // namespace c2u::testgen
