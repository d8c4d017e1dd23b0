#pragma once

// The three post-extraction transformations that turn a raw IR into the
// uniform schema every downstream stage reads.

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/ir.hpp"

namespace c2u {

namespace detail {

// Maps a raw modifier onto the canonical set. `name` and `language` feed the
// convention-based rules of languages without access modifiers.
inline std::string canonical_visibility(std::string_view raw, std::string_view name,
                                        std::string_view language) {
  if (auto v = parse_visibility(raw)) return std::string(to_string(*v));
  if (raw == "#") return "private";
  if (raw == "var") return "public";  // PHP 4 property syntax
  if (raw.empty()) {
    if (language == "python") {
      if (name.size() > 4 && name.substr(0, 2) == "__" && name.substr(name.size() - 2) == "__")
        return "public";  // dunder methods are part of the object protocol
      if (name.substr(0, 2) == "__") return "private";
      if (name.substr(0, 1) == "_") return "protected";
      return "public";
    }
    if (language == "javascript") return name.substr(0, 1) == "#" ? "private" : "public";
    if (language == "php") return "public";
  }
  return "package";
}

inline std::string last_segment(const std::string& name) {
  std::size_t cut = 0;
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '.' || c == '\\' || c == '/') cut = i + 1;
    else if (c == ':' && i + 1 < name.size() && name[i + 1] == ':') cut = i + 2;
  }
  return name.substr(std::min(cut, name.size()));
}

inline std::vector<std::string> simplify_unique(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& n : names) {
    std::string s = last_segment(n);
    if (s.empty()) continue;
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

inline ProjectIR normalize_visibility(ProjectIR ir) {
  for (auto& c : ir.classes) {
    const std::string lang = language_of(c.source_file);
    c.visibility = detail::canonical_visibility(c.visibility, c.name, lang);
    for (auto& m : c.methods) m.visibility = detail::canonical_visibility(m.visibility, m.name, lang);
    for (auto& a : c.attributes) a.visibility = detail::canonical_visibility(a.visibility, a.name, lang);
  }
  return ir;
}

inline ProjectIR canonicalize_inheritance(ProjectIR ir) {
  for (auto& c : ir.classes) {
    c.extends = detail::simplify_unique(c.extends);
    c.implements = detail::simplify_unique(c.implements);
  }
  return ir;
}

// Inheritance is judged after simplification so that filtering before or
// after canonicalization gives the same result.
inline bool is_noise(const ClassDef& c) {
  return c.methods.empty() && c.attributes.empty() && detail::simplify_unique(c.extends).empty() &&
         detail::simplify_unique(c.implements).empty();
}

inline bool is_noise(const FunctionDef& f) { return f.line_count < 2 && f.calls.empty(); }

inline ProjectIR filter_noise(ProjectIR ir) {
  std::erase_if(ir.classes, [](const ClassDef& c) { return is_noise(c); });
  std::erase_if(ir.functions, [](const FunctionDef& f) { return is_noise(f); });
  return ir;
}

inline ProjectIR normalize(ProjectIR ir) {
  ir = normalize_visibility(canonicalize_inheritance(filter_noise(std::move(ir))));
  ir.normalized = true;
  return ir;
}

}  // namespace c2u
