#pragma once

// Pattern-based PlantUML reading (elements, relationships, structural facts)
// and the rule engine that decides diagram validity and applies
// deterministic fixes.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/ir.hpp"
#include "c2u/view.hpp"

namespace c2u::puml {

struct Element {
  std::string name;  // canonical (display) name
  std::string kind;  // declaring keyword, e.g. class, participant, node, action
  std::optional<std::string> stereotype;
  std::optional<std::string> parent;  // enclosing container, if any

  bool operator==(const Element&) const = default;
};

struct Relationship {
  std::string source;
  std::string target;
  std::string kind;  // generalization, realization, dependency, aggregation, composition,
                     // association, message, flow
  std::optional<std::string> label;

  bool operator==(const Relationship&) const = default;
};

// Facts consumed by the structure checklist.
struct StructureFacts {
  bool has_start = false;
  bool has_stop = false;
  int ifs_opened = 0;
  int ifs_closed = 0;
  int activations = 0;
  std::set<std::string> noted;  // elements carrying a note

  bool operator==(const StructureFacts&) const = default;
};

struct DiagramArtifact {
  DiagramType diagram_type = DiagramType::Class;
  std::string text;
  std::map<std::string, Element> elements;
  std::vector<Relationship> relationships;
  std::optional<std::string> scope;
  StructureFacts facts;

  std::set<std::string> element_names() const {
    std::set<std::string> out;
    for (const auto& [k, _] : elements) out.insert(k);
    return out;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string line(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (!out.empty() && out.back().empty()) out.pop_back();  // trailing newline
  return out;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

// Strip quoting/bracketing from a name token and collapse whitespace.
inline std::string canon(std::string raw) {
  raw = trim(raw);
  if (raw.size() >= 2) {
    char a = raw.front(), b = raw.back();
    if ((a == '"' && b == '"') || (a == '[' && b == ']') || (a == '(' && b == ')') || (a == ':' && b == ':'))
      raw = raw.substr(1, raw.size() - 2);
  }
  std::string out;
  bool space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\' && i + 1 < raw.size() && raw[i + 1] == 'n') {
      space = true;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

inline bool is_quoted(const std::string& raw) {
  return !raw.empty() && (raw.front() == '"' || raw.front() == '[' || raw.front() == '(' || raw.front() == ':');
}

inline std::string strip_generics(std::string name) {
  if (auto lt = name.find('<'); lt != std::string::npos && lt > 0) name.erase(lt);
  return name;
}

inline std::string without_quoted(const std::string& line) {
  std::string out;
  bool q = false;
  for (char c : line) {
    if (c == '"') {
      q = !q;
      continue;
    }
    if (!q) out += c;
  }
  return out;
}

enum class LineClass { Code, Blank, Comment, NoteBody, Delimiter, Fence };

// Classifies every line: block comments, note bodies and fences are
// excluded from structural rules.
inline std::vector<LineClass> classify(const std::vector<std::string>& lines) {
  static const std::regex note_open(R"(^\s*(?:floating\s+)?(?:note|hnote|rnote|legend)\b(.*)$)", std::regex::icase);
  std::vector<LineClass> out(lines.size(), LineClass::Code);
  bool in_comment = false;
  bool in_note = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string t = trim(lines[i]);
    if (in_comment) {
      out[i] = LineClass::Comment;
      if (t.find("'/") != std::string::npos) in_comment = false;
      continue;
    }
    if (in_note) {
      out[i] = LineClass::NoteBody;
      std::string l = lower(t);
      if (l.rfind("end note", 0) == 0 || l.rfind("endnote", 0) == 0 || l.rfind("end hnote", 0) == 0 ||
          l.rfind("end rnote", 0) == 0 || l.rfind("endlegend", 0) == 0 || l.rfind("end legend", 0) == 0)
        in_note = false;
      continue;
    }
    if (t.empty()) {
      out[i] = LineClass::Blank;
      continue;
    }
    if (t.rfind("```", 0) == 0) {
      out[i] = LineClass::Fence;
      continue;
    }
    if (starts_with_ci(t, "@startuml") || starts_with_ci(t, "@enduml")) {
      out[i] = LineClass::Delimiter;
      continue;
    }
    if (t[0] == '\'') {
      out[i] = LineClass::Comment;
      continue;
    }
    if (t.rfind("/'", 0) == 0) {
      out[i] = LineClass::Comment;
      if (t.find("'/", 2) == std::string::npos) in_comment = true;
      continue;
    }
    std::smatch m;
    if (std::regex_match(t, m, note_open)) {
      // Single-line forms carry their text after ':' or as a quoted string.
      std::string rest = m[1];
      bool single = rest.find(':') != std::string::npos || (rest.find('"') != std::string::npos && rest.find(" as ") != std::string::npos);
      if (!single) in_note = true;
    }
  }
  return out;
}

inline const std::string& name_pattern() {
  static const std::string p = R"((?:"[^"]*"|\[[^\]]*\]|\([^)]*\)|:[^:\s][^:]*:|[A-Za-z_][\w.]*(?:<[^<>]*>)?))";
  return p;
}

inline const std::string& arrow_pattern() {
  static const std::string p =
      R"((?:<\|?|<<|\*|o|\}|\+|#|x|\^|/|\\\\)?(?:-|\.\.|\.(?=[>|]))[-.]*(?:\[[^\]]*\])?(?:(?:left|right|up|down|le|ri|do|l|r|u|d)(?=[-.]))?[-.]*(?:\(0\)|\(0|0\))?[-.]*(?:\|>|>>|>|\*|o|\{|\+|#|x|\^|/|\\\\)?)";
  return p;
}

inline const std::regex& relationship_re() {
  static const std::regex re("^\\s*(" + name_pattern() + R"()\s*(?:"[^"]*"\s*)?()" + arrow_pattern() +
                             R"()\s*(?:"[^"]*"\s*)?()" + name_pattern() +
                             R"()\s*(?:(?:\+\+|--|\*\*|!!)\s*)?(?::\s*(.*?))?\s*$)");
  return re;
}

inline std::string classify_arrow(const std::string& arrow, DiagramType dt) {
  if (dt == DiagramType::Sequence) return "message";
  if (dt == DiagramType::Activity) return "flow";
  std::string a;
  bool in_bracket = false;
  for (char c : arrow) {
    if (c == '[') in_bracket = true;
    if (!in_bracket) a += c;
    if (c == ']') in_bracket = false;
  }
  const bool dotted = a.find("..") != std::string::npos || (a.find('.') != std::string::npos && a.find('-') == std::string::npos);
  if (a.find("|>") != std::string::npos || a.find("<|") != std::string::npos)
    return dotted ? "realization" : "generalization";
  if (a.front() == '*' || a.back() == '*') return "composition";
  if (a.front() == 'o' || a.back() == 'o') return "aggregation";
  if (dotted || a.find('>') != std::string::npos || a.find('<') != std::string::npos) return "dependency";
  return "association";
}

// True when an arrow points right-to-left (`B <|-- A`, `B <-- A`).
inline bool arrow_reversed(const std::string& arrow) {
  bool left = !arrow.empty() && arrow[0] == '<';
  bool right = arrow.find('>') != std::string::npos && arrow.find('>') > 0;
  return left && !right;
}

inline std::string stereotype_of(const std::string& rest) {
  static const std::regex st(R"(<<\s*([^>]*?)\s*>>)");
  std::smatch m;
  if (std::regex_search(rest, m, st)) return m[1];
  return {};
}

// Removes stereotypes and arrow decorations from a participant declaration.
inline std::string sanitize_participant(const std::string& line) {
  static const std::regex junk(R"(\s*(?:<<[^>]*>>|<?[-.]+>+|<[-.]+|\+\+|\*\*|!!))");
  std::string out;
  std::string seg;
  bool q = false;
  auto flush = [&] {
    out += std::regex_replace(seg, junk, "");
    seg.clear();
  };
  for (char c : line) {
    if (c == '"') {
      if (!q) flush();
      else {
        out += seg;
        seg.clear();
      }
      out += c;
      q = !q;
      continue;
    }
    seg += c;
  }
  if (q) out += seg;
  else flush();
  while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
  return out;
}

inline bool is_participant_decl(const std::string& t) {
  static const std::regex re(
      R"(^\s*(?:create\s+)?(participant|actor|boundary|control|entity|database|collections|queue)\b.*$)");
  return std::regex_match(t, re);
}

inline std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  bool q = false;
  int depth = 0;
  for (char c : s) {
    if (c == '"') q = !q;
    if (!q && c == '(') ++depth;
    if (!q && c == ')') --depth;
    if (!q && depth == 0 && c == ',') {
      out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

inline bool is_c4_element_macro(const std::string& m) {
  static const std::set<std::string> s = {
      "Person",       "Person_Ext",       "System",          "System_Ext",      "SystemDb",
      "SystemDb_Ext", "SystemQueue",      "SystemQueue_Ext", "Container",       "Container_Ext",
      "ContainerDb",  "ContainerDb_Ext",  "ContainerQueue",  "ContainerQueue_Ext", "Component",
      "ComponentDb",  "Component_Ext",    "Boundary",        "System_Boundary", "Enterprise_Boundary",
      "Container_Boundary", "Deployment_Node", "Node"};
  return s.count(m) > 0;
}

inline bool is_c4_rel_macro(const std::string& m) {
  static const std::regex re(R"(^(?:Bi)?Rel(?:_[A-Za-z]+)?$)");
  return std::regex_match(m, re);
}

inline const std::regex& c4_macro_re() {
  static const std::regex re(R"(^\s*([A-Za-z_]+)\s*\((.*)\)\s*(\{)?\s*$)");
  return re;
}

inline std::vector<std::string> keywords(DiagramType dt) {
  switch (dt) {
    case DiagramType::Class:
      return {"abstract class", "abstract", "class", "interface", "enum", "annotation", "entity", "struct", "exception"};
    case DiagramType::Sequence:
      return {"participant", "actor", "boundary", "control", "entity", "database", "collections", "queue"};
    case DiagramType::Component:
      return {"component", "interface", "database", "queue", "actor", "storage"};
    case DiagramType::Deployment:
      return {"node",   "database", "cloud", "artifact", "device", "component", "queue", "storage", "file",
              "card",   "stack",    "actor", "agent",    "boundary", "collections", "rectangle", "folder", "frame"};
    case DiagramType::Usecase:
      return {"actor", "usecase"};
    case DiagramType::SystemContext:
      return {"rectangle", "actor", "person", "agent", "component", "node", "database", "cloud",
              "queue",     "collections", "storage", "boundary", "frame", "folder", "package"};
    case DiagramType::Activity: return {};
  }
  return {};
}

// Containers that group elements without being elements themselves.
inline std::vector<std::string> containers(DiagramType dt) {
  switch (dt) {
    case DiagramType::Class: return {"package", "namespace", "together"};
    case DiagramType::Component: return {"package", "node", "folder", "frame", "cloud", "rectangle"};
    case DiagramType::Deployment: return {"package"};
    case DiagramType::Usecase: return {"rectangle", "package", "frame"};
    case DiagramType::Sequence: return {"box"};
    default: return {};
  }
}

inline const std::regex& decl_re(DiagramType dt) {
  static std::map<DiagramType, std::regex> cache = [] {
    std::map<DiagramType, std::regex> m;
    for (auto t : kAllDiagramTypes) {
      auto kws = keywords(t);
      if (kws.empty()) continue;
      std::string alt;
      for (const auto& k : kws) alt += (alt.empty() ? "" : "|") + std::regex_replace(k, std::regex(" "), "\\s+");
      m.emplace(t, std::regex("^\\s*(" + alt + ")\\s+(" + name_pattern() + ")(?:\\s+as\\s+(" + name_pattern() +
                              "))?(.*)$"));
    }
    return m;
  }();
  return cache.at(dt);
}

inline const std::regex& container_re() {
  static const std::regex re("^\\s*(package|namespace|together|node|folder|frame|cloud|rectangle|box)\\b\\s*(" +
                             name_pattern() + ")?(?:\\s+as\\s+(" + name_pattern() + "))?[^{]*\\{\\s*$");
  return re;
}

struct RawRel {
  std::string source, target, kind;
  std::optional<std::string> label;
};

struct Builder {
  DiagramType dt;
  std::map<std::string, Element> elements;
  std::map<std::string, std::string> alias;  // alias -> canonical
  std::vector<RawRel> rels;
  std::vector<std::string> note_targets;
  StructureFacts facts;

  void declare(const std::string& raw, const std::optional<std::string>& raw_alias, const std::string& kind,
               const std::string& stereotype, const std::optional<std::string>& parent) {
    std::string a = raw, b = raw_alias.value_or("");
    // In `X as Y`, the quoted side is the display name.
    if (raw_alias && !is_quoted(raw) && is_quoted(*raw_alias)) std::swap(a, b);
    std::string name = canon(a);
    if (dt == DiagramType::Class) name = strip_generics(name);
    if (name.empty()) return;
    if (!b.empty()) {
      std::string al = canon(b);
      if (!al.empty() && al != name) alias[al] = name;
    }
    if (elements.count(name)) return;
    Element e{name, kind, std::nullopt, parent};
    if (!stereotype.empty()) e.stereotype = stereotype;
    elements.emplace(name, std::move(e));
  }

  std::string resolve(const std::string& raw) const {
    std::string n = canon(raw);
    if (dt == DiagramType::Class) n = strip_generics(n);
    auto it = alias.find(n);
    return it == alias.end() ? n : it->second;
  }
};

inline std::string clean_label(std::string l) {
  l = trim(l);
  while (!l.empty() && (l.back() == '>' || l.back() == '<')) l.pop_back();
  while (!l.empty() && (l.front() == '>' || l.front() == '<')) l.erase(0, 1);
  return trim(l);
}

inline void parse_note_line(const std::string& t, Builder& b, const std::string& last_action) {
  static const std::regex note_of(R"(^\s*(?:h|r)?note\s+(?:left|right|top|bottom)\s+of\s+([^:]+?)\s*(?::.*)?$)",
                                  std::regex::icase);
  static const std::regex note_over(R"(^\s*(?:h|r)?note\s+over\s+([^:]+?)\s*(?::.*)?$)", std::regex::icase);
  static const std::regex note_bare(R"(^\s*(?:floating\s+)?note\s+(?:left|right|top|bottom)\s*(?::.*)?$)",
                                    std::regex::icase);
  std::smatch m;
  if (std::regex_match(t, m, note_of)) {
    b.note_targets.push_back(m[1]);
  } else if (std::regex_match(t, m, note_over)) {
    for (auto& x : split_args(m[1])) b.note_targets.push_back(x);
  } else if (std::regex_match(t, m, note_bare) && !last_action.empty()) {
    b.note_targets.push_back("\"" + last_action + "\"");
  }
}

inline void parse_activity(const std::vector<std::string>& lines, const std::vector<LineClass>& cls, Builder& b) {
  struct Frame {
    enum Kind { If, Fork, While, Repeat } kind;
    std::string node;
    std::vector<std::string> ends;
    bool has_else = false;
  };
  std::vector<Frame> stack;
  std::vector<std::string> prev;
  std::optional<std::string> pending_label;
  std::string last_action;
  int forks = 0;

  auto connect = [&](const std::string& node) {
    for (const auto& p : prev) b.rels.push_back({p, node, "flow", pending_label});
    pending_label.reset();
  };
  auto node = [&](const std::string& name, const std::string& kind) {
    if (!b.elements.count(name)) b.elements.emplace(name, Element{name, kind, std::nullopt, std::nullopt});
    connect(name);
  };
  static const std::regex if_re(R"(^if\s*\((.*?)\)\s*(?:(?:then|is|equals)\b.*)?$)", std::regex::icase);
  static const std::regex elseif_re(R"(^(?:elseif|else\s+if)\s*\(.*$)", std::regex::icase);
  static const std::regex else_re(R"(^else\b.*$)", std::regex::icase);
  static const std::regex endif_re(R"(^(?:endif|end\s+if)\b.*$)", std::regex::icase);
  static const std::regex while_re(R"(^while\s*\((.*?)\)\s*(?:(?:is)\b.*)?$)", std::regex::icase);
  static const std::regex endwhile_re(R"(^(?:endwhile|end\s+while)\b.*$)", std::regex::icase);
  static const std::regex repeat_while_re(R"(^repeat\s+while\b.*$)", std::regex::icase);
  static const std::regex label_re(R"(^->\s*(.*?);?\s*$)");

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (cls[i] != LineClass::Code) continue;
    std::string t = trim(lines[i]);
    if (t[0] == ':') {
      // Action, possibly spanning lines until a terminator.
      std::string text = t.substr(1);
      auto terminated = [](const std::string& s) {
        return !s.empty() && std::string_view(";|<>/]}").find(s.back()) != std::string_view::npos;
      };
      while (!terminated(trim(text)) && i + 1 < lines.size()) {
        ++i;
        text += " " + trim(lines[i]);
      }
      text = trim(text);
      if (terminated(text)) text.pop_back();
      std::string name = canon(text);
      if (name.empty()) continue;
      node(name, "action");
      prev = {name};
      last_action = name;
      continue;
    }
    std::string l = lower(t);
    std::smatch m;
    if (l == "start") {
      b.facts.has_start = true;
      continue;
    }
    if (l == "stop" || l == "end") {
      b.facts.has_stop = true;
      prev.clear();
      continue;
    }
    if (l == "kill" || l == "detach") {
      prev.clear();
      continue;
    }
    if (std::regex_match(t, m, elseif_re)) {
      if (!stack.empty() && stack.back().kind == Frame::If) {
        auto& f = stack.back();
        f.ends.insert(f.ends.end(), prev.begin(), prev.end());
        prev = {f.node};
      }
      continue;
    }
    if (std::regex_match(t, m, if_re)) {
      ++b.facts.ifs_opened;
      std::string name = canon(m[1]);
      if (name.empty()) name = "if#" + std::to_string(b.facts.ifs_opened);
      node(name, "decision");
      stack.push_back({Frame::If, name, {}, false});
      prev = {name};
      continue;
    }
    if (std::regex_match(t, m, endif_re)) {
      if (!stack.empty() && stack.back().kind == Frame::If) {
        ++b.facts.ifs_closed;
        auto f = stack.back();
        stack.pop_back();
        f.ends.insert(f.ends.end(), prev.begin(), prev.end());
        if (!f.has_else) f.ends.push_back(f.node);
        std::sort(f.ends.begin(), f.ends.end());
        f.ends.erase(std::unique(f.ends.begin(), f.ends.end()), f.ends.end());
        prev = f.ends;
      }
      continue;
    }
    if (std::regex_match(t, m, else_re)) {
      if (!stack.empty() && stack.back().kind == Frame::If) {
        auto& f = stack.back();
        f.ends.insert(f.ends.end(), prev.begin(), prev.end());
        f.has_else = true;
        prev = {f.node};
      }
      continue;
    }
    if (l == "fork" || l == "split") {
      std::string name = "fork#" + std::to_string(++forks);
      node(name, "fork");
      stack.push_back({Frame::Fork, name, {}, false});
      prev = {name};
      continue;
    }
    if (l == "fork again" || l == "split again") {
      if (!stack.empty() && stack.back().kind == Frame::Fork) {
        auto& f = stack.back();
        f.ends.insert(f.ends.end(), prev.begin(), prev.end());
        prev = {f.node};
      }
      continue;
    }
    if (l.rfind("end fork", 0) == 0 || l.rfind("end merge", 0) == 0 || l == "end split") {
      if (!stack.empty() && stack.back().kind == Frame::Fork) {
        auto f = stack.back();
        stack.pop_back();
        f.ends.insert(f.ends.end(), prev.begin(), prev.end());
        prev = f.ends;
      }
      continue;
    }
    if (std::regex_match(t, m, while_re)) {
      std::string name = canon(m[1]);
      if (name.empty()) name = "while";
      node(name, "decision");
      stack.push_back({Frame::While, name, {}, false});
      prev = {name};
      continue;
    }
    if (std::regex_match(t, m, endwhile_re)) {
      if (!stack.empty() && stack.back().kind == Frame::While) {
        auto f = stack.back();
        stack.pop_back();
        connect(f.node);
        prev = {f.node};
      }
      continue;
    }
    if (std::regex_match(t, m, repeat_while_re)) {
      if (!stack.empty() && stack.back().kind == Frame::Repeat) stack.pop_back();
      continue;
    }
    if (l == "repeat") {
      stack.push_back({Frame::Repeat, "", {}, false});
      continue;
    }
    if (std::regex_match(t, m, label_re)) {
      std::string lab = trim(m[1].str());
      if (!lab.empty()) pending_label = lab;
      continue;
    }
    if (starts_with_ci(t, "note") || starts_with_ci(t, "floating note")) parse_note_line(t, b, last_action);
  }
}

inline void parse_structural(const std::vector<std::string>& lines, const std::vector<LineClass>& cls, Builder& b) {
  const DiagramType dt = b.dt;
  const auto cont_kws = containers(dt);
  std::vector<std::optional<std::string>> parents;  // container stack
  int member_depth = 0;                             // inside a class body
  bool in_skinparam = false;
  static const std::regex activate_re(R"(^\s*activate\s+.*$)", std::regex::icase);
  static const std::regex usecase_short(R"(^\s*(\([^)]+\)|:[^:\s][^:]*:)(?:\s+as\s+()" + name_pattern() +
                                        R"())?\s*(<<[^>]*>>)?\s*$)");
  auto current_parent = [&]() -> std::optional<std::string> {
    for (auto it = parents.rbegin(); it != parents.rend(); ++it)
      if (*it) return *it;
    return std::nullopt;
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (cls[i] != LineClass::Code) continue;
    std::string t = trim(lines[i]);
    if (in_skinparam) {
      if (t.find('}') != std::string::npos) in_skinparam = false;
      continue;
    }
    if (member_depth > 0) {
      for (char c : without_quoted(t)) {
        if (c == '{') ++member_depth;
        if (c == '}') --member_depth;
      }
      if (member_depth < 0) member_depth = 0;
      continue;
    }
    std::string l = lower(t);
    if (l.rfind("skinparam", 0) == 0) {
      if (t.back() == '{') in_skinparam = true;
      continue;
    }
    if (t[0] == '!' || l.rfind("title", 0) == 0 || l.rfind("hide ", 0) == 0 || l.rfind("show ", 0) == 0 ||
        l.rfind("left to right", 0) == 0 || l.rfind("top to bottom", 0) == 0 || l.rfind("autonumber", 0) == 0)
      continue;
    if (t == "}") {
      if (!parents.empty()) parents.pop_back();
      continue;
    }
    if (starts_with_ci(t, "note") || starts_with_ci(t, "hnote") || starts_with_ci(t, "rnote") ||
        starts_with_ci(t, "floating note")) {
      parse_note_line(t, b, "");
      continue;
    }
    std::smatch m;
    if (dt == DiagramType::Sequence && std::regex_match(t, activate_re)) {
      ++b.facts.activations;
      continue;
    }

    // C4 macros.
    if (std::regex_match(t, m, c4_macro_re())) {
      std::string macro = m[1];
      auto args = split_args(m[2]);
      if (is_c4_element_macro(macro) && !args.empty()) {
        std::optional<std::string> alias_raw = args[0];
        std::string name_raw = args.size() > 1 ? args[1] : args[0];
        if (args.size() <= 1) alias_raw.reset();
        b.declare(name_raw.front() == '"' ? name_raw : "\"" + name_raw + "\"", alias_raw, macro, "", current_parent());
        if (m[3].matched) parents.push_back(canon(name_raw));
        continue;
      }
      if (is_c4_rel_macro(macro) && args.size() >= 2) {
        std::optional<std::string> lab;
        if (args.size() > 2 && !canon(args[2]).empty()) lab = canon(args[2]);
        b.rels.push_back({args[0], args[1], "dependency", lab});
        continue;
      }
    }

    std::string decl_line = dt == DiagramType::Sequence && is_participant_decl(t) ? sanitize_participant(t) : t;
    if (std::regex_match(decl_line, m, decl_re(dt))) {
      std::string kind = std::regex_replace(lower(m[1].str()), std::regex("\\s+"), " ");
      std::string rest = m[4];
      std::optional<std::string> al;
      if (m[3].matched) al = m[3].str();
      b.declare(m[2], al, kind, stereotype_of(rest), current_parent());
      std::string rest_nq = without_quoted(rest);
      const bool opens = rest_nq.find('{') != std::string::npos &&
                         std::count(rest_nq.begin(), rest_nq.end(), '{') > std::count(rest_nq.begin(), rest_nq.end(), '}');
      if (opens) {
        if (dt == DiagramType::Class) member_depth = 1;
        else parents.push_back(b.resolve(m[2]));
      }
      if (dt == DiagramType::Sequence && rest.find("++") != std::string::npos) ++b.facts.activations;
      continue;
    }
    if (std::regex_match(t, m, container_re())) {
      std::string kw = lower(m[1].str());
      bool is_cont = std::find(cont_kws.begin(), cont_kws.end(), kw) != cont_kws.end();
      parents.push_back(is_cont && m[2].matched ? std::optional<std::string>(canon(m[2])) : std::nullopt);
      continue;
    }
    if ((dt == DiagramType::Component) && t[0] == '[') {
      static const std::regex comp_short("^\\s*(\\[[^\\]]+\\])(?:\\s+as\\s+(" + name_pattern() + "))?\\s*(<<[^>]*>>)?\\s*$");
      if (std::regex_match(t, m, comp_short)) {
        std::optional<std::string> al;
        if (m[2].matched) al = m[2].str();
        b.declare(m[1], al, "component", m[3].matched ? stereotype_of(m[3]) : "", current_parent());
        continue;
      }
    }
    if (dt == DiagramType::Usecase && std::regex_match(t, m, usecase_short)) {
      std::optional<std::string> al;
      if (m[2].matched) al = m[2].str();
      std::string raw = m[1];
      b.declare(raw, al, raw[0] == ':' ? "actor" : "usecase", m[3].matched ? stereotype_of(m[3]) : "",
                current_parent());
      continue;
    }
    if (std::regex_match(t, m, relationship_re())) {
      std::string lhs = m[1], arrow = m[2], rhs = m[3];
      std::optional<std::string> lab;
      if (m[4].matched && !clean_label(m[4]).empty()) lab = clean_label(m[4]);
      // Bracketed components and parenthesized use cases/actors declare
      // themselves where they appear.
      for (const auto& side : {lhs, rhs}) {
        if (dt == DiagramType::Component && side[0] == '[') b.declare(side, std::nullopt, "component", "", current_parent());
        if (dt == DiagramType::Usecase && side[0] == '(') b.declare(side, std::nullopt, "usecase", "", current_parent());
        if (dt == DiagramType::Usecase && side[0] == ':') b.declare(side, std::nullopt, "actor", "", current_parent());
      }
      if (arrow_reversed(arrow)) std::swap(lhs, rhs);
      b.rels.push_back({lhs, rhs, classify_arrow(arrow, dt), lab});
      if (dt == DiagramType::Sequence) {
        std::string tail = t.substr(0, t.find(':'));
        if (tail.find("++") != std::string::npos) ++b.facts.activations;
      }
      continue;
    }
    if (t.back() == '{') parents.push_back(std::nullopt);  // unrecognized group
  }
}

}  // namespace detail

inline DiagramArtifact parse_artifact(std::string_view text, DiagramType dt,
                                      std::optional<std::string> scope = std::nullopt) {
  DiagramArtifact a;
  a.diagram_type = dt;
  a.text = std::string(text);
  a.scope = std::move(scope);
  const auto lines = detail::split_lines(text);
  const auto cls = detail::classify(lines);
  detail::Builder b{dt, {}, {}, {}, {}, {}};
  if (dt == DiagramType::Activity) detail::parse_activity(lines, cls, b);
  else detail::parse_structural(lines, cls, b);

  a.elements = std::move(b.elements);
  for (auto& r : b.rels) {
    Relationship rel{dt == DiagramType::Activity ? r.source : b.resolve(r.source),
                     dt == DiagramType::Activity ? r.target : b.resolve(r.target), r.kind, r.label};
    if (rel.source.empty() || rel.target.empty()) continue;
    a.relationships.push_back(std::move(rel));
  }
  for (auto& e : a.elements)
    if (e.second.parent) e.second.parent = b.resolve(*e.second.parent);
  a.facts = b.facts;
  for (const auto& n : b.note_targets) {
    std::string r = b.resolve(n);
    if (a.elements.count(r)) a.facts.noted.insert(r);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Lint rules

enum class FixAction { None, Rewrite, DeleteLine, InsertDelimiter, Balance };

struct LintRule {
  std::string id;
  std::vector<DiagramType> applies_to;  // empty: all types
  std::string description;
  FixAction fix = FixAction::None;
  bool correctable = true;

  bool applies(DiagramType dt) const {
    return applies_to.empty() || std::find(applies_to.begin(), applies_to.end(), dt) != applies_to.end();
  }
};

inline const std::vector<LintRule>& lint_rules() {
  static const std::vector<LintRule> rules = {
      {"extension:markdown-fence", {}, "markdown code fence around the diagram", FixAction::DeleteLine, true},
      {"R1", {}, "missing or misplaced @startuml/@enduml delimiters", FixAction::InsertDelimiter, true},
      {"R2", {}, "unbalanced braces", FixAction::Balance, true},
      {"R3", {}, "skinparam linetype ortho", FixAction::DeleteLine, true},
      {"R4", {DiagramType::Activity}, "continue keyword in activity diagram", FixAction::DeleteLine, true},
      {"R5", {DiagramType::Activity}, "'else if' instead of 'elseif'", FixAction::Rewrite, true},
      {"R6", {DiagramType::Deployment}, "'device' keyword instead of 'node'", FixAction::Rewrite, true},
      {"R7", {DiagramType::Sequence}, "stereotype or arrow modifier in participant declaration", FixAction::Rewrite, true},
      {"R8", {}, "placeholder element name", FixAction::None, false},
      {"R9", {DiagramType::SystemContext}, "C4-style construct outside the supported subset", FixAction::None, false},
  };
  return rules;
}

inline const LintRule& lint_rule(std::string_view id) {
  for (const auto& r : lint_rules())
    if (r.id == id) return r;
  throw std::out_of_range("unknown lint rule " + std::string(id));
}

struct LintOptions {
  std::vector<std::string> placeholder_names = {"Foo", "Bar", "TODO", "Placeholder", "Example"};
};

enum class Verdict { Valid, Corrected, Uncorrectable };

inline constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "valid";
    case Verdict::Corrected: return "corrected";
    case Verdict::Uncorrectable: return "uncorrectable";
  }
  return "valid";
}

inline std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "valid") return Verdict::Valid;
  if (s == "corrected") return Verdict::Corrected;
  if (s == "uncorrectable") return Verdict::Uncorrectable;
  return std::nullopt;
}

struct Violation {
  std::string rule;
  int line = 0;  // 1-based; 0 when not tied to a line
  std::string excerpt;

  bool operator==(const Violation&) const = default;
};

struct LintReport {
  std::vector<Violation> violations;
  int fixes_applied = 0;
  bool uncorrectable = false;
  Verdict verdict = Verdict::Valid;

  json to_json() const {
    json v = json::array();
    for (const auto& x : violations) v.push_back({{"rule", x.rule}, {"line", x.line}, {"excerpt", x.excerpt}});
    return json{{"violations", v},
                {"fixes_applied", fixes_applied},
                {"uncorrectable", uncorrectable},
                {"verdict", std::string(to_string(verdict))}};
  }

  static LintReport from_json(const json& j) {
    LintReport r;
    for (const auto& v : j.at("violations"))
      r.violations.push_back({v.at("rule").get<std::string>(), v.at("line").get<int>(), v.at("excerpt").get<std::string>()});
    r.fixes_applied = j.at("fixes_applied").get<int>();
    r.uncorrectable = j.at("uncorrectable").get<bool>();
    r.verdict = parse_verdict(j.at("verdict").get<std::string>()).value_or(Verdict::Valid);
    return r;
  }
};

namespace detail {

inline std::string excerpt(const std::string& line) {
  std::string t = trim(line);
  if (t.size() > 120) t = t.substr(0, 117) + "...";
  return t;
}

inline bool is_delimiter_valid(const std::vector<std::string>& lines, const std::vector<LineClass>& cls) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (cls[i] != LineClass::Blank) idx.push_back(i);
  if (idx.size() < 2) return false;
  int starts = 0, ends = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (cls[i] != LineClass::Delimiter) continue;
    if (starts_with_ci(trim(lines[i]), "@startuml")) ++starts;
    else ++ends;
  }
  return starts == 1 && ends == 1 && starts_with_ci(trim(lines[idx.front()]), "@startuml") &&
         starts_with_ci(trim(lines[idx.back()]), "@enduml");
}

// Lines that take part in brace counting.
inline bool counts_braces(const std::string& t, DiagramType dt) {
  if (t.empty()) return false;
  if (dt == DiagramType::Activity && t[0] == ':') return false;
  return true;
}

struct BraceScan {
  std::vector<std::pair<std::size_t, std::size_t>> dangling;  // (line, column) of unmatched '}'
  int unclosed = 0;
  std::size_t last_open_line = 0;
};

inline BraceScan scan_braces(const std::vector<std::string>& lines, const std::vector<LineClass>& cls,
                             DiagramType dt) {
  BraceScan s;
  int depth = 0;
  bool in_action = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (cls[i] != LineClass::Code) continue;
    std::string t = trim(lines[i]);
    if (dt == DiagramType::Activity) {
      // Multi-line actions run until a terminator.
      auto terminated = [](const std::string& x) {
        return !x.empty() && std::string_view(";|<>/]}").find(x.back()) != std::string_view::npos;
      };
      if (in_action) {
        if (terminated(t)) in_action = false;
        continue;
      }
      if (t[0] == ':') {
        if (!terminated(t)) in_action = true;
        continue;
      }
    }
    if (!counts_braces(t, dt)) continue;
    bool q = false;
    const std::string& raw = lines[i];
    for (std::size_t c = 0; c < raw.size(); ++c) {
      if (raw[c] == '"') q = !q;
      if (q) continue;
      if (raw[c] == '{') {
        ++depth;
        s.last_open_line = i;
      } else if (raw[c] == '}') {
        if (depth == 0) s.dangling.push_back({i, c});
        else --depth;
      }
    }
  }
  s.unclosed = depth;
  return s;
}

inline bool is_c4_construct(const std::string& t) {
  static const std::regex inc(R"(^\s*!include.*C4.*$)", std::regex::icase);
  if (std::regex_match(t, inc)) return true;
  std::smatch m;
  if (std::regex_match(t, m, c4_macro_re())) {
    std::string macro = m[1];
    if (is_c4_element_macro(macro) || is_c4_rel_macro(macro) || macro.rfind("Lay_", 0) == 0 ||
        macro.rfind("LAYOUT_", 0) == 0 || macro == "SHOW_LEGEND" || macro.rfind("AddElementTag", 0) == 0 ||
        macro.rfind("AddRelTag", 0) == 0 || macro.rfind("UpdateElementStyle", 0) == 0)
      return true;
  }
  std::string nq = without_quoted(t);
  if (nq.find("<<") == std::string::npos) return false;
  static const std::regex rect(R"(^\s*rectangle\b.*$)");
  if (!std::regex_match(t, rect)) return true;  // stereotype on a non-rectangle construct
  return nq.find('{') != std::string::npos;     // stereotyped rectangle block
}

}  // namespace detail

inline LintReport lint_text(std::string_view text, DiagramType dt, const LintOptions& opt = {}) {
  LintReport rep;
  const auto lines = detail::split_lines(text);
  const auto cls = detail::classify(lines);
  auto add = [&](const char* rule, std::size_t i) {
    rep.violations.push_back({rule, static_cast<int>(i + 1), i < lines.size() ? detail::excerpt(lines[i]) : ""});
  };

  for (std::size_t i = 0; i < lines.size(); ++i)
    if (cls[i] == detail::LineClass::Fence) add("extension:markdown-fence", i);

  if (!detail::is_delimiter_valid(lines, cls)) {
    std::size_t at = 0;
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (cls[i] != detail::LineClass::Blank) {
        at = i;
        break;
      }
    if (lines.empty()) rep.violations.push_back({"R1", 0, ""});
    else add("R1", at);
  }

  auto braces = detail::scan_braces(lines, cls, dt);
  for (const auto& [li, col] : braces.dangling) add("R2", li);
  if (braces.unclosed > 0) add("R2", braces.last_open_line);

  static const std::regex ortho(R"(^\s*skinparam\s+linetype\s+ortho\s*$)", std::regex::icase);
  static const std::regex cont(R"(^\s*continue\s*;?\s*$)");
  static const std::regex else_if(R"(^\s*else\s+if\b.*$)");
  static const std::regex device(R"(^\s*device\b.*$)");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (cls[i] != detail::LineClass::Code) continue;
    const std::string& l = lines[i];
    if (std::regex_match(l, ortho)) add("R3", i);
    if (dt == DiagramType::Activity && std::regex_match(l, cont)) add("R4", i);
    if (dt == DiagramType::Activity && std::regex_match(l, else_if)) add("R5", i);
    if (dt == DiagramType::Deployment && std::regex_match(l, device)) add("R6", i);
    if (dt == DiagramType::Sequence && detail::is_participant_decl(l) &&
        detail::trim(detail::sanitize_participant(l)) != detail::trim(l))
      add("R7", i);
    if (dt == DiagramType::SystemContext && detail::is_c4_construct(l)) add("R9", i);
  }

  DiagramArtifact parsed = parse_artifact(text, dt);
  std::set<std::string> placeholders;
  for (const auto& p : opt.placeholder_names) placeholders.insert(detail::lower(p));
  for (const auto& [name, _] : parsed.elements) {
    if (!placeholders.count(detail::lower(name))) continue;
    std::size_t at = 0;
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (cls[i] == detail::LineClass::Code && lines[i].find(name) != std::string::npos) {
        at = i;
        break;
      }
    add("R8", at);
  }

  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.line < b.line; });
  for (const auto& v : rep.violations)
    if (!lint_rule(v.rule).correctable) rep.uncorrectable = true;
  rep.verdict = rep.violations.empty() ? Verdict::Valid : rep.uncorrectable ? Verdict::Uncorrectable : Verdict::Corrected;
  return rep;
}

inline LintReport lint(const DiagramArtifact& a, const LintOptions& opt = {}) {
  return lint_text(a.text, a.diagram_type, opt);
}

class UncorrectableError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Applies every correctable fix whose detector fires. Each fix is a no-op on
// text its detector accepts, so the operation is idempotent.
inline std::string fix_text(std::string_view text, DiagramType dt) {
  using detail::LineClass;
  auto lines = detail::split_lines(text);
  auto cls = detail::classify(lines);

  auto rebuild = [&](auto&& keep_or_rewrite) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::optional<std::string> r = keep_or_rewrite(i);
      if (r) out.push_back(*r);
    }
    lines = std::move(out);
    cls = detail::classify(lines);
  };

  static const std::regex ortho(R"(^\s*skinparam\s+linetype\s+ortho\s*$)", std::regex::icase);
  static const std::regex cont(R"(^\s*continue\s*;?\s*$)");
  static const std::regex else_if(R"(^(\s*)else\s+if\b)");
  static const std::regex device(R"(^(\s*)device\b)");

  rebuild([&](std::size_t i) -> std::optional<std::string> {
    const std::string& l = lines[i];
    if (cls[i] == LineClass::Fence) return std::nullopt;
    if (cls[i] != LineClass::Code) return l;
    if (std::regex_match(l, ortho)) return std::nullopt;
    if (dt == DiagramType::Activity && std::regex_match(l, cont)) return std::nullopt;
    if (dt == DiagramType::Activity) return std::regex_replace(l, else_if, "$1elseif", std::regex_constants::format_first_only);
    if (dt == DiagramType::Deployment) return std::regex_replace(l, device, "$1node", std::regex_constants::format_first_only);
    if (dt == DiagramType::Sequence && detail::is_participant_decl(l)) {
      std::string s = detail::sanitize_participant(l);
      if (detail::trim(s) != detail::trim(l)) return s;
    }
    return l;
  });

  if (!detail::is_delimiter_valid(lines, cls)) {
    std::string start = "@startuml";
    std::vector<std::string> body;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (cls[i] == LineClass::Delimiter) {
        if (detail::starts_with_ci(detail::trim(lines[i]), "@startuml") && start == "@startuml")
          start = detail::trim(lines[i]);
        continue;
      }
      body.push_back(lines[i]);
    }
    while (!body.empty() && detail::trim(body.front()).empty()) body.erase(body.begin());
    while (!body.empty() && detail::trim(body.back()).empty()) body.pop_back();
    lines.clear();
    lines.push_back(start);
    lines.insert(lines.end(), body.begin(), body.end());
    lines.push_back("@enduml");
    cls = detail::classify(lines);
  }

  auto braces = detail::scan_braces(lines, cls, dt);
  if (!braces.dangling.empty() || braces.unclosed > 0) {
    // Remove dangling closers right to left so columns stay valid.
    std::set<std::size_t> drop_lines;
    for (auto it = braces.dangling.rbegin(); it != braces.dangling.rend(); ++it) {
      auto [li, col] = *it;
      if (detail::trim(lines[li]) == "}") drop_lines.insert(li);
      else lines[li].erase(col, 1);
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (!drop_lines.count(i)) out.push_back(lines[i]);
    lines = std::move(out);
    if (braces.unclosed > 0) {
      std::size_t end = lines.size();
      for (std::size_t i = lines.size(); i-- > 0;)
        if (detail::starts_with_ci(detail::trim(lines[i]), "@enduml")) {
          end = i;
          break;
        }
      lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(end), static_cast<std::size_t>(braces.unclosed), "}");
    }
  }
  return detail::join_lines(lines);
}

inline DiagramArtifact apply_fixes(const DiagramArtifact& a, const LintReport& report) {
  if (report.uncorrectable) throw UncorrectableError("apply_fixes called on an uncorrectable report");
  if (report.violations.empty()) return a;
  return parse_artifact(fix_text(a.text, a.diagram_type), a.diagram_type, a.scope);
}

struct LintOutcome {
  LintReport report;  // pre-fix verdict; fixes_applied counts correctable violations fixed
  std::string text;   // fixed text, or the input when valid/uncorrectable
  LintReport final_report;
};

inline LintOutcome lint_and_fix(std::string_view text, DiagramType dt, const LintOptions& opt = {}) {
  LintOutcome out;
  out.report = lint_text(text, dt, opt);
  out.text = std::string(text);
  if (out.report.verdict == Verdict::Corrected) {
    out.text = fix_text(text, dt);
    out.report.fixes_applied = static_cast<int>(out.report.violations.size());
  }
  out.final_report = out.report.verdict == Verdict::Corrected ? lint_text(out.text, dt, opt) : out.report;
  return out;
}

}  // namespace c2u::puml
