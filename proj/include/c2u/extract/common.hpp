#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/extract/lexer.hpp"
#include "c2u/ir.hpp"

namespace c2u::extract {

// Structure recovered from one source file. `had_errors` is set when the
// file did not parse cleanly; whatever was recovered is still reported.
struct FileResult {
  std::vector<ClassDef> classes;
  std::vector<FunctionDef> functions;
  bool had_errors = false;
};

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual std::string language() const = 0;
  virtual std::vector<std::string> extensions() const = 0;
  virtual FileResult extract_file(std::string_view source, const std::string& rel_path) const = 0;
};

inline bool is_call_keyword(std::string_view name) {
  static const std::set<std::string, std::less<>> kw = {
      "if",     "for",     "while",   "switch",  "catch",   "return",   "function", "typeof",
      "sizeof", "synchronized", "super", "this",  "foreach", "elseif",   "isset",    "empty",
      "unset",  "list",    "array",   "echo",    "print",   "match",    "fn",       "new",
      "import", "require", "include", "require_once", "include_once", "await", "yield",
      "assert", "throw",   "do",      "else",    "try",     "finally",  "with",     "exit",
      "die",    "declare", "instanceof", "in",   "of",      "case",     "void",     "delete",
      "and",    "or",      "not",     "lambda",  "del",     "except",   "elif",     "def",
      "class",  "constructor"};
  return kw.count(name) > 0;
}

inline void add_unique(std::vector<std::string>& list, std::string value) {
  for (const auto& v : list)
    if (v == value) return;
  list.push_back(std::move(value));
}

// Callee names in tokens [begin, end): an identifier directly followed by `(`
// (or the class after `new`). Variables (`$x(...)`) are not callees.
inline std::vector<std::string> collect_calls(const std::vector<Token>& toks, std::size_t begin,
                                              std::size_t end) {
  std::vector<std::string> calls;
  for (std::size_t i = begin; i + 1 < end && i + 1 < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind != TokKind::Ident || toks[i + 1].text != "(") continue;
    if (t.text.empty() || t.text[0] == '$') continue;
    bool after_new = i > 0 && toks[i - 1].text == "new";
    if (!after_new && is_call_keyword(t.text)) continue;
    std::string name = t.text;
    if (!name.empty() && name[0] == '#') name.erase(0, 1);
    add_unique(calls, std::move(name));
  }
  return calls;
}

inline std::string join_tokens(const std::vector<Token>& toks, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < toks.size(); ++i) {
    const std::string& t = toks[i].text;
    bool glue = out.empty() || t == "." || t == "<" || t == ">" || t == "," || t == "[" || t == "]" ||
                t == "\\" || t == "?" || t == "::" || out.back() == '.' || out.back() == '<' ||
                out.back() == '\\' || out.back() == '?' || out.back() == '[';
    if (!glue) out += ' ';
    if (t == "," && !out.empty()) {
      out += ", ";
      continue;
    }
    out += t;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

// Splits tokens [begin, end) at depth-0 commas. Angle brackets count as
// nesting so `Map<K, V> m` stays one piece.
inline std::vector<std::pair<std::size_t, std::size_t>> split_commas(const std::vector<Token>& toks,
                                                                     std::size_t begin, std::size_t end,
                                                                     bool angle_nesting) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  int depth = 0;
  std::size_t start = begin;
  for (std::size_t i = begin; i < end && i < toks.size(); ++i) {
    const std::string& t = toks[i].text;
    if (toks[i].kind != TokKind::Punct) continue;
    if (t == "(" || t == "[" || t == "{" || (angle_nesting && t == "<")) ++depth;
    else if (t == ")" || t == "]" || t == "}" || (angle_nesting && t == ">")) --depth;
    else if (t == "," && depth == 0) {
      out.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (start < end) out.emplace_back(start, end);
  return out;
}

}  // namespace c2u::extract
