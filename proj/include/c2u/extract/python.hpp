#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/extract/common.hpp"

namespace c2u::extract {

// Indentation-structured scanner. Source is first folded into logical lines
// (bracket and backslash continuations joined, string bodies blanked,
// comments dropped), then block structure is recovered from indentation.
class PythonExtractor final : public Extractor {
 public:
  std::string language() const override { return "python"; }
  std::vector<std::string> extensions() const override { return {".py"}; }

  struct LogicalLine {
    int indent = 0;
    std::string text;
    int first_line = 0;
    int last_line = 0;
  };

  struct Folded {
    std::vector<LogicalLine> lines;
    int errors = 0;
  };

  static Folded fold(std::string_view src) {
    Folded out;
    LogicalLine cur;
    int line = 1;
    int depth = 0;
    bool at_line_start = true;
    int indent = 0;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto flush = [&] {
      std::size_t a = cur.text.find_first_not_of(" \t");
      if (a != std::string::npos) {
        cur.text = cur.text.substr(a);
        while (!cur.text.empty() && (cur.text.back() == ' ' || cur.text.back() == '\t')) cur.text.pop_back();
        cur.last_line = line;
        out.lines.push_back(cur);
      }
      cur = LogicalLine{};
      at_line_start = true;
      indent = 0;
    };

    while (i < n) {
      char c = src[i];
      if (at_line_start) {
        if (c == ' ') {
          ++indent;
          ++i;
          continue;
        }
        if (c == '\t') {
          indent += 8 - indent % 8;
          ++i;
          continue;
        }
        at_line_start = false;
        cur.indent = indent;
        cur.first_line = line;
      }
      if (c == '#') {
        while (i < n && src[i] != '\n') ++i;
        continue;
      }
      if (c == '\\' && i + 1 < n && src[i + 1] == '\n') {
        cur.text += ' ';
        i += 2;
        ++line;
        continue;
      }
      if (c == '\n') {
        ++i;
        if (depth > 0) {
          cur.text += ' ';
          ++line;
          continue;
        }
        flush();
        ++line;
        continue;
      }
      if (c == '"' || c == '\'') {
        bool triple = i + 2 < n && src[i + 1] == c && src[i + 2] == c;
        if (triple) {
          std::string_view delim = src.substr(i, 3);
          auto end = src.find(delim, i + 3);
          std::size_t stop = end == std::string_view::npos ? n : end + 3;
          for (std::size_t k = i; k < stop; ++k) line += src[k] == '\n';
          if (end == std::string_view::npos) ++out.errors;
          i = stop;
        } else {
          ++i;
          while (i < n && src[i] != c && src[i] != '\n') {
            if (src[i] == '\\' && i + 1 < n) ++i;
            ++i;
          }
          if (i < n && src[i] == c) ++i;
          else ++out.errors;
        }
        cur.text += "\"\"";
        continue;
      }
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') {
        if (depth == 0) ++out.errors;
        else --depth;
      }
      cur.text += c;
      ++i;
    }
    if (depth > 0) ++out.errors;
    flush();
    return out;
  }

  // Base-class expressions of a class header; keyword arguments
  // (`metaclass=...`) and subscripts (`Generic[T]`) are dropped.
  static std::vector<std::string> split_bases(const std::string& text) {
    std::vector<std::string> out;
    int depth = 0;
    std::string piece;
    auto flush = [&] {
      std::size_t a = piece.find_first_not_of(" \t");
      std::size_t b = piece.find_last_not_of(" \t");
      std::string v = a == std::string::npos ? std::string() : piece.substr(a, b - a + 1);
      if (!v.empty() && v.find('=') == std::string::npos && v[0] != '*') out.push_back(v);
      piece.clear();
    };
    for (char ch : text) {
      if (ch == '(' || ch == '[' || ch == '{') ++depth;
      else if (ch == ')' || ch == ']' || ch == '}') --depth;
      else if (ch == ',' && depth == 0) {
        flush();
        continue;
      }
      if (depth == 0 && ch != ']' && ch != ')' && ch != '}') piece += ch;
    }
    flush();
    return out;
  }

  FileResult extract_file(std::string_view source, const std::string& rel_path) const override {
    Folded folded = fold(source);
    FileResult out;
    int errors = folded.errors;

    static const std::regex class_re(R"(^class\s+([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*:(.*)$)");
    static const std::regex def_re(R"(^(?:async\s+)?def\s+([A-Za-z_]\w*)\s*\((.*)\)\s*(?:->\s*(.*?))?\s*:(.*)$)");
    static const std::regex header_re(R"(^(?:async\s+)?(?:class|def)\b)");
    static const std::regex call_re(R"(([A-Za-z_]\w*)\s*\()");
    static const std::regex self_attr_re(R"(\bself\.([A-Za-z_]\w*)\s*(?::[^=]*)?=(?!=))");
    static const std::regex class_attr_re(R"(^([A-Za-z_]\w*)\s*(?::\s*([^=]+?))?\s*(?:=(?!=).*)?$)");

    enum class Kind { Class, Function, Method, Other };
    struct Frame {
      int indent;
      Kind kind;
      std::size_t index;  // into out.classes / out.functions; method: class index
      std::size_t method = 0;
      int start_line = 0;
      int end_line = 0;
    };
    std::vector<Frame> stack;

    auto close_frame = [&](const Frame& f) {
      if (f.kind == Kind::Function) out.functions[f.index].line_count = f.end_line - f.start_line + 1;
    };
    auto innermost = [&](Kind k) -> Frame* {
      for (auto it = stack.rbegin(); it != stack.rend(); ++it)
        if (it->kind == k) return &*it;
      return nullptr;
    };

    auto record_calls = [&](const std::string& text) {
      // Attribute calls inside the innermost function or method frame.
      Frame* fn = nullptr;
      for (auto it = stack.rbegin(); it != stack.rend(); ++it)
        if (it->kind == Kind::Function || it->kind == Kind::Method) {
          fn = &*it;
          break;
        }
      if (!fn) return;
      std::vector<std::string>& calls =
          fn->kind == Kind::Function ? out.functions[fn->index].calls : out.classes[fn->index].methods[fn->method].calls;
      for (std::sregex_iterator it(text.begin(), text.end(), call_re), end; it != end; ++it) {
        std::string name = (*it)[1];
        if (!is_call_keyword(name)) add_unique(calls, name);
      }
    };

    auto parse_params = [](const std::string& text, bool drop_self) {
      std::vector<Parameter> ps;
      int depth = 0;
      std::string piece;
      std::vector<std::string> pieces;
      for (char ch : text) {
        if (ch == '(' || ch == '[' || ch == '{') ++depth;
        if (ch == ')' || ch == ']' || ch == '}') --depth;
        if (ch == ',' && depth == 0) {
          pieces.push_back(piece);
          piece.clear();
        } else {
          piece += ch;
        }
      }
      pieces.push_back(piece);
      for (auto& p : pieces) {
        std::string s = p.substr(0, p.find('='));
        std::string type;
        if (auto colon = s.find(':'); colon != std::string::npos) {
          type = s.substr(colon + 1);
          s = s.substr(0, colon);
        }
        auto trim = [](std::string v) {
          std::size_t a = v.find_first_not_of(" \t*");
          std::size_t b = v.find_last_not_of(" \t");
          return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
        };
        s = trim(s);
        type = trim(type);
        if (s.empty() || s == "/") continue;
        if (drop_self && ps.empty() && (s == "self" || s == "cls")) {
          drop_self = false;
          continue;
        }
        drop_self = false;
        ps.push_back(Parameter{s, type});
      }
      return ps;
    };

    for (const auto& ll : folded.lines) {
      while (!stack.empty() && stack.back().indent >= ll.indent) {
        close_frame(stack.back());
        stack.pop_back();
      }
      for (auto& f : stack) f.end_line = ll.last_line;

      std::smatch m;
      const std::string& t = ll.text;
      if (t[0] == '@') continue;  // decorator
      if (std::regex_match(t, m, class_re)) {
        ClassDef c;
        c.name = m[1];
        c.kind = ClassKind::Class;
        c.source_file = rel_path;
        std::string qual;
        for (const auto& f : stack)
          if (f.kind == Kind::Class) qual += out.classes[f.index].name + ".";
        if (!qual.empty()) c.qualified_name = qual + c.name;
        for (std::string b : split_bases(m[2].str())) {
          if (b == "object") continue;
          if (b == "Protocol" || b == "typing.Protocol") {
            c.kind = ClassKind::Interface;
            continue;
          }
          if (b == "Enum" || b == "enum.Enum" || b == "IntEnum" || b == "StrEnum" || b == "enum.IntEnum") {
            c.kind = ClassKind::Enum;
            continue;
          }
          c.extends.push_back(b);
        }
        out.classes.push_back(std::move(c));
        stack.push_back(Frame{ll.indent, Kind::Class, out.classes.size() - 1, 0, ll.first_line, ll.last_line});
        continue;
      }
      if (std::regex_match(t, m, def_re)) {
        const bool in_class = !stack.empty() && stack.back().kind == Kind::Class;
        const bool nested_in_function = innermost(Kind::Function) || innermost(Kind::Method);
        std::string rest = m[4];
        if (in_class) {
          ClassDef& c = out.classes[stack.back().index];
          MethodDef md;
          md.name = m[1];
          md.parameters = parse_params(m[2].str(), true);
          if (m[3].matched && !m[3].str().empty()) md.type_annotation = m[3].str();
          c.methods.push_back(std::move(md));
          stack.push_back(Frame{ll.indent, Kind::Method, stack.back().index, c.methods.size() - 1, ll.first_line,
                                ll.last_line});
          record_calls(rest);
        } else if (!nested_in_function) {
          FunctionDef f;
          f.name = m[1];
          f.source_file = rel_path;
          f.parameters = parse_params(m[2].str(), false);
          out.functions.push_back(std::move(f));
          stack.push_back(Frame{ll.indent, Kind::Function, out.functions.size() - 1, 0, ll.first_line, ll.last_line});
          record_calls(rest);
        } else {
          // Nested helper: its calls belong to the enclosing function.
          stack.push_back(Frame{ll.indent, Kind::Other, 0, 0, ll.first_line, ll.last_line});
          record_calls(rest);
        }
        continue;
      }
      if (std::regex_search(t, header_re) && t.back() != ':') {
        ++errors;  // malformed class/def header
        continue;
      }

      Frame* method = innermost(Kind::Method);
      if (!stack.empty() && stack.back().kind == Kind::Class) {
        if (std::regex_match(t, m, class_attr_re)) {
          ClassDef& c = out.classes[stack.back().index];
          std::string name = m[1];
          bool known = false;
          for (const auto& a : c.attributes) known = known || a.name == name;
          if (!known && name != "pass") {
            std::optional<std::string> type;
            if (m[2].matched) type = m[2].str();
            c.attributes.push_back(AttributeDef{name, "", type});
          }
        }
      } else if (method) {
        ClassDef& c = out.classes[method->index];
        for (std::sregex_iterator it(t.begin(), t.end(), self_attr_re), end; it != end; ++it) {
          std::string name = (*it)[1];
          bool known = false;
          for (const auto& a : c.attributes) known = known || a.name == name;
          if (!known) c.attributes.push_back(AttributeDef{name, "", std::nullopt});
        }
      }
      record_calls(t);

      // A block opener on a non-def line (if/for/with/...) pushes a neutral
      // frame so its body's indentation does not close the enclosing def.
      if (t.back() == ':') stack.push_back(Frame{ll.indent, Kind::Other, 0, 0, ll.first_line, ll.last_line});
    }
    while (!stack.empty()) {
      close_frame(stack.back());
      stack.pop_back();
    }
    out.had_errors = errors > 0;
    return out;
  }
};

}  // namespace c2u::extract
