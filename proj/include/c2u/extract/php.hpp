#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/extract/common.hpp"

namespace c2u::extract {

class PhpExtractor final : public Extractor {
 public:
  std::string language() const override { return "php"; }
  std::vector<std::string> extensions() const override { return {".php"}; }

  FileResult extract_file(std::string_view source, const std::string& rel_path) const override {
    LexResult lex = tokenize(source, LexOptions{.php = true, .javascript = false});
    Scanner s{lex.tokens, rel_path, {}, {}, {}, 0};
    s.scan_top();
    FileResult out;
    out.classes = std::move(s.classes);
    out.functions = std::move(s.functions);
    out.had_errors = lex.errors > 0 || s.errors > 0;
    return out;
  }

 private:
  struct Scanner {
    const std::vector<Token>& toks;
    std::string rel_path;
    std::string ns;
    std::vector<ClassDef> classes;
    std::vector<FunctionDef> functions;
    int errors;

    static bool is_modifier(std::string_view t) {
      static const std::set<std::string, std::less<>> mods = {
          "public", "private", "protected", "static", "abstract", "final", "var", "readonly"};
      return mods.count(t) > 0;
    }

    // `\Foo\Bar` or `Foo\Bar` as written.
    std::string read_name(TokenStream& ts) {
      std::string name;
      while (ts.is("\\") || ts.peek().kind == TokKind::Ident) {
        if (ts.is("\\")) {
          name += '\\';
          ts.next();
          continue;
        }
        if (!name.empty() && name.back() != '\\') break;
        name += ts.next().text;
      }
      return name;
    }

    void skip_attribute(TokenStream& ts) {
      ts.next();  // '#'
      if (ts.is("[")) ts.skip_balanced();
    }

    std::vector<Parameter> params(std::size_t open, std::size_t close) const {
      std::vector<Parameter> out;
      if (close <= open + 1) return out;
      for (auto [b, e] : split_commas(toks, open + 1, close, false)) {
        std::size_t stop = b;
        while (stop < e && toks[stop].text != "=") ++stop;
        std::size_t var = stop;
        for (std::size_t i = b; i < stop; ++i)
          if (toks[i].kind == TokKind::Ident && toks[i].text[0] == '$') var = i;
        if (var == stop) continue;
        std::size_t tb = b;
        while (tb < var && (is_modifier(toks[tb].text) || toks[tb].text == "#")) ++tb;
        std::string type;
        for (std::size_t i = tb; i < var; ++i)
          if (toks[i].text != "&" && toks[i].text != "...") type += toks[i].text;
        out.push_back(Parameter{toks[var].text.substr(1), type});
      }
      return out;
    }

    // Positioned at `(`; returns the body range (or an empty range for
    // abstract/interface declarations).
    void function_rest(TokenStream& ts, std::vector<Parameter>& ps, std::optional<std::string>& ret,
                       std::vector<std::string>& calls, int& end_line) {
      std::size_t open = ts.pos();
      std::size_t close = ts.skip_balanced();
      ps = params(open, close);
      end_line = toks[close].line;
      if (ts.accept(":")) {
        std::string r;
        while (!ts.done() && !ts.is("{") && !ts.is(";")) r += ts.next().text;
        if (!r.empty()) ret = r;
      }
      if (ts.is("{")) {
        std::size_t b = ts.pos();
        std::size_t e = ts.skip_balanced();
        calls = collect_calls(toks, b, e);
        end_line = toks[e].line;
      } else {
        ts.accept(";");
      }
    }

    void class_decl(TokenStream& ts, const std::string& keyword) {
      ClassDef c;
      c.name = ts.next().text;
      c.kind = keyword == "interface" ? ClassKind::Interface
               : keyword == "enum"    ? ClassKind::Enum
                                      : ClassKind::Class;
      c.visibility = "public";
      c.source_file = rel_path;
      c.qualified_name = ns.empty() ? c.name : ns + "\\" + c.name;
      if (ts.accept(":")) read_name(ts);  // backed enum type
      while (!ts.done() && !ts.is("{")) {
        if (ts.is("extends") || ts.is("implements")) {
          const std::string clause = ts.next().text;
          while (!ts.done()) {
            std::string name = read_name(ts);
            if (name.empty()) break;
            if (clause == "extends") c.extends.push_back(name);
            else c.implements.push_back(name);
            if (!ts.accept(",")) break;
          }
          continue;
        }
        if (ts.is(";")) break;
        ts.next();
      }
      if (ts.accept("{")) class_body(ts, c);
      else ++errors;
      classes.push_back(std::move(c));
    }

    void class_body(TokenStream& ts, ClassDef& c) {
      while (!ts.done()) {
        if (ts.accept("}")) return;
        if (ts.accept(";")) continue;
        if (ts.is("#")) {
          skip_attribute(ts);
          continue;
        }
        if (ts.is("use")) {  // trait import
          while (!ts.done() && !ts.is(";") && !ts.is("{")) ts.next();
          if (ts.is("{")) ts.skip_balanced();
          ts.accept(";");
          continue;
        }
        if (ts.is("case")) {  // enum case
          while (!ts.done() && !ts.is(";") && !ts.is("}")) ts.next();
          continue;
        }
        std::string visibility;
        while (ts.peek().kind == TokKind::Ident && is_modifier(ts.peek().text)) {
          const std::string& m = ts.next().text;
          if (m == "public" || m == "private" || m == "protected" || m == "var") visibility = m;
        }
        if (ts.is("const")) {
          while (!ts.done() && !ts.is(";") && !ts.is("}")) {
            if (ts.is("(") || ts.is("[")) ts.skip_balanced();
            else ts.next();
          }
          continue;
        }
        if (ts.is("function")) {
          ts.next();
          ts.accept("&");
          if (ts.peek().kind != TokKind::Ident) {
            ++errors;
            continue;
          }
          MethodDef m;
          m.name = ts.next().text;
          m.visibility = visibility;
          int end_line = 0;
          if (ts.is("(")) function_rest(ts, m.parameters, m.type_annotation, m.calls, end_line);
          else ++errors;
          c.methods.push_back(std::move(m));
          continue;
        }
        // Property: [type] $name [= default] {, $name [= default]} ;
        std::size_t b = ts.pos();
        while (!ts.done() && !ts.is(";") && !ts.is("}")) {
          if (ts.is("(") || ts.is("[") || ts.is("{")) ts.skip_balanced();
          else ts.next();
        }
        std::size_t e = ts.pos();
        ts.accept(";");
        std::string type;
        bool seen_var = false;
        int depth = 0;
        bool after_eq = false;
        for (std::size_t i = b; i < e; ++i) {
          const std::string& t = toks[i].text;
          if (t == "(" || t == "[" || t == "{") ++depth;
          else if (t == ")" || t == "]" || t == "}") --depth;
          else if (depth == 0 && t == "=") after_eq = true;
          else if (depth == 0 && t == ",") after_eq = false;
          else if (depth == 0 && !after_eq && toks[i].kind == TokKind::Ident && t[0] == '$') {
            std::optional<std::string> ta;
            if (!type.empty()) ta = type;
            c.attributes.push_back(AttributeDef{t.substr(1), visibility, ta});
            seen_var = true;
          } else if (depth == 0 && !after_eq && !seen_var) {
            type += t;
          }
        }
        if (!seen_var && e == b) {
          ++errors;
          ts.next();
        }
      }
      ++errors;
    }

    void scan_top() {
      TokenStream ts(toks);
      while (!ts.done()) {
        int line = ts.peek().line;
        if (ts.is("namespace")) {
          ts.next();
          ns = read_name(ts);
          if (!ns.empty() && ns[0] == '\\') ns.erase(0, 1);
          ts.accept(";");
          continue;  // a `{` namespace block is entered like any other scope
        }
        if (ts.is("use")) {
          while (!ts.done() && !ts.is(";")) {
            if (ts.is("{")) ts.skip_balanced();
            else ts.next();
          }
          ts.accept(";");
          continue;
        }
        if (ts.is("#")) {
          skip_attribute(ts);
          continue;
        }
        while (ts.is("abstract") || ts.is("final") || ts.is("readonly")) ts.next();
        if ((ts.is("class") || ts.is("interface") || ts.is("trait") || ts.is("enum")) &&
            ts.peek(1).kind == TokKind::Ident) {
          std::string kw = ts.next().text;
          class_decl(ts, kw);
          continue;
        }
        if (ts.is("function") && ts.peek(1).kind == TokKind::Ident && ts.is("(", 2)) {
          ts.next();
          FunctionDef f;
          f.name = ts.next().text;
          f.source_file = rel_path;
          std::optional<std::string> ret;
          int end_line = line;
          function_rest(ts, f.parameters, ret, f.calls, end_line);
          f.line_count = end_line - line + 1;
          functions.push_back(std::move(f));
          continue;
        }
        const Token& t = ts.peek();
        if (t.text == "{") {
          ts.next();  // namespace / control blocks: keep scanning inside
        } else if (t.text == "(" || t.text == "[") {
          ts.skip_balanced();
        } else {
          ts.next();
        }
      }
    }
  };
};

}  // namespace c2u::extract
