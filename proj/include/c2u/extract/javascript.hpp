#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "c2u/extract/common.hpp"

namespace c2u::extract {

class JavaScriptExtractor final : public Extractor {
 public:
  std::string language() const override { return "javascript"; }
  std::vector<std::string> extensions() const override { return {".js", ".mjs"}; }

  FileResult extract_file(std::string_view source, const std::string& rel_path) const override {
    LexResult lex = tokenize(source, LexOptions{.php = false, .javascript = true});
    Scanner s{lex.tokens, rel_path, {}, {}, 0};
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
    std::vector<ClassDef> classes;
    std::vector<FunctionDef> functions;
    int errors;

    std::vector<Parameter> params(std::size_t open, std::size_t close) const {
      std::vector<Parameter> out;
      if (close <= open + 1) return out;
      for (auto [b, e] : split_commas(toks, open + 1, close, false)) {
        while (b < e && toks[b].text == "...") ++b;
        if (b < e && toks[b].kind == TokKind::Ident) out.push_back(Parameter{toks[b].text, ""});
        else if (b < e) out.push_back(Parameter{join_tokens(toks, b, e), ""});
      }
      return out;
    }

    // Positioned at `(` of a parameter list: parses params and the following
    // body (block or arrow expression).
    FunctionDef function_rest(TokenStream& ts, std::string name, int start_line) {
      FunctionDef f;
      f.name = std::move(name);
      f.source_file = rel_path;
      std::size_t open = ts.pos();
      std::size_t close = ts.skip_balanced();
      f.parameters = params(open, close);
      finish_body(ts, f.calls, f.line_count, start_line);
      return f;
    }

    void finish_body(TokenStream& ts, std::vector<std::string>& calls, int& line_count, int start_line) {
      ts.accept("=>");
      int end_line = start_line;
      if (ts.is("{")) {
        std::size_t b = ts.pos();
        std::size_t e = ts.skip_balanced();
        calls = collect_calls(toks, b, e);
        end_line = toks[e].line;
      } else {
        // Expression-bodied arrow: up to the end of the statement.
        std::size_t b = ts.pos();
        while (!ts.done() && !ts.is(";") && !ts.is("}") && !ts.is(",") && !ts.is(")")) {
          if (ts.is("(") || ts.is("[") || ts.is("{")) ts.skip_balanced();
          else ts.next();
        }
        calls = collect_calls(toks, b, ts.pos());
        if (ts.pos() > b) end_line = toks[ts.pos() - 1].line;
      }
      line_count = end_line - start_line + 1;
    }

    std::string heritage(TokenStream& ts) {
      std::size_t b = ts.pos();
      while (!ts.done() && !ts.is("{")) {
        if (ts.is("(")) ts.skip_balanced();
        else ts.next();
      }
      // Dotted name at the start of the heritage expression.
      std::string name;
      for (std::size_t i = b; i < ts.pos(); ++i) {
        if (toks[i].kind == TokKind::Ident) {
          name += toks[i].text;
          if (i + 1 < ts.pos() && toks[i + 1].text == ".") {
            name += '.';
            ++i;
            continue;
          }
        }
        break;
      }
      return name;
    }

    void class_decl(TokenStream& ts, std::string name) {
      ClassDef c;
      c.name = std::move(name);
      c.kind = ClassKind::Class;
      c.source_file = rel_path;
      if (ts.accept("extends")) {
        std::string base = heritage(ts);
        if (!base.empty()) c.extends.push_back(base);
      }
      if (ts.is("{")) {
        ts.next();
        class_body(ts, c);
      } else {
        ++errors;
      }
      classes.push_back(std::move(c));
    }

    static bool starts_member(const Token& t) {
      return t.kind == TokKind::Ident || t.text == "*" || t.text == "[";
    }

    static bool continues_expression(const std::string& t) {
      static const std::set<std::string, std::less<>> ops = {
          "=", "+", "-", "*", "/", ",", ".", "(", "[", "?", ":", "&", "|", "!", "<", ">", "%", "=>", "?."};
      return ops.count(t) > 0;
    }

    void add_attribute(ClassDef& c, std::string name, std::string visibility) {
      for (const auto& a : c.attributes)
        if (a.name == name) return;
      c.attributes.push_back(AttributeDef{std::move(name), std::move(visibility), std::nullopt});
    }

    void class_body(TokenStream& ts, ClassDef& c) {
      while (!ts.done()) {
        if (ts.accept("}")) return;
        if (ts.accept(";")) continue;
        int line = ts.peek().line;
        bool is_static = false;
        while (ts.is("static") || ts.is("async") || ts.is("*") ||
               ((ts.is("get") || ts.is("set")) && ts.peek(1).kind == TokKind::Ident)) {
          if (ts.is("static")) is_static = true;
          ts.next();
          if (is_static && ts.is("{")) break;
        }
        if (ts.is("{")) {  // static initialization block
          ts.skip_balanced();
          continue;
        }
        std::string name;
        if (ts.peek().kind == TokKind::Ident || ts.peek().kind == TokKind::String) {
          name = ts.next().text;
        } else if (ts.is("[")) {
          ts.skip_balanced();
          name = "[computed]";
        } else {
          ++errors;
          ts.next();
          continue;
        }
        std::string visibility;
        if (!name.empty() && name[0] == '#') {
          visibility = "#";
          name.erase(0, 1);
        }
        if (ts.is("(")) {
          MethodDef m;
          m.name = name;
          m.visibility = visibility;
          std::size_t open = ts.pos();
          std::size_t close = ts.skip_balanced();
          m.parameters = params(open, close);
          int lc = 0;
          std::size_t body_start = ts.pos();
          finish_body(ts, m.calls, lc, line);
          if (name == "constructor") {
            for (std::size_t i = body_start; i + 3 < ts.pos(); ++i)
              if (toks[i].text == "this" && toks[i + 1].text == "." && toks[i + 2].kind == TokKind::Ident &&
                  toks[i + 3].text == "=") {
                std::string attr = toks[i + 2].text;
                std::string vis;
                if (attr[0] == '#') {
                  vis = "#";
                  attr.erase(0, 1);
                }
                add_attribute(c, attr, vis);
              }
          }
          c.methods.push_back(std::move(m));
          continue;
        }
        // Class field: `name [= init][;]`, semicolon optional.
        if (name != "[computed]") add_attribute(c, name, visibility);
        if (ts.accept("=")) {
          std::string prev = "=";
          while (!ts.done() && !ts.is(";") && !ts.is("}")) {
            const Token& t = ts.peek();
            if (t.line != toks[ts.pos() - 1].line && !continues_expression(prev) && starts_member(t)) break;
            prev = t.text;
            if (ts.is("(") || ts.is("[") || ts.is("{")) {
              ts.skip_balanced();
              prev = ")";
            } else {
              ts.next();
            }
          }
        }
        ts.accept(";");
      }
      ++errors;
    }

    void scan_top() {
      TokenStream ts(toks);
      while (!ts.done()) {
        int line = ts.peek().line;
        if (ts.is("export")) {
          ts.next();
          ts.accept("default");
          continue;
        }
        if (ts.is("class") && ts.peek(1).kind == TokKind::Ident) {
          ts.next();
          std::string name = ts.next().text;
          class_decl(ts, name);
          continue;
        }
        if (ts.is("async") && ts.is("function", 1)) ts.next();
        if (ts.is("function")) {
          ts.next();
          ts.accept("*");
          if (ts.peek().kind == TokKind::Ident && ts.is("(", 1)) {
            std::string name = ts.next().text;
            functions.push_back(function_rest(ts, name, line));
          }
          continue;
        }
        if ((ts.is("const") || ts.is("let") || ts.is("var")) && ts.peek(1).kind == TokKind::Ident &&
            ts.is("=", 2)) {
          ts.next();
          std::string name = ts.next().text;
          ts.next();  // =
          if (ts.is("class")) {
            ts.next();
            if (ts.peek().kind == TokKind::Ident && !ts.is("extends")) ts.next();
            class_decl(ts, name);
            continue;
          }
          ts.accept("async");
          if (ts.is("function")) {
            ts.next();
            ts.accept("*");
            if (ts.peek().kind == TokKind::Ident) ts.next();
            if (ts.is("(")) functions.push_back(function_rest(ts, name, line));
            continue;
          }
          if (ts.is("(")) {
            std::size_t save = ts.pos();
            ts.skip_balanced();
            if (ts.is("=>")) {
              ts.seek(save);
              functions.push_back(function_rest(ts, name, line));
              continue;
            }
            ts.seek(save);
          } else if (ts.peek().kind == TokKind::Ident && ts.is("=>", 1)) {
            FunctionDef f;
            f.name = name;
            f.source_file = rel_path;
            f.parameters.push_back(Parameter{ts.next().text, ""});
            finish_body(ts, f.calls, f.line_count, line);
            functions.push_back(std::move(f));
            continue;
          }
          continue;
        }
        const Token& t = ts.peek();
        if (t.text == "{" || t.text == "(" || t.text == "[") {
          ts.skip_balanced();
        } else {
          if (t.text == "}" || t.text == ")" || t.text == "]") ++errors;
          ts.next();
        }
      }
    }
  };
};

}  // namespace c2u::extract
