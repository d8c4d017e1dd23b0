#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "c2u/extract/common.hpp"

namespace c2u::extract {

class JavaExtractor final : public Extractor {
 public:
  std::string language() const override { return "java"; }
  std::vector<std::string> extensions() const override { return {".java"}; }

  FileResult extract_file(std::string_view source, const std::string& rel_path) const override {
    LexResult lex = tokenize(source);
    Scanner s{lex.tokens, rel_path, {}, {}};
    s.scan_file();
    FileResult out;
    out.classes = std::move(s.classes);
    out.had_errors = lex.errors > 0 || s.errors > 0;
    return out;
  }

 private:
  struct Scanner {
    const std::vector<Token>& toks;
    std::string rel_path;
    std::string package;
    std::vector<ClassDef> classes;
    int errors = 0;

    static bool is_modifier(std::string_view t) {
      static const std::set<std::string, std::less<>> mods = {
          "public", "private",  "protected", "static",   "final",     "abstract",   "sealed",
          "non",    "default",  "synchronized", "native", "transient", "volatile", "strictfp"};
      return mods.count(t) > 0;
    }

    static bool is_type_keyword(std::string_view t) {
      return t == "class" || t == "interface" || t == "enum" || t == "record";
    }

    void skip_annotation(TokenStream& ts) {
      ts.next();  // @
      if (ts.is("interface")) return;  // @interface handled by caller
      while (ts.peek().kind == TokKind::Ident) {
        ts.next();
        if (!ts.accept(".")) break;
      }
      if (ts.is("(")) ts.skip_balanced();
    }

    static void skip_angles(TokenStream& ts) {
      if (!ts.is("<")) return;
      int depth = 0;
      while (!ts.done()) {
        const Token& t = ts.next();
        if (t.text == "<") ++depth;
        else if (t.text == ">" && --depth == 0) return;
        else if (t.text == "{" || t.text == ";") {
          ts.seek(ts.pos() - 1);
          return;
        }
      }
    }

    // Dotted name possibly followed by type arguments.
    std::string read_type_name(TokenStream& ts) {
      std::string name;
      while (ts.peek().kind == TokKind::Ident) {
        name += ts.next().text;
        if (ts.is(".") && ts.peek(1).kind == TokKind::Ident) {
          ts.next();
          name += '.';
        } else {
          break;
        }
      }
      skip_angles(ts);
      return name;
    }

    void scan_file() {
      TokenStream ts(toks);
      while (!ts.done()) {
        if (ts.is("package")) {
          ts.next();
          std::size_t b = ts.pos();
          while (!ts.done() && !ts.is(";")) ts.next();
          package = join_tokens(toks, b, ts.pos());
          ts.accept(";");
          continue;
        }
        if (ts.is("import")) {
          while (!ts.done() && !ts.is(";")) ts.next();
          ts.accept(";");
          continue;
        }
        if (!try_type_declaration(ts, {})) {
          const Token& t = ts.peek();
          if (t.text == "{" || t.text == "(" || t.text == "[") {
            ts.skip_balanced();
          } else {
            if (t.text == "}" || t.text == ")") ++errors;
            ts.next();
          }
        }
      }
    }

    // Modifiers followed by a type keyword: parses the declaration (and its
    // body) and returns true. Otherwise leaves the stream untouched.
    bool try_type_declaration(TokenStream& ts, const std::string& outer) {
      std::size_t start = ts.pos();
      std::string visibility;
      while (!ts.done()) {
        if (ts.is("@") && !ts.is("interface", 1)) {
          skip_annotation(ts);
          continue;
        }
        if (ts.is("-")) {  // non-sealed
          ts.next();
          continue;
        }
        if (ts.peek().kind == TokKind::Ident && is_modifier(ts.peek().text)) {
          const std::string& m = ts.next().text;
          if (m == "public" || m == "private" || m == "protected") visibility = m;
          continue;
        }
        break;
      }
      bool annotation_type = false;
      if (ts.is("@") && ts.is("interface", 1)) {
        ts.next();
        annotation_type = true;
      }
      if (!is_type_keyword(ts.peek().text) || ts.peek(1).kind != TokKind::Ident) {
        ts.seek(start);
        return false;
      }
      const std::string keyword = ts.next().text;
      ClassDef c;
      c.name = ts.next().text;
      c.kind = keyword == "interface" ? ClassKind::Interface
               : keyword == "enum"    ? ClassKind::Enum
                                      : ClassKind::Class;
      if (annotation_type) c.kind = ClassKind::Interface;
      c.visibility = visibility;
      c.source_file = rel_path;
      std::string qual = outer.empty() ? package : outer;
      c.qualified_name = qual.empty() ? c.name : qual + "." + c.name;
      skip_angles(ts);
      if (keyword == "record" && ts.is("(")) {
        std::size_t open = ts.pos();
        std::size_t close = ts.skip_balanced();
        for (auto [b, e] : split_commas(toks, open + 1, close, true)) {
          auto [name, type] = split_declarator(b, e);
          if (!name.empty()) c.attributes.push_back(AttributeDef{name, "private", type});
        }
      }
      while (!ts.done() && !ts.is("{") && !ts.is(";")) {
        if (ts.is("extends") || ts.is("implements") || ts.is("permits")) {
          const std::string clause = ts.next().text;
          while (!ts.done()) {
            std::string name = read_type_name(ts);
            if (name.empty()) break;
            if (clause == "extends") c.extends.push_back(name);
            else if (clause == "implements") c.implements.push_back(name);
            if (!ts.accept(",")) break;
          }
          continue;
        }
        ts.next();
      }
      if (ts.is("{")) {
        ts.next();
        scan_body(ts, c, c.qualified_name.value_or(c.name));
      } else {
        ++errors;
      }
      classes.push_back(std::move(c));
      return true;
    }

    std::pair<std::string, std::optional<std::string>> split_declarator(std::size_t b, std::size_t e) {
      // [annotations/modifiers] Type name
      while (b < e && (toks[b].text == "final" || toks[b].text == "@")) {
        if (toks[b].text == "@") {
          ++b;
          if (b < e) ++b;
          if (b < e && toks[b].text == "(") {
            int depth = 0;
            for (; b < e; ++b) {
              if (toks[b].text == "(") ++depth;
              else if (toks[b].text == ")" && --depth == 0) {
                ++b;
                break;
              }
            }
          }
        } else {
          ++b;
        }
      }
      std::size_t name_idx = e;
      for (std::size_t i = e; i > b; --i)
        if (toks[i - 1].kind == TokKind::Ident) {
          name_idx = i - 1;
          break;
        }
      if (name_idx == e) return {"", std::nullopt};
      std::string type = join_tokens(toks, b, name_idx);
      std::optional<std::string> t;
      if (!type.empty()) t = type;
      return {toks[name_idx].text, t};
    }

    // Positioned just after a class body's `{`; consumes through its `}`.
    void scan_body(TokenStream& ts, ClassDef& c, const std::string& qual) {
      if (c.kind == ClassKind::Enum) {
        // Constants run up to the first depth-0 `;` (or the closing brace).
        while (!ts.done() && !ts.is(";") && !ts.is("}")) {
          if (ts.is("(") || ts.is("{")) ts.skip_balanced();
          else ts.next();
        }
        ts.accept(";");
      }
      while (!ts.done()) {
        if (ts.accept("}")) return;
        if (ts.accept(";")) continue;
        if (try_type_declaration(ts, qual)) continue;
        scan_member(ts, c);
      }
      ++errors;  // ran off the end of the file inside the class
    }

    void scan_member(TokenStream& ts, ClassDef& c) {
      std::string visibility;
      while (!ts.done()) {
        if (ts.is("@")) {
          skip_annotation(ts);
          continue;
        }
        if (ts.peek().kind == TokKind::Ident && is_modifier(ts.peek().text)) {
          const std::string& m = ts.next().text;
          if (m == "public" || m == "private" || m == "protected") visibility = m;
          continue;
        }
        break;
      }
      if (ts.is("{")) {  // initializer block
        ts.skip_balanced();
        return;
      }
      if (ts.is("<")) skip_angles(ts);  // generic method type parameters
      std::size_t begin = ts.pos();
      // Scan forward to the first depth-0 `(`, `=`, `;` or `{`.
      int angle = 0;
      while (!ts.done()) {
        const std::string& t = ts.peek().text;
        if (t == "<") ++angle;
        else if (t == ">") angle = angle > 0 ? angle - 1 : 0;
        else if (t == "(" || t == ";" || t == "=" || t == "{" || t == "}") break;
        else if (t == "[") {
          ts.skip_balanced();
          continue;
        }
        ts.next();
      }
      if (ts.is("(") && ts.pos() > begin && toks[ts.pos() - 1].kind == TokKind::Ident) {
        MethodDef m;
        m.name = toks[ts.pos() - 1].text;
        m.visibility = visibility;
        std::string ret = join_tokens(toks, begin, ts.pos() - 1);
        if (!ret.empty()) m.type_annotation = ret;
        std::size_t open = ts.pos();
        std::size_t close = ts.skip_balanced();
        if (close > open + 1) {
          for (auto [b, e] : split_commas(toks, open + 1, close, true)) {
            auto [name, type] = split_declarator(b, e);
            if (!name.empty()) m.parameters.push_back(Parameter{name, type.value_or("")});
          }
        }
        while (!ts.done() && !ts.is("{") && !ts.is(";") && !ts.is("}")) {
          if (ts.is("(")) ts.skip_balanced();
          else ts.next();
        }
        if (ts.is("{")) {
          std::size_t body = ts.pos();
          std::size_t end = ts.skip_balanced();
          m.calls = collect_calls(toks, body, end);
        } else {
          ts.accept(";");
        }
        c.methods.push_back(std::move(m));
        return;
      }
      if (ts.is("=") || ts.is(";")) {
        // Field declaration, possibly several declarators.
        while (!ts.done() && !ts.is(";") && !ts.is("}")) {
          if (ts.is("(") || ts.is("{") || ts.is("[")) ts.skip_balanced();
          else ts.next();
        }
        std::size_t stmt_end = ts.pos();
        ts.accept(";");
        std::optional<std::string> type;
        bool first = true;
        // Commas inside the declared type's generic arguments are not
        // declarator separators: split only after the first name.
        std::size_t name_at = begin;
        for (std::size_t i = begin, angle = 0; i < stmt_end; ++i) {
          const std::string& t = toks[i].text;
          if (toks[i].kind == TokKind::Punct) {
            if (t == "<") ++angle;
            else if (t == ">" && angle > 0) --angle;
            else if (t == ">>") angle = angle > 2 ? angle - 2 : 0;
            else if (t == ">>>") angle = angle > 3 ? angle - 3 : 0;
          } else if (angle == 0 && toks[i].kind == TokKind::Ident &&
                     (i + 1 == stmt_end || toks[i + 1].text == "=" || toks[i + 1].text == "," || toks[i + 1].text == "[")) {
            name_at = i;
            break;
          }
        }
        auto decls = split_commas(toks, name_at, stmt_end, false);
        if (!decls.empty()) decls.front().first = begin;
        for (auto [b, e] : decls) {
          std::size_t stop = b;
          while (stop < e && toks[stop].text != "=") ++stop;
          if (first) {
            auto [name, t] = split_declarator(b, stop);
            type = t;
            if (!name.empty()) c.attributes.push_back(AttributeDef{name, visibility, type});
            first = false;
          } else if (b < stop && toks[b].kind == TokKind::Ident) {
            c.attributes.push_back(AttributeDef{toks[b].text, visibility, type});
          }
        }
        return;
      }
      if (ts.is("{")) {
        ts.skip_balanced();
        return;
      }
      if (ts.pos() == begin && !ts.is("}")) {
        ++errors;
        ts.next();
      }
    }
  };
};

}  // namespace c2u::extract
