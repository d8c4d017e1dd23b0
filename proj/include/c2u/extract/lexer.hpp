#pragma once

// Error-tolerant tokenizer shared by the brace-structured languages (Java,
// JavaScript, PHP). It never throws: unterminated literals and stray
// brackets are recorded as diagnostics and scanning continues.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace c2u::extract {

enum class TokKind { Ident, Punct, String, Number };

struct Token {
  TokKind kind;
  std::string text;
  int line;
};

struct LexOptions {
  bool php = false;         // `$var`, `#` comments, `<?php ... ?>` regions
  bool javascript = false;  // regex and template literals, `#private` names
};

struct LexResult {
  std::vector<Token> tokens;
  int line_count = 0;
  int errors = 0;  // unterminated literals/comments, bracket mismatches
};

namespace detail {

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}

// A `/` starts a regex literal when the previous significant token cannot
// end an expression.
inline bool regex_allowed(const std::vector<Token>& toks) {
  if (toks.empty()) return true;
  const Token& t = toks.back();
  if (t.kind == TokKind::Number || t.kind == TokKind::String) return false;
  if (t.kind == TokKind::Ident)
    return t.text == "return" || t.text == "typeof" || t.text == "case" || t.text == "in" ||
           t.text == "of" || t.text == "delete" || t.text == "void" || t.text == "throw";
  return t.text != ")" && t.text != "]" && t.text != "}";
}

}  // namespace detail

inline LexResult tokenize(std::string_view src, LexOptions opt = {}) {
  LexResult out;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = src.size();
  std::vector<char> brackets;

  auto push = [&](TokKind k, std::string text) { out.tokens.push_back(Token{k, std::move(text), line}); };

  auto skip_string = [&](char quote) {
    std::size_t start = i++;
    while (i < n && src[i] != quote) {
      if (src[i] == '\\' && i + 1 < n) ++i;
      if (src[i] == '\n') {
        if (quote != '`' && !opt.php) {  // unterminated single-line literal
          ++out.errors;
          return;
        }
        ++line;
      }
      ++i;
    }
    if (i >= n) {
      ++out.errors;
      return;
    }
    ++i;
    push(TokKind::String, std::string(src.substr(start, i - start)));
  };

  if (opt.php) {
    // Everything before the first `<?php` / `<?` is inline HTML.
    auto open = src.find("<?");
    if (open == std::string_view::npos) {
      for (char c : src) line += c == '\n';
      out.line_count = line;
      return out;
    }
    for (std::size_t k = 0; k < open; ++k) line += src[k] == '\n';
    i = open + 2;
    if (src.substr(i, 3) == "php") i += 3;
  }

  while (i < n) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (opt.php && c == '#' && !(i + 1 < n && src[i + 1] == '[')) {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      std::size_t stop = end == std::string_view::npos ? n : end + 2;
      for (std::size_t k = i; k < stop; ++k) line += src[k] == '\n';
      if (end == std::string_view::npos) ++out.errors;
      i = stop;
      continue;
    }
    if (opt.php && c == '?' && i + 1 < n && src[i + 1] == '>') {
      auto reopen = src.find("<?", i + 2);
      std::size_t stop = reopen == std::string_view::npos ? n : reopen + 2;
      for (std::size_t k = i; k < stop; ++k) line += src[k] == '\n';
      i = stop;
      if (reopen != std::string_view::npos && src.substr(i, 3) == "php") i += 3;
      continue;
    }
    if (!opt.php && !opt.javascript && src.substr(i, 3) == "\"\"\"") {  // Java text block
      auto end = src.find("\"\"\"", i + 3);
      std::size_t stop = end == std::string_view::npos ? n : end + 3;
      for (std::size_t k = i; k < stop; ++k) line += src[k] == '\n';
      if (end == std::string_view::npos) ++out.errors;
      else push(TokKind::String, "\"\"");
      i = stop;
      continue;
    }
    if (c == '"' || c == '\'' || (opt.javascript && c == '`')) {
      skip_string(c);
      continue;
    }
    if (opt.javascript && c == '/' && detail::regex_allowed(out.tokens)) {
      std::size_t start = i++;
      bool in_class = false;
      while (i < n && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < n) {
          i += 2;
          continue;
        }
        if (src[i] == '[') in_class = true;
        else if (src[i] == ']') in_class = false;
        else if (src[i] == '/' && !in_class) break;
        ++i;
      }
      if (i < n && src[i] == '/') {
        ++i;
        while (i < n && detail::ident_char(src[i])) ++i;
        push(TokKind::String, std::string(src.substr(start, i - start)));
      } else {
        // Not a regex after all; treat the slash as an operator.
        i = start + 1;
        push(TokKind::Punct, "/");
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '.' || src[i] == '_')) ++i;
      push(TokKind::Number, std::string(src.substr(start, i - start)));
      continue;
    }
    if (detail::ident_start(c) || (opt.javascript && c == '#' && i + 1 < n && detail::ident_start(src[i + 1]))) {
      std::size_t start = i++;
      while (i < n && detail::ident_char(src[i])) ++i;
      push(TokKind::Ident, std::string(src.substr(start, i - start)));
      continue;
    }
    // Multi-character operators the scanners care about.
    static constexpr std::string_view ops[] = {"::", "->", "=>", "...", "?->", "?."};
    bool matched = false;
    for (auto op : ops) {
      if (src.substr(i, op.size()) == op) {
        push(TokKind::Punct, std::string(op));
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (c == '(' || c == '[' || c == '{') brackets.push_back(c);
    if (c == ')' || c == ']' || c == '}') {
      char want = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (brackets.empty() || brackets.back() != want) ++out.errors;
      else brackets.pop_back();
    }
    push(TokKind::Punct, std::string(1, c));
    ++i;
  }
  if (!brackets.empty()) ++out.errors;
  out.line_count = line;
  return out;
}

// Cursor over a token vector with bracket-aware skipping.
class TokenStream {
 public:
  explicit TokenStream(const std::vector<Token>& toks) : toks_(toks) {}

  bool done() const { return pos_ >= toks_.size(); }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }
  const Token& peek(std::size_t ahead = 0) const {
    static const Token eof{TokKind::Punct, "", 0};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof;
  }
  const Token& next() {
    const Token& t = peek();
    if (!done()) ++pos_;
    return t;
  }
  bool is(std::string_view text, std::size_t ahead = 0) const { return peek(ahead).text == text; }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    ++pos_;
    return true;
  }

  // Positioned on an opening bracket: advance past its matching close (or to
  // the end of input). Returns the index of the closing token.
  std::size_t skip_balanced() {
    const std::string open = peek().text;
    const std::string close = open == "(" ? ")" : open == "[" ? "]" : "}";
    int depth = 0;
    while (!done()) {
      const Token& t = next();
      if (t.kind != TokKind::Punct) continue;
      if (t.text == open) ++depth;
      else if (t.text == close && --depth == 0) return pos_ - 1;
    }
    return toks_.empty() ? 0 : toks_.size() - 1;
  }

  const Token& at(std::size_t idx) const { return toks_[idx]; }
  std::size_t size() const { return toks_.size(); }

 private:
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace c2u::extract
