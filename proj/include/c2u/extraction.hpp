#pragma once

// Repository scanning: language detection by extension, per-language
// extraction through a registry of error-tolerant frontends, and assembly of
// the raw (pre-normalization) ProjectIR.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

#include "c2u/extract/common.hpp"
#include "c2u/extract/java.hpp"
#include "c2u/extract/javascript.hpp"
#include "c2u/extract/php.hpp"
#include "c2u/extract/python.hpp"
#include "c2u/ir.hpp"

namespace c2u {

namespace fs = std::filesystem;

struct SkippedFile {
  std::string path;
  std::string reason;

  bool operator==(const SkippedFile&) const = default;
};

struct ExtractionReport {
  int files_scanned = 0;
  int files_with_errors = 0;
  std::vector<std::string> error_files;
  std::vector<SkippedFile> skipped;
  std::map<std::string, int> files_per_language;

  json to_json() const {
    json skipped_j = json::array();
    for (const auto& s : skipped) skipped_j.push_back({{"path", s.path}, {"reason", s.reason}});
    return json{{"files_scanned", files_scanned},
                {"files_with_errors", files_with_errors},
                {"error_files", error_files},
                {"skipped", skipped_j},
                {"files_per_language", files_per_language}};
  }
};

class UnsupportedLanguage : public std::invalid_argument {
 public:
  explicit UnsupportedLanguage(const std::string& lang)
      : std::invalid_argument("no extractor registered for language '" + lang + "'") {}
};

class ExtractorRegistry {
 public:
  void add(std::unique_ptr<extract::Extractor> e) {
    const std::string lang = e->language();
    if (by_language_.count(lang)) throw std::invalid_argument("extractor already registered for " + lang);
    by_language_.emplace(lang, std::move(e));
  }

  const extract::Extractor& get(const std::string& lang) const {
    auto it = by_language_.find(lang);
    if (it == by_language_.end()) throw UnsupportedLanguage(lang);
    return *it->second;
  }

  bool contains(const std::string& lang) const { return by_language_.count(lang) > 0; }

  std::set<std::string> languages() const {
    std::set<std::string> out;
    for (const auto& [k, _] : by_language_) out.insert(k);
    return out;
  }

  // Language owning a file extension, or empty.
  std::string language_for(const fs::path& p) const {
    const std::string ext = p.extension().string();
    for (const auto& [lang, e] : by_language_)
      for (const auto& x : e->extensions())
        if (x == ext) return lang;
    return {};
  }

  static const ExtractorRegistry& standard() {
    static const ExtractorRegistry reg = [] {
      ExtractorRegistry r;
      r.add(std::make_unique<extract::JavaExtractor>());
      r.add(std::make_unique<extract::PythonExtractor>());
      r.add(std::make_unique<extract::JavaScriptExtractor>());
      r.add(std::make_unique<extract::PhpExtractor>());
      return r;
    }();
    return reg;
  }

 private:
  std::map<std::string, std::unique_ptr<extract::Extractor>> by_language_;
};

inline bool is_skipped_directory(const std::string& name) {
  return name == "node_modules" || name == "vendor" || name == "target" || name == "dist" || name == ".git";
}

inline constexpr std::uintmax_t kMaxSourceBytes = 2 * 1024 * 1024;

// All regular files under root (skipped directories pruned), as sorted
// root-relative generic paths.
inline std::vector<std::string> list_repository_files(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw std::runtime_error("cannot read repository root: " + root.string());
  std::vector<std::string> out;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw std::runtime_error("cannot read repository root: " + root.string() + ": " + ec.message());
  for (auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
    if (ec) break;
    const auto& entry = *it;
    if (entry.is_directory(ec)) {
      if (is_skipped_directory(entry.path().filename().string())) it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file(ec)) continue;
    out.push_back(fs::relative(entry.path(), root, ec).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::set<std::string> detect_languages(const fs::path& root,
                                              const ExtractorRegistry& reg = ExtractorRegistry::standard()) {
  std::set<std::string> out;
  for (const auto& rel : list_repository_files(root)) {
    std::string lang = reg.language_for(rel);
    if (!lang.empty()) out.insert(lang);
  }
  return out;
}

namespace detail {

inline std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Category of a recognized infrastructure/configuration file, or empty.
inline std::string infra_category(const std::string& rel) {
  const std::string name = lower(fs::path(rel).filename().string());
  const std::string ext = lower(fs::path(rel).extension().string());
  if (name.rfind("dockerfile", 0) == 0 || ext == ".dockerfile") return "docker";
  if ((name.rfind("docker-compose", 0) == 0 || name.rfind("compose.", 0) == 0) && (ext == ".yml" || ext == ".yaml"))
    return "compose";
  if (ext == ".yml" || ext == ".yaml") return "yaml";
  if (ext == ".properties" || ext == ".toml" || ext == ".ini" || ext == ".conf" || ext == ".tf" ||
      name == "procfile" || name == ".env.example")
    return "config";
  return {};
}

// Deployment-relevant lines of a config file, capped.
inline std::string infra_summary(const std::string& content) {
  static const std::vector<std::string> keys = {"from ", "expose", "image", "port", "service", "host",
                                                "database", "cmd ", "entrypoint", "volumes", "replicas"};
  std::istringstream in(content);
  std::string line, out;
  while (std::getline(in, line) && out.size() < 256) {
    std::string l = lower(line);
    bool hit = std::any_of(keys.begin(), keys.end(), [&](const std::string& k) { return l.find(k) != std::string::npos; });
    if (!hit) continue;
    std::size_t a = line.find_first_not_of(" \t-");
    if (a == std::string::npos) continue;
    std::string t = line.substr(a);
    while (!t.empty() && (t.back() == '\r' || t.back() == ' ')) t.pop_back();
    if (!out.empty()) out += "; ";
    out += t;
  }
  if (out.size() > 256) out.resize(256);
  return out;
}

// Within one language, later duplicates of a class name get `_2`, `_3`, ...
inline void disambiguate_class_names(std::vector<ClassDef>& classes) {
  std::set<std::string> taken;
  for (const auto& c : classes) taken.insert(c.name);
  std::map<std::string, int> seen;
  for (auto& c : classes) {
    int n = ++seen[c.name];
    if (n == 1) continue;
    std::string candidate;
    for (int k = n;; ++k) {
      candidate = c.name + "_" + std::to_string(k);
      if (!taken.count(candidate)) break;
    }
    taken.insert(candidate);
    c.name = candidate;
  }
}

}  // namespace detail

struct ExtractOptions {
  std::optional<std::string> timestamp;  // recorded in metadata when set
  std::string project_name;              // defaults to the root directory name
};

struct ExtractionResult {
  ProjectIR ir;
  ExtractionReport report;
};

inline ExtractionResult extract_project(const fs::path& root, const std::set<std::string>& langs,
                                        const ExtractOptions& opts = {},
                                        const ExtractorRegistry& reg = ExtractorRegistry::standard()) {
  for (const auto& l : langs)
    if (!reg.contains(l)) throw UnsupportedLanguage(l);

  ExtractionResult result;
  ExtractionReport& report = result.report;
  std::map<std::string, std::vector<extract::FileResult>> per_lang;
  std::map<std::string, std::string> infra;

  for (const auto& rel : list_repository_files(root)) {
    const std::string lang = reg.language_for(rel);
    if (lang.empty()) {
      std::string cat = detail::infra_category(rel);
      if (!cat.empty()) {
        auto content = detail::read_file(root / rel);
        infra[cat + ":" + rel] = content ? detail::infra_summary(*content) : std::string();
      }
      continue;
    }
    if (!langs.count(lang)) continue;
    ++report.files_scanned;
    ++report.files_per_language[lang];
    std::error_code ec;
    auto size = fs::file_size(root / rel, ec);
    if (ec) {
      report.skipped.push_back({rel, "unreadable"});
      continue;
    }
    if (size > kMaxSourceBytes) {
      report.skipped.push_back({rel, "larger than 2 MiB"});
      continue;
    }
    auto content = detail::read_file(root / rel);
    if (!content) {
      report.skipped.push_back({rel, "unreadable"});
      continue;
    }
    if (content->find('\0') != std::string::npos) {
      report.skipped.push_back({rel, "binary content"});
      continue;
    }
    extract::FileResult fr = reg.get(lang).extract_file(*content, rel);
    if (fr.had_errors) {
      ++report.files_with_errors;
      report.error_files.push_back(rel);
    }
    per_lang[lang].push_back(std::move(fr));
  }

  std::string name = opts.project_name;
  if (name.empty()) {
    std::error_code ec;
    fs::path canon = fs::weakly_canonical(root, ec);
    name = (ec ? root : canon).filename().string();
  }

  std::vector<ProjectIR> irs;
  for (auto& [lang, files] : per_lang) {
    ProjectIR ir;
    ir.project_name = name;
    ir.languages.insert(lang);
    for (auto& fr : files) {
      for (auto& c : fr.classes) ir.classes.push_back(std::move(c));
      for (auto& f : fr.functions) ir.functions.push_back(std::move(f));
    }
    std::stable_sort(ir.classes.begin(), ir.classes.end(), [](const ClassDef& a, const ClassDef& b) {
      return std::tie(a.source_file, a.name) < std::tie(b.source_file, b.name);
    });
    std::stable_sort(ir.functions.begin(), ir.functions.end(), [](const FunctionDef& a, const FunctionDef& b) {
      return std::tie(a.source_file, a.name) < std::tie(b.source_file, b.name);
    });
    detail::disambiguate_class_names(ir.classes);
    irs.push_back(std::move(ir));
  }

  if (irs.empty()) {
    result.ir.project_name = name;
  } else {
    result.ir = merge(irs);
  }
  result.ir.normalized = false;
  result.ir.metadata["repository_path"] = root.generic_string();
  result.ir.metadata["file_count"] = std::to_string(report.files_scanned);
  if (opts.timestamp) result.ir.metadata["extraction_timestamp"] = *opts.timestamp;
  for (auto& [k, v] : infra) result.ir.metadata[k] = v;
  return result;
}

}  // namespace c2u
