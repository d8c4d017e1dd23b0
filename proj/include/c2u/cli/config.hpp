#pragma once

// Run configuration, loaded from an INI file:
//
//   [run]      backend, concurrency, output, deterministic, mock_scripts,
//              defect_rate, readability_threshold, prompts_dir, types
//   [budgets]  single, deep                     (bytes, >= 4096)
//   [weights]  inheritance, name_bonus, call_chain (>= 0), patterns
//   [density]  <type> = lo,hi
//   [project:<name>]  path, languages, deps     (one section per corpus entry)
//
// Relative paths resolve against the config file's directory.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "c2u/metrics.hpp"
#include "c2u/view.hpp"

namespace c2u::cli {

namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMinBudgetBytes = 4096;

struct ProjectEntry {
  std::string name;
  fs::path path;
  std::set<std::string> languages;  // empty: detect
  std::optional<fs::path> deps;
};

inline std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

struct RunConfig {
  std::string backend = "mock";
  int concurrency = 4;
  fs::path output = "out";
  bool deterministic = false;
  std::optional<fs::path> mock_scripts;
  double defect_rate = 0.0;
  int readability_threshold = 40;
  std::optional<fs::path> prompts_dir;
  std::size_t single_budget = kSingleBudgetBytes;
  std::size_t deep_budget = kDeepBudgetBytes;
  ScoringWeights weights;
  metrics::MetricsConfig metrics;
  std::vector<DiagramType> types{kAllDiagramTypes.begin(), kAllDiagramTypes.end()};
  std::vector<ProjectEntry> corpus;

  ViewOptions view_options(DiagramType dt) const {
    return ViewOptions{weights, route_of(dt) == Route::Single ? single_budget : deep_budget};
  }

  void validate() const {
    if (backend != "mock" && backend != "api") throw ConfigError("backend must be 'mock' or 'api', got '" + backend + "'");
    if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
    if (single_budget < kMinBudgetBytes || deep_budget < kMinBudgetBytes)
      throw ConfigError("budgets must be >= " + std::to_string(kMinBudgetBytes) + " bytes");
    if (weights.inheritance < 0 || weights.name_bonus < 0 || weights.call_chain < 0)
      throw ConfigError("weights must be >= 0");
    if (defect_rate < 0 || defect_rate > 1) throw ConfigError("defect_rate must lie in [0, 1]");
    if (readability_threshold < 1) throw ConfigError("readability_threshold must be >= 1");
    for (const auto& [dt, b] : metrics.density_bands)
      if (b.lo < 0 || b.hi < b.lo) throw ConfigError("density band for " + std::string(to_string(dt)) + " is invalid");
    for (const auto& p : corpus) {
      if (p.path.empty()) throw ConfigError("project '" + p.name + "' has no path");
      if (!fs::is_directory(p.path)) throw ConfigError("project '" + p.name + "': no such directory " + p.path.string());
    }
  }

  // Present-but-unparsable values are errors, not silent defaults.
  template <class T>
  static void read(const boost::property_tree::ptree& pt, const std::string& path, T& v) {
    if (pt.get_child_optional(path)) v = pt.get<T>(path);
  }

  static RunConfig from_ptree(const boost::property_tree::ptree& pt, const fs::path& base) {
    RunConfig c;
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    try {
      read(pt, "run.backend", c.backend);
      read(pt, "run.concurrency", c.concurrency);
      if (auto o = pt.get_optional<std::string>("run.output")) c.output = resolve(*o);
      read(pt, "run.deterministic", c.deterministic);
      if (auto s = pt.get_optional<std::string>("run.mock_scripts"); s && !s->empty()) c.mock_scripts = resolve(*s);
      read(pt, "run.defect_rate", c.defect_rate);
      read(pt, "run.readability_threshold", c.readability_threshold);
      if (auto s = pt.get_optional<std::string>("run.prompts_dir"); s && !s->empty()) c.prompts_dir = resolve(*s);
      if (auto t = pt.get_optional<std::string>("run.types")) {
        c.types.clear();
        for (const auto& name : split_csv_list(*t)) {
          auto dt = parse_diagram_type(name);
          if (!dt) throw ConfigError("unknown diagram type '" + name + "' in run.types");
          c.types.push_back(*dt);
        }
      }
      read(pt, "budgets.single", c.single_budget);
      read(pt, "budgets.deep", c.deep_budget);
      read(pt, "weights.inheritance", c.weights.inheritance);
      read(pt, "weights.name_bonus", c.weights.name_bonus);
      read(pt, "weights.call_chain", c.weights.call_chain);
      if (auto p = pt.get_optional<std::string>("weights.patterns")) c.weights.patterns = split_csv_list(*p);
      if (auto d = pt.get_child_optional("density"))
        for (const auto& [key, node] : *d) {
          auto dt = parse_diagram_type(key);
          if (!dt) throw ConfigError("unknown diagram type '" + key + "' in [density]");
          auto parts = split_csv_list(node.data());
          if (parts.size() != 2) throw ConfigError("density." + key + " must be 'lo,hi'");
          c.metrics.density_bands[*dt] = {std::stod(parts[0]), std::stod(parts[1])};
        }
    } catch (const boost::property_tree::ptree_error& e) {
      throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("bad number: ") + e.what());
    }
    for (const auto& [section, node] : pt) {
      if (section.rfind("project:", 0) != 0) continue;
      ProjectEntry p;
      p.name = section.substr(8);
      if (p.name.empty()) throw ConfigError("corpus entry '" + section + "' has no name");
      auto path = node.get_optional<std::string>("path");
      if (!path || path->empty()) throw ConfigError("corpus entry '" + p.name + "' has no path");
      p.path = resolve(*path);
      for (const auto& l : split_csv_list(node.get("languages", std::string()))) p.languages.insert(l);
      if (auto d = node.get_optional<std::string>("deps"); d && !d->empty()) p.deps = resolve(*d);
      c.corpus.push_back(std::move(p));
    }
    return c;
  }

  static RunConfig load(const fs::path& file) {
    boost::property_tree::ptree pt;
    try {
      boost::property_tree::read_ini(file.string(), pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(e.what());
    }
    auto c = from_ptree(pt, file.has_parent_path() ? file.parent_path() : fs::path("."));
    c.validate();
    return c;
  }
};

}  // namespace c2u::cli
