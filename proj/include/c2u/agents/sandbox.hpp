#pragma once

// Tool execution for agent sessions. Reads are confined to the repository
// and the run output directory; writes to the output directory only.

#include <fnmatch.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "c2u/agents/protocol.hpp"
#include "c2u/extraction.hpp"

namespace c2u::agents {

namespace fs = std::filesystem;

inline constexpr std::size_t kMaxToolOutput = 64 * 1024;

class ToolSandbox {
 public:
  ToolSandbox(fs::path repo_root, fs::path output_dir)
      : repo_(normal(repo_root)), out_(normal(output_dir)) {}

  const fs::path& repo_root() const { return repo_; }
  const fs::path& output_dir() const { return out_; }

  ToolResult execute(const ToolCall& call) const {
    ToolResult r{call.id, call.tool, true, {}};
    try {
      if (call.tool == "Read") r.output = read(call.input.at("path").get<std::string>());
      else if (call.tool == "Write")
        r.output = write(call.input.at("path").get<std::string>(), call.input.at("content").get<std::string>());
      else if (call.tool == "Glob") r.output = glob(call.input.at("pattern").get<std::string>());
      else if (call.tool == "Grep")
        r.output = grep(call.input.at("pattern").get<std::string>(), call.input.value("glob", std::string("*")));
      else throw std::invalid_argument("unknown tool " + call.tool);
    } catch (const std::exception& e) {
      r.ok = false;
      r.output = e.what();
    }
    if (r.output.size() > kMaxToolOutput) r.output.resize(kMaxToolOutput);
    return r;
  }

  // Absolute path for `p` if it lies under an allowed root. Relative paths
  // resolve against the output directory first, then the repository.
  fs::path resolve_readable(const std::string& p) const {
    fs::path given(p);
    std::vector<fs::path> candidates;
    if (given.is_absolute()) candidates.push_back(normal(given));
    else {
      candidates.push_back(normal(out_ / given));
      candidates.push_back(normal(repo_ / given));
    }
    for (const auto& c : candidates)
      if ((within(c, out_) || within(c, repo_)) && fs::exists(c)) return c;
    for (const auto& c : candidates)
      if (!within(c, out_) && !within(c, repo_)) throw std::runtime_error("path outside sandbox: " + p);
    throw std::runtime_error("no such file: " + p);
  }

  fs::path resolve_writable(const std::string& p) const {
    fs::path given(p);
    fs::path c = normal(given.is_absolute() ? given : out_ / given);
    if (!within(c, out_)) throw std::runtime_error("write outside output directory: " + p);
    return c;
  }

 private:
  fs::path repo_, out_;

  static fs::path normal(const fs::path& p) {
    std::error_code ec;
    fs::path a = fs::absolute(p, ec);
    fs::path w = fs::weakly_canonical(a, ec);
    return (ec ? a : w).lexically_normal();
  }

  static bool within(const fs::path& p, const fs::path& root) {
    auto rel = p.lexically_relative(root);
    if (rel.empty()) return false;
    auto first = *rel.begin();
    return first != ".." && !rel.is_absolute();
  }

  std::string read(const std::string& p) const {
    fs::path f = resolve_readable(p);
    if (fs::is_directory(f)) throw std::runtime_error("is a directory: " + p);
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string write(const std::string& p, const std::string& content) const {
    fs::path f = resolve_writable(p);
    fs::create_directories(f.parent_path());
    std::ofstream out(f, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + p);
    return "wrote " + std::to_string(content.size()) + " bytes";
  }

  std::string glob(const std::string& pattern) const {
    std::string out;
    for (const auto& rel : list_repository_files(repo_))
      if (fnmatch(pattern.c_str(), rel.c_str(), 0) == 0) out += rel + "\n";
    return out;
  }

  std::string grep(const std::string& pattern, const std::string& file_glob) const {
    const std::regex re(pattern);
    std::string out;
    for (const auto& rel : list_repository_files(repo_)) {
      if (fnmatch(file_glob.c_str(), rel.c_str(), 0) != 0) continue;
      std::ifstream in(repo_ / rel, std::ios::binary);
      std::string line;
      int n = 0;
      while (std::getline(in, line)) {
        ++n;
        if (std::regex_search(line, re)) {
          out += rel + ":" + std::to_string(n) + ":" + line + "\n";
          if (out.size() > kMaxToolOutput) return out;
        }
      }
    }
    return out;
  }
};

}  // namespace c2u::agents
