#include <gtest/gtest.h>

#include <sstream>

#include "c2u/cli/app.hpp"
#include "../support/harness.hpp"

using namespace c2u;
using namespace c2u::cli;
using namespace c2u::testenv;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string repo(const char* name) { return (kFixtures / "repos" / name).string(); }

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(CliExtract, WritesNormalizedIr) {
  auto dir = scratch("cli_extract");
  auto r = invoke({"extract", repo("shop"), "-o", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto ir = deserialize(slurp(dir / "shop.norm.ir.json"));
  EXPECT_TRUE(ir.normalized);
  EXPECT_EQ(ir.classes.size(), 7u);
  auto report = json::parse(slurp(dir / "shop.extraction.json"));
  EXPECT_EQ(report["files_with_errors"], 0);
}

TEST(CliExtract, RawKeepsUnnormalized) {
  auto dir = scratch("cli_extract_raw");
  ASSERT_EQ(invoke({"extract", repo("inventory"), "-o", dir.string(), "--raw"}).code, kExitOk);
  auto ir = deserialize(slurp(dir / "inventory.raw.ir.json"));
  EXPECT_FALSE(ir.normalized);
  EXPECT_EQ(normalize(ir), normalize(normalize(ir)));
}

TEST(CliExtract, MalformedCountsErrors) {
  auto dir = scratch("cli_extract_bad");
  ASSERT_EQ(invoke({"extract", repo("malformed"), "-o", dir.string()}).code, kExitOk);
  auto report = json::parse(slurp(dir / "malformed.extraction.json"));
  EXPECT_EQ(report["files_with_errors"], 1);
  EXPECT_EQ(report["error_files"], json::array({"pkg/broken.py"}));
}

TEST(CliExtract, EmptyRepositoryExitsTwo) {
  auto dir = scratch("cli_extract_empty");
  fs::create_directories(dir / "repo");
  EXPECT_EQ(invoke({"extract", (dir / "repo").string(), "-o", dir.string(), "--languages", "python"}).code, kExitEmptyIr);
  EXPECT_EQ(invoke({"extract", (dir / "missing").string()}).code, kExitError);
}

TEST(CliView, SmallProjectNeedsNoShrinking) {
  auto dir = scratch("cli_view");
  auto r = invoke({"view", repo("shop"), "-d", "all", "-o", dir.string(), "--explain"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (auto dt : kAllDiagramTypes) {
    auto doc = json::parse(slurp(dir / ("view_" + std::string(to_string(dt)) + ".json")));
    EXPECT_EQ(doc["shrink_iterations"], 0);
    EXPECT_LE(doc["byte_size"].get<std::size_t>(), budget_bytes(dt));
    EXPECT_TRUE(fs::exists(dir / ("view_" + std::string(to_string(dt)) + ".explain.csv")));
  }
}

TEST(CliView, UnknownTypeIsUsageError) {
  auto r = invoke({"view", repo("shop"), "-d", "flowchart"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("unknown diagram type"), std::string::npos);
  EXPECT_EQ(invoke({}).code, kExitError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitError);
}

TEST(CliGenerate, ComponentWritesOneDiagram) {
  auto dir = scratch("cli_generate");
  auto r = invoke({"generate", repo("shop"), "-d", "component", "--backend", "mock", "-o", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  int puml = 0;
  for (const auto& e : fs::directory_iterator(dir / "shop/component")) puml += e.path().extension() == ".puml";
  EXPECT_EQ(puml, 1);
  auto m = json::parse(slurp(dir / "shop/component/metrics.json"));
  EXPECT_EQ(m["diagram_count"], 1);
}

TEST(CliGenerate, ApiWithoutKeyFailsFast) {
  ::unsetenv("C2U_API_KEY");
  auto dir = scratch("cli_generate_api");
  auto r = invoke({"generate", repo("shop"), "-d", "class", "--backend", "api", "-o", dir.string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("C2U_API_KEY"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "shop"));
}

TEST(CliGenerate, BadBackendRejected) {
  EXPECT_EQ(invoke({"generate", repo("shop"), "-d", "class", "--backend", "carrier-pigeon"}).code, kExitError);
}

TEST(CliLint, ExitCodesFollowVerdict) {
  auto g = kFixtures / "golden";
  EXPECT_EQ(invoke({"lint", (g / "class/clean.puml").string()}).code, kExitOk);
  EXPECT_EQ(invoke({"lint", (g / "activity/continue.puml").string()}).code, kExitCorrected);
  EXPECT_EQ(invoke({"lint", (g / "system_context/c4_include.puml").string()}).code, kExitUncorrectable);
  auto r = invoke({"lint", (g / "class/clean.puml").string(), "--json"});
  EXPECT_EQ(json::parse(r.out)["report"]["verdict"], "valid");
}

TEST(CliLint, FixRewritesInPlace) {
  auto dir = scratch("cli_lint_fix");
  auto f = dir / "scratch.puml";
  fs::copy_file(kFixtures / "golden/deployment/device.puml", f);
  EXPECT_EQ(invoke({"lint", f.string(), "-t", "deployment", "--fix"}).code, kExitCorrected);
  EXPECT_EQ(invoke({"lint", f.string(), "-t", "deployment"}).code, kExitOk);
  EXPECT_EQ(invoke({"lint", f.string()}).code, kExitError);  // type not inferable from "cli_lint_fix"
}

TEST(CliMetrics, ScoresGeneratedDirectory) {
  auto dir = scratch("cli_metrics");
  ASSERT_EQ(invoke({"generate", repo("shop"), "-d", "class", "-o", dir.string()}).code, kExitOk);
  auto r = invoke({"metrics", "--ir", repo("shop"), "--diagrams", (dir / "shop/class").string(), "-o", (dir / "m").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto m = json::parse(slurp(dir / "m/metrics.json"));
  EXPECT_EQ(m["diagram_type"], "class");
  EXPECT_GE(m["entity_recall"].get<double>(), 0.0);
  EXPECT_LE(m["entity_recall"].get<double>(), 1.0);
  EXPECT_TRUE(fs::exists(dir / "m/observations.csv"));
  // Whole project directory: one report per type subdirectory.
  auto all = invoke({"metrics", "--ir", repo("shop"), "--diagrams", (dir / "shop").string()});
  ASSERT_EQ(all.code, kExitOk);
  EXPECT_TRUE(json::parse(all.out).is_object());
}

TEST(CliMetrics, EmptyDirectoryIsError) {
  auto dir = scratch("cli_metrics_empty");
  auto r = invoke({"metrics", "--ir", repo("shop"), "--diagrams", dir.string(), "-t", "class"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("no .puml"), std::string::npos);
}

TEST(CliEvaluate, FourteenRowsAndResume) {
  auto dir = scratch("cli_evaluate");
  const std::string corpus = (kFixtures / "corpus.ini").string();
  auto r = invoke({"--deterministic", "evaluate", "--corpus", corpus, "-o", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto rows = lines_of(slurp(dir / "observations.csv"));
  EXPECT_EQ(rows.size(), 1u + 14u);
  auto before = tree_snapshot(dir);
  auto again = invoke({"--deterministic", "evaluate", "--corpus", corpus, "-o", dir.string(), "--resume"});
  ASSERT_EQ(again.code, kExitOk) << again.err;
  EXPECT_NE(again.out.find("shop/class: resumed"), std::string::npos);
  EXPECT_EQ(slurp(dir / "observations.csv"), before["observations.csv"]);
}

TEST(CliEvaluate, MalformedCorpusRejected) {
  auto dir = scratch("cli_evaluate_bad");
  std::ofstream(dir / "nopath.ini") << "[project:x]\nlanguages = java\n";
  std::ofstream(dir / "missing.ini") << "[project:x]\npath = nowhere\n";
  std::ofstream(dir / "empty.ini") << "[run]\nbackend = mock\n";
  for (const char* f : {"nopath.ini", "missing.ini", "empty.ini"}) {
    auto r = invoke({"evaluate", "--corpus", (dir / f).string(), "-o", (dir / "out").string()});
    EXPECT_EQ(r.code, kExitError) << f;
    EXPECT_FALSE(r.err.empty()) << f;
  }
}

TEST(Config, ValidationErrors) {
  auto dir = scratch("cli_config");
  auto load = [&](const std::string& body) {
    std::ofstream(dir / "c.ini") << body;
    return RunConfig::load(dir / "c.ini");
  };
  EXPECT_THROW(load("[run]\nbackend = smoke\n"), ConfigError);
  EXPECT_THROW(load("[run]\nconcurrency = 0\n"), ConfigError);
  EXPECT_THROW(load("[run]\nconcurrency = many\n"), ConfigError);
  EXPECT_THROW(load("[budgets]\nsingle = 100\n"), ConfigError);
  EXPECT_THROW(load("[weights]\ninheritance = -1\n"), ConfigError);
  EXPECT_THROW(load("[density]\nclass = 10\n"), ConfigError);
  EXPECT_THROW(load("[density]\nflowchart = 1,2\n"), ConfigError);
  EXPECT_THROW(load("[run]\ntypes = class,flowchart\n"), ConfigError);
  EXPECT_THROW(load("[run\nbackend = mock\n"), ConfigError);
  auto c = load("[run]\ntypes = class, sequence\nconcurrency = 2\n[budgets]\nsingle = 8192\n[density]\nclass = 5,15\n");
  EXPECT_EQ(c.types, (std::vector<DiagramType>{DiagramType::Class, DiagramType::Sequence}));
  EXPECT_EQ(c.view_options(DiagramType::Component).budget_bytes, 8192u);
  EXPECT_EQ(c.metrics.density_bands.at(DiagramType::Class).hi, 15.0);
}

TEST(Config, RelativePathsResolveAgainstFile) {
  auto c = RunConfig::load(kFixtures / "corpus.ini");
  ASSERT_EQ(c.corpus.size(), 2u);
  EXPECT_EQ(c.corpus[0].name, "shop");
  EXPECT_TRUE(fs::is_directory(c.corpus[0].path));
  EXPECT_EQ(c.corpus[1].languages, std::set<std::string>{"python"});
}
