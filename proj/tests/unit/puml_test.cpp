#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "c2u/puml.hpp"

using namespace c2u;
using namespace c2u::puml;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = fs::path(C2U_FIXTURES) / "golden";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> rules_of(const LintReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) out.insert(v.rule);
  return out;
}

// Six participants, ten messages; tallied by hand.
const char* kSequenceFixture = R"(@startuml
actor User
participant Web
participant Api
participant Auth
participant Store
database Db
User -> Web : open()
Web -> Api : fetch()
Api -> Auth : verify()
Auth --> Api : token
Api -> Store : load()
Store -> Db : query()
Db --> Store : rows
Store --> Api : items
Api --> Web : page
Web --> User : render
@enduml
)";

}  // namespace

TEST(Parse, MinimalClassDiagram) {
  auto a = parse_artifact("class A\nclass B\nA --|> B", DiagramType::Class);
  EXPECT_EQ(a.element_names(), (std::set<std::string>{"A", "B"}));
  ASSERT_EQ(a.relationships.size(), 1u);
  EXPECT_EQ(a.relationships[0].source, "A");
  EXPECT_EQ(a.relationships[0].target, "B");
  EXPECT_EQ(a.relationships[0].kind, "generalization");
}

TEST(Parse, EmptyText) {
  for (auto dt : kAllDiagramTypes) {
    auto a = parse_artifact("", dt);
    EXPECT_TRUE(a.elements.empty());
    EXPECT_TRUE(a.relationships.empty());
  }
}

TEST(Parse, SequenceHandTally) {
  auto a = parse_artifact(kSequenceFixture, DiagramType::Sequence);
  EXPECT_EQ(a.element_names(), (std::set<std::string>{"User", "Web", "Api", "Auth", "Store", "Db"}));
  ASSERT_EQ(a.relationships.size(), 10u);
  int labelled = 0;
  for (const auto& r : a.relationships)
    if (r.label && !r.label->empty()) ++labelled;
  EXPECT_EQ(labelled, 10);
  EXPECT_EQ(a.relationships.front().source, "User");
  EXPECT_EQ(a.relationships.back().target, "User");
}

TEST(Parse, UndeclaredEndpointsAreNotElements) {
  auto a = parse_artifact("@startuml\nA -> B : hi()\n@enduml\n", DiagramType::Sequence);
  EXPECT_TRUE(a.elements.empty());
  ASSERT_EQ(a.relationships.size(), 1u);
  EXPECT_EQ(a.relationships[0].label.value_or(""), "hi()");
}

TEST(Parse, ActivityFacts) {
  auto a = parse_artifact(slurp(kGolden / "activity/clean.puml"), DiagramType::Activity);
  EXPECT_TRUE(a.facts.has_start);
  EXPECT_TRUE(a.facts.has_stop);
  EXPECT_EQ(a.facts.ifs_opened, a.facts.ifs_closed);
  EXPECT_GE(a.elements.size(), 5u);
}

TEST(Lint, CleanClassIsValid) {
  auto r = lint_text(slurp(kGolden / "class/clean.puml"), DiagramType::Class);
  EXPECT_EQ(r.verdict, Verdict::Valid);
  EXPECT_TRUE(r.violations.empty());
}

TEST(Lint, ContinueInActivity) {
  auto text = slurp(kGolden / "activity/continue.puml");
  auto out = lint_and_fix(text, DiagramType::Activity);
  EXPECT_EQ(rules_of(out.report), std::set<std::string>{"R4"});
  EXPECT_EQ(out.report.verdict, Verdict::Corrected);
  EXPECT_EQ(out.final_report.verdict, Verdict::Valid);
  EXPECT_EQ(out.text.find("continue"), std::string::npos);
}

TEST(Lint, ContinueOnlyFlaggedInActivity) {
  auto r = lint_text("@startuml\nclass continue_x\n@enduml\n", DiagramType::Class);
  EXPECT_EQ(r.verdict, Verdict::Valid);
}

TEST(Lint, ElseIfRewritten) {
  auto fixed = fix_text(slurp(kGolden / "activity/else_if.puml"), DiagramType::Activity);
  EXPECT_NE(fixed.find("elseif (POST?) then (yes)"), std::string::npos);
  EXPECT_EQ(lint_text(fixed, DiagramType::Activity).verdict, Verdict::Valid);
}

TEST(Lint, DeviceBecomesNode) {
  EXPECT_EQ(fix_text("@startuml\ndevice \"DB\" { }\n@enduml\n", DiagramType::Deployment),
            "@startuml\nnode \"DB\" { }\n@enduml\n");
}

TEST(Lint, OrthoRemoved) {
  auto out = lint_and_fix(slurp(kGolden / "class/linetype_ortho.puml"), DiagramType::Class);
  EXPECT_EQ(rules_of(out.report), std::set<std::string>{"R3"});
  EXPECT_EQ(out.text.find("ortho"), std::string::npos);
}

TEST(Lint, MissingDelimitersInserted) {
  auto out = lint_and_fix(slurp(kGolden / "class/missing_delimiters.puml"), DiagramType::Class);
  EXPECT_EQ(rules_of(out.report), std::set<std::string>{"R1"});
  EXPECT_EQ(out.text.rfind("@startuml", 0), 0u);
  EXPECT_EQ(out.final_report.verdict, Verdict::Valid);
}

TEST(Lint, EmptyTextIsMissingDelimiters) {
  auto r = lint_text("", DiagramType::Class);
  EXPECT_EQ(rules_of(r), std::set<std::string>{"R1"});
}

TEST(Lint, UnbalancedBracesBothDirections) {
  auto open = lint_and_fix(slurp(kGolden / "usecase/unbalanced_braces.puml"), DiagramType::Usecase);
  EXPECT_EQ(rules_of(open.report), std::set<std::string>{"R2"});
  EXPECT_EQ(open.final_report.verdict, Verdict::Valid);
  auto close = lint_and_fix(slurp(kGolden / "component/unbalanced_braces.puml"), DiagramType::Component);
  EXPECT_EQ(rules_of(close.report), std::set<std::string>{"R2"});
  EXPECT_EQ(close.final_report.verdict, Verdict::Valid);
}

TEST(Lint, BracesInsideQuotesIgnored) {
  auto r = lint_text("@startuml\nclass A {\n  +f(): \"{\"\n}\n@enduml\n", DiagramType::Class);
  EXPECT_EQ(r.verdict, Verdict::Valid);
}

TEST(Lint, ParticipantStereotypeStripped) {
  auto out = lint_and_fix(slurp(kGolden / "sequence/participant_stereotype.puml"), DiagramType::Sequence);
  EXPECT_EQ(rules_of(out.report), std::set<std::string>{"R7"});
  EXPECT_EQ(out.text.find("<<"), std::string::npos);
  EXPECT_EQ(out.final_report.verdict, Verdict::Valid);
}

TEST(Lint, PlaceholderNameIsUncorrectable) {
  auto r = lint_text("@startuml\nclass Foo\nclass Order\nFoo --> Order\n@enduml\n", DiagramType::Class);
  EXPECT_EQ(rules_of(r), std::set<std::string>{"R8"});
  EXPECT_EQ(r.verdict, Verdict::Uncorrectable);
  auto a = parse_artifact("@startuml\nclass Foo\n@enduml\n", DiagramType::Class);
  EXPECT_THROW(apply_fixes(a, lint(a)), UncorrectableError);
}

TEST(Lint, C4IsUncorrectableAndLeftUntouched) {
  auto text = slurp(kGolden / "system_context/c4_include.puml");
  auto out = lint_and_fix(text, DiagramType::SystemContext);
  EXPECT_EQ(out.report.verdict, Verdict::Uncorrectable);
  EXPECT_TRUE(out.report.uncorrectable);
  EXPECT_EQ(out.text, text);
  EXPECT_EQ(out.final_report.verdict, Verdict::Uncorrectable);
}

TEST(Lint, EveryRuleDocumented) {
  std::set<std::string> ids;
  for (const auto& r : lint_rules()) {
    EXPECT_FALSE(r.description.empty());
    ids.insert(r.id);
    EXPECT_EQ(r.correctable, r.fix != FixAction::None) << r.id;
  }
  for (int i = 1; i <= 9; ++i) EXPECT_TRUE(ids.count("R" + std::to_string(i)));
  EXPECT_THROW(lint_rule("R99"), std::out_of_range);
}

TEST(Lint, ReportJsonRoundTrip) {
  auto r = lint_text(slurp(kGolden / "sequence/markdown_fence.puml"), DiagramType::Sequence);
  auto back = LintReport::from_json(r.to_json());
  EXPECT_EQ(back.violations, r.violations);
  EXPECT_EQ(back.verdict, r.verdict);
}

TEST(Golden, ManifestVerdictsFixesAndIdempotence) {
  std::ifstream in(kGolden / "manifest.json");
  json manifest = json::parse(in);
  ASSERT_GE(manifest.size(), 21u);
  std::map<std::string, int> per_type;
  for (const auto& [rel, expect] : manifest.items()) {
    SCOPED_TRACE(rel);
    const auto dt = parse_diagram_type(fs::path(rel).parent_path().string());
    ASSERT_TRUE(dt.has_value());
    ++per_type[rel.substr(0, rel.find('/'))];
    const std::string text = slurp(kGolden / rel);
    auto report = lint_text(text, *dt);
    EXPECT_EQ(std::string(to_string(report.verdict)), expect.at("verdict").get<std::string>());
    std::set<std::string> want;
    for (const auto& r : expect.at("rules")) want.insert(r.get<std::string>());
    EXPECT_EQ(rules_of(report), want);
    if (report.verdict == Verdict::Uncorrectable) continue;
    auto art = parse_artifact(text, *dt);
    auto once = apply_fixes(art, report);
    EXPECT_EQ(lint(once).verdict, Verdict::Valid);
    auto twice = apply_fixes(once, lint(once));
    EXPECT_EQ(twice.text, once.text);
    EXPECT_EQ(fix_text(once.text, *dt), once.text);
  }
  EXPECT_EQ(per_type.size(), 7u);
  for (const auto& [t, n] : per_type) EXPECT_EQ(n, 3) << t;
}
