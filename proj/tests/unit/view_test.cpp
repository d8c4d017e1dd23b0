#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>

#include "c2u/normalization.hpp"
#include "c2u/view.hpp"
#include "../support/gen.hpp"

using namespace c2u;

namespace {

ClassDef cls(std::string name, int methods, int attrs, std::vector<std::string> extends = {}) {
  ClassDef c;
  c.name = std::move(name);
  c.visibility = "public";
  c.source_file = "src/" + c.name + ".java";
  for (int i = 0; i < methods; ++i) c.methods.push_back({"m" + std::to_string(i), "public", std::nullopt, {}, {}});
  for (int i = 0; i < attrs; ++i) c.attributes.push_back({"a" + std::to_string(i), "private", std::nullopt});
  c.extends = std::move(extends);
  return c;
}

// Hand-built view document for the uniform fixture below (sorted keys,
// compact), used to find the first element budget that fits.
std::string uniform_record(const std::string& name) {
  return R"({"attributes":[{"name":"a0","visibility":"private"}],"extends":[],"implements":[],"kind":"class",)"
         R"("methods":[{"name":"m0","params":[],"visibility":"public"},{"name":"m1","params":[],"visibility":"public"}],)"
         R"("name":")" + name + R"(","source_file":"src/)" + name + R"(.java","visibility":"public"})";
}

std::string uniform_document(std::size_t take, int k, std::size_t byte_size, std::size_t total) {
  std::string elems;
  char buf[16];
  for (std::size_t i = 0; i < take; ++i) {
    std::snprintf(buf, sizeof buf, "C%04u", static_cast<unsigned>(i % 10000));
    elems += (i ? "," : "") + uniform_record(buf);
  }
  return R"({"budget_bytes":102400,"byte_size":)" + std::to_string(byte_size) +
         R"(,"detail_caps":{"max_attributes":5,"max_methods":5},"diagram_type":"class","element_budget":)" +
         std::to_string(take) + R"(,"elements":[)" + elems + R"(],"project_name":"uniform","schema_version":1,)" +
         R"("shrink_iterations":)" + std::to_string(k) + R"(,"source_element_count":)" + std::to_string(total) + "}";
}

std::size_t oracle_size(std::size_t take, int k, std::size_t total) {
  // Fixed point: the document embeds its own length.
  std::size_t guess = 0;
  for (int i = 0; i < 10; ++i) guess = uniform_document(take, k, guess, total).size();
  return guess;
}

ProjectIR uniform_ir(int n) {
  ProjectIR ir;
  ir.project_name = "uniform";
  ir.normalized = true;
  char buf[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "C%04d", i);
    ir.classes.push_back(cls(buf, 2, 1));
  }
  return ir;
}

}  // namespace

TEST(Score, ZeroCase) {
  auto s = score_class(cls("X", 0, 0), DiagramType::Class);
  EXPECT_EQ(s.score, 0.0);
}

TEST(Score, UserServiceWorkedExample) {
  auto s = score_class(cls("UserService", 3, 2, {"Base"}), DiagramType::Class);
  EXPECT_EQ(s.score, 3 + 2 + 10 + 15);
}

TEST(Score, InheritanceAddsExactlyTen) {
  auto a = score_class(cls("Plain", 4, 1), DiagramType::Class);
  auto b = score_class(cls("Plain", 4, 1, {"Base"}), DiagramType::Class);
  EXPECT_EQ(b.score - a.score, 10.0);
}

TEST(Score, PatternMatchIsCaseInsensitiveSubstring) {
  EXPECT_TRUE(matches_architectural_pattern("orderREPOSITORYimpl"));
  EXPECT_FALSE(matches_architectural_pattern("Widget"));
}

TEST(Score, FunctionCallChainOnlyForBehavioralTypes) {
  FunctionDef f{"f", "m.py", {}, {}, 7};
  EXPECT_EQ(score_function(f, DiagramType::Sequence).score, 7.0);
  f.calls = {"a", "b", "c", "d"};
  EXPECT_EQ(score_function(f, DiagramType::Sequence).score - score_function(f, DiagramType::Class).score, 12.0);
  FunctionDef z{"z", "m.py", {}, {}, 0};
  EXPECT_EQ(score_function(z, DiagramType::Activity).score, 0.0);
}

TEST(Select, BudgetCoversAll) {
  ProjectIR ir;
  ir.classes = {cls("A", 1, 0), cls("B", 3, 0), cls("C", 2, 0)};
  auto sel = select_elements(ir, DiagramType::Class, 10);
  ASSERT_EQ(sel.size(), 3u);
  EXPECT_EQ(sel[0].score.name, "B");
  EXPECT_EQ(sel[1].score.name, "C");
  EXPECT_EQ(sel[2].score.name, "A");
  auto one = select_elements(ir, DiagramType::Class, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].score.name, "B");
  EXPECT_THROW(select_elements(ir, DiagramType::Class, 0), std::invalid_argument);
}

TEST(Select, TopThreeMatchesBruteForce) {
  ProjectIR ir;
  ir.classes = {cls("Zeta", 5, 0), cls("OrderService", 0, 0), cls("Alpha", 5, 0), cls("Child", 0, 1, {"Base"}),
                cls("Beta", 2, 2)};
  // Hand-computed: Zeta 5, OrderService 15, Alpha 5, Child 11, Beta 4.
  std::vector<std::pair<double, std::string>> oracle{{5, "Zeta"}, {15, "OrderService"}, {5, "Alpha"}, {11, "Child"}, {4, "Beta"}};
  std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  auto sel = select_elements(ir, DiagramType::Class, 3);
  ASSERT_EQ(sel.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(sel[i].score.name, oracle[i].second);
    EXPECT_EQ(sel[i].score.score, oracle[i].first);
  }
}

TEST(Detail, TierTable) {
  EXPECT_EQ(scale_detail(31), (DetailCaps{20, 20}));
  EXPECT_EQ(scale_detail(4578), (DetailCaps{5, 5}));
  EXPECT_EQ(scale_detail(200), (DetailCaps{8, 8}));
  // Total and monotone non-increasing.
  DetailCaps prev = scale_detail(0);
  for (std::size_t n = 1; n < 10000; ++n) {
    auto c = scale_detail(n);
    ASSERT_LE(c.max_methods, prev.max_methods);
    ASSERT_LE(c.max_attributes, prev.max_attributes);
    ASSERT_GE(c.max_methods, 5);
    prev = c;
  }
}

TEST(Project, ClassMethodsCappedInDeclarationOrder) {
  ProjectIR ir;
  ir.classes = {cls("Big", 30, 0)};
  auto view = generate_view(ir, DiagramType::Class);
  const auto& methods = view.elements.at(0).at("methods");
  ASSERT_EQ(methods.size(), 20u);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(methods[static_cast<std::size_t>(i)].at("name"), "m" + std::to_string(i));
}

TEST(Project, DeploymentWithoutMetadataIsDirectorySkeleton) {
  ProjectIR ir;
  ir.classes = {cls("A", 1, 0), cls("B", 1, 0)};
  ir.classes[1].source_file = "lib/B.java";
  auto view = generate_view(ir, DiagramType::Deployment);
  ASSERT_EQ(view.elements.size(), 2u);
  for (const auto& e : view.elements) EXPECT_EQ(e.at("kind"), "directory");
  EXPECT_EQ(view.elements[0].at("name"), "lib");
  EXPECT_EQ(view.elements[1].at("name"), "src");
}

TEST(Project, DeploymentCarriesInfrastructure) {
  ProjectIR ir;
  ir.classes = {cls("A", 1, 0)};
  ir.metadata["docker:Dockerfile"] = "FROM alpine";
  auto view = generate_view(ir, DiagramType::Deployment);
  ASSERT_EQ(view.elements.size(), 2u);
  EXPECT_EQ(view.elements[0].at("kind"), "infrastructure");
}

TEST(Project, UsecaseHasNoAttributes) {
  testgen::Gen g(8);
  for (int i = 0; i < 20; ++i) {
    auto ir = normalize(g.ir({}));
    auto view = generate_view(ir, DiagramType::Usecase);
    ASSERT_EQ(view.text.find("\"attributes\""), std::string::npos);
  }
}

TEST(View, SmallIrUnderBudget) {
  ProjectIR ir;
  ir.project_name = "small";
  for (int i = 0; i < 5; ++i) ir.classes.push_back(cls("K" + std::to_string(i), 3, 2));
  auto v = generate_view(ir, DiagramType::Class);
  EXPECT_EQ(v.shrink_iterations, 0);
  EXPECT_EQ(v.retained.size(), 5u);
  EXPECT_EQ(v.text.size(), v.byte_size);
  EXPECT_EQ(json::parse(v.text).at("byte_size").get<std::size_t>(), v.byte_size);
}

TEST(View, ShrinkIterationsMatchSerializerOracle) {
  const int n = 4000;
  auto ir = uniform_ir(n);
  ASSERT_GT(uniform_record("C0000").size(), 150u);
  int expect_k = -1;
  std::size_t take = n;
  for (int k = 0; k < 20; ++k) {
    if (oracle_size(take, k, n) <= kDeepBudgetBytes) {
      expect_k = k;
      break;
    }
    take = (take + 1) / 2;
  }
  ASSERT_GE(expect_k, 1);
  auto v = generate_view(ir, DiagramType::Class);
  EXPECT_EQ(v.shrink_iterations, expect_k);
  EXPECT_EQ(v.retained.size(), take);
  EXPECT_TRUE(v.text == uniform_document(take, expect_k, v.byte_size, n));
  EXPECT_EQ(v.byte_size, oracle_size(take, expect_k, n));
}

TEST(View, IrreducibleWhenOneElementExceedsBudget) {
  ProjectIR ir;
  ir.classes = {cls("Huge", 20, 20)};
  ViewOptions o;
  o.budget_bytes = 200;
  EXPECT_THROW(generate_view(ir, DiagramType::Class, o), IrreducibleView);
}

TEST(View, EmptyIrYieldsEmptyView) {
  ProjectIR ir;
  ir.project_name = "e";
  for (auto dt : kAllDiagramTypes) {
    auto v = generate_view(ir, dt);
    EXPECT_TRUE(v.elements.empty()) << to_string(dt);
    EXPECT_EQ(v.shrink_iterations, 0);
  }
}

TEST(ViewProperty, BudgetDeterminismAndSurvival) {
  testgen::Gen g(4242);
  for (int i = 0; i < 60; ++i) {
    testgen::GenOptions o;
    o.max_classes = i % 10 == 0 ? 1500 : 120;
    o.max_functions = i % 10 == 0 ? 1500 : 120;
    auto ir = normalize(g.ir(o));
    for (auto dt : kAllDiagramTypes) {
      auto v = generate_view(ir, dt);
      ASSERT_LE(v.byte_size, budget_bytes(dt));
      ASSERT_EQ(v.text.size(), v.byte_size);
      ASSERT_EQ(generate_view(ir, dt).text, v.text);
      // Retained elements are a prefix of the ranking.
      auto ranked = rank_elements(ir, dt);
      ASSERT_LE(v.retained.size(), ranked.size());
      for (std::size_t k = 0; k < v.retained.size(); ++k) ASSERT_EQ(v.retained[k], ranked[k].score.name);
    }
  }
}

TEST(ViewProperty, CoverageMonotoneInBudget) {
  testgen::Gen g(77);
  for (int i = 0; i < 20; ++i) {
    testgen::GenOptions o;
    o.min_classes = 100;
    o.max_classes = 300;
    auto ir = normalize(g.ir(o));
    std::size_t prev = 0;
    for (std::size_t budget : {8192u, 16384u, 32768u, 65536u, 131072u}) {
      ViewOptions vo;
      vo.budget_bytes = budget;
      auto v = generate_view(ir, DiagramType::Class, vo);
      ASSERT_GE(v.retained.size(), prev);
      prev = v.retained.size();
    }
  }
}

TEST(Explain, CsvListsEveryCandidate) {
  ProjectIR ir;
  ir.classes = {cls("A", 1, 0), cls("B", 2, 0)};
  auto v = generate_view(ir, DiagramType::Class);
  auto csv = explain_csv(ir, DiagramType::Class, v);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
