#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "c2u/extraction.hpp"
#include "c2u/normalization.hpp"
#include "c2u/view.hpp"

using namespace c2u;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = C2U_FIXTURES;

const ClassDef* find_class(const ProjectIR& ir, const std::string& name) {
  for (const auto& c : ir.classes)
    if (c.name == name) return &c;
  return nullptr;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("c2u_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  void write(const std::string& rel, const std::string& content) const {
    fs::create_directories((path / rel).parent_path());
    std::ofstream(path / rel) << content;
  }
};

}  // namespace

TEST(JavaExtractor, SingleClassSingleMethod) {
  extract::JavaExtractor x;
  auto r = x.extract_file("class Foo { void bar() {} }", "Foo.java");
  ASSERT_EQ(r.classes.size(), 1u);
  EXPECT_EQ(r.classes[0].name, "Foo");
  ASSERT_EQ(r.classes[0].methods.size(), 1u);
  EXPECT_EQ(r.classes[0].methods[0].name, "bar");
  EXPECT_FALSE(r.had_errors);
}

TEST(JavaExtractor, ModifiersInheritanceAndCalls) {
  extract::JavaExtractor x;
  auto r = x.extract_file(R"(package a.b;
public class Svc extends base.Parent implements Runnable, java.io.Closeable {
  private final Map<String, Order> store = new HashMap<>();
  protected int count, total;
  public void run() { helper(); store.clear(); }
  void helper() {}
}
interface Port { void send(String msg); }
)", "a/b/Svc.java");
  ASSERT_EQ(r.classes.size(), 2u);
  const auto& s = r.classes[0];
  EXPECT_EQ(s.name, "Svc");
  EXPECT_EQ(s.visibility, "public");
  EXPECT_EQ(s.extends, std::vector<std::string>{"base.Parent"});
  EXPECT_EQ(s.implements, (std::vector<std::string>{"Runnable", "java.io.Closeable"}));
  ASSERT_EQ(s.attributes.size(), 3u);
  EXPECT_EQ(s.attributes[0].name, "store");
  EXPECT_EQ(s.attributes[0].visibility, "private");
  EXPECT_EQ(s.attributes[1].name, "count");
  EXPECT_EQ(s.attributes[2].name, "total");
  ASSERT_EQ(s.methods.size(), 2u);
  EXPECT_EQ(s.methods[0].visibility, "public");
  EXPECT_EQ(s.methods[1].visibility, "");
  EXPECT_NE(std::find(s.methods[0].calls.begin(), s.methods[0].calls.end(), "helper"), s.methods[0].calls.end());
  EXPECT_EQ(r.classes[1].kind, ClassKind::Interface);
}

TEST(PythonExtractor, QualifiedBaseStoredVerbatim) {
  extract::PythonExtractor x;
  auto r = x.extract_file("import pkg.mod\n\nclass Child(pkg.mod.Base):\n    def _helper(self, a: int):\n        return 1\n",
                          "child.py");
  ASSERT_EQ(r.classes.size(), 1u);
  EXPECT_EQ(r.classes[0].extends, std::vector<std::string>{"pkg.mod.Base"});
  ASSERT_EQ(r.classes[0].methods.size(), 1u);
  EXPECT_EQ(r.classes[0].methods[0].name, "_helper");
  auto ir = normalize(ProjectIR{"p", {"python"}, r.classes, {}, {}, false});
  EXPECT_EQ(ir.classes[0].extends, std::vector<std::string>{"Base"});
  EXPECT_EQ(ir.classes[0].methods[0].visibility, "protected");
}

TEST(PythonExtractor, TopLevelFunctions) {
  extract::PythonExtractor x;
  auto r = x.extract_file("def a():\n    b()\n    return 2\n\ndef b():\n    pass\n", "m.py");
  ASSERT_EQ(r.functions.size(), 2u);
  EXPECT_EQ(r.functions[0].name, "a");
  EXPECT_EQ(r.functions[0].calls, std::vector<std::string>{"b"});
  EXPECT_GE(r.functions[0].line_count, 2);
}

TEST(JavaScriptExtractor, ClassesAndFunctions) {
  extract::JavaScriptExtractor x;
  auto r = x.extract_file(R"(class Cart extends Base {
  #secret = 1;
  add(item) { this.items.push(item); validate(item); }
}
function validate(item) {
  return !!item;
}
)", "cart.js");
  ASSERT_EQ(r.classes.size(), 1u);
  EXPECT_EQ(r.classes[0].name, "Cart");
  EXPECT_EQ(r.classes[0].extends, std::vector<std::string>{"Base"});
  ASSERT_FALSE(r.classes[0].methods.empty());
  EXPECT_EQ(r.classes[0].methods[0].name, "add");
  ASSERT_EQ(r.functions.size(), 1u);
  EXPECT_EQ(r.functions[0].name, "validate");
}

TEST(PhpExtractor, ClassWithVisibilities) {
  extract::PhpExtractor x;
  auto r = x.extract_file(R"(<?php
namespace App\Models;
class User extends \App\Base implements \JsonSerializable {
  private $name;
  var $legacy;
  public function getName() { return $this->name; }
  protected function touch() {}
}
)", "User.php");
  ASSERT_EQ(r.classes.size(), 1u);
  const auto& c = r.classes[0];
  EXPECT_EQ(c.name, "User");
  ASSERT_EQ(c.extends.size(), 1u);
  EXPECT_EQ(detail::last_segment(c.extends[0]), "Base");
  ASSERT_EQ(c.methods.size(), 2u);
  EXPECT_EQ(c.methods[0].visibility, "public");
  EXPECT_EQ(c.methods[1].visibility, "protected");
  ASSERT_EQ(c.attributes.size(), 2u);
  auto ir = normalize(ProjectIR{"p", {"php"}, r.classes, {}, {}, false});
  EXPECT_EQ(ir.classes[0].attributes[1].visibility, "public");
}

TEST(Extraction, MalformedFileTolerated) {
  auto res = extract_project(kFixtures / "repos/malformed", {"python", "java"});
  EXPECT_EQ(res.report.files_scanned, 3);
  EXPECT_EQ(res.report.files_with_errors, 1);
  ASSERT_EQ(res.report.error_files.size(), 1u);
  EXPECT_EQ(res.report.error_files[0], "pkg/broken.py");
  EXPECT_NE(find_class(res.ir, "Alpha"), nullptr);
  EXPECT_NE(find_class(res.ir, "Beta"), nullptr);
  bool helper = std::any_of(res.ir.functions.begin(), res.ir.functions.end(), [](const auto& f) { return f.name == "helper"; });
  EXPECT_TRUE(helper);
}

TEST(Extraction, ValidClassBeforeSyntaxErrorSurvives) {
  TempDir d("valid_then_broken");
  d.write("m.py", "class Good:\n    def ok(self):\n        return 1\n\nclass Bad(\n    def x(:\n");
  auto res = extract_project(d.path, {"python"});
  EXPECT_NE(find_class(res.ir, "Good"), nullptr);
  EXPECT_EQ(res.report.files_with_errors, 1);
}

TEST(Extraction, ShopFixture) {
  auto res = extract_project(kFixtures / "repos/shop", {"java"});
  std::set<std::string> names;
  for (const auto& c : res.ir.classes) names.insert(c.name);
  EXPECT_EQ(names, (std::set<std::string>{"AuditedGateway", "CardPaymentGateway", "Order", "OrderController",
                                          "OrderRepository", "OrderService", "PaymentGateway"}));
  EXPECT_EQ(res.report.files_with_errors, 0);
  EXPECT_TRUE(res.ir.metadata.count("docker:Dockerfile"));
  EXPECT_TRUE(res.ir.metadata.count("compose:docker-compose.yml"));
  EXPECT_FALSE(res.ir.normalized);
}

TEST(Extraction, UnsupportedLanguageThrows) {
  EXPECT_THROW(extract_project(kFixtures / "repos/shop", {"cobol"}), UnsupportedLanguage);
}

TEST(Extraction, DeterministicOnRepeat) {
  auto a = extract_project(kFixtures / "repos/inventory", {"python"});
  auto b = extract_project(kFixtures / "repos/inventory", {"python"});
  EXPECT_EQ(serialize(a.ir), serialize(b.ir));
}

TEST(DetectLanguages, JavaOnly) { EXPECT_EQ(detect_languages(kFixtures / "repos/shop"), std::set<std::string>{"java"}); }

TEST(DetectLanguages, EmptyDirectory) {
  TempDir d("empty");
  EXPECT_TRUE(detect_languages(d.path).empty());
}

TEST(DetectLanguages, MixedPythonJavaScript) {
  TempDir d("mixed");
  d.write("a/x.py", "x = 1\n");
  d.write("b/y.js", "let y = 1;\n");
  d.write("README.md", "# readme\n");
  d.write("node_modules/z/z.php", "<?php\n");
  EXPECT_EQ(detect_languages(d.path), (std::set<std::string>{"javascript", "python"}));
}
