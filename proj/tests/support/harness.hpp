#pragma once

// Scratch directories and mock-backend scripts shared by the agent suites
// and the acceptance binary.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "c2u/agents/events.hpp"
#include "c2u/extraction.hpp"
#include "c2u/normalization.hpp"

namespace c2u::testenv {

namespace fs = std::filesystem;
using agents::EventKind;
using agents::EventLog;
using agents::RunEvent;

inline const fs::path kFixtures = C2U_FIXTURES;

inline fs::path scratch(const std::string& name) {
  fs::path p = fs::path(C2U_SCRATCH) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline void write_json(const fs::path& p, const json& j) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << j.dump(2);
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> bytes for every regular file under `root`.
inline std::map<std::string, std::string> tree_snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  return out;
}

inline ProjectIR project_ir(const std::string& repo, const std::set<std::string>& langs) {
  auto ir = normalize(extract_project(kFixtures / "repos" / repo, langs).ir);
  ir.project_name = repo;
  return ir;
}

inline json text_turn(const std::string& text) { return json::array({{{"type", "text"}, {"text", text}}}); }

inline json write_turn(const std::string& content) {
  return json::array({{{"type", "tool_call"},
                       {"id", "w1"},
                       {"tool", "Write"},
                       {"input", {{"path", "{{OUTPUT_PATH}}"}, {"content", content}}}}});
}

inline const char* kShopClassDiagram = R"(@startuml
class OrderService
class OrderRepository
class Order
OrderService --> OrderRepository : saves
OrderRepository --> Order : stores
@enduml
)";

// Planner script with three directory scopes of the shop fixture.
inline json shop_plan() {
  json scopes = json::array({
      {{"label", "orders"},
       {"files", {"src/shop/orders/Order.java", "src/shop/orders/OrderRepository.java", "src/shop/orders/OrderService.java"}},
       {"rationale", "domain"}},
      {{"label", "payments"},
       {"files", {"src/shop/payments/AuditedGateway.java", "src/shop/payments/CardPaymentGateway.java",
                  "src/shop/payments/PaymentGateway.java"}},
       {"rationale", "gateways"}},
      {{"label", "web"}, {"files", {"src/shop/web/OrderController.java"}}, {"rationale", "entry points"}},
  });
  return json{{"scopes", scopes}};
}

inline json plan_script(const json& plan) { return json{{"turns", json::array({text_turn(plan.dump())})}}; }

// Diagram script writing `content`, optionally slowed down per turn.
inline json diagram_script(const std::string& content, int delay_ms = 0) {
  return json{{"turns", json::array({write_turn(content), text_turn("done")})}, {"delay_ms", delay_ms}};
}

inline std::vector<RunEvent> events_of(const EventLog& log, EventKind kind) {
  std::vector<RunEvent> out;
  for (auto& e : log.snapshot())
    if (e.kind == kind) out.push_back(e);
  return out;
}

inline long index_of(const EventLog& log, EventKind kind, const std::string& session) {
  for (const auto& e : log.snapshot())
    if (e.kind == kind && e.session == session) return e.index;
  return -1;
}

}  // namespace c2u::testenv
