#pragma once

// Automated diagram metrics: entity recall, relationship precision,
// validity rate, the five quality sub-scores and their mean, the structural
// complexity index, and the per-observation correction classifier.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "c2u/ir.hpp"
#include "c2u/puml.hpp"
#include "c2u/view.hpp"

namespace c2u::metrics {

using puml::DiagramArtifact;
using puml::LintReport;
using puml::Verdict;

struct DensityBand {
  double lo;
  double hi;
};

struct MetricsConfig {
  std::map<DiagramType, DensityBand> density_bands = {
      {DiagramType::Class, {0.5, 1.5}},      {DiagramType::Sequence, {2.0, 8.0}},
      {DiagramType::Activity, {0.8, 1.5}},   {DiagramType::Component, {1.0, 3.0}},
      {DiagramType::Deployment, {0.5, 1.5}}, {DiagramType::Usecase, {0.8, 1.5}},
      {DiagramType::SystemContext, {0.7, 1.5}}};
};

inline double sci(double E, double R) {
  if (E <= 0) return 0.0;
  return E * std::log2(1.0 + 2.0 * R / E);
}

inline double density_score(double E, double R, DensityBand band) {
  if (E <= 0) return 0.0;
  const double rho = R / E;
  if (rho >= band.lo && rho <= band.hi) return 100.0;
  const double dist = rho < band.lo ? band.lo - rho : rho - band.hi;
  const double width = band.hi - band.lo;
  return 100.0 * std::max(0.0, 1.0 - dist / width);
}

// Words in an identifier or phrase: camelCase humps, snake_case, spaces.
inline int word_count(const std::string& name) {
  int words = 0;
  bool in_word = false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(name[i]);
    if (!std::isalnum(c)) {
      in_word = false;
      continue;
    }
    bool boundary = !in_word;
    if (in_word && std::isupper(c)) {
      const unsigned char p = static_cast<unsigned char>(name[i - 1]);
      const bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
      if (std::islower(p) || std::isdigit(p) || (std::isupper(p) && next_lower)) boundary = true;
    }
    if (boundary) ++words;
    in_word = true;
  }
  return words;
}

struct QualitySubscores {
  double density = 0;
  double connectivity = 0;
  double labeling = 0;
  double documentation = 0;
  double structure = 0;
};

inline double quality_score(const QualitySubscores& s) {
  return (s.density + s.connectivity + s.labeling + s.documentation + s.structure) / 5.0;
}

struct ChecklistItem {
  std::string name;
  bool passed;
};

namespace detail {

inline std::map<std::string, int> degrees(const DiagramArtifact& a) {
  std::map<std::string, int> deg;
  for (const auto& r : a.relationships) {
    ++deg[r.source];
    if (r.target != r.source) ++deg[r.target];
  }
  return deg;
}

inline bool contains_ci(std::string s, const std::string& needle) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s.find(needle) != std::string::npos;
}

inline bool is_external(const puml::Element& e) {
  return contains_ci(e.kind, "_ext") || (e.stereotype && contains_ci(*e.stereotype, "ext"));
}

}  // namespace detail

inline std::vector<ChecklistItem> structure_checklist(const DiagramArtifact& a) {
  const auto deg = detail::degrees(a);
  auto degree = [&](const std::string& n) {
    auto it = deg.find(n);
    return it == deg.end() ? 0 : it->second;
  };
  std::vector<ChecklistItem> items;
  switch (a.diagram_type) {
    case DiagramType::Activity:
      items.push_back({"has start node", a.facts.has_start});
      items.push_back({"has stop node", a.facts.has_stop});
      items.push_back({"every if closed", a.facts.ifs_opened == a.facts.ifs_closed});
      break;
    case DiagramType::Sequence: {
      bool declared = true;
      for (const auto& r : a.relationships)
        if (!a.elements.count(r.source) || !a.elements.count(r.target)) declared = false;
      items.push_back({"message endpoints declared", declared});
      items.push_back({"has activation", a.facts.activations > 0});
      break;
    }
    case DiagramType::Class: {
      bool hierarchy = std::any_of(a.relationships.begin(), a.relationships.end(), [](const puml::Relationship& r) {
        return r.kind == "generalization" || r.kind == "realization" || r.kind == "composition";
      });
      bool no_orphan_interface = true;
      for (const auto& [n, e] : a.elements)
        if (e.kind == "interface" && degree(n) == 0) no_orphan_interface = false;
      items.push_back({"inheritance or composition present", hierarchy});
      items.push_back({"no orphan interface", no_orphan_interface});
      break;
    }
    case DiagramType::Component: {
      bool all = !a.elements.empty();
      for (const auto& [n, _] : a.elements) all = all && degree(n) > 0;
      items.push_back({"all components connected", all});
      break;
    }
    case DiagramType::Deployment: {
      bool nesting = std::any_of(a.elements.begin(), a.elements.end(),
                                 [](const auto& kv) { return kv.second.parent.has_value(); });
      bool typed = true;
      for (const auto& [n, e] : a.elements)
        if (e.kind == "node" && !e.stereotype) typed = false;
      items.push_back({"nesting present", nesting});
      items.push_back({"all nodes typed", typed});
      break;
    }
    case DiagramType::Usecase: {
      std::set<std::string> actors;
      for (const auto& [n, e] : a.elements)
        if (e.kind == "actor") actors.insert(n);
      bool linked = true;
      for (const auto& [n, e] : a.elements) {
        if (e.kind != "usecase") continue;
        bool ok = false;
        for (const auto& r : a.relationships)
          if ((r.source == n && actors.count(r.target)) || (r.target == n && actors.count(r.source))) ok = true;
        linked = linked && ok;
      }
      items.push_back({"has actor", !actors.empty()});
      items.push_back({"every use case linked to an actor", linked});
      break;
    }
    case DiagramType::SystemContext: {
      int centers = 0, stereotyped_centers = 0, plain_rects = 0;
      bool external_actor = false;
      for (const auto& [n, e] : a.elements) {
        const bool ext = detail::is_external(e);
        if ((e.kind == "System" || (e.stereotype && detail::contains_ci(*e.stereotype, "system"))) && !ext)
          ++stereotyped_centers;
        if (e.kind == "rectangle" && !e.stereotype) ++plain_rects;
        if (e.kind == "actor" || e.kind == "person" || detail::contains_ci(e.kind, "person") || ext)
          external_actor = true;
      }
      centers = stereotyped_centers > 0 ? stereotyped_centers : plain_rects;
      items.push_back({"exactly one center system", centers == 1});
      items.push_back({"has external actor", external_actor});
      break;
    }
  }
  return items;
}

inline QualitySubscores quality_subscores(const DiagramArtifact& a, const MetricsConfig& cfg = {}) {
  QualitySubscores s;
  const double E = static_cast<double>(a.elements.size());
  const double R = static_cast<double>(a.relationships.size());
  s.density = density_score(E, R, cfg.density_bands.at(a.diagram_type));
  if (E > 0) {
    const auto deg = detail::degrees(a);
    int connected = 0, documented = 0;
    for (const auto& [n, _] : a.elements) {
      if (deg.count(n)) ++connected;
      if (word_count(n) >= 2 || a.facts.noted.count(n)) ++documented;
    }
    s.connectivity = 100.0 * connected / E;
    s.documentation = 100.0 * documented / E;
  }
  if (R > 0) {
    int labeled = 0;
    for (const auto& r : a.relationships)
      if (r.label && !r.label->empty()) ++labeled;
    s.labeling = 100.0 * labeled / R;
  }
  auto items = structure_checklist(a);
  if (!items.empty()) {
    int passed = 0;
    for (const auto& it : items) passed += it.passed;
    s.structure = 100.0 * passed / static_cast<double>(items.size());
  }
  return s;
}

struct DiagramRecord {
  DiagramArtifact artifact;
  LintReport report;  // pre-correction lint; its verdict is the validity datum
  std::string path;
};

struct Observation {
  std::string project;
  DiagramType diagram_type = DiagramType::Class;
  std::set<std::string> ir_entities;  // simple names of IR classes and functions
  std::vector<DiagramRecord> diagrams;

  std::size_t ir_entity_count() const { return ir_entities.size(); }

  std::set<std::string> diagram_elements() const {
    std::set<std::string> out;
    for (const auto& d : diagrams)
      for (const auto& [n, _] : d.artifact.elements) out.insert(n);
    return out;
  }

  std::set<std::string> captured() const {
    std::set<std::string> out;
    auto all = diagram_elements();
    for (const auto& n : ir_entities)
      if (all.count(n)) out.insert(n);
    return out;
  }
};

inline std::set<std::string> ir_entity_names(const ProjectIR& ir) {
  std::set<std::string> out;
  for (const auto& c : ir.classes) out.insert(c.name);
  for (const auto& f : ir.functions) out.insert(f.name);
  return out;
}

struct RecallResult {
  std::optional<double> value;  // absent for system context views
  bool warning = false;         // set when the IR has no entities
};

inline RecallResult entity_recall(const Observation& obs) {
  RecallResult r;
  if (obs.diagram_type == DiagramType::SystemContext) return r;
  if (obs.ir_entity_count() == 0) {
    r.value = 0.0;
    r.warning = true;
    return r;
  }
  r.value = static_cast<double>(obs.captured().size()) / static_cast<double>(obs.ir_entity_count());
  return r;
}

struct PrecisionResult {
  std::optional<double> value;  // absent for activity diagrams
  bool vacuous = false;         // no relationships: value 1.0
  int valid = 0;
  int total = 0;
};

inline PrecisionResult relationship_precision(const Observation& obs) {
  PrecisionResult p;
  if (obs.diagram_type == DiagramType::Activity) return p;
  const auto declared = obs.diagram_elements();
  for (const auto& d : obs.diagrams)
    for (const auto& r : d.artifact.relationships) {
      ++p.total;
      auto ok = [&](const std::string& n) { return obs.ir_entities.count(n) || declared.count(n); };
      if (ok(r.source) && ok(r.target)) ++p.valid;
    }
  if (p.total == 0) {
    p.value = 1.0;
    p.vacuous = true;
  } else {
    p.value = static_cast<double>(p.valid) / p.total;
  }
  return p;
}

inline double validity_rate(const std::vector<Verdict>& verdicts) {
  if (verdicts.empty()) throw std::invalid_argument("validity_rate: empty batch");
  auto valid = std::count(verdicts.begin(), verdicts.end(), Verdict::Valid);
  return 100.0 * static_cast<double>(valid) / static_cast<double>(verdicts.size());
}

inline double validity_rate(const std::vector<Observation>& batch) {
  std::vector<Verdict> v;
  for (const auto& o : batch)
    for (const auto& d : o.diagrams) v.push_back(d.report.verdict);
  if (batch.empty() || v.empty()) throw std::invalid_argument("validity_rate: empty batch");
  return validity_rate(v);
}

enum class CorrectionClass { NoCorrection, Partial, Uncorrectable };

inline constexpr std::string_view to_string(CorrectionClass c) {
  switch (c) {
    case CorrectionClass::NoCorrection: return "no_correction";
    case CorrectionClass::Partial: return "partially_corrected";
    case CorrectionClass::Uncorrectable: return "uncorrectable";
  }
  return "no_correction";
}

// An observation with no diagrams at all (failed generation) is counted as
// uncorrectable rather than vacuously clean.
inline CorrectionClass classify(const Observation& o) {
  if (o.diagrams.empty()) return CorrectionClass::Uncorrectable;
  bool all_valid = true;
  for (const auto& d : o.diagrams) {
    if (d.report.verdict == Verdict::Uncorrectable) return CorrectionClass::Uncorrectable;
    if (d.report.verdict != Verdict::Valid) all_valid = false;
  }
  return all_valid ? CorrectionClass::NoCorrection : CorrectionClass::Partial;
}

struct AblationCounts {
  int no_correction = 0;
  int partial = 0;
  int uncorrectable = 0;

  int total() const { return no_correction + partial + uncorrectable; }
  bool operator==(const AblationCounts&) const = default;
};

inline AblationCounts ablation_classify(const std::vector<Observation>& batch) {
  AblationCounts c;
  for (const auto& o : batch) {
    switch (classify(o)) {
      case CorrectionClass::NoCorrection: ++c.no_correction; break;
      case CorrectionClass::Partial: ++c.partial; break;
      case CorrectionClass::Uncorrectable: ++c.uncorrectable; break;
    }
  }
  return c;
}

struct MetricsReport {
  std::string project;
  DiagramType diagram_type = DiagramType::Class;
  int diagram_count = 0;
  RecallResult recall;
  PrecisionResult precision;
  std::optional<double> validity_pct;  // absent when no diagram was produced
  QualitySubscores subscores;          // mean over diagrams
  double quality = 0;
  double mean_E = 0;
  double mean_R = 0;
  double sci = 0;  // mean of per-diagram SCI
  CorrectionClass correction = CorrectionClass::NoCorrection;

  json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return json{{"project", project},
                {"diagram_type", std::string(c2u::to_string(diagram_type))},
                {"diagram_count", diagram_count},
                {"entity_recall", opt(recall.value)},
                {"recall_warning", recall.warning},
                {"relationship_precision", opt(precision.value)},
                {"precision_vacuous", precision.vacuous},
                {"validity_pct", opt(validity_pct)},
                {"quality",
                 {{"Q", quality},
                  {"density", subscores.density},
                  {"connectivity", subscores.connectivity},
                  {"labeling", subscores.labeling},
                  {"documentation", subscores.documentation},
                  {"structure", subscores.structure}}},
                {"mean_E", mean_E},
                {"mean_R", mean_R},
                {"sci", sci},
                {"correction", std::string(to_string(correction))}};
  }
};

inline MetricsReport compute_report(const Observation& obs, const MetricsConfig& cfg = {}) {
  MetricsReport r;
  r.project = obs.project;
  r.diagram_type = obs.diagram_type;
  r.diagram_count = static_cast<int>(obs.diagrams.size());
  r.recall = entity_recall(obs);
  r.precision = relationship_precision(obs);
  r.correction = classify(obs);
  if (obs.diagrams.empty()) return r;
  std::vector<Verdict> verdicts;
  double n = static_cast<double>(obs.diagrams.size());
  for (const auto& d : obs.diagrams) {
    verdicts.push_back(d.report.verdict);
    auto s = quality_subscores(d.artifact, cfg);
    r.subscores.density += s.density / n;
    r.subscores.connectivity += s.connectivity / n;
    r.subscores.labeling += s.labeling / n;
    r.subscores.documentation += s.documentation / n;
    r.subscores.structure += s.structure / n;
    const double E = static_cast<double>(d.artifact.elements.size());
    const double R = static_cast<double>(d.artifact.relationships.size());
    r.mean_E += E / n;
    r.mean_R += R / n;
    r.sci += sci(E, R) / n;
  }
  r.validity_pct = validity_rate(verdicts);
  r.quality = quality_score(r.subscores);
  return r;
}

// ---------------------------------------------------------------------------
// CSV output

inline std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

inline std::string fmt(const std::optional<double>& v, int decimals = 4) { return v ? fmt(*v, decimals) : "N/A"; }

inline const char* kSummaryHeader =
    "diagram_type,validity_pct,recall,precision,quality,density,connectivity,labeling,documentation,structure,"
    "mean_E,mean_R,sci";

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string observations_csv(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  out << "project," << kSummaryHeader << ",diagrams,precision_vacuous,correction\n";
  for (const auto& r : reports) {
    out << csv_field(r.project) << ',' << c2u::to_string(r.diagram_type) << ',' << fmt(r.validity_pct, 1) << ','
        << fmt(r.recall.value) << ',' << fmt(r.precision.value) << ',' << fmt(r.quality, 2) << ','
        << fmt(r.subscores.density, 2) << ',' << fmt(r.subscores.connectivity, 2) << ','
        << fmt(r.subscores.labeling, 2) << ',' << fmt(r.subscores.documentation, 2) << ','
        << fmt(r.subscores.structure, 2) << ',' << fmt(r.mean_E, 2) << ',' << fmt(r.mean_R, 2) << ','
        << fmt(r.sci, 2) << ',' << r.diagram_count << ',' << (r.precision.vacuous ? 1 : 0) << ','
        << to_string(r.correction) << '\n';
  }
  return out.str();
}

// One row per diagram type plus an overall row: means over observations;
// validity is pooled over diagrams.
inline std::string summary_csv(const std::vector<MetricsReport>& reports, const std::vector<Observation>& obs) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  auto row = [&](const std::string& label, auto&& include) {
    std::vector<const MetricsReport*> rs;
    for (const auto& r : reports)
      if (include(r.diagram_type)) rs.push_back(&r);
    if (rs.empty()) return;
    std::vector<Verdict> verdicts;
    for (const auto& o : obs)
      if (include(o.diagram_type))
        for (const auto& d : o.diagrams) verdicts.push_back(d.report.verdict);
    auto mean = [&](auto&& get) -> std::optional<double> {
      double sum = 0;
      int n = 0;
      for (const auto* r : rs)
        if (auto v = get(*r)) {
          sum += *v;
          ++n;
        }
      if (n == 0) return std::nullopt;
      return sum / n;
    };
    std::optional<double> validity;
    if (!verdicts.empty()) validity = validity_rate(verdicts);
    out << label << ',' << fmt(validity, 1) << ','
        << fmt(mean([](const MetricsReport& r) { return r.recall.value; })) << ','
        << fmt(mean([](const MetricsReport& r) { return r.precision.value; })) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.quality); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.subscores.density); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.subscores.connectivity); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.subscores.labeling); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.subscores.documentation); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.subscores.structure); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.mean_E); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.mean_R); }), 2) << ','
        << fmt(mean([](const MetricsReport& r) { return std::optional<double>(r.sci); }), 2) << '\n';
  };
  for (auto dt : kAllDiagramTypes) row(std::string(c2u::to_string(dt)), [dt](DiagramType t) { return t == dt; });
  row("all", [](DiagramType) { return true; });
  return out.str();
}

inline std::string ablation_csv(const std::vector<Observation>& batch) {
  std::ostringstream out;
  out << "diagram_type,no_correction,partially_corrected,uncorrectable,total,no_correction_pct\n";
  auto row = [&](const std::string& label, auto&& include) {
    std::vector<Observation> sel;
    for (const auto& o : batch)
      if (include(o.diagram_type)) sel.push_back(o);
    if (sel.empty()) return;
    auto c = ablation_classify(sel);
    out << label << ',' << c.no_correction << ',' << c.partial << ',' << c.uncorrectable << ',' << c.total() << ','
        << fmt(100.0 * c.no_correction / c.total(), 1) << '\n';
  };
  for (auto dt : kAllDiagramTypes) row(std::string(c2u::to_string(dt)), [dt](DiagramType t) { return t == dt; });
  row("all", [](DiagramType) { return true; });
  return out.str();
}

}  // namespace c2u::metrics
