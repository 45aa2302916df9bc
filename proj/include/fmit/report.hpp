#pragma once

// Text report of a comparison / integration run. Every data line carries the
// "FMI – " prefix; scores are rounded half-up to four decimals.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "fmit/compare.hpp"
#include "fmit/merge.hpp"
#include "fmit/model.hpp"

namespace fmit {

inline constexpr std::string_view kReportPrefix = "FMI – ";

/// Half-up rounding to four decimals. The small bias absorbs binary
/// representation error (0.72225 is stored as 0.7222499...).
inline double round4(double x) { return std::floor(x * 10000.0 + 0.5 + 1e-9) / 10000.0; }

inline std::string formatScore(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", round4(x));
  return buf;
}

inline std::string formatVector(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += formatScore(v[i]);
  }
  return s + "]";
}

template <typename Range>
std::string formatNames(const Range& names) {
  std::string s = "[";
  bool first = true;
  for (const auto& n : names) {
    if (!first) s += ", ";
    s += n;
    first = false;
  }
  return s + "]";
}

inline std::string isoTimestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string defaultReportName(std::string_view baseStem, std::string_view otherStem) {
  return std::string(baseStem) + "_" + std::string(otherStem) + "_fmit.txt";
}

struct ReportInput {
  std::string baseLabel;
  std::string otherLabel;
  const FeatureModel* base = nullptr;
  const FeatureModel* other = nullptr;
  const ComparisonReport* report = nullptr;
  const std::vector<Conflict>* conflicts = nullptr;
  const std::array<IntegrationResult, 4>* automatic = nullptr;
  const FeatureModel* merged = nullptr;
  const ComparisonReport* postReport = nullptr;
  std::string timestamp;  // filled with the current time when empty
};

struct ReportDocument {
  std::vector<std::string> lines;
  std::array<std::string, 2> inputs;
  std::string timestamp;

  std::string text() const {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
  }
};

namespace detail {

inline std::string describeConflict(const Conflict& c, const FeatureModel* base) {
  std::string s = "#" + std::to_string(c.id) + " " + std::string(toString(c.kind));
  if (base != nullptr && c.kind != ConflictKind::Name) s += " " + base->at(c.baseFeature).name;
  s += ": " + c.baseValue + " | " + c.otherValue + " -> ";
  if (!c.resolvable())
    s += "report only";
  else if (c.resolution)
    s += toString(*c.resolution);
  else
    s += "unresolved";
  return s;
}

}  // namespace detail

inline ReportDocument renderReport(const ReportInput& in) {
  ReportDocument doc;
  doc.inputs = {in.baseLabel, in.otherLabel};
  doc.timestamp = in.timestamp.empty() ? isoTimestamp() : in.timestamp;
  auto line = [&](std::string text) { doc.lines.push_back(std::string(kReportPrefix) + text); };

  line("Modelo Base: " + in.baseLabel);
  line("Modelo de Comparação: " + in.otherLabel);
  if (in.report != nullptr) {
    const ComparisonReport& r = *in.report;
    line("Vetor de Comparação Estrutural: " + formatVector(r.structural.vector));
    line("Grau de Equivalência Estrutural: " + formatScore(r.estest()));
    line("Vetor de Comparação Sintática: " + formatVector(r.syntactic.vector));
    line("Grau de Equivalência Sintática: " + formatScore(r.estsin()));
    line("Vetor de Comparação Semântica: " + formatVector(r.semantic.vector));
    line("Grau de Equivalência Semântica: " + formatScore(r.estsem()));
    line("Cálculo de Equivalência Global: " + formatScore(r.cee));
    line("Modo de Integração: " + std::string(toString(r.recommendedMode)));
  }
  line("Conflitos:");
  if (in.conflicts == nullptr || in.conflicts->empty())
    line("none");
  else
    for (const auto& c : *in.conflicts) line(detail::describeConflict(c, in.base));

  if (in.automatic != nullptr) {
    static constexpr std::array<std::string_view, 4> labels{
        "Estratégia Adicional-União: ", "Estratégia Formal-Intersecção: ",
        "Estratégia Parcial-Diferença: ", "Estratégia Complementar-Complemento: "};
    for (std::size_t i = 0; i < labels.size(); ++i)
      line(std::string(labels[i]) + formatNames((*in.automatic)[i].displayNames()));
  }
  if (in.merged != nullptr) line("Modelo de Feature Pretendido: " + formatNames(preorderNames(*in.merged)));
  if (in.postReport != nullptr) line("Grau de Equivalência: " + formatScore(in.postReport->cee));
  line("Gerado em: " + doc.timestamp);
  return doc;
}

}  // namespace fmit
