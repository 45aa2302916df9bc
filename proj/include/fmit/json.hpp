#pragma once

// JSON views of comparison results, conflicts and sessions (snake_case keys,
// scores rounded like the text report so both outputs agree).

#include <json.hpp>

#include "fmit/compare.hpp"
#include "fmit/merge.hpp"
#include "fmit/report.hpp"
#include "fmit/session.hpp"

namespace fmit {

using Json = nlohmann::ordered_json;

inline Json roundedVector(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(round4(x));
  return out;
}

inline Json featureRef(const FeatureModel& m, FeatureId id) {
  return {{"id", id.value}, {"name", m.at(id).name}};
}

inline Json toJson(const ComparisonReport& r, const FeatureModel& base, const FeatureModel& other) {
  Json pairs = Json::array();
  for (const auto& p : r.matching.pairs)
    pairs.push_back({{"base", featureRef(base, p.base)},
                     {"other", featureRef(other, p.other)},
                     {"score", round4(p.nameScore)}});
  Json unmatchedBase = Json::array();
  for (FeatureId id : r.matching.unmatchedBase) unmatchedBase.push_back(featureRef(base, id));
  Json unmatchedOther = Json::array();
  for (FeatureId id : r.matching.unmatchedOther) unmatchedOther.push_back(featureRef(other, id));
  return {
      {"estsin", round4(r.estsin())},
      {"estsem", round4(r.estsem())},
      {"estest", round4(r.estest())},
      {"cee", round4(r.cee)},
      {"mode", toString(r.recommendedMode)},
      {"vectors",
       {{"syntactic", roundedVector(r.syntactic.vector)},
        {"semantic", roundedVector(r.semantic.vector)},
        {"structural", roundedVector(r.structural.vector)}}},
      {"denominators", {{"features", r.fDenominator()}, {"relationships", r.cDenominator()}}},
      {"matching", {{"pairs", pairs}, {"unmatched_base", unmatchedBase}, {"unmatched_other", unmatchedOther}}},
  };
}

inline Json toJson(const Conflict& c, const FeatureModel& base, const FeatureModel& other) {
  Json j = {{"id", c.id},
            {"kind", toString(c.kind)},
            {"base_feature", featureRef(base, c.baseFeature)},
            {"other_feature", featureRef(other, c.otherFeature)},
            {"base_value", c.baseValue},
            {"other_value", c.otherValue},
            {"resolvable", c.resolvable()},
            {"status", c.resolved() ? "resolved" : "unresolved"}};
  j["choice"] = c.resolution ? Json(toString(*c.resolution)) : Json(nullptr);
  return j;
}

inline Json conflictsJson(const std::vector<Conflict>& conflicts, const FeatureModel& base,
                          const FeatureModel& other) {
  Json out = Json::array();
  for (const auto& c : conflicts) out.push_back(toJson(c, base, other));
  return out;
}

inline Json sessionSummary(const Session& s) {
  std::size_t resolved = 0;
  for (const auto& c : s.conflicts)
    if (c.resolved()) ++resolved;
  Json j = {{"session_id", s.id},
            {"state", toString(s.state)},
            {"counts",
             {{"conflicts", s.conflicts.size()},
              {"resolvable", s.resolvableCount()},
              {"resolved", resolved},
              {"unresolved", s.unresolvedIds().size()}}},
            {"report", toJson(s.report, s.base, s.other)},
            {"conflicts", conflictsJson(s.conflicts, s.base, s.other)}};
  j["post_report"] = s.postReport ? toJson(*s.postReport, s.base, *s.merged) : Json(nullptr);
  return j;
}

}  // namespace fmit
