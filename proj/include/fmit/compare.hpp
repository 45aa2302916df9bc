#pragma once

// Feature matching across two models and the three comparison strategies
// (syntactic, semantic, structural) aggregated into one equivalence score.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fmit/model.hpp"
#include "fmit/similarity.hpp"

namespace fmit {

inline constexpr double kDefaultNameThreshold = 0.85;
inline constexpr double kDefaultModeThreshold = 0.95;

enum class IntegrationMode { Automatic, SemiAutomatic };

constexpr std::string_view toString(IntegrationMode mode) noexcept {
  return mode == IntegrationMode::Automatic ? "automatic" : "semi-automatic";
}

/// Automatic for identical (1), disjoint (0) or highly similar (>= threshold)
/// models; semi-automatic in between.
constexpr IntegrationMode selectMode(double cee, double threshold = kDefaultModeThreshold) noexcept {
  if (cee == 0.0 || cee == 1.0 || cee >= threshold) return IntegrationMode::Automatic;
  return IntegrationMode::SemiAutomatic;
}

struct ComparisonOptions {
  double nameThreshold = kDefaultNameThreshold;  // minimum jaroWinkler for a fuzzy pair
  double modeThreshold = kDefaultModeThreshold;  // CEE cutoff for automatic integration
};

struct MatchedPair {
  FeatureId base;
  FeatureId other;
  double nameScore = 0.0;
};

/// Injective pairing of base features with other features. Pairs are kept in
/// base preorder; unmatched lists are in each model's preorder.
struct Matching {
  std::vector<MatchedPair> pairs;
  std::vector<FeatureId> unmatchedBase;
  std::vector<FeatureId> unmatchedOther;

  std::optional<FeatureId> otherOf(FeatureId base) const {
    for (const auto& p : pairs)
      if (p.base == base) return p.other;
    return std::nullopt;
  }

  std::optional<FeatureId> baseOf(FeatureId other) const {
    for (const auto& p : pairs)
      if (p.other == other) return p.base;
    return std::nullopt;
  }
};

/// Exact-name pairs first, then greedy by descending jaroWinkler over the
/// remaining cross pairs with score >= nameThreshold. Ties prefer the smaller
/// depth difference, then the lexicographically smaller base name (and other
/// name).
inline Matching matchFeatures(const FeatureModel& base, const FeatureModel& other,
                              double nameThreshold = kDefaultNameThreshold) {
  const auto baseOrder = preorder(base);
  const auto otherOrder = preorder(other);

  std::map<std::string, FeatureId> otherByName;
  for (FeatureId id : otherOrder) otherByName.emplace(other.at(id).name, id);

  std::map<FeatureId, MatchedPair> byBase;
  std::set<FeatureId> usedOther;
  for (FeatureId id : baseOrder) {
    auto it = otherByName.find(base.at(id).name);
    if (it != otherByName.end() && !usedOther.contains(it->second)) {
      byBase[id] = {id, it->second, 1.0};
      usedOther.insert(it->second);
    }
  }

  struct Candidate {
    double score;
    std::size_t depthGap;
    const std::string* baseName;
    const std::string* otherName;
    FeatureId base;
    FeatureId other;
  };
  std::vector<Candidate> candidates;
  std::map<FeatureId, std::size_t> otherDepth;
  for (FeatureId o : otherOrder)
    if (!usedOther.contains(o)) otherDepth[o] = depth(other, o);
  for (FeatureId b : baseOrder) {
    if (byBase.contains(b)) continue;
    const Feature& fb = base.at(b);
    const std::size_t db = depth(base, b);
    for (FeatureId o : otherOrder) {
      if (usedOther.contains(o)) continue;
      const Feature& fo = other.at(o);
      const double score = jaroWinkler(fb.name, fo.name);
      if (score < nameThreshold) continue;
      const std::size_t dOther = otherDepth[o];
      const std::size_t gap = db > dOther ? db - dOther : dOther - db;
      candidates.push_back({score, gap, &fb.name, &fo.name, b, o});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(y.score, x.depthGap, *x.baseName, *x.otherName) <
           std::tie(x.score, y.depthGap, *y.baseName, *y.otherName);
  });
  for (const auto& c : candidates) {
    if (byBase.contains(c.base) || usedOther.contains(c.other)) continue;
    byBase[c.base] = {c.base, c.other, c.score};
    usedOther.insert(c.other);
  }

  Matching m;
  for (FeatureId id : baseOrder) {
    auto it = byBase.find(id);
    if (it != byBase.end())
      m.pairs.push_back(it->second);
    else
      m.unmatchedBase.push_back(id);
  }
  for (FeatureId id : otherOrder)
    if (!usedOther.contains(id)) m.unmatchedOther.push_back(id);
  return m;
}

/// Per-element scores of one strategy and their normalized sum.
struct StrategyScore {
  std::vector<double> vector;
  std::size_t denominator = 0;
  double score = 0.0;
};

namespace detail {

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

/// Visits the features of whichever model is larger (base on ties) together
/// with the partner in the other model, if matched.
template <typename Fn>
void forLargerModel(const FeatureModel& base, const FeatureModel& other, const Matching& matching,
                    Fn&& fn) {
  const bool baseLarger = base.size() >= other.size();
  const FeatureModel& larger = baseLarger ? base : other;
  for (FeatureId id : preorder(larger)) {
    std::optional<FeatureId> partner = baseLarger ? matching.otherOf(id) : matching.baseOf(id);
    if (baseLarger)
      fn(std::optional<FeatureId>{id}, partner);
    else
      fn(partner, std::optional<FeatureId>{id});
  }
}

inline double structuralPoints(std::size_t depthA, std::size_t depthB) noexcept {
  const std::size_t gap = depthA > depthB ? depthA - depthB : depthB - depthA;
  if (gap == 0) return 1.0;
  if (gap == 1) return 0.5;
  return 0.25;
}

}  // namespace detail

/// One score per relationship slot of the model with more slots: 1 when the
/// slot's endpoints are matched and the partner slot carries the same kind.
inline StrategyScore semanticScore(const FeatureModel& base, const FeatureModel& other,
                                   const Matching& matching) {
  const auto baseSlots = relationshipSlots(base);
  const auto otherSlots = relationshipSlots(other);
  const bool baseLarger = baseSlots.size() >= otherSlots.size();
  const FeatureModel& larger = baseLarger ? base : other;
  const FeatureModel& smaller = baseLarger ? other : base;
  const auto& slots = baseLarger ? baseSlots : otherSlots;
  auto partnerOf = [&](FeatureId id) {
    return baseLarger ? matching.otherOf(id) : matching.baseOf(id);
  };

  StrategyScore out;
  for (const auto& slot : slots) {
    double point = 0.0;
    if (!slot.isConstraint()) {
      if (auto p = partnerOf(slot.subject)) {
        const Feature& partner = smaller.at(*p);
        if (partner.parent && toSlotKind(partner.kind) == slot.kind) point = 1.0;
      }
    } else {
      const auto& c = larger.constraints[*slot.constraintIndex];
      auto pl = partnerOf(c.lhs);
      auto pr = partnerOf(c.rhs);
      if (pl && pr)
        for (const auto& sc : smaller.constraints)
          if (sc.sameRelation(c.kind, *pl, *pr)) {
            point = 1.0;
            break;
          }
    }
    out.vector.push_back(point);
  }
  out.denominator = std::max(baseSlots.size(), otherSlots.size());
  if (out.denominator == 0) {
    // No relationships on either side: equivalent iff the roots correspond.
    out.score = matching.otherOf(base.root) == std::optional<FeatureId>{other.root} ? 1.0 : 0.0;
  } else {
    out.score = std::clamp(detail::sum(out.vector) / static_cast<double>(out.denominator), 0.0, 1.0);
  }
  return out;
}

/// One score per feature of the larger model: 1 / 0.5 / 0.25 for a matched
/// pair at depth gap 0 / 1 / >=2, and 0 for an unmatched feature.
inline StrategyScore structuralScore(const FeatureModel& base, const FeatureModel& other,
                                     const Matching& matching) {
  StrategyScore out;
  detail::forLargerModel(base, other, matching, [&](auto b, auto o) {
    out.vector.push_back(b && o ? detail::structuralPoints(depth(base, *b), depth(other, *o)) : 0.0);
  });
  out.denominator = std::max<std::size_t>({base.size(), other.size(), 1});
  out.score = std::clamp(detail::sum(out.vector) / static_cast<double>(out.denominator), 0.0, 1.0);
  return out;
}

/// One score per feature of the larger model: jaroWinkler of the pair's names,
/// 0 when unmatched.
inline StrategyScore syntacticScore(const FeatureModel& base, const FeatureModel& other,
                                    const Matching& matching) {
  StrategyScore out;
  detail::forLargerModel(base, other, matching, [&](auto b, auto o) {
    out.vector.push_back(b && o ? jaroWinkler(base.at(*b).name, other.at(*o).name) : 0.0);
  });
  out.denominator = std::max<std::size_t>({base.size(), other.size(), 1});
  out.score = std::clamp(detail::sum(out.vector) / static_cast<double>(out.denominator), 0.0, 1.0);
  return out;
}

/// Arithmetic mean of the three strategy scores, clamped to [0,1].
constexpr double aggregateCee(double structural, double semantic, double syntactic) noexcept {
  const double mean = (structural + semantic + syntactic) / 3.0;
  return mean < 0.0 ? 0.0 : (mean > 1.0 ? 1.0 : mean);
}

struct ComparisonReport {
  Matching matching;
  StrategyScore syntactic;
  StrategyScore semantic;
  StrategyScore structural;
  double cee = 0.0;
  IntegrationMode recommendedMode = IntegrationMode::Automatic;

  double estsin() const noexcept { return syntactic.score; }
  double estsem() const noexcept { return semantic.score; }
  double estest() const noexcept { return structural.score; }
  std::size_t fDenominator() const noexcept { return structural.denominator; }
  std::size_t cDenominator() const noexcept { return semantic.denominator; }
};

inline ComparisonReport compareWithMatching(const FeatureModel& base, const FeatureModel& other,
                                            Matching matching,
                                            double modeThreshold = kDefaultModeThreshold) {
  ComparisonReport r;
  r.matching = std::move(matching);
  r.syntactic = syntacticScore(base, other, r.matching);
  r.semantic = semanticScore(base, other, r.matching);
  r.structural = structuralScore(base, other, r.matching);
  r.cee = aggregateCee(r.structural.score, r.semantic.score, r.syntactic.score);
  r.recommendedMode = selectMode(r.cee, modeThreshold);
  return r;
}

inline ComparisonReport computeCee(const FeatureModel& base, const FeatureModel& other,
                                   const ComparisonOptions& options = {}) {
  return compareWithMatching(base, other, matchFeatures(base, other, options.nameThreshold),
                             options.modeThreshold);
}

}  // namespace fmit
