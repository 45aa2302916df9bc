#pragma once

// Set-based integration strategies and conflict detection between two models.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmit/compare.hpp"
#include "fmit/model.hpp"

namespace fmit {

enum class MergeStrategy { Common, Additional, Formal, Partial, Complementary, Null };

constexpr std::string_view toString(MergeStrategy s) noexcept {
  switch (s) {
    case MergeStrategy::Common: return "common";
    case MergeStrategy::Additional: return "additional";
    case MergeStrategy::Formal: return "formal";
    case MergeStrategy::Partial: return "partial";
    case MergeStrategy::Complementary: return "complementary";
    case MergeStrategy::Null: return "null";
  }
  return "?";
}

class IncompatibleStrategy : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct IntegrationResult {
  FeatureModel model;
  // Set when the strategy's feature set lacks a root and an abstract one was
  // added to hold the survivors. It is not part of the strategy's name set.
  std::optional<FeatureId> syntheticRoot;

  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& [id, f] : model.features)
      if (id != syntheticRoot) out.insert(f.name);
    return out;
  }

  /// Strategy name set for display: the real root first, then the rest sorted.
  std::vector<std::string> displayNames() const {
    std::set<std::string> rest = names();
    std::vector<std::string> out;
    if (!syntheticRoot) {
      const std::string& root = model.rootFeature().name;
      out.push_back(root);
      rest.erase(root);
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
};

namespace detail {

enum class SiblingClass { None, And, Or, Xor };

inline SiblingClass classOf(RelationshipKind k) noexcept {
  switch (k) {
    case RelationshipKind::OrMember: return SiblingClass::Or;
    case RelationshipKind::XorMember: return SiblingClass::Xor;
    default: return SiblingClass::And;
  }
}

/// Kind an incoming child takes under a host whose children form `cls`.
inline RelationshipKind adaptKind(RelationshipKind incoming, SiblingClass cls) noexcept {
  switch (cls) {
    case SiblingClass::None: return incoming;
    case SiblingClass::Or: return RelationshipKind::OrMember;
    case SiblingClass::Xor: return RelationshipKind::XorMember;
    case SiblingClass::And: return isGroupKind(incoming) ? RelationshipKind::Optional : incoming;
  }
  return incoming;
}

/// Builds a model feature by feature, keeping every host's children within a
/// single sibling class.
class Assembler {
 public:
  explicit Assembler(std::string modelName) { model_.name = std::move(modelName); }

  FeatureId root(const std::string& name, bool abstract) {
    const FeatureId id = next();
    model_.root = id;
    model_.features[id] = Feature{id, name, std::nullopt, RelationshipKind::Mandatory, abstract, {}};
    return id;
  }

  /// Children added with `adapt == false` keep their kind and fix the host's
  /// class; adapted ones conform to it.
  FeatureId add(FeatureId host, const std::string& name, RelationshipKind kind, bool abstract,
                bool adapt) {
    SiblingClass& cls = classes_[host];
    const RelationshipKind k = adapt ? adaptKind(kind, cls) : kind;
    if (cls == SiblingClass::None) cls = classOf(k);
    const FeatureId id = next();
    model_.features[id] = Feature{id, name, host, k, abstract, {}};
    model_.features.at(host).children.push_back(id);
    return id;
  }

  void constrain(ConstraintKind kind, FeatureId lhs, FeatureId rhs) {
    for (const auto& c : model_.constraints)
      if (c.sameRelation(kind, lhs, rhs)) return;
    model_.constraints.push_back({kind, lhs, rhs});
  }

  void fixClass(FeatureId host, SiblingClass cls) { classes_[host] = cls; }

  FeatureModel take() { return std::move(model_); }

 private:
  FeatureId next() { return FeatureId{next_++}; }

  FeatureModel model_;
  std::map<FeatureId, SiblingClass> classes_;
  std::uint32_t next_ = 0;
};

/// Copies `source` restricted to `keep`, re-parenting survivors to their
/// nearest surviving ancestor. Without a surviving root, a synthetic abstract
/// root named `rootName` holds the top-level survivors as optional children.
inline IntegrationResult filterModel(const FeatureModel& source, const std::set<FeatureId>& keep,
                                     const std::string& modelName, const std::string& rootName) {
  Assembler out(modelName);
  IntegrationResult result;
  std::map<FeatureId, FeatureId> image;

  auto nearestKept = [&](FeatureId id) -> std::optional<FeatureId> {
    std::optional<FeatureId> p = source.at(id).parent;
    while (p && !keep.contains(*p)) p = source.at(*p).parent;
    return p;
  };

  const auto order = preorder(source);
  if (keep.contains(source.root)) {
    const Feature& r = source.rootFeature();
    image[r.id] = out.root(r.name, r.abstract);
  } else {
    result.syntheticRoot = out.root(rootName, true);
  }

  // A host's class comes from its surviving original children when it has any.
  std::map<FeatureId, SiblingClass> originalClass;
  for (FeatureId id : order)
    if (keep.contains(id) && id != source.root) {
      const FeatureId p = *source.at(id).parent;
      if (keep.contains(p) && !originalClass.contains(p)) originalClass[p] = classOf(source.at(id).kind);
    }

  for (FeatureId id : order) {
    if (!keep.contains(id) || id == source.root) continue;
    const Feature& f = source.at(id);
    const auto host = nearestKept(id);
    if (!host) {
      image[id] = out.add(*result.syntheticRoot, f.name, RelationshipKind::Optional, f.abstract, false);
      continue;
    }
    const FeatureId hostImage = image.at(*host);
    const bool original = *host == *f.parent;
    if (!original && originalClass.contains(*host)) out.fixClass(hostImage, originalClass[*host]);
    image[id] = out.add(hostImage, f.name, f.kind, f.abstract, !original);
  }
  if (result.syntheticRoot) out.fixClass(*result.syntheticRoot, SiblingClass::And);

  for (const auto& c : source.constraints)
    if (image.contains(c.lhs) && image.contains(c.rhs)) out.constrain(c.kind, image.at(c.lhs), image.at(c.rhs));
  result.model = out.take();
  return result;
}

}  // namespace detail

/// Base tree kept whole; each unmatched other feature is attached under the
/// image of its other-model parent (the base partner when matched). An
/// unmatched other root hangs under the base root as optional. Other
/// constraints are carried over through the same mapping, without duplicates.
inline IntegrationResult additionalMerge(const FeatureModel& base, const FeatureModel& other,
                                         const Matching& matching) {
  detail::Assembler out(base.name);
  std::map<FeatureId, FeatureId> baseImage;
  std::map<FeatureId, FeatureId> otherImage;

  for (FeatureId id : preorder(base)) {
    const Feature& f = base.at(id);
    if (!f.parent)
      baseImage[id] = out.root(f.name, f.abstract);
    else
      baseImage[id] = out.add(baseImage.at(*f.parent), f.name, f.kind, f.abstract, false);
  }
  for (const auto& p : matching.pairs) otherImage[p.other] = baseImage.at(p.base);

  for (FeatureId id : preorder(other)) {
    if (otherImage.contains(id)) continue;
    const Feature& f = other.at(id);
    if (!f.parent) {
      otherImage[id] =
          out.add(baseImage.at(base.root), f.name, RelationshipKind::Optional, f.abstract, true);
      continue;
    }
    const FeatureId host = otherImage.at(*f.parent);
    otherImage[id] = out.add(host, f.name, f.kind, f.abstract, true);
  }

  for (const auto& c : base.constraints) out.constrain(c.kind, baseImage.at(c.lhs), baseImage.at(c.rhs));
  for (const auto& c : other.constraints) out.constrain(c.kind, otherImage.at(c.lhs), otherImage.at(c.rhs));
  return {out.take(), std::nullopt};
}

/// Merged model for one strategy. Matched pairs count once, under the base
/// name. Null is only accepted when nothing matched.
inline IntegrationResult integrate(const FeatureModel& base, const FeatureModel& other,
                                   const Matching& matching, MergeStrategy strategy) {
  std::set<FeatureId> matchedBase;
  std::set<FeatureId> matchedOther;
  for (const auto& p : matching.pairs) {
    matchedBase.insert(p.base);
    matchedOther.insert(p.other);
  }
  const std::string& rootName = base.rootFeature().name;

  switch (strategy) {
    case MergeStrategy::Null:
      if (!matching.pairs.empty())
        throw IncompatibleStrategy("null strategy requires models without matched features");
      return additionalMerge(base, other, matching);
    case MergeStrategy::Additional: return additionalMerge(base, other, matching);
    case MergeStrategy::Common: {
      std::set<FeatureId> all;
      for (const auto& [id, f] : base.features) all.insert(id);
      return detail::filterModel(base, all, base.name, rootName);
    }
    case MergeStrategy::Formal: return detail::filterModel(base, matchedBase, base.name, rootName);
    case MergeStrategy::Partial: {
      std::set<FeatureId> keep;
      for (const auto& [id, f] : base.features)
        if (!matchedBase.contains(id)) keep.insert(id);
      return detail::filterModel(base, keep, base.name, rootName);
    }
    case MergeStrategy::Complementary: {
      std::set<FeatureId> keep;
      for (const auto& [id, f] : other.features)
        if (!matchedOther.contains(id)) keep.insert(id);
      return detail::filterModel(other, keep, other.name, rootName);
    }
  }
  throw IncompatibleStrategy("unknown strategy");
}

inline constexpr std::array<MergeStrategy, 4> kAutomaticStrategies{
    MergeStrategy::Additional, MergeStrategy::Formal, MergeStrategy::Partial,
    MergeStrategy::Complementary};

/// Union, intersection, difference and complement, in that order.
inline std::array<IntegrationResult, 4> autoIntegrate(const FeatureModel& base,
                                                      const FeatureModel& other,
                                                      const Matching& matching) {
  return {integrate(base, other, matching, kAutomaticStrategies[0]),
          integrate(base, other, matching, kAutomaticStrategies[1]),
          integrate(base, other, matching, kAutomaticStrategies[2]),
          integrate(base, other, matching, kAutomaticStrategies[3])};
}

// ---------------------------------------------------------------------------
// Conflicts

enum class ConflictKind { Name, RelationshipKind, Structural };
enum class Choice { KeepBase, KeepOther };

constexpr std::string_view toString(ConflictKind k) noexcept {
  switch (k) {
    case ConflictKind::Name: return "name";
    case ConflictKind::RelationshipKind: return "relationship_kind";
    case ConflictKind::Structural: return "structural";
  }
  return "?";
}

constexpr std::string_view toString(Choice c) noexcept {
  return c == Choice::KeepBase ? "keep_base" : "keep_other";
}

struct Conflict {
  int id = 0;
  ConflictKind kind = ConflictKind::Name;
  FeatureId baseFeature;
  FeatureId otherFeature;
  std::string baseValue;
  std::string otherValue;
  std::optional<Choice> resolution;

  bool resolvable() const noexcept { return kind != ConflictKind::Structural; }
  bool resolved() const noexcept { return resolution.has_value(); }
};

/// Name, relationship-kind and depth disagreements of matched pairs, in base
/// preorder, numbered from 1.
inline std::vector<Conflict> detectConflicts(const FeatureModel& base, const FeatureModel& other,
                                             const Matching& matching) {
  std::vector<Conflict> out;
  auto push = [&](ConflictKind k, const MatchedPair& p, std::string b, std::string o) {
    out.push_back({static_cast<int>(out.size()) + 1, k, p.base, p.other, std::move(b), std::move(o), {}});
  };
  for (const auto& p : matching.pairs) {
    const Feature& fb = base.at(p.base);
    const Feature& fo = other.at(p.other);
    if (fb.name != fo.name) push(ConflictKind::Name, p, fb.name, fo.name);
    if (fb.kind != fo.kind)
      push(ConflictKind::RelationshipKind, p, std::string(toString(fb.kind)), std::string(toString(fo.kind)));
    const std::size_t db = depth(base, p.base);
    const std::size_t dob = depth(other, p.other);
    if (db != dob) push(ConflictKind::Structural, p, std::to_string(db), std::to_string(dob));
  }
  return out;
}

}  // namespace fmit
