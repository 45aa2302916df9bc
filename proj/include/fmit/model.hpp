#pragma once

// Feature model domain types: a rooted tree of features with per-child
// relationship kinds, plus requires/excludes cross-tree constraints.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fmit {

struct FeatureId {
  std::uint32_t value = 0;
  friend auto operator<=>(FeatureId, FeatureId) = default;
};

enum class RelationshipKind { Mandatory, Optional, OrMember, XorMember };
enum class ConstraintKind { Requires, Excludes };
enum class Severity { Error, Warning };

constexpr bool isGroupKind(RelationshipKind kind) noexcept {
  return kind == RelationshipKind::OrMember || kind == RelationshipKind::XorMember;
}

constexpr std::string_view toString(RelationshipKind kind) noexcept {
  switch (kind) {
    case RelationshipKind::Mandatory: return "mandatory";
    case RelationshipKind::Optional: return "optional";
    case RelationshipKind::OrMember: return "or";
    case RelationshipKind::XorMember: return "alternative";
  }
  return "?";
}

constexpr std::string_view toString(ConstraintKind kind) noexcept {
  return kind == ConstraintKind::Requires ? "requires" : "excludes";
}

constexpr std::string_view toString(Severity severity) noexcept {
  return severity == Severity::Error ? "error" : "warning";
}

struct Feature {
  FeatureId id;
  std::string name;
  std::optional<FeatureId> parent;  // absent only for the root
  RelationshipKind kind = RelationshipKind::Mandatory;
  bool abstract = false;
  std::vector<FeatureId> children;
};

struct CrossTreeConstraint {
  ConstraintKind kind = ConstraintKind::Requires;
  FeatureId lhs;
  FeatureId rhs;

  friend bool operator==(const CrossTreeConstraint&, const CrossTreeConstraint&) = default;

  /// Excludes is symmetric, Requires is directed lhs -> rhs.
  bool sameRelation(ConstraintKind k, FeatureId a, FeatureId b) const noexcept {
    if (k != kind) return false;
    if (lhs == a && rhs == b) return true;
    return kind == ConstraintKind::Excludes && lhs == b && rhs == a;
  }
};

class UnknownFeature : public std::out_of_range {
 public:
  explicit UnknownFeature(const std::string& what) : std::out_of_range(what) {}
};

struct FeatureModel {
  std::string name;
  FeatureId root;
  std::map<FeatureId, Feature> features;
  std::vector<CrossTreeConstraint> constraints;

  std::size_t size() const noexcept { return features.size(); }

  const Feature* find(FeatureId id) const noexcept {
    auto it = features.find(id);
    return it == features.end() ? nullptr : &it->second;
  }

  const Feature& at(FeatureId id) const {
    if (const Feature* f = find(id)) return *f;
    throw UnknownFeature("unknown feature id " + std::to_string(id.value));
  }

  std::optional<FeatureId> findByName(std::string_view featureName) const {
    for (const auto& [id, f] : features)
      if (f.name == featureName) return id;
    return std::nullopt;
  }

  const Feature& rootFeature() const { return at(root); }
};

/// Incremental construction of models. Performs no validation so that
/// malformed models can be assembled on purpose; run validate() on the result.
class ModelBuilder {
 public:
  explicit ModelBuilder(std::string modelName = {}) { model_.name = std::move(modelName); }

  FeatureId root(std::string featureName, bool abstract = false) {
    FeatureId id = next();
    model_.root = id;
    model_.features[id] = Feature{id, std::move(featureName), std::nullopt,
                                  RelationshipKind::Mandatory, abstract, {}};
    return id;
  }

  FeatureId add(FeatureId parent, std::string featureName, RelationshipKind kind,
                bool abstract = false) {
    FeatureId id = next();
    model_.features[id] = Feature{id, std::move(featureName), parent, kind, abstract, {}};
    auto it = model_.features.find(parent);
    if (it != model_.features.end()) it->second.children.push_back(id);
    return id;
  }

  FeatureId add(std::string_view parentName, std::string featureName, RelationshipKind kind,
                bool abstract = false) {
    return add(lookup(parentName), std::move(featureName), kind, abstract);
  }

  ModelBuilder& require(std::string_view lhs, std::string_view rhs) {
    model_.constraints.push_back({ConstraintKind::Requires, lookup(lhs), lookup(rhs)});
    return *this;
  }

  ModelBuilder& exclude(std::string_view lhs, std::string_view rhs) {
    model_.constraints.push_back({ConstraintKind::Excludes, lookup(lhs), lookup(rhs)});
    return *this;
  }

  ModelBuilder& constrain(ConstraintKind kind, FeatureId lhs, FeatureId rhs) {
    model_.constraints.push_back({kind, lhs, rhs});
    return *this;
  }

  FeatureId id(std::string_view featureName) const { return lookup(featureName); }

  const FeatureModel& peek() const noexcept { return model_; }
  FeatureModel build() const { return model_; }

 private:
  FeatureId next() { return FeatureId{nextId_++}; }

  FeatureId lookup(std::string_view featureName) const {
    if (auto id = model_.findByName(featureName)) return *id;
    throw UnknownFeature("unknown feature '" + std::string(featureName) + "'");
  }

  FeatureModel model_;
  std::uint32_t nextId_ = 0;
};

// ---------------------------------------------------------------------------
// Well-formedness

enum class Rule {
  MissingRoot,
  RootHasParent,
  RootNotMandatory,
  MultipleRoots,
  DanglingParent,
  ChildLinkMismatch,
  Unreachable,
  BlankName,
  DuplicateName,
  MixedGroup,
  SingletonGroup,
  DanglingConstraint,
  SelfConstraint,
};

constexpr std::string_view toString(Rule rule) noexcept {
  switch (rule) {
    case Rule::MissingRoot: return "MissingRoot";
    case Rule::RootHasParent: return "RootHasParent";
    case Rule::RootNotMandatory: return "RootNotMandatory";
    case Rule::MultipleRoots: return "MultipleRoots";
    case Rule::DanglingParent: return "DanglingParent";
    case Rule::ChildLinkMismatch: return "ChildLinkMismatch";
    case Rule::Unreachable: return "Unreachable";
    case Rule::BlankName: return "BlankName";
    case Rule::DuplicateName: return "DuplicateName";
    case Rule::MixedGroup: return "MixedGroup";
    case Rule::SingletonGroup: return "SingletonGroup";
    case Rule::DanglingConstraint: return "DanglingConstraint";
    case Rule::SelfConstraint: return "SelfConstraint";
  }
  return "?";
}

struct WellFormednessViolation {
  Severity severity = Severity::Error;
  Rule rule = Rule::MissingRoot;
  std::string subject;  // offending feature name, id or constraint
  std::string message;
};

namespace detail {

inline bool isBlank(std::string_view s) noexcept {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
}

inline std::string describe(const FeatureModel& m, FeatureId id) {
  if (const Feature* f = m.find(id)) return f->name;
  return "#" + std::to_string(id.value);
}

}  // namespace detail

inline std::vector<WellFormednessViolation> validate(const FeatureModel& model) {
  std::vector<WellFormednessViolation> out;
  auto report = [&out](Severity s, Rule r, std::string subject, std::string message) {
    out.push_back({s, r, std::move(subject), std::move(message)});
  };

  const Feature* root = model.find(model.root);
  if (root == nullptr) {
    report(Severity::Error, Rule::MissingRoot, "#" + std::to_string(model.root.value),
           "root id does not name a feature");
  } else {
    if (root->parent)
      report(Severity::Error, Rule::RootHasParent, root->name, "root feature has a parent");
    if (root->kind != RelationshipKind::Mandatory)
      report(Severity::Error, Rule::RootNotMandatory, root->name,
             "root feature must carry the mandatory kind");
  }

  for (const auto& [id, f] : model.features) {
    if (!f.parent) {
      if (id != model.root)
        report(Severity::Error, Rule::MultipleRoots, f.name, "feature without parent is not the root");
    } else if (const Feature* p = model.find(*f.parent); p == nullptr) {
      report(Severity::Error, Rule::DanglingParent, f.name, "parent id does not name a feature");
    } else if (std::count(p->children.begin(), p->children.end(), id) != 1) {
      report(Severity::Error, Rule::ChildLinkMismatch, f.name,
             "parent '" + p->name + "' does not list this feature exactly once");
    }
    for (FeatureId c : f.children) {
      const Feature* child = model.find(c);
      if (child == nullptr || child->parent != id)
        report(Severity::Error, Rule::ChildLinkMismatch, f.name,
               "child " + detail::describe(model, c) + " does not point back to this feature");
    }
  }

  if (root != nullptr) {
    std::set<FeatureId> seen{model.root};
    std::vector<FeatureId> stack{model.root};
    while (!stack.empty()) {
      FeatureId id = stack.back();
      stack.pop_back();
      const Feature* f = model.find(id);
      if (f == nullptr) continue;
      for (FeatureId c : f->children)
        if (model.find(c) != nullptr && seen.insert(c).second) stack.push_back(c);
    }
    for (const auto& [id, f] : model.features)
      if (!seen.contains(id))
        report(Severity::Error, Rule::Unreachable, f.name, "feature is not reachable from the root");
  }

  std::map<std::string, int> nameCount;
  for (const auto& [id, f] : model.features) {
    if (f.name.empty() || detail::isBlank(f.name))
      report(Severity::Error, Rule::BlankName, "#" + std::to_string(id.value),
             "feature name has no visible characters");
    ++nameCount[f.name];
  }
  for (const auto& [n, count] : nameCount)
    if (count > 1)
      report(Severity::Error, Rule::DuplicateName, n,
             "name used by " + std::to_string(count) + " features");

  for (const auto& [id, f] : model.features) {
    std::vector<RelationshipKind> kinds;
    for (FeatureId c : f.children)
      if (const Feature* child = model.find(c)) kinds.push_back(child->kind);
    if (kinds.empty()) continue;
    bool anyGroup = std::any_of(kinds.begin(), kinds.end(), isGroupKind);
    if (!anyGroup) continue;
    bool uniform = std::all_of(kinds.begin(), kinds.end(),
                               [&](RelationshipKind k) { return k == kinds.front(); });
    if (!uniform)
      report(Severity::Error, Rule::MixedGroup, f.name,
             "children mix group members with other relationship kinds");
    else if (kinds.size() == 1)
      report(Severity::Warning, Rule::SingletonGroup, f.name,
             std::string(toString(kinds.front())) + " group has a single member");
  }

  for (std::size_t i = 0; i < model.constraints.size(); ++i) {
    const auto& c = model.constraints[i];
    std::string subject = std::string(toString(c.kind)) + "(" + detail::describe(model, c.lhs) +
                          ", " + detail::describe(model, c.rhs) + ")";
    if (model.find(c.lhs) == nullptr || model.find(c.rhs) == nullptr)
      report(Severity::Error, Rule::DanglingConstraint, subject,
             "constraint " + std::to_string(i) + " references a missing feature");
    else if (c.lhs == c.rhs)
      report(Severity::Error, Rule::SelfConstraint, subject, "constraint relates a feature to itself");
  }
  return out;
}

inline bool hasErrors(const std::vector<WellFormednessViolation>& violations) noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [](const auto& v) { return v.severity == Severity::Error; });
}

class InvalidModel : public std::runtime_error {
 public:
  InvalidModel(const std::string& what, std::vector<WellFormednessViolation> violations)
      : std::runtime_error(what), violations_(std::move(violations)) {}
  const std::vector<WellFormednessViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<WellFormednessViolation> violations_;
};

inline void requireWellFormed(const FeatureModel& model) {
  auto violations = validate(model);
  if (hasErrors(violations)) {
    std::string first;
    for (const auto& v : violations)
      if (v.severity == Severity::Error) {
        first = std::string(toString(v.rule)) + " (" + v.subject + "): " + v.message;
        break;
      }
    throw InvalidModel("model '" + model.name + "' is not well-formed: " + first,
                       std::move(violations));
  }
}

// ---------------------------------------------------------------------------
// Traversal

inline std::size_t depth(const FeatureModel& model, FeatureId id) {
  const Feature* f = &model.at(id);
  std::size_t d = 0;
  while (f->parent) {
    if (++d > model.size()) throw std::logic_error("parent links contain a cycle");
    f = &model.at(*f->parent);
  }
  return d;
}

/// Root first, each feature before its children, children in stored order.
inline std::vector<FeatureId> preorder(const FeatureModel& model) {
  std::vector<FeatureId> order;
  if (model.find(model.root) == nullptr) return order;
  order.reserve(model.size());
  std::set<FeatureId> seen;
  std::vector<FeatureId> stack{model.root};
  while (!stack.empty()) {
    FeatureId id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    order.push_back(id);
    const Feature& f = model.at(id);
    for (auto it = f.children.rbegin(); it != f.children.rend(); ++it)
      if (model.find(*it) != nullptr) stack.push_back(*it);
  }
  return order;
}

inline std::vector<std::string> preorderNames(const FeatureModel& model) {
  std::vector<std::string> names;
  for (FeatureId id : preorder(model)) names.push_back(model.at(id).name);
  return names;
}

/// The six relationship notations a slot can carry: the four tree kinds plus
/// the two cross-tree kinds.
enum class SlotKind { Mandatory, Optional, OrMember, XorMember, Requires, Excludes };

constexpr SlotKind toSlotKind(RelationshipKind kind) noexcept {
  switch (kind) {
    case RelationshipKind::Mandatory: return SlotKind::Mandatory;
    case RelationshipKind::Optional: return SlotKind::Optional;
    case RelationshipKind::OrMember: return SlotKind::OrMember;
    case RelationshipKind::XorMember: return SlotKind::XorMember;
  }
  return SlotKind::Mandatory;
}

constexpr SlotKind toSlotKind(ConstraintKind kind) noexcept {
  return kind == ConstraintKind::Requires ? SlotKind::Requires : SlotKind::Excludes;
}

constexpr std::string_view toString(SlotKind kind) noexcept {
  switch (kind) {
    case SlotKind::Mandatory: return "mandatory";
    case SlotKind::Optional: return "optional";
    case SlotKind::OrMember: return "or";
    case SlotKind::XorMember: return "alternative";
    case SlotKind::Requires: return "requires";
    case SlotKind::Excludes: return "excludes";
  }
  return "?";
}

/// One relationship of a model. Tree slots relate a feature (subject) to its
/// parent (target); constraint slots relate lhs (subject) to rhs (target).
struct RelationshipSlot {
  SlotKind kind = SlotKind::Mandatory;
  FeatureId subject;
  FeatureId target;
  std::optional<std::size_t> constraintIndex;

  bool isConstraint() const noexcept { return constraintIndex.has_value(); }
};

inline std::vector<RelationshipSlot> relationshipSlots(const FeatureModel& model) {
  std::vector<RelationshipSlot> slots;
  for (FeatureId id : preorder(model)) {
    const Feature& f = model.at(id);
    if (f.parent) slots.push_back({toSlotKind(f.kind), id, *f.parent, std::nullopt});
  }
  for (std::size_t i = 0; i < model.constraints.size(); ++i) {
    const auto& c = model.constraints[i];
    slots.push_back({toSlotKind(c.kind), c.lhs, c.rhs, i});
  }
  return slots;
}

/// Relationship notations as drawn in a diagram: each mandatory/optional
/// edge once, each or/alternative group once, each constraint once.
inline std::size_t notationCount(const FeatureModel& model) {
  std::size_t count = model.constraints.size();
  for (const auto& [id, f] : model.features) {
    bool groupCounted = false;
    for (FeatureId c : f.children) {
      const Feature* child = model.find(c);
      if (child == nullptr) continue;
      if (!isGroupKind(child->kind)) {
        ++count;
      } else if (!groupCounted) {
        ++count;
        groupCounted = true;
      }
    }
  }
  return count;
}

/// Equality up to feature ids and model label: names, kinds, child order,
/// abstract flags, and constraints (by endpoint names, in order).
inline bool structurallyEqual(const FeatureModel& a, const FeatureModel& b) {
  if (a.size() != b.size() || a.constraints.size() != b.constraints.size()) return false;
  if (a.find(a.root) == nullptr || b.find(b.root) == nullptr) return false;
  std::vector<std::pair<FeatureId, FeatureId>> stack{{a.root, b.root}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto [ia, ib] = stack.back();
    stack.pop_back();
    const Feature* fa = a.find(ia);
    const Feature* fb = b.find(ib);
    if (fa == nullptr || fb == nullptr) return false;
    if (++visited > a.size()) return false;
    if (fa->name != fb->name || fa->kind != fb->kind || fa->abstract != fb->abstract ||
        fa->children.size() != fb->children.size())
      return false;
    for (std::size_t i = 0; i < fa->children.size(); ++i)
      stack.emplace_back(fa->children[i], fb->children[i]);
  }
  if (visited != a.size()) return false;
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    const auto& ca = a.constraints[i];
    const auto& cb = b.constraints[i];
    const Feature* al = a.find(ca.lhs);
    const Feature* ar = a.find(ca.rhs);
    const Feature* bl = b.find(cb.lhs);
    const Feature* br = b.find(cb.rhs);
    if (!al || !ar || !bl || !br) return false;
    if (ca.kind != cb.kind || al->name != bl->name || ar->name != br->name) return false;
  }
  return true;
}

}  // namespace fmit
