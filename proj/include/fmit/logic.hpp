#pragma once

// Propositional semantics of feature models and brute-force configuration
// enumeration. Two independent routes to the same semantics are provided:
// toPropositional() + evaluate(), and the tree-rule checker
// isValidConfiguration(). Tests check them against each other exhaustively.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmit/model.hpp"

namespace fmit {

struct Formula {
  enum class Op { Var, Not, And, Or, Implies, Iff };

  Op op = Op::Var;
  std::size_t var = 0;  // index into PropositionalFormula::variables when op == Var
  std::vector<Formula> args;

  static Formula variable(std::size_t index) { return {Op::Var, index, {}}; }
  static Formula negation(Formula f) { return {Op::Not, 0, {std::move(f)}}; }
  static Formula conjunction(std::vector<Formula> fs) { return {Op::And, 0, std::move(fs)}; }
  static Formula disjunction(std::vector<Formula> fs) { return {Op::Or, 0, std::move(fs)}; }
  static Formula implies(Formula a, Formula b) { return {Op::Implies, 0, {std::move(a), std::move(b)}}; }
  static Formula iff(Formula a, Formula b) { return {Op::Iff, 0, {std::move(a), std::move(b)}}; }
};

/// Conjunction of clauses over one boolean variable per feature.
struct PropositionalFormula {
  std::vector<std::string> variables;  // feature names, model preorder
  std::vector<Formula> clauses;

  std::size_t indexOf(const std::string& name) const {
    auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) throw UnknownFeature("unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - variables.begin());
  }
};

inline bool evaluate(const Formula& f, const std::vector<bool>& assignment) {
  switch (f.op) {
    case Formula::Op::Var: return assignment.at(f.var);
    case Formula::Op::Not: return !evaluate(f.args.front(), assignment);
    case Formula::Op::And:
      return std::all_of(f.args.begin(), f.args.end(),
                         [&](const Formula& g) { return evaluate(g, assignment); });
    case Formula::Op::Or:
      return std::any_of(f.args.begin(), f.args.end(),
                         [&](const Formula& g) { return evaluate(g, assignment); });
    case Formula::Op::Implies: return !evaluate(f.args[0], assignment) || evaluate(f.args[1], assignment);
    case Formula::Op::Iff: return evaluate(f.args[0], assignment) == evaluate(f.args[1], assignment);
  }
  return false;
}

inline bool satisfies(const PropositionalFormula& phi, const std::vector<bool>& assignment) {
  return std::all_of(phi.clauses.begin(), phi.clauses.end(),
                     [&](const Formula& c) { return evaluate(c, assignment); });
}

inline std::string toString(const Formula& f, const std::vector<std::string>& names) {
  auto join = [&](const char* sep) {
    std::string s = "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      if (i) s += sep;
      s += toString(f.args[i], names);
    }
    return s + ")";
  };
  switch (f.op) {
    case Formula::Op::Var: return names.at(f.var);
    case Formula::Op::Not: return "!" + toString(f.args.front(), names);
    case Formula::Op::And: return join(" & ");
    case Formula::Op::Or: return join(" | ");
    case Formula::Op::Implies: return "(" + toString(f.args[0], names) + " -> " + toString(f.args[1], names) + ")";
    case Formula::Op::Iff: return "(" + toString(f.args[0], names) + " <-> " + toString(f.args[1], names) + ")";
  }
  return "?";
}

/// Clause per rule: root; mandatory child (p <-> c); optional child (c -> p);
/// or group (p <-> c1 | ... | ck); alternative group ci -> (p & !cj ...) for
/// each member plus (p -> c1 | ... | ck); requires (a -> b); excludes !(a & b).
inline PropositionalFormula toPropositional(const FeatureModel& model) {
  PropositionalFormula phi;
  std::map<FeatureId, std::size_t> index;
  for (FeatureId id : preorder(model)) {
    index[id] = phi.variables.size();
    phi.variables.push_back(model.at(id).name);
  }
  auto var = [&](FeatureId id) { return Formula::variable(index.at(id)); };

  phi.clauses.push_back(var(model.root));
  for (FeatureId id : preorder(model)) {
    const Feature& parent = model.at(id);
    std::vector<FeatureId> orMembers;
    std::vector<FeatureId> xorMembers;
    for (FeatureId c : parent.children) {
      switch (model.at(c).kind) {
        case RelationshipKind::Mandatory: phi.clauses.push_back(Formula::iff(var(id), var(c))); break;
        case RelationshipKind::Optional: phi.clauses.push_back(Formula::implies(var(c), var(id))); break;
        case RelationshipKind::OrMember: orMembers.push_back(c); break;
        case RelationshipKind::XorMember: xorMembers.push_back(c); break;
      }
    }
    if (!orMembers.empty()) {
      std::vector<Formula> members;
      for (FeatureId c : orMembers) members.push_back(var(c));
      phi.clauses.push_back(Formula::iff(var(id), Formula::disjunction(std::move(members))));
    }
    if (!xorMembers.empty()) {
      for (FeatureId c : xorMembers) {
        std::vector<Formula> consequent{var(id)};
        for (FeatureId other : xorMembers)
          if (other != c) consequent.push_back(Formula::negation(var(other)));
        phi.clauses.push_back(Formula::implies(var(c), Formula::conjunction(std::move(consequent))));
      }
      std::vector<Formula> members;
      for (FeatureId c : xorMembers) members.push_back(var(c));
      phi.clauses.push_back(Formula::implies(var(id), Formula::disjunction(std::move(members))));
    }
  }
  for (const auto& c : model.constraints) {
    if (c.kind == ConstraintKind::Requires)
      phi.clauses.push_back(Formula::implies(var(c.lhs), var(c.rhs)));
    else
      phi.clauses.push_back(Formula::negation(Formula::conjunction({var(c.lhs), var(c.rhs)})));
  }
  return phi;
}

struct Configuration {
  std::set<std::string> selected;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

namespace detail {

/// Tree-rule checker over a bitmask indexed by preorder position.
class ConfigurationChecker {
 public:
  explicit ConfigurationChecker(const FeatureModel& model) {
    const auto order = preorder(model);
    if (order.size() > 63) throw std::length_error("configuration checks support at most 63 features");
    std::map<FeatureId, std::size_t> index;
    for (std::size_t i = 0; i < order.size(); ++i) {
      index[order[i]] = i;
      names_.push_back(model.at(order[i]).name);
    }
    root_ = index.at(model.root);
    for (FeatureId id : order) {
      const Feature& f = model.at(id);
      Node n;
      n.self = index.at(id);
      if (f.parent) n.parent = index.at(*f.parent);
      for (FeatureId c : f.children) {
        const std::size_t ci = index.at(c);
        switch (model.at(c).kind) {
          case RelationshipKind::Mandatory: n.mandatory |= bit(ci); break;
          case RelationshipKind::Optional: break;
          case RelationshipKind::OrMember: n.orGroup |= bit(ci); break;
          case RelationshipKind::XorMember: n.xorGroup |= bit(ci); break;
        }
      }
      nodes_.push_back(n);
    }
    for (const auto& c : model.constraints)
      constraints_.push_back({c.kind, index.at(c.lhs), index.at(c.rhs)});
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::uint64_t maskOf(const Configuration& config) const {
    std::uint64_t mask = 0;
    for (const auto& n : config.selected) {
      auto it = std::find(names_.begin(), names_.end(), n);
      if (it == names_.end()) throw UnknownFeature("configuration names unknown feature '" + n + "'");
      mask |= bit(static_cast<std::size_t>(it - names_.begin()));
    }
    return mask;
  }

  Configuration configurationOf(std::uint64_t mask) const {
    Configuration c;
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (mask & bit(i)) c.selected.insert(names_[i]);
    return c;
  }

  bool valid(std::uint64_t mask) const noexcept {
    if (!(mask & bit(root_))) return false;
    for (const Node& n : nodes_) {
      const bool on = mask & bit(n.self);
      if (!on) continue;
      if (n.parent && !(mask & bit(*n.parent))) return false;
      if ((mask & n.mandatory) != n.mandatory) return false;
      if (n.orGroup && !(mask & n.orGroup)) return false;
      if (n.xorGroup && std::popcount(mask & n.xorGroup) != 1) return false;
    }
    for (const auto& c : constraints_) {
      const bool lhs = mask & bit(c.lhs);
      const bool rhs = mask & bit(c.rhs);
      if (c.kind == ConstraintKind::Requires && lhs && !rhs) return false;
      if (c.kind == ConstraintKind::Excludes && lhs && rhs) return false;
    }
    return true;
  }

 private:
  static constexpr std::uint64_t bit(std::size_t i) noexcept { return std::uint64_t{1} << i; }

  struct Node {
    std::size_t self = 0;
    std::optional<std::size_t> parent;
    std::uint64_t mandatory = 0;
    std::uint64_t orGroup = 0;
    std::uint64_t xorGroup = 0;
  };
  struct Rule {
    ConstraintKind kind;
    std::size_t lhs;
    std::size_t rhs;
  };

  std::vector<std::string> names_;
  std::vector<Node> nodes_;
  std::vector<Rule> constraints_;
  std::size_t root_ = 0;
};

}  // namespace detail

/// True iff the selection obeys every tree rule and cross-tree constraint.
/// Throws UnknownFeature for names that are not in the model.
inline bool isValidConfiguration(const FeatureModel& model, const Configuration& config) {
  detail::ConfigurationChecker checker(model);
  return checker.valid(checker.maskOf(config));
}

inline constexpr std::size_t kDefaultConfigurationCap = 1'000'000;
inline constexpr std::size_t kMaxEnumerableFeatures = 20;

class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::size_t cap, std::size_t reached)
      : std::runtime_error("more than " + std::to_string(cap) + " configurations"),
        cap_(cap),
        reached_(reached) {}
  std::size_t cap() const noexcept { return cap_; }
  std::size_t reached() const noexcept { return reached_; }

 private:
  std::size_t cap_;
  std::size_t reached_;
};

class TooManyFeatures : public std::runtime_error {
 public:
  explicit TooManyFeatures(std::size_t count)
      : std::runtime_error("exhaustive enumeration supports at most " +
                           std::to_string(kMaxEnumerableFeatures) + " features, model has " +
                           std::to_string(count)) {}
};

/// Every valid configuration, sorted. Exhaustive over all 2^n subsets.
inline std::vector<Configuration> enumerateConfigurations(const FeatureModel& model,
                                                          std::size_t cap = kDefaultConfigurationCap) {
  if (model.size() > kMaxEnumerableFeatures) throw TooManyFeatures(model.size());
  detail::ConfigurationChecker checker(model);
  const std::uint64_t limit = std::uint64_t{1} << checker.size();
  std::vector<Configuration> out;
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    if (!checker.valid(mask)) continue;
    if (out.size() == cap) throw CapExceeded(cap, cap + 1);
    out.push_back(checker.configurationOf(mask));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fmit
