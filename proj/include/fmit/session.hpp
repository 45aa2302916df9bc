#pragma once

// Semi-automatic integration: a session holds the comparison of two models,
// the conflicts found between matched features, and the user's decisions.
// Transitions take a session by value and return the next one.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmit/compare.hpp"
#include "fmit/merge.hpp"
#include "fmit/model.hpp"

namespace fmit {

enum class SessionState { Created, AwaitingResolutions, Finalized };

constexpr std::string_view toString(SessionState s) noexcept {
  switch (s) {
    case SessionState::Created: return "created";
    case SessionState::AwaitingResolutions: return "awaiting_resolutions";
    case SessionState::Finalized: return "finalized";
  }
  return "?";
}

class SessionError : public std::runtime_error {
 public:
  enum class Code { UnknownConflict, AlreadyResolved, StructuralNotResolvable, WrongState, UnresolvedConflicts };

  SessionError(Code code, std::string message, std::vector<int> unresolved = {})
      : std::runtime_error(std::move(message)), code_(code), unresolved_(std::move(unresolved)) {}

  Code code() const noexcept { return code_; }
  const std::vector<int>& unresolved() const noexcept { return unresolved_; }

 private:
  Code code_;
  std::vector<int> unresolved_;
};

struct Session {
  std::string id;
  FeatureModel base;
  FeatureModel other;
  ComparisonOptions options;
  ComparisonReport report;
  std::vector<Conflict> conflicts;
  SessionState state = SessionState::Created;
  std::optional<FeatureModel> merged;
  std::optional<ComparisonReport> postReport;

  const Conflict* conflict(int conflictId) const noexcept {
    for (const auto& c : conflicts)
      if (c.id == conflictId) return &c;
    return nullptr;
  }

  std::vector<int> unresolvedIds() const {
    std::vector<int> out;
    for (const auto& c : conflicts)
      if (c.resolvable() && !c.resolved()) out.push_back(c.id);
    return out;
  }

  std::size_t resolvableCount() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(conflicts.begin(), conflicts.end(), [](const Conflict& c) { return c.resolvable(); }));
  }
};

/// 128 random bits as lowercase hex.
inline std::string newSessionToken() {
  static thread_local std::random_device device;
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (int i = 0; i < 4; ++i) out << std::setw(8) << static_cast<std::uint32_t>(device());
  return out.str();
}

/// Throws InvalidModel when either input is not well-formed.
inline Session startSession(FeatureModel base, FeatureModel other, const ComparisonOptions& options = {}) {
  requireWellFormed(base);
  requireWellFormed(other);
  Session s;
  s.id = newSessionToken();
  s.options = options;
  s.report = computeCee(base, other, options);
  s.conflicts = detectConflicts(base, other, s.report.matching);
  s.base = std::move(base);
  s.other = std::move(other);
  s.state = SessionState::AwaitingResolutions;
  return s;
}

inline Session resolve(Session s, int conflictId, Choice choice) {
  if (s.state != SessionState::AwaitingResolutions)
    throw SessionError(SessionError::Code::WrongState,
                       "session is " + std::string(toString(s.state)));
  auto it = std::find_if(s.conflicts.begin(), s.conflicts.end(),
                         [&](const Conflict& c) { return c.id == conflictId; });
  if (it == s.conflicts.end())
    throw SessionError(SessionError::Code::UnknownConflict, "no conflict #" + std::to_string(conflictId));
  if (!it->resolvable())
    throw SessionError(SessionError::Code::StructuralNotResolvable,
                       "conflict #" + std::to_string(conflictId) + " is structural and cannot be resolved");
  if (it->resolved())
    throw SessionError(SessionError::Code::AlreadyResolved,
                       "conflict #" + std::to_string(conflictId) + " is already resolved");
  it->resolution = choice;
  return s;
}

namespace detail {

/// Base model with every KeepOther decision applied to the base side of the
/// pair. A sibling list left with mixed classes takes the class of its first
/// child whose kind was decided; the others conform to it. The root always
/// stays mandatory.
inline FeatureModel applyDecisions(const FeatureModel& base, const FeatureModel& other,
                                   const std::vector<Conflict>& conflicts) {
  FeatureModel m = base;
  std::set<FeatureId> decidedKind;
  for (const auto& c : conflicts) {
    if (!c.resolution) continue;
    Feature& f = m.features.at(c.baseFeature);
    const Feature& o = other.at(c.otherFeature);
    if (c.kind == ConflictKind::Name && *c.resolution == Choice::KeepOther) f.name = o.name;
    if (c.kind == ConflictKind::RelationshipKind && f.parent) {
      decidedKind.insert(f.id);
      if (*c.resolution == Choice::KeepOther) f.kind = o.kind;
    }
  }
  for (auto& [id, parent] : m.features) {
    if (parent.children.empty()) continue;
    std::set<SiblingClass> classes;
    for (FeatureId c : parent.children) classes.insert(classOf(m.features.at(c).kind));
    if (classes.size() < 2) continue;
    FeatureId lead = parent.children.front();
    for (FeatureId c : parent.children)
      if (decidedKind.contains(c)) {
        lead = c;
        break;
      }
    const SiblingClass cls = classOf(m.features.at(lead).kind);
    for (FeatureId c : parent.children)
      if (c != lead) {
        Feature& child = m.features.at(c);
        child.kind = adaptKind(child.kind, cls);
      }
  }
  return m;
}

}  // namespace detail

/// Applies the decisions, merges additionally and re-compares base against
/// the merged model.
inline Session finalize(Session s) {
  if (s.state != SessionState::AwaitingResolutions)
    throw SessionError(SessionError::Code::WrongState, "session is " + std::string(toString(s.state)));
  if (auto open = s.unresolvedIds(); !open.empty())
    throw SessionError(SessionError::Code::UnresolvedConflicts,
                       std::to_string(open.size()) + " conflict(s) still unresolved", std::move(open));
  const FeatureModel decided = detail::applyDecisions(s.base, s.other, s.conflicts);
  s.merged = additionalMerge(decided, s.other, s.report.matching).model;
  s.postReport = computeCee(s.base, *s.merged, s.options);
  s.state = SessionState::Finalized;
  return s;
}

}  // namespace fmit
