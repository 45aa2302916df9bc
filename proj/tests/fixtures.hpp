#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fmit/fmit.hpp"

namespace fixtures {

using fmit::FeatureModel;
using fmit::ModelBuilder;
using K = fmit::RelationshipKind;

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string samplePath(const std::string& rel) { return std::string(FMIT_SAMPLES_DIR) + "/" + rel; }

inline FeatureModel loadSample(const std::string& rel) {
  auto r = fmit::parseXml(readFile(samplePath(rel)), rel);
  if (!r.ok()) throw std::runtime_error("fixture does not parse: " + rel);
  return *r.model;
}

// Semantic example: seven features each, eight relationship slots on the
// comparison side.
inline FeatureModel semanticBase() {
  ModelBuilder b("semantic_base");
  b.root("R");
  b.add("R", "A", K::Mandatory);
  b.add("A", "B", K::XorMember);
  b.add("B", "C", K::OrMember);
  b.add("R", "D", K::Mandatory);
  b.add("R", "E", K::Optional);
  b.add("R", "F", K::Mandatory);
  b.require("D", "E");
  return b.build();
}

inline FeatureModel semanticOther() {
  ModelBuilder b("semantic_other");
  b.root("R");
  b.add("R", "A", K::Mandatory);
  b.add("A", "B", K::OrMember);
  b.add("B", "C", K::OrMember);
  b.add("R", "D", K::Optional);
  b.add("R", "E", K::Mandatory);
  b.add("R", "F", K::Optional);
  b.require("D", "E");
  b.exclude("A", "F");
  return b.build();
}

// Structural example: same nine names, the comparison model re-rooted at I.
inline FeatureModel structuralBase() {
  ModelBuilder b("structural_base");
  b.root("A");
  b.add("A", "B", K::Optional);
  b.add("B", "D", K::Optional);
  b.add("B", "E", K::Optional);
  b.add("A", "C", K::Optional);
  b.add("C", "G", K::Optional);
  b.add("G", "I", K::Optional);
  b.add("C", "H", K::Optional);
  b.add("A", "F", K::Optional);
  return b.build();
}

inline FeatureModel structuralOther() {
  ModelBuilder b("structural_other");
  b.root("I");
  b.add("I", "B", K::Optional);
  b.add("B", "D", K::Optional);
  b.add("D", "A", K::Optional);
  b.add("B", "E", K::Optional);
  b.add("I", "C", K::Optional);
  b.add("C", "G", K::Optional);
  b.add("C", "F", K::Optional);
  b.add("I", "H", K::Optional);
  return b.build();
}

// Syntactic example: one identical name, one transposed pair.
inline FeatureModel syntacticBase() {
  ModelBuilder b("syntactic_base");
  b.root("Ligação");
  b.add("Ligação", "fone", K::Optional);
  return b.build();
}

inline FeatureModel syntacticOther() {
  ModelBuilder b("syntactic_other");
  b.root("Ligação");
  b.add("Ligação", "ofne", K::Optional);
  return b.build();
}

// ---------------------------------------------------------------------------
// Random models for property tests.

struct GeneratorOptions {
  std::size_t minFeatures = 1;
  std::size_t maxFeatures = 12;
  std::size_t maxConstraints = 3;
};

/// Well-formed random model. Names are drawn from a fixed pool so that two
/// generated models share some names and miss others.
inline FeatureModel randomModel(std::mt19937& rng, GeneratorOptions o = {}, const std::string& label = "m") {
  static const std::vector<std::string> pool{
      "Root",    "Audio",   "Video",   "Camera",  "Screen",  "Battery", "Network", "Wifi",
      "Bluetooth", "Storage", "Cloud",  "Backup",  "Sync",    "Search",  "Filter",  "Export",
      "Import",  "Print",   "Share",   "Login",   "Logout",  "Profile", "Settings", "Theme"};
  std::uniform_int_distribution<std::size_t> count(o.minFeatures, o.maxFeatures);
  const std::size_t n = count(rng);
  std::vector<std::string> names(pool.begin() + 1, pool.end());
  std::shuffle(names.begin(), names.end(), rng);

  ModelBuilder b(label);
  std::vector<fmit::FeatureId> ids{b.root(pool[0], rng() % 2 == 0)};
  // Sibling class chosen when a parent receives its first child.
  std::vector<int> cls{-1};
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng);
    if (cls[p] < 0) cls[p] = static_cast<int>(rng() % 4);  // 0,1: and; 2: or; 3: alt
    K kind = K::Optional;
    if (cls[p] == 2) kind = K::OrMember;
    else if (cls[p] == 3) kind = K::XorMember;
    else kind = rng() % 2 ? K::Mandatory : K::Optional;
    ids.push_back(b.add(ids[p], names[i - 1], kind, rng() % 5 == 0));
    cls.push_back(-1);
  }
  if (n >= 2) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, o.maxConstraints)(rng);
    // Merges drop repeated relations (excludes is symmetric), so none are generated.
    std::set<std::tuple<int, std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t x = std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng);
      std::size_t y = std::uniform_int_distribution<std::size_t>(0, ids.size() - 2)(rng);
      if (y >= x) ++y;
      const bool requires_ = rng() % 2;
      const auto key = requires_ ? std::tuple{0, x, y} : std::tuple{1, std::min(x, y), std::max(x, y)};
      if (!seen.insert(key).second) continue;
      b.constrain(requires_ ? fmit::ConstraintKind::Requires : fmit::ConstraintKind::Excludes, ids[x], ids[y]);
    }
  }
  return b.build();
}

/// Derived variant of `m`: some features renamed slightly, some kinds
/// flipped, some leaves dropped, some leaves added.
inline FeatureModel mutate(const FeatureModel& m, std::mt19937& rng, const std::string& label = "variant") {
  std::vector<fmit::FeatureId> order = fmit::preorder(m);
  std::map<fmit::FeatureId, fmit::FeatureId> image;
  ModelBuilder b(label);
  std::map<fmit::FeatureId, int> cls;
  auto classOf = [](K k) { return k == K::OrMember ? 2 : k == K::XorMember ? 3 : 0; };
  for (fmit::FeatureId id : order) {
    const fmit::Feature& f = m.at(id);
    std::string name = f.name;
    if (rng() % 6 == 0) name += "s";
    if (!f.parent) {
      image[id] = b.root(name, f.abstract);
      continue;
    }
    if (f.children.empty() && rng() % 6 == 0) continue;  // dropped leaf
    const fmit::FeatureId host = image.at(*f.parent);
    K kind = f.kind;
    if (!cls.contains(host)) {
      if (rng() % 5 == 0) kind = kind == K::Mandatory ? K::Optional : kind == K::Optional ? K::Mandatory
                                 : kind == K::OrMember ? K::XorMember : K::OrMember;
      cls[host] = classOf(kind);
    } else if (cls[host] == 0) {
      if (fmit::isGroupKind(kind)) kind = K::Optional;
      else if (rng() % 5 == 0) kind = kind == K::Mandatory ? K::Optional : K::Mandatory;
    } else {
      kind = cls[host] == 2 ? K::OrMember : K::XorMember;
    }
    image[id] = b.add(host, name, kind, f.abstract);
  }
  if (rng() % 2 == 0) {
    const auto& ids = fmit::preorder(b.peek());
    const fmit::FeatureId host = ids[rng() % ids.size()];
    if (!cls.contains(host) || cls[host] == 0) b.add(host, "Extra" + std::to_string(rng() % 100), K::Optional);
  }
  for (const auto& c : m.constraints)
    if (image.contains(c.lhs) && image.contains(c.rhs)) b.constrain(c.kind, image.at(c.lhs), image.at(c.rhs));
  return b.build();
}

}  // namespace fixtures
