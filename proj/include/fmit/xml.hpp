#pragma once

// Reader and writer for the FeatureIDE-style XML dialect:
//
//   <featureModel>
//     <struct>
//       <and abstract="true" mandatory="true" name="Root">
//         <feature mandatory="true" name="A"/>
//         <alt name="B"> <feature name="B1"/> <feature name="B2"/> </alt>
//       </and>
//     </struct>
//     <constraints>
//       <rule><imp><var>A</var><var>B1</var></imp></rule>
//       <rule><not><conj><var>A</var><var>B2</var></conj></not></rule>
//     </constraints>
//   </featureModel>
//
// Children of `and` are optional unless mandatory="true"; children of `or` and
// `alt` are or/alternative group members; `feature` is a leaf.

#include <expat.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fmit/model.hpp"

namespace fmit {

struct SourceLocation {
  std::size_t line = 0;
  std::size_t column = 0;
};

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  SourceLocation location;
  std::string message;
};

struct ParseResult {
  std::optional<FeatureModel> model;  // absent whenever an Error diagnostic exists
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const noexcept { return model.has_value(); }
};

inline std::string formatDiagnostic(const ParseDiagnostic& d) {
  std::string out(toString(d.severity));
  if (d.location.line != 0)
    out += " at " + std::to_string(d.location.line) + ":" + std::to_string(d.location.column);
  return out + ": " + d.message;
}

namespace detail {

inline constexpr std::size_t kMaxXmlNesting = 256;

struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<XmlElement>> children;
  std::string text;
  SourceLocation location;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }
};

class XmlTreeBuilder {
 public:
  std::unique_ptr<XmlElement> root;
  std::optional<ParseDiagnostic> failure;

  std::unique_ptr<XmlElement> parse(std::string_view bytes) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate(nullptr),
                                                                        &XML_ParserFree);
    if (!parser) {
      failure = ParseDiagnostic{Severity::Error, {}, "cannot allocate XML parser"};
      return nullptr;
    }
    parser_ = parser.get();
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &XmlTreeBuilder::onStart, &XmlTreeBuilder::onEnd);
    XML_SetCharacterDataHandler(parser_, &XmlTreeBuilder::onText);

    constexpr std::size_t kChunk = 1 << 20;
    std::size_t offset = 0;
    do {
      const std::size_t len = std::min(kChunk, bytes.size() - offset);
      const bool last = offset + len == bytes.size();
      if (XML_Parse(parser_, bytes.data() + offset, static_cast<int>(len), last) == XML_STATUS_ERROR) {
        if (!failure) {
          failure = ParseDiagnostic{Severity::Error, here(),
                                    std::string("malformed XML: ") +
                                        XML_ErrorString(XML_GetErrorCode(parser_))};
        }
        return nullptr;
      }
      offset += len;
    } while (offset < bytes.size());
    return std::move(root);
  }

 private:
  SourceLocation here() const {
    return {static_cast<std::size_t>(XML_GetCurrentLineNumber(parser_)),
            static_cast<std::size_t>(XML_GetCurrentColumnNumber(parser_)) + 1};
  }

  static void onStart(void* self, const XML_Char* name, const XML_Char** attrs) {
    auto& b = *static_cast<XmlTreeBuilder*>(self);
    if (b.stack_.size() >= kMaxXmlNesting) {
      b.failure = ParseDiagnostic{Severity::Error, b.here(), "XML nesting exceeds " +
                                                                 std::to_string(kMaxXmlNesting) + " levels"};
      XML_StopParser(b.parser_, XML_FALSE);
      return;
    }
    auto element = std::make_unique<XmlElement>();
    element->name = name;
    element->location = b.here();
    for (std::size_t i = 0; attrs[i] != nullptr; i += 2) element->attributes.emplace_back(attrs[i], attrs[i + 1]);
    XmlElement* raw = element.get();
    if (b.stack_.empty())
      b.root = std::move(element);
    else
      b.stack_.back()->children.push_back(std::move(element));
    b.stack_.push_back(raw);
  }

  static void onEnd(void* self, const XML_Char*) {
    auto& b = *static_cast<XmlTreeBuilder*>(self);
    if (!b.stack_.empty()) b.stack_.pop_back();
  }

  static void onText(void* self, const XML_Char* s, int len) {
    auto& b = *static_cast<XmlTreeBuilder*>(self);
    if (!b.stack_.empty()) b.stack_.back()->text.append(s, static_cast<std::size_t>(len));
  }

  XML_Parser parser_ = nullptr;
  std::vector<XmlElement*> stack_;
};

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline bool isFeatureElement(std::string_view n) {
  return n == "and" || n == "or" || n == "alt" || n == "feature";
}

class DialectReader {
 public:
  explicit DialectReader(std::string modelName) : builder_(std::move(modelName)) {}

  std::vector<ParseDiagnostic> diagnostics;

  std::optional<FeatureModel> read(const XmlElement& doc) {
    if (doc.name != "featureModel") {
      error(doc, "document element is <" + doc.name + ">, expected <featureModel>");
      return std::nullopt;
    }
    const XmlElement* structElement = nullptr;
    const XmlElement* constraintsElement = nullptr;
    for (const auto& child : doc.children) {
      if (child->name == "struct") {
        if (structElement != nullptr)
          error(*child, "more than one <struct> section");
        else
          structElement = child.get();
      } else if (child->name == "constraints") {
        if (constraintsElement != nullptr)
          error(*child, "more than one <constraints> section");
        else
          constraintsElement = child.get();
      } else {
        warning(*child, "unsupported element <" + child->name + "> skipped");
      }
    }
    if (structElement == nullptr) {
      error(doc, "missing <struct> section");
      return std::nullopt;
    }
    readStruct(*structElement);
    if (constraintsElement != nullptr && haveRoot_) readConstraints(*constraintsElement);
    if (failed_) return std::nullopt;

    FeatureModel model = builder_.build();
    for (const auto& v : validate(model)) {
      // Duplicate names and blank names arrive here; structure is correct by
      // construction.
      auto loc = locations_.find(v.subject);
      diagnostics.push_back({v.severity, loc == locations_.end() ? SourceLocation{} : loc->second,
                             std::string(toString(v.rule)) + " (" + v.subject + "): " + v.message});
      if (v.severity == Severity::Error) failed_ = true;
    }
    if (failed_) return std::nullopt;
    return model;
  }

 private:
  void error(const XmlElement& at, std::string message) {
    diagnostics.push_back({Severity::Error, at.location, std::move(message)});
    failed_ = true;
  }

  void warning(const XmlElement& at, std::string message) {
    diagnostics.push_back({Severity::Warning, at.location, std::move(message)});
  }

  void readStruct(const XmlElement& s) {
    for (const auto& child : s.children) {
      if (!isFeatureElement(child->name)) {
        warning(*child, "unsupported element <" + child->name + "> in <struct> skipped");
        continue;
      }
      if (haveRoot_) {
        error(*child, "<struct> holds more than one root feature");
        continue;
      }
      haveRoot_ = true;
      readFeature(*child, std::nullopt, RelationshipKind::Mandatory);
    }
    if (!haveRoot_) error(s, "<struct> holds no root feature");
  }

  void readFeature(const XmlElement& e, std::optional<FeatureId> parent, RelationshipKind kind) {
    const std::string* name = nullptr;
    bool abstract = false;
    for (const auto& [key, value] : e.attributes) {
      if (key == "name") {
        name = &value;
      } else if (key == "abstract") {
        abstract = readFlag(e, key, value);
      } else if (key == "mandatory") {
        const bool mandatory = readFlag(e, key, value);
        if (parent && mandatory && isGroupKind(kind))
          warning(e, "mandatory attribute ignored inside an or/alt group");
      } else {
        warning(e, "unsupported attribute '" + key + "' ignored");
      }
    }
    if (name == nullptr) {
      error(e, "<" + e.name + "> element without a name attribute");
      return;
    }
    const FeatureId id = parent ? builder_.add(*parent, *name, kind, abstract)
                                : builder_.root(*name, abstract);
    locations_.emplace(*name, e.location);

    for (const auto& child : e.children) {
      if (child->name == "description") continue;
      if (!isFeatureElement(child->name)) {
        warning(*child, "unsupported element <" + child->name + "> skipped");
        continue;
      }
      if (e.name == "feature") {
        error(*child, "leaf element <feature name=\"" + *name + "\"> cannot contain features");
        continue;
      }
      RelationshipKind childKind = RelationshipKind::Optional;
      if (e.name == "or") {
        childKind = RelationshipKind::OrMember;
      } else if (e.name == "alt") {
        childKind = RelationshipKind::XorMember;
      } else if (const std::string* m = child->attribute("mandatory"); m && *m == "true") {
        childKind = RelationshipKind::Mandatory;
      }
      readFeature(*child, id, childKind);
    }
  }

  bool readFlag(const XmlElement& e, const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value != "false") warning(e, "attribute " + key + "=\"" + value + "\" read as false");
    return false;
  }

  std::optional<FeatureId> resolveVar(const XmlElement& var) {
    if (var.name != "var") return std::nullopt;
    const FeatureModel& current = builder_.peek();
    if (auto id = current.findByName(var.text)) return id;
    const std::string_view trimmed = trim(var.text);
    if (auto id = current.findByName(trimmed)) return id;
    error(var, "constraint references unknown feature '" + std::string(trimmed) + "'");
    return std::nullopt;
  }

  static std::vector<const XmlElement*> formulaChildren(const XmlElement& e) {
    std::vector<const XmlElement*> out;
    for (const auto& c : e.children)
      if (c->name != "description" && c->name != "tags") out.push_back(c.get());
    return out;
  }

  void readConstraints(const XmlElement& section) {
    for (const auto& rule : section.children) {
      if (rule->name != "rule") {
        warning(*rule, "unsupported element <" + rule->name + "> in <constraints> skipped");
        continue;
      }
      auto terms = formulaChildren(*rule);
      if (terms.size() != 1) {
        warning(*rule, "rule without exactly one formula skipped");
        continue;
      }
      readRule(*terms.front());
    }
  }

  // Recognized shapes:
  //   imp(var a, var b)              -> requires(a, b)
  //   disj(not(var a), var b)        -> requires(a, b)
  //   not(conj(var a, var b))        -> excludes(a, b)
  //   disj(not(var a), not(var b))   -> excludes(a, b)
  void readRule(const XmlElement& f) {
    auto args = formulaChildren(f);
    auto isVar = [](const XmlElement* e) { return e->name == "var"; };
    auto isNotVar = [&](const XmlElement* e) {
      if (e->name != "not") return false;
      auto inner = formulaChildren(*e);
      return inner.size() == 1 && isVar(inner.front());
    };
    auto innerVar = [&](const XmlElement* e) { return formulaChildren(*e).front(); };

    struct Shape {
      ConstraintKind kind;
      const XmlElement* lhs;
      const XmlElement* rhs;
    };
    std::optional<Shape> shape;
    if (f.name == "imp" && args.size() == 2 && isVar(args[0]) && isVar(args[1])) {
      shape = Shape{ConstraintKind::Requires, args[0], args[1]};
    } else if (f.name == "not" && args.size() == 1 && args[0]->name == "conj") {
      auto inner = formulaChildren(*args[0]);
      if (inner.size() == 2 && isVar(inner[0]) && isVar(inner[1]))
        shape = Shape{ConstraintKind::Excludes, inner[0], inner[1]};
    } else if (f.name == "disj" && args.size() == 2 && isNotVar(args[0])) {
      if (isNotVar(args[1]))
        shape = Shape{ConstraintKind::Excludes, innerVar(args[0]), innerVar(args[1])};
      else if (isVar(args[1]))
        shape = Shape{ConstraintKind::Requires, innerVar(args[0]), args[1]};
    }
    if (!shape) {
      warning(f, "unsupported constraint shape <" + f.name + "> skipped");
      return;
    }
    auto a = resolveVar(*shape->lhs);
    auto b = resolveVar(*shape->rhs);
    if (!a || !b) return;
    if (*a == *b) {
      error(f, "constraint relates feature '" + std::string(trim(shape->lhs->text)) + "' to itself");
      return;
    }
    builder_.constrain(shape->kind, *a, *b);
  }

  ModelBuilder builder_;
  std::map<std::string, SourceLocation> locations_;
  bool haveRoot_ = false;
  bool failed_ = false;
};

inline void escapeInto(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;"; else out += c;
        break;
      case '\t':
        if (attribute) out += "&#9;"; else out += c;
        break;
      case '\n':
        if (attribute) out += "&#10;"; else out += c;
        break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
}

inline void writeFeature(std::string& out, const FeatureModel& m, const Feature& f, std::size_t indent) {
  std::string tag = "feature";
  if (!f.children.empty()) {
    const auto first = m.at(f.children.front()).kind;
    const bool allSame = std::all_of(f.children.begin(), f.children.end(),
                                     [&](FeatureId c) { return m.at(c).kind == first; });
    if (allSame && first == RelationshipKind::OrMember)
      tag = "or";
    else if (allSame && first == RelationshipKind::XorMember)
      tag = "alt";
    else
      tag = "and";
  }
  out.append(indent, ' ');
  out += "<" + tag;
  if (f.abstract) out += " abstract=\"true\"";
  if (f.kind == RelationshipKind::Mandatory) out += " mandatory=\"true\"";
  out += " name=\"";
  escapeInto(out, f.name, true);
  out += "\"";
  if (f.children.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (FeatureId c : f.children) writeFeature(out, m, m.at(c), indent + 2);
  out.append(indent, ' ');
  out += "</" + tag + ">\n";
}

inline void writeVar(std::string& out, const FeatureModel& m, FeatureId id, std::size_t indent) {
  out.append(indent, ' ');
  out += "<var>";
  escapeInto(out, m.at(id).name, false);
  out += "</var>\n";
}

}  // namespace detail

/// Parses a document into a model. Never throws on malformed input; problems
/// come back as diagnostics. Warnings do not prevent a model from being
/// returned.
inline ParseResult parseXml(std::string_view bytes, std::string modelName = {}) {
  ParseResult result;
  if (detail::trim(bytes).empty()) {
    result.diagnostics.push_back({Severity::Error, {1, 1}, "empty document"});
    return result;
  }
  detail::XmlTreeBuilder tree;
  auto doc = tree.parse(bytes);
  if (!doc) {
    result.diagnostics.push_back(
        tree.failure.value_or(ParseDiagnostic{Severity::Error, {}, "no document element"}));
    return result;
  }
  detail::DialectReader reader(std::move(modelName));
  result.model = reader.read(*doc);
  result.diagnostics = std::move(reader.diagnostics);
  return result;
}

/// Deterministic UTF-8 output: stable attribute order (abstract, mandatory,
/// name), 2-space indentation, LF line endings, no BOM.
inline std::string serializeXml(const FeatureModel& model) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += "<featureModel>\n";
  out += "  <struct>\n";
  detail::writeFeature(out, model, model.rootFeature(), 4);
  out += "  </struct>\n";
  if (model.constraints.empty()) {
    out += "  <constraints/>\n";
  } else {
    out += "  <constraints>\n";
    for (const auto& c : model.constraints) {
      out += "    <rule>\n";
      if (c.kind == ConstraintKind::Requires) {
        out += "      <imp>\n";
        detail::writeVar(out, model, c.lhs, 8);
        detail::writeVar(out, model, c.rhs, 8);
        out += "      </imp>\n";
      } else {
        out += "      <not>\n";
        out += "        <conj>\n";
        detail::writeVar(out, model, c.lhs, 10);
        detail::writeVar(out, model, c.rhs, 10);
        out += "        </conj>\n";
        out += "      </not>\n";
      }
      out += "    </rule>\n";
    }
    out += "  </constraints>\n";
  }
  out += "</featureModel>\n";
  return out;
}

}  // namespace fmit
