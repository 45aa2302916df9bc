#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"

using namespace fmit;
using K = RelationshipKind;

namespace {

ParseResult parse(const std::string& xml) { return parseXml(xml, "t"); }

std::string wrap(const std::string& structBody, const std::string& constraints = "") {
  return "<featureModel><struct>" + structBody + "</struct>" + constraints + "</featureModel>";
}

bool hasMessage(const ParseResult& r, Severity s, const std::string& needle) {
  return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const ParseDiagnostic& d) {
    return d.severity == s && d.message.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST(XmlRead, DialectKinds) {
  const auto r = parse(wrap(R"(<and abstract="true" mandatory="true" name="R">
      <feature mandatory="true" name="A"/>
      <feature name="B"/>
      <or name="C"><feature name="C1"/><feature name="C2"/></or>
      <alt name="D"><feature name="D1"/><feature name="D2"/></alt>
    </and>)"));
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.diagnostics.empty());
  const FeatureModel& m = *r.model;
  auto kind = [&](const char* n) { return m.at(*m.findByName(n)).kind; };
  EXPECT_TRUE(m.rootFeature().abstract);
  EXPECT_EQ(kind("A"), K::Mandatory);
  EXPECT_EQ(kind("B"), K::Optional);
  EXPECT_EQ(kind("C1"), K::OrMember);
  EXPECT_EQ(kind("D2"), K::XorMember);
  EXPECT_EQ(kind("C"), K::Optional);
  EXPECT_EQ(preorderNames(m), (std::vector<std::string>{"R", "A", "B", "C", "C1", "C2", "D", "D1", "D2"}));
}

TEST(XmlRead, ConstraintShapes) {
  const std::string tree = R"(<and name="R"><feature name="A"/><feature name="B"/></and>)";
  const auto r = parse(wrap(tree, R"(<constraints>
      <rule><imp><var>A</var><var>B</var></imp></rule>
      <rule><not><conj><var>A</var><var>B</var></conj></not></rule>
      <rule><disj><not><var>B</var></not><not><var>A</var></not></disj></rule>
      <rule><disj><not><var>B</var></not><var>A</var></disj></rule>
      <rule><eq><var>A</var><var>B</var></eq></rule>
    </constraints>)"));
  ASSERT_TRUE(r.ok());
  const auto& cs = r.model->constraints;
  ASSERT_EQ(cs.size(), 4u);
  const FeatureId a = *r.model->findByName("A");
  const FeatureId b = *r.model->findByName("B");
  EXPECT_EQ(cs[0], (CrossTreeConstraint{ConstraintKind::Requires, a, b}));
  EXPECT_EQ(cs[1], (CrossTreeConstraint{ConstraintKind::Excludes, a, b}));
  EXPECT_EQ(cs[2], (CrossTreeConstraint{ConstraintKind::Excludes, b, a}));
  EXPECT_EQ(cs[3], (CrossTreeConstraint{ConstraintKind::Requires, b, a}));
  EXPECT_TRUE(hasMessage(r, Severity::Warning, "skipped"));
}

TEST(XmlRead, VarTextIsTrimmed) {
  const auto r = parse(wrap(R"(<and name="R"><feature name="A"/><feature name="B"/></and>)",
                            "<constraints><rule><imp><var>\n  A \n</var><var>B</var></imp></rule></constraints>"));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.model->constraints.size(), 1u);
}

TEST(XmlRead, Errors) {
  EXPECT_TRUE(hasMessage(parse(""), Severity::Error, "empty document"));
  EXPECT_FALSE(parse("<featureModel><struct>").ok());
  EXPECT_FALSE(parse("<model/>").ok());
  EXPECT_TRUE(hasMessage(parse("<featureModel/>"), Severity::Error, "missing <struct>"));
  EXPECT_TRUE(hasMessage(parse(wrap("")), Severity::Error, "no root"));
  EXPECT_TRUE(hasMessage(parse(wrap(R"(<and name="R"/><and name="S"/>)")), Severity::Error, "more than one root"));
  EXPECT_TRUE(hasMessage(parse(wrap(R"(<and><feature name="A"/></and>)")), Severity::Error, "without a name"));
  EXPECT_TRUE(hasMessage(parse(wrap(R"(<and name="R"><feature name="A"><feature name="B"/></feature></and>)")),
                         Severity::Error, "cannot contain"));
  EXPECT_FALSE(parse(wrap(R"(<and name="R"><feature name="A"/><feature name="A"/></and>)")).ok());
  EXPECT_FALSE(parse(wrap(R"(<and name="R"><feature name=" "/></and>)")).ok());
  EXPECT_TRUE(hasMessage(parse(wrap(R"(<and name="R"><feature name="A"/></and>)",
                                    "<constraints><rule><imp><var>A</var><var>Z</var></imp></rule></constraints>")),
                         Severity::Error, "unknown feature 'Z'"));
  EXPECT_FALSE(parse(wrap(R"(<and name="R"><feature name="A"/></and>)",
                          "<constraints><rule><imp><var>A</var><var>A</var></imp></rule></constraints>"))
                   .ok());
}

TEST(XmlRead, ErrorsCarryLocations) {
  const auto r = parse("<featureModel>\n<struct>\n<and name=\"R\">\n<feature/>\n</and></struct></featureModel>");
  ASSERT_FALSE(r.ok());
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics.front().location.line, 4u);
  EXPECT_NE(formatDiagnostic(r.diagnostics.front()).find("4:"), std::string::npos);
}

TEST(XmlRead, WarningsKeepTheModel) {
  const auto r = parse(wrap(R"(<and name="R" color="red"><or name="G"><feature mandatory="true" name="X"/></or>
      <feature abstract="maybe" name="Y"/><graphics/></and>)",
                            "<comments/>"));
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(hasMessage(r, Severity::Warning, "unsupported attribute 'color'"));
  EXPECT_TRUE(hasMessage(r, Severity::Warning, "mandatory attribute ignored"));
  EXPECT_TRUE(hasMessage(r, Severity::Warning, "read as false"));
  EXPECT_TRUE(hasMessage(r, Severity::Warning, "<graphics>"));
  EXPECT_TRUE(hasMessage(r, Severity::Warning, "SingletonGroup"));
}

TEST(XmlRead, DeepNestingIsRejectedNotCrashed) {
  std::string open;
  std::string close;
  for (int i = 0; i < 5000; ++i) {
    open += "<and name=\"n" + std::to_string(i) + "\">";
    close += "</and>";
  }
  const auto r = parse(wrap(open + close));
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(hasMessage(r, Severity::Error, "nest"));
}

TEST(XmlWrite, EscapesSpecialCharacters) {
  ModelBuilder b("esc");
  b.root("R&D <core>");
  b.add(FeatureId{0}, "say \"hi\"\tnow", K::Optional);
  b.add(FeatureId{0}, "Ligação", K::Mandatory);
  b.require("say \"hi\"\tnow", "Ligação");
  const FeatureModel m = b.build();
  const std::string xml = serializeXml(m);
  EXPECT_NE(xml.find("R&amp;D &lt;core&gt;"), std::string::npos);
  const auto back = parseXml(xml);
  ASSERT_TRUE(back.ok());
  EXPECT_TRUE(structurallyEqual(m, *back.model));
}

TEST(XmlWrite, SamplesRoundTripByteForByte) {
  for (const char* rel : {"integration_R.xml", "integration_C.xml", "scenarios/scenario1_R.xml", "scenarios/scenario2_C.xml",
                          "scenarios/scenario3_C.xml", "scenarios/scenario4_R.xml", "scenarios/scenario6_C.xml"}) {
    const std::string bytes = fixtures::readFile(fixtures::samplePath(rel));
    const auto r = parseXml(bytes, rel);
    ASSERT_TRUE(r.ok()) << rel;
    EXPECT_EQ(serializeXml(*r.model), bytes) << rel;
  }
}

TEST(XmlWrite, ReferenceFixturesRoundTrip) {
  for (const auto& m : {fixtures::semanticBase(), fixtures::semanticOther(), fixtures::structuralOther(),
                        fixtures::syntacticBase()}) {
    const auto r = parseXml(serializeXml(m));
    ASSERT_TRUE(r.ok()) << m.name;
    EXPECT_TRUE(structurallyEqual(m, *r.model)) << m.name;
  }
}

TEST(XmlWrite, GroupsAndMandatoryRoot) {
  const std::string xml = serializeXml(fixtures::semanticBase());
  EXPECT_NE(xml.find(R"(<and mandatory="true" name="R">)"), std::string::npos);
  EXPECT_NE(xml.find(R"(<alt mandatory="true" name="A">)"), std::string::npos);
  EXPECT_NE(xml.find(R"(<or name="B">)"), std::string::npos);
}
