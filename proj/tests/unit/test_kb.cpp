#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "blade/kb.hpp"

using namespace blade;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimal = R"({
  "schema_version": 1,
  "kb_version": 3,
  "criteria": [
    {"id": "tps", "name": "Throughput", "category": "performance-efficiency",
     "direction": "benefit", "kind": "numeric-interval", "unit": "tx/s", "description": ""},
    {"id": "maturity", "name": "Maturity", "category": "maintainability",
     "direction": "benefit", "kind": "ordinal", "levels": ["low", "high"], "description": ""}
  ],
  "profiles": [
    {"id": "a", "name": "A", "attributes": {"tps": {"lo": 1, "hi": 5}, "maturity": "high"},
     "tech_tags": ["Go"], "sources": [{"citation": "https://example.org", "retrieved": "2026-01-01"}]}
  ]
})";

}  // namespace

TEST(KnowledgeBase, FixtureFileMatchesBuiltInFixture) {
  EXPECT_EQ(slurp(BLADE_DATA_DIR "/fixture_kb.json"), serialize(fixture_knowledge_base()));
}

TEST(KnowledgeBase, FixtureCoversEveryCategoryAndFivePlatforms) {
  const auto kb = fixture_knowledge_base();
  EXPECT_NO_THROW(validate(kb));
  EXPECT_EQ(kb.profiles.size(), 5u);
  std::set<Iso25010Category> seen;
  for (const auto& c : kb.criteria) seen.insert(c.category);
  EXPECT_EQ(seen.size(), 8u);
}

TEST(KnowledgeBase, BitcoinLacksGeneralSmartContracts) {
  const auto kb = fixture_knowledge_base();
  const auto* p = kb.find_profile("bitcoin");
  ASSERT_NE(p, nullptr);
  const auto* v = p->attribute("smart-contracts");
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(std::get<bool>(*v), false);
}

TEST(KnowledgeBase, RoundTripIsIdentity) {
  const auto kb = load_knowledge_base(kMinimal);
  EXPECT_EQ(kb.kb_version, 3);
  const auto again = load_knowledge_base(serialize(kb));
  EXPECT_EQ(kb, again);
  EXPECT_EQ(serialize(kb), serialize(again));
  const auto fixture = fixture_knowledge_base();
  EXPECT_EQ(load_knowledge_base(serialize(fixture)), fixture);
}

TEST(KnowledgeBase, BareNumberIsPointInterval) {
  std::string doc = kMinimal;
  doc.replace(doc.find(R"({"lo": 1, "hi": 5})"), 18, "7");
  const auto kb = load_knowledge_base(doc);
  EXPECT_EQ(std::get<Interval>(*kb.profiles[0].attribute("tps")), (Interval{7, 7}));
}

TEST(KnowledgeBase, RejectsInvertedInterval) {
  std::string doc = kMinimal;
  doc.replace(doc.find(R"({"lo": 1, "hi": 5})"), 18, R"({"lo": 6, "hi": 5})");
  try {
    load_knowledge_base(doc);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("interval lo > hi"), std::string::npos);
  }
}

TEST(KnowledgeBase, RejectsKindMismatchUnknownLevelAndCategory) {
  std::string doc = kMinimal;
  doc.replace(doc.find(R"("maturity": "high")"), 18, R"("maturity": true)");
  EXPECT_THROW(load_knowledge_base(doc), ValidationError);

  doc = kMinimal;
  doc.replace(doc.find(R"("maturity": "high")"), 18, R"("maturity": "mid")");
  EXPECT_THROW(load_knowledge_base(doc), ValidationError);

  doc = kMinimal;
  doc.replace(doc.find("maintainability"), 15, "speed");
  try {
    load_knowledge_base(doc);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown ISO 25010 category"), std::string::npos);
  }
}

TEST(KnowledgeBase, RejectsDuplicateProfileAndUnknownCriterion) {
  auto kb = load_knowledge_base(kMinimal);
  kb.profiles.push_back(kb.profiles[0]);
  EXPECT_THROW(validate(kb), ValidationError);

  std::string doc = kMinimal;
  doc.replace(doc.find(R"("maturity": "high")"), 10, R"("latency")");
  EXPECT_THROW(load_knowledge_base(doc), ValidationError);
}

TEST(KnowledgeBase, MalformedDocumentsAreFormatErrors) {
  EXPECT_THROW(load_knowledge_base("{"), FormatError);
  EXPECT_THROW(load_knowledge_base("[]"), FormatError);
  EXPECT_THROW(load_knowledge_base(R"({"schema_version": 1, "kb_version": 1})"), FormatError);
  EXPECT_THROW(load_knowledge_base_file("/nonexistent/kb.json"), FormatError);
}

TEST(KnowledgeBase, UnsupportedSchemaVersion) {
  std::string doc = kMinimal;
  doc.replace(doc.find(R"("schema_version": 1)"), 19, R"("schema_version": 2)");
  EXPECT_THROW(load_knowledge_base(doc), ValidationError);
}

TEST(KnowledgeBase, MergeReplacesAppendsUnionsSourcesAndBumpsVersion) {
  const auto base = load_knowledge_base(kMinimal);
  KnowledgeBase delta;
  delta.kb_version = 5;
  delta.criteria = base.criteria;
  auto p = base.profiles[0];
  p.attributes["tps"] = Interval{2, 4};
  p.sources = {{"https://example.org/new", "2026-02-01"}};
  delta.profiles.push_back(p);
  auto q = base.profiles[0];
  q.id = "b";
  delta.profiles.push_back(q);

  const auto merged = merge_knowledge(base, delta);
  EXPECT_EQ(merged.kb_version, 6);
  ASSERT_EQ(merged.profiles.size(), 2u);
  EXPECT_EQ(std::get<Interval>(*merged.profiles[0].attribute("tps")), (Interval{2, 4}));
  EXPECT_EQ(merged.profiles[0].sources.size(), 2u);
  EXPECT_EQ(merged.profiles[1].id, "b");
}

TEST(KnowledgeBase, MergeRejectsKindChangeAndSchemaMismatch) {
  const auto base = load_knowledge_base(kMinimal);
  KnowledgeBase delta;
  auto c = base.criteria[1];
  c.kind = CriterionKind::boolean;
  c.ordinal_levels.clear();
  delta.criteria.push_back(c);
  EXPECT_THROW(merge_knowledge(base, delta), ValidationError);

  KnowledgeBase other;
  other.schema_version = 2;
  EXPECT_THROW(merge_knowledge(base, other), ValidationError);
}

TEST(KnowledgeBase, EnumLabelsRoundTrip) {
  for (auto c : {Iso25010Category::functional_suitability, Iso25010Category::performance_efficiency,
                 Iso25010Category::compatibility, Iso25010Category::usability,
                 Iso25010Category::reliability, Iso25010Category::security,
                 Iso25010Category::maintainability, Iso25010Category::portability}) {
    EXPECT_EQ(parse_category(to_string(c)), c);
  }
  for (auto k : {CriterionKind::boolean, CriterionKind::numeric_interval, CriterionKind::ordinal,
                 CriterionKind::categorical}) {
    EXPECT_EQ(parse_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_direction("sideways"));
}
