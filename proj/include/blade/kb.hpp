#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blade/error.hpp"
#include "json.hpp"

namespace blade {

using json = nlohmann::json;

/// The eight ISO 25010 product quality characteristics. Criteria are grouped
/// under these so non-experts can navigate the catalogue.
enum class Iso25010Category {
  functional_suitability,
  performance_efficiency,
  compatibility,
  usability,
  reliability,
  security,
  maintainability,
  portability,
};

inline constexpr std::size_t kIsoCategoryCount = 8;

enum class Direction { benefit, cost };

enum class CriterionKind { boolean, numeric_interval, ordinal, categorical };

std::string_view to_string(Iso25010Category c);
std::string_view to_string(Direction d);
std::string_view to_string(CriterionKind k);

std::optional<Iso25010Category> parse_category(std::string_view label);
std::optional<Direction> parse_direction(std::string_view label);
std::optional<CriterionKind> parse_kind(std::string_view label);

/// A rankable or filterable attribute dimension.
///
/// Boolean criteria still carry a direction: for a benefit criterion `true`
/// is the favoured pole, for a cost criterion `false` is.
struct CriterionDef {
  std::string id;
  std::string name;
  Iso25010Category category = Iso25010Category::functional_suitability;
  Direction direction = Direction::benefit;
  CriterionKind kind = CriterionKind::boolean;
  std::string unit;                         // required for numeric-interval
  std::vector<std::string> ordinal_levels;  // worst to best; required iff ordinal
  std::string description;

  /// Index of `label` in ordinal_levels, if present.
  std::optional<std::size_t> level_index(std::string_view label) const;

  friend bool operator==(const CriterionDef&, const CriterionDef&) = default;
};

/// Closed numeric range in the criterion's unit. lo == hi is a point value.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double midpoint() const { return (lo + hi) / 2.0; }
  bool contains(double x) const { return lo <= x && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct OrdinalLevel {
  std::string label;

  friend bool operator==(const OrdinalLevel&, const OrdinalLevel&) = default;
};

using LabelSet = std::set<std::string>;

/// Tagged attribute value; the alternative index follows CriterionKind.
using AttributeValue = std::variant<bool, Interval, OrdinalLevel, LabelSet>;

CriterionKind kind_of(const AttributeValue& v);
std::string describe(const AttributeValue& v);

struct Source {
  std::string citation;   // URL or bibliographic reference
  std::string retrieved;  // ISO date, empty for generated notes

  friend bool operator==(const Source&, const Source&) = default;
};

struct BlockchainProfile {
  std::string id;
  std::string name;
  std::map<std::string, AttributeValue> attributes;
  LabelSet tech_tags;
  std::vector<Source> sources;

  const AttributeValue* attribute(std::string_view criterion_id) const;

  friend bool operator==(const BlockchainProfile&, const BlockchainProfile&) = default;
};

inline constexpr int kSchemaVersion = 1;

/// Versioned catalogue of criteria and platform profiles. Treat as an
/// immutable value once loaded; merge and refine return new instances.
struct KnowledgeBase {
  int schema_version = kSchemaVersion;
  std::int64_t kb_version = 1;
  std::vector<CriterionDef> criteria;
  std::vector<BlockchainProfile> profiles;

  const CriterionDef* find_criterion(std::string_view id) const;
  const BlockchainProfile* find_profile(std::string_view id) const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

/// Throws ValidationError on the first broken invariant.
void validate(const KnowledgeBase& kb);

/// Parses and fully validates a KB document. Malformed JSON or a structural
/// mismatch raises FormatError; a broken domain rule raises ValidationError.
KnowledgeBase load_knowledge_base(std::string_view document);
KnowledgeBase load_knowledge_base_file(const std::string& path);

json to_json(const KnowledgeBase& kb);
json attribute_to_json(const AttributeValue& v);

/// Canonical text form: two-space indented JSON with a trailing newline.
std::string serialize(const KnowledgeBase& kb);

/// Applies `delta` over `base`: same-id criteria and profiles are replaced,
/// new ids appended, sources of replaced profiles unioned. The result's
/// kb_version is max(base, delta) + 1.
KnowledgeBase merge_knowledge(const KnowledgeBase& base, const KnowledgeBase& delta);

/// The shipped five-platform example knowledge base.
KnowledgeBase fixture_knowledge_base();

}  // namespace blade
