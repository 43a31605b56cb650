#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blade/error.hpp"
#include "blade/kb.hpp"

namespace blade {

enum class StrictOperator { equals, at_least, at_most, includes_all };

std::string_view to_string(StrictOperator op);
std::optional<StrictOperator> parse_operator(std::string_view label);

/// A threshold as written by the architect. Its meaning depends on the
/// criterion kind, which is only known once checked against a KB:
/// bool for boolean, number for numeric-interval, a level label for
/// ordinal, a label or label set for categorical.
using Literal = std::variant<bool, double, std::string, LabelSet>;

std::string literal_text(const Literal& lit);
/// Inverse of literal_text: `true`/`false`, a number, `[a, b]`, or a bare label.
Literal parse_literal(std::string_view text);
json literal_to_json(const Literal& lit);

/// "Must have" constraint; profiles violating it are eliminated before ranking.
struct StrictRequirement {
  std::string criterion_id;
  StrictOperator op = StrictOperator::equals;
  Literal threshold;

  std::string text() const;  // "<criterion> <op> <literal>"

  friend bool operator==(const StrictRequirement&, const StrictRequirement&) = default;
};

/// Likert desirability in [0,1]: 0 is indifferent, 1 extremely desirable.
struct Preference {
  std::string criterion_id;
  double weight = 0.0;

  friend bool operator==(const Preference&, const Preference&) = default;
};

struct AssetProfile {
  LabelSet skill_tags;
  LabelSet infra_tags;
  double affinity_likert = 0.0;

  friend bool operator==(const AssetProfile&, const AssetProfile&) = default;
};

enum class ScalarizationStrategy { midpoint, pessimistic, optimistic };

std::string_view to_string(ScalarizationStrategy s);
std::optional<ScalarizationStrategy> parse_strategy(std::string_view label);

struct RequirementSet {
  std::vector<StrictRequirement> strict;
  std::vector<Preference> preferences;
  std::optional<AssetProfile> assets;
  ScalarizationStrategy strategy = ScalarizationStrategy::midpoint;
  bool impute_missing_as_worst = false;

  const Preference* find_preference(std::string_view criterion_id) const;

  friend bool operator==(const RequirementSet&, const RequirementSet&) = default;
};

/// Reserved column id for the enterprise-asset fit criterion.
inline constexpr std::string_view kAssetAffinityId = "asset-affinity";

/// Parses a requirements document. Text starting with '{' is read as JSON,
/// anything else as the sectioned key/value format. Only local invariants
/// are checked here; see validate_against for the KB cross-check.
RequirementSet parse_requirements(std::string_view document);
RequirementSet parse_requirements_file(const std::string& path);
RequirementSet requirements_from_json(const json& j);

json to_json(const RequirementSet& reqs);
std::string to_text(const RequirementSet& reqs);

/// Throws ValidationError for likert values outside [0,1] or duplicate
/// preferences.
void check_local_invariants(const RequirementSet& reqs);

/// Empty iff every referenced criterion exists, each operator and literal
/// fits its criterion kind, and at least one preference has positive weight.
std::vector<Finding> validate_against(const RequirementSet& reqs, const KnowledgeBase& kb);

bool has_errors(const std::vector<Finding>& findings);

/// Adds embedded (e.g. BPMN-derived) requirements under the file's own:
/// on a conflicting preference or strict (criterion, operator) pair the
/// primary entry wins and a warning is appended.
RequirementSet merge_requirements(const RequirementSet& primary, const RequirementSet& embedded,
                                  std::vector<std::string>& warnings);

double jaccard(const LabelSet& a, const LabelSet& b);

/// Jaccard similarity of (skills ∪ infra) with the profile's tech tags.
double asset_affinity(const AssetProfile& assets, const BlockchainProfile& profile);

}  // namespace blade
