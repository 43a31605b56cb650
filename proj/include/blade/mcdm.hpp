#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blade/kb.hpp"
#include "blade/requirements.hpp"

namespace blade {

/// Maps an attribute value onto the real line for ranking. Intervals use the
/// strategy; booleans map to 1 on the favoured pole; ordinals to
/// index / (levels - 1). Categorical values cannot be scalarized.
double scalarize(const AttributeValue& value, const CriterionDef& criterion,
                 ScalarizationStrategy strategy);

/// Scalarized m×n decision matrix, rows are alternatives.
struct DecisionMatrix {
  std::vector<std::string> alternative_ids;
  std::vector<std::string> criterion_ids;
  std::vector<double> values;  // row-major
  std::vector<Direction> directions;
  std::vector<double> weights;  // non-negative, sum to 1
  std::vector<std::string> warnings;

  std::size_t rows() const { return alternative_ids.size(); }
  std::size_t cols() const { return criterion_ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }

  /// Throws ValidationError if shape, weights or values are inconsistent.
  void check() const;
};

struct Violation {
  StrictRequirement requirement;
  std::optional<AttributeValue> observed;
  std::string explanation;
};

struct Elimination {
  std::string alternative_id;
  std::vector<Violation> violated;
};

struct FilterOutcome {
  std::vector<BlockchainProfile> survivors;
  std::vector<Elimination> eliminations;
};

/// Violations of one strict requirement by one profile under guaranteed-bound
/// semantics (at-least on an interval needs lo >= t, at-most needs hi <= t).
std::optional<Violation> check_requirement(const BlockchainProfile& profile,
                                           const StrictRequirement& requirement,
                                           const CriterionDef& criterion);

FilterOutcome filter_alternatives(const KnowledgeBase& kb,
                                  std::span<const StrictRequirement> strict);

DecisionMatrix build_matrix(std::span<const BlockchainProfile> survivors,
                            std::span<const Preference> preferences,
                            const std::optional<AssetProfile>& assets, const KnowledgeBase& kb,
                            ScalarizationStrategy strategy, bool impute_missing_as_worst = false);

struct TopsisDetail {
  std::vector<double> closeness;
  std::vector<double> weighted;  // v_ij, row-major like the input
};

/// Classical TOPSIS with vector normalization. Returns closeness in input
/// row order. An all-zero column normalizes to 0; an alternative at zero
/// distance from both poles scores 1.
std::vector<double> topsis(const DecisionMatrix& matrix);
TopsisDetail topsis_detail(const DecisionMatrix& matrix);

struct RankedAlternative {
  std::string alternative_id;
  double fitting_score = 0.0;
  std::vector<std::pair<std::string, double>> weighted_normalized;
};

struct RankingProvenance {
  std::int64_t kb_version = 0;
  ScalarizationStrategy strategy = ScalarizationStrategy::midpoint;
  std::vector<std::pair<std::string, double>> weights;
};

struct RankingResult {
  std::vector<Elimination> eliminations;
  std::vector<RankedAlternative> ranked;  // score descending, then id ascending
  RankingProvenance provenance;
  std::vector<std::string> warnings;
};

/// filter -> build matrix -> TOPSIS. Throws ValidationError carrying the
/// findings if the requirements do not validate against the KB.
RankingResult evaluate(const KnowledgeBase& kb, const RequirementSet& reqs);

struct SensitivityPoint {
  double weight = 0.0;
  RankingResult result;  // ranked truncated to the top three
};

/// Re-evaluates with one preference's weight swept over `grid`.
std::vector<SensitivityPoint> sensitivity(const KnowledgeBase& kb, const RequirementSet& reqs,
                                          const std::string& criterion_id,
                                          std::span<const double> grid);

json to_json(const Elimination& e);
json to_json(const RankingResult& r);
json to_json(const std::vector<SensitivityPoint>& points);

}  // namespace blade
