#include "blade/mcdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace blade {

namespace {

// Boolean cells are already oriented towards the favoured pole by
// scalarize, so their matrix column is always a benefit column.
Direction column_direction(const CriterionDef& c) {
  return c.kind == CriterionKind::boolean ? Direction::benefit : c.direction;
}

std::string number_text(double x) { return json(x).dump(); }

LabelSet as_label_set(const Literal& lit) {
  if (const auto* s = std::get_if<std::string>(&lit)) return {*s};
  if (const auto* set = std::get_if<LabelSet>(&lit)) return *set;
  return {};
}

Violation violation(const StrictRequirement& r, const AttributeValue& observed, std::string why) {
  return {r, observed, r.criterion_id + " " + why + " (required " + std::string(to_string(r.op)) +
                           " " + literal_text(r.threshold) + ")"};
}

std::vector<std::pair<std::string, double>> normalized_weights(
    std::span<const Preference> preferences, const std::optional<AssetProfile>& assets) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& p : preferences) {
    if (p.weight > 0.0) out.emplace_back(p.criterion_id, p.weight);
  }
  if (assets && assets->affinity_likert > 0.0) {
    out.emplace_back(std::string(kAssetAffinityId), assets->affinity_likert);
  }
  double total = 0.0;
  for (const auto& [id, w] : out) total += w;
  if (total > 0.0) {
    for (auto& [id, w] : out) w /= total;
  }
  return out;
}

json violation_to_json(const Violation& v) {
  return {{"requirement", v.requirement.text()},
          {"criterion", v.requirement.criterion_id},
          {"op", to_string(v.requirement.op)},
          {"threshold", literal_to_json(v.requirement.threshold)},
          {"observed", v.observed ? attribute_to_json(*v.observed) : json(nullptr)},
          {"explanation", v.explanation}};
}

}  // namespace

double scalarize(const AttributeValue& value, const CriterionDef& criterion,
                 ScalarizationStrategy strategy) {
  if (criterion.kind == CriterionKind::categorical) {
    throw ValidationError("categorical criterion '" + criterion.id + "' is not scalarizable");
  }
  if (kind_of(value) != criterion.kind) {
    throw ValidationError("kind mismatch scalarizing '" + criterion.id + "'");
  }
  const bool benefit = criterion.direction == Direction::benefit;
  switch (criterion.kind) {
    case CriterionKind::boolean: {
      const bool favoured = benefit;
      return std::get<bool>(value) == favoured ? 1.0 : 0.0;
    }
    case CriterionKind::numeric_interval: {
      const auto& iv = std::get<Interval>(value);
      switch (strategy) {
        case ScalarizationStrategy::midpoint: return iv.midpoint();
        case ScalarizationStrategy::pessimistic: return benefit ? iv.lo : iv.hi;
        case ScalarizationStrategy::optimistic: return benefit ? iv.hi : iv.lo;
      }
      break;
    }
    case CriterionKind::ordinal: {
      const auto idx = criterion.level_index(std::get<OrdinalLevel>(value).label);
      if (!idx) throw ValidationError("unknown ordinal level for '" + criterion.id + "'");
      const auto levels = criterion.ordinal_levels.size();
      if (levels == 1) return 1.0;
      return static_cast<double>(*idx) / static_cast<double>(levels - 1);
    }
    case CriterionKind::categorical: break;
  }
  throw Error(ErrorClass::internal, "unreachable scalarization case");
}

void DecisionMatrix::check() const {
  const auto m = rows();
  const auto n = cols();
  if (m == 0 || n == 0) throw ValidationError("decision matrix must have at least one row and column");
  if (values.size() != m * n || directions.size() != n || weights.size() != n) {
    throw ValidationError("decision matrix shape mismatch");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
      throw ValidationError("criterion '" + criterion_ids[j] + "' has a non-positive weight");
    }
    total += weights[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("weights sum to " + number_text(total) + ", expected 1");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("decision matrix holds a non-finite value");
  }
}

std::optional<Violation> check_requirement(const BlockchainProfile& profile,
                                           const StrictRequirement& r,
                                           const CriterionDef& c) {
  const auto* value = profile.attribute(r.criterion_id);
  if (!value) return Violation{r, std::nullopt, r.criterion_id + " attribute absent"};

  switch (c.kind) {
    case CriterionKind::boolean: {
      const bool observed = std::get<bool>(*value);
      if (observed != std::get<bool>(r.threshold)) {
        return violation(r, *value, std::string("is ") + (observed ? "true" : "false"));
      }
      return std::nullopt;
    }
    case CriterionKind::numeric_interval: {
      const auto& iv = std::get<Interval>(*value);
      const double t = std::get<double>(r.threshold);
      if (r.op == StrictOperator::at_least && iv.lo < t) {
        return violation(r, *value, "guaranteed lower bound " + number_text(iv.lo) + " < " +
                                        number_text(t));
      }
      if (r.op == StrictOperator::at_most && iv.hi > t) {
        return violation(r, *value, "guaranteed upper bound " + number_text(iv.hi) + " > " +
                                        number_text(t));
      }
      return std::nullopt;
    }
    case CriterionKind::ordinal: {
      const auto& label = std::get<OrdinalLevel>(*value).label;
      const auto have = c.level_index(label).value();
      const auto want = c.level_index(std::get<std::string>(r.threshold)).value();
      const bool ok = r.op == StrictOperator::equals     ? have == want
                      : r.op == StrictOperator::at_least ? have >= want
                                                         : have <= want;
      if (!ok) return violation(r, *value, "is '" + label + "'");
      return std::nullopt;
    }
    case CriterionKind::categorical: {
      const auto& have = std::get<LabelSet>(*value);
      const auto want = as_label_set(r.threshold);
      if (r.op == StrictOperator::equals) {
        if (have != want) return violation(r, *value, "is " + describe(*value));
        return std::nullopt;
      }
      LabelSet missing;
      std::set_difference(want.begin(), want.end(), have.begin(), have.end(),
                          std::inserter(missing, missing.end()));
      if (!missing.empty()) {
        return violation(r, *value, "lacks " + describe(AttributeValue{missing}));
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

FilterOutcome filter_alternatives(const KnowledgeBase& kb,
                                  std::span<const StrictRequirement> strict) {
  std::vector<const CriterionDef*> defs;
  for (const auto& r : strict) {
    const auto* c = kb.find_criterion(r.criterion_id);
    if (!c) throw ValidationError("strict requirement references unknown criterion '" + r.criterion_id + "'");
    defs.push_back(c);
  }
  FilterOutcome out;
  for (const auto& profile : kb.profiles) {
    Elimination e{profile.id, {}};
    for (std::size_t k = 0; k < strict.size(); ++k) {
      if (auto v = check_requirement(profile, strict[k], *defs[k])) e.violated.push_back(std::move(*v));
    }
    if (e.violated.empty()) {
      out.survivors.push_back(profile);
    } else {
      out.eliminations.push_back(std::move(e));
    }
  }
  return out;
}

DecisionMatrix build_matrix(std::span<const BlockchainProfile> survivors,
                            std::span<const Preference> preferences,
                            const std::optional<AssetProfile>& assets, const KnowledgeBase& kb,
                            ScalarizationStrategy strategy, bool impute_missing_as_worst) {
  if (survivors.empty()) throw ValidationError("no alternatives to rank");
  DecisionMatrix m;
  for (const auto& s : survivors) m.alternative_ids.push_back(s.id);

  std::vector<const Preference*> used;
  for (const auto& p : preferences) {
    if (p.weight > 0.0) used.push_back(&p);
  }
  if (used.empty()) {
    throw ValidationError("no effective preferences: at least one weight must be positive");
  }
  const bool asset_column = assets && assets->affinity_likert > 0.0;
  for (const auto& [id, w] : normalized_weights(preferences, assets)) {
    m.criterion_ids.push_back(id);
    m.weights.push_back(w);
  }
  const auto n = m.criterion_ids.size();
  m.values.assign(survivors.size() * n, 0.0);
  m.directions.resize(n);

  for (std::size_t j = 0; j < used.size(); ++j) {
    const auto* c = kb.find_criterion(used[j]->criterion_id);
    if (!c) throw ValidationError("preference references unknown criterion '" + used[j]->criterion_id + "'");
    m.directions[j] = column_direction(*c);
    std::vector<std::size_t> missing;
    std::optional<double> worst;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      const auto* v = survivors[i].attribute(c->id);
      if (!v) {
        if (!impute_missing_as_worst) {
          throw ValidationError("profile '" + survivors[i].id + "' lacks preferred criterion '" +
                                c->id + "'");
        }
        missing.push_back(i);
        continue;
      }
      const double x = scalarize(*v, *c, strategy);
      m.at(i, j) = x;
      if (!worst) {
        worst = x;
      } else {
        worst = m.directions[j] == Direction::benefit ? std::min(*worst, x) : std::max(*worst, x);
      }
    }
    if (!missing.empty() && !worst) {
      throw ValidationError("no surviving profile carries preferred criterion '" + c->id + "'");
    }
    for (auto i : missing) {
      m.at(i, j) = *worst;
      m.warnings.push_back("imputed worst observed value " + number_text(*worst) + " for '" +
                           c->id + "' on profile '" + survivors[i].id + "'");
    }
  }
  if (asset_column) {
    const auto j = n - 1;
    m.directions[j] = Direction::benefit;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      m.at(i, j) = asset_affinity(*assets, survivors[i]);
    }
  }
  m.check();
  return m;
}

TopsisDetail topsis_detail(const DecisionMatrix& matrix) {
  matrix.check();
  const auto m = matrix.rows();
  const auto n = matrix.cols();
  TopsisDetail out;
  out.weighted.assign(m * n, 0.0);
  std::vector<double> ideal(n), anti(n);
  for (std::size_t j = 0; j < n; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) sq += matrix.at(i, j) * matrix.at(i, j);
    const double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < m; ++i) {
      const double r = norm > 0.0 ? matrix.at(i, j) / norm : 0.0;
      out.weighted[i * n + j] = matrix.weights[j] * r;
    }
    double hi = out.weighted[j];
    double lo = out.weighted[j];
    for (std::size_t i = 1; i < m; ++i) {
      hi = std::max(hi, out.weighted[i * n + j]);
      lo = std::min(lo, out.weighted[i * n + j]);
    }
    const bool benefit = matrix.directions[j] == Direction::benefit;
    ideal[j] = benefit ? hi : lo;
    anti[j] = benefit ? lo : hi;
  }
  out.closeness.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double to_ideal = 0.0;
    double to_anti = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = out.weighted[i * n + j];
      to_ideal += (v - ideal[j]) * (v - ideal[j]);
      to_anti += (v - anti[j]) * (v - anti[j]);
    }
    const double s_plus = std::sqrt(to_ideal);
    const double s_minus = std::sqrt(to_anti);
    const double denom = s_plus + s_minus;
    out.closeness[i] = denom == 0.0 ? 1.0 : s_minus / denom;
  }
  return out;
}

std::vector<double> topsis(const DecisionMatrix& matrix) { return topsis_detail(matrix).closeness; }

RankingResult evaluate(const KnowledgeBase& kb, const RequirementSet& reqs) {
  auto findings = validate_against(reqs, kb);
  if (has_errors(findings)) {
    auto message = "requirements do not validate against the knowledge base: " +
                   findings.front().message;
    throw ValidationError(std::move(message), std::move(findings));
  }
  RankingResult result;
  result.provenance.kb_version = kb.kb_version;
  result.provenance.strategy = reqs.strategy;
  result.provenance.weights = normalized_weights(reqs.preferences, reqs.assets);

  auto filtered = filter_alternatives(kb, reqs.strict);
  result.eliminations = std::move(filtered.eliminations);
  if (filtered.survivors.empty()) return result;

  auto matrix = build_matrix(filtered.survivors, reqs.preferences, reqs.assets, kb, reqs.strategy,
                             reqs.impute_missing_as_worst);
  const auto detail = topsis_detail(matrix);
  const auto n = matrix.cols();
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    RankedAlternative r{matrix.alternative_ids[i], detail.closeness[i], {}};
    for (std::size_t j = 0; j < n; ++j) {
      r.weighted_normalized.emplace_back(matrix.criterion_ids[j], detail.weighted[i * n + j]);
    }
    result.ranked.push_back(std::move(r));
  }
  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const RankedAlternative& a, const RankedAlternative& b) {
              if (a.fitting_score != b.fitting_score) return a.fitting_score > b.fitting_score;
              return a.alternative_id < b.alternative_id;
            });
  result.warnings = std::move(matrix.warnings);
  return result;
}

std::vector<SensitivityPoint> sensitivity(const KnowledgeBase& kb, const RequirementSet& reqs,
                                          const std::string& criterion_id,
                                          std::span<const double> grid) {
  if (!reqs.find_preference(criterion_id)) {
    throw ValidationError("criterion '" + criterion_id + "' is not among the preferences");
  }
  if (grid.empty()) throw ValidationError("sensitivity grid is empty");
  std::vector<SensitivityPoint> out;
  out.reserve(grid.size());
  for (double w : grid) {
    RequirementSet variant = reqs;
    for (auto& p : variant.preferences) {
      if (p.criterion_id == criterion_id) p.weight = w;
    }
    auto result = evaluate(kb, variant);
    if (result.ranked.size() > 3) result.ranked.resize(3);
    out.push_back({w, std::move(result)});
  }
  return out;
}

json to_json(const Elimination& e) {
  json violations = json::array();
  for (const auto& v : e.violated) violations.push_back(violation_to_json(v));
  return {{"id", e.alternative_id}, {"violations", std::move(violations)}};
}

json to_json(const RankingResult& r) {
  json ranked = json::array();
  int rank = 0;
  for (const auto& a : r.ranked) {
    json contributions = json::array();
    for (const auto& [cid, v] : a.weighted_normalized) {
      contributions.push_back({{"criterion", cid}, {"value", v}});
    }
    ranked.push_back({{"rank", ++rank},
                      {"id", a.alternative_id},
                      {"score", a.fitting_score},
                      {"weighted_normalized", std::move(contributions)}});
  }
  json eliminations = json::array();
  for (const auto& e : r.eliminations) eliminations.push_back(to_json(e));
  json weights = json::array();
  for (const auto& [cid, w] : r.provenance.weights) {
    weights.push_back({{"criterion", cid}, {"weight", w}});
  }
  return {{"ranked", std::move(ranked)},
          {"eliminations", std::move(eliminations)},
          {"provenance",
           {{"kb_version", r.provenance.kb_version},
            {"strategy", to_string(r.provenance.strategy)},
            {"weights", std::move(weights)}}},
          {"warnings", r.warnings}};
}

json to_json(const std::vector<SensitivityPoint>& points) {
  json out = json::array();
  for (const auto& p : points) out.push_back({{"weight", p.weight}, {"result", to_json(p.result)}});
  return out;
}

}  // namespace blade
