#include "blade/requirements.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "toml_lite.hpp"

namespace blade {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string number_text(double x) { return json(x).dump(); }

bool likert_ok(double w) { return std::isfinite(w) && w >= 0.0 && w <= 1.0; }

StrictRequirement strict_from_text(const std::string& criterion, std::string_view text) {
  text = trim(text);
  const auto space = text.find_first_of(" \t");
  const auto op_text = text.substr(0, space);
  auto op = parse_operator(op_text);
  if (!op) {
    throw FormatError("strict requirement on '" + criterion + "': unknown operator '" +
                      std::string(op_text) + "'");
  }
  if (space == std::string_view::npos || trim(text.substr(space)).empty()) {
    throw FormatError("strict requirement on '" + criterion + "': missing threshold");
  }
  return {criterion, *op, parse_literal(text.substr(space))};
}

LabelSet tag_set(const toml_lite::Value& v, const std::string& key) {
  const auto* arr = std::get_if<toml_lite::Array>(&v.data);
  if (!arr) throw FormatError("assets." + key + " must be an array of strings");
  LabelSet out;
  for (const auto& item : *arr) {
    const auto* s = std::get_if<std::string>(&item.data);
    if (!s) throw FormatError("assets." + key + " must be an array of strings");
    out.insert(lowercase(trim(*s)));
  }
  return out;
}

double number_of(const toml_lite::Value& v, const std::string& what) {
  const auto* x = std::get_if<double>(&v.data);
  if (!x) throw FormatError(what + " must be a number");
  return *x;
}

RequirementSet parse_text(std::string_view document) {
  RequirementSet reqs;
  for (const auto& table : toml_lite::parse(document)) {
    if (table.name.empty()) {
      if (!table.entries.empty()) {
        throw FormatError("requirements line " + std::to_string(table.entries.front().line) +
                          ": key outside of a section");
      }
      continue;
    }
    if (table.name == "strict") {
      for (const auto& e : table.entries) {
        if (const auto* s = std::get_if<std::string>(&e.value.data)) {
          reqs.strict.push_back(strict_from_text(e.key, *s));
        } else if (const auto* arr = std::get_if<toml_lite::Array>(&e.value.data)) {
          for (const auto& item : *arr) {
            const auto* s2 = std::get_if<std::string>(&item.data);
            if (!s2) throw FormatError("strict." + e.key + " entries must be strings");
            reqs.strict.push_back(strict_from_text(e.key, *s2));
          }
        } else {
          throw FormatError("strict." + e.key + " must be a string like \"at-least 50\"");
        }
      }
    } else if (table.name == "preferences") {
      for (const auto& e : table.entries) {
        reqs.preferences.push_back({e.key, number_of(e.value, "preferences." + e.key)});
      }
    } else if (table.name == "assets") {
      AssetProfile assets;
      for (const auto& e : table.entries) {
        if (e.key == "skills") {
          assets.skill_tags = tag_set(e.value, e.key);
        } else if (e.key == "infra") {
          assets.infra_tags = tag_set(e.value, e.key);
        } else if (e.key == "affinity") {
          assets.affinity_likert = number_of(e.value, "assets.affinity");
        } else {
          throw FormatError("unknown key assets." + e.key);
        }
      }
      reqs.assets = std::move(assets);
    } else if (table.name == "options") {
      for (const auto& e : table.entries) {
        if (e.key == "strategy") {
          const auto* s = std::get_if<std::string>(&e.value.data);
          auto st = s ? parse_strategy(*s) : std::nullopt;
          if (!st) throw FormatError("options.strategy must be midpoint, pessimistic or optimistic");
          reqs.strategy = *st;
        } else if (e.key == "impute_missing_as_worst") {
          const auto* b = std::get_if<bool>(&e.value.data);
          if (!b) throw FormatError("options.impute_missing_as_worst must be a boolean");
          reqs.impute_missing_as_worst = *b;
        } else {
          throw FormatError("unknown key options." + e.key);
        }
      }
    } else {
      throw FormatError("unknown section [" + table.name + "]");
    }
  }
  return reqs;
}

Literal literal_from_json(const json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    LabelSet s;
    for (const auto& e : v) {
      if (!e.is_string()) throw FormatError(where + ": label arrays must hold strings");
      s.insert(e.get<std::string>());
    }
    return s;
  }
  throw FormatError(where + ": unsupported threshold value");
}

std::string json_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw FormatError(where + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

double json_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw FormatError(where + ": field '" + key + "' must be a number");
  }
  return it->get<double>();
}

LabelSet json_tags(const json& obj, const char* key) {
  LabelSet out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw FormatError(std::string("assets.") + key + " must be an array");
  for (const auto& e : *it) {
    if (!e.is_string()) throw FormatError(std::string("assets.") + key + " must hold strings");
    out.insert(lowercase(trim(e.get<std::string>())));
  }
  return out;
}

bool operator_fits(StrictOperator op, CriterionKind kind) {
  switch (op) {
    case StrictOperator::equals:
      return kind == CriterionKind::boolean || kind == CriterionKind::ordinal ||
             kind == CriterionKind::categorical;
    case StrictOperator::at_least:
    case StrictOperator::at_most:
      return kind == CriterionKind::numeric_interval || kind == CriterionKind::ordinal;
    case StrictOperator::includes_all:
      return kind == CriterionKind::categorical;
  }
  return false;
}

std::optional<std::string> literal_problem(const StrictRequirement& r, const CriterionDef& c) {
  switch (c.kind) {
    case CriterionKind::boolean:
      if (!std::holds_alternative<bool>(r.threshold)) return "expects true or false";
      break;
    case CriterionKind::numeric_interval:
      if (const auto* x = std::get_if<double>(&r.threshold); !x || !std::isfinite(*x)) {
        return "expects a finite number";
      }
      break;
    case CriterionKind::ordinal: {
      const auto* s = std::get_if<std::string>(&r.threshold);
      if (!s) return "expects an ordinal level";
      if (!c.level_index(*s)) return "unknown ordinal level '" + *s + "'";
      break;
    }
    case CriterionKind::categorical:
      if (std::holds_alternative<std::string>(r.threshold)) break;
      if (const auto* set = std::get_if<LabelSet>(&r.threshold)) {
        if (set->empty()) return "expects a non-empty label set";
        if (r.op == StrictOperator::equals && set->size() != 1) return "expects a single label";
        break;
      }
      return "expects a label or label set";
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(StrictOperator op) {
  switch (op) {
    case StrictOperator::equals: return "equals";
    case StrictOperator::at_least: return "at-least";
    case StrictOperator::at_most: return "at-most";
    case StrictOperator::includes_all: return "includes-all";
  }
  return "?";
}

std::optional<StrictOperator> parse_operator(std::string_view label) {
  if (label == "equals") return StrictOperator::equals;
  if (label == "at-least") return StrictOperator::at_least;
  if (label == "at-most") return StrictOperator::at_most;
  if (label == "includes-all") return StrictOperator::includes_all;
  return std::nullopt;
}

std::string_view to_string(ScalarizationStrategy s) {
  switch (s) {
    case ScalarizationStrategy::midpoint: return "midpoint";
    case ScalarizationStrategy::pessimistic: return "pessimistic";
    case ScalarizationStrategy::optimistic: return "optimistic";
  }
  return "?";
}

std::optional<ScalarizationStrategy> parse_strategy(std::string_view label) {
  if (label == "midpoint") return ScalarizationStrategy::midpoint;
  if (label == "pessimistic") return ScalarizationStrategy::pessimistic;
  if (label == "optimistic") return ScalarizationStrategy::optimistic;
  return std::nullopt;
}

std::string literal_text(const Literal& lit) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double x) const { return number_text(x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const LabelSet& s) const {
      std::string out = "[";
      for (const auto& l : s) {
        if (out.size() > 1) out += ", ";
        out += l;
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, lit);
}

Literal parse_literal(std::string_view text) {
  text = trim(text);
  if (text == "true") return true;
  if (text == "false") return false;
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw FormatError("unterminated label set '" + std::string(text) + "'");
    LabelSet labels;
    auto body = text.substr(1, text.size() - 2);
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      if (!item.empty()) labels.insert(std::string(item));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return labels;
  }
  double x = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec == std::errc() && end == text.data() + text.size() && !text.empty()) return x;
  return std::string(text);
}

json literal_to_json(const Literal& lit) {
  return std::visit([](const auto& v) { return json(v); }, lit);
}

std::string StrictRequirement::text() const {
  return criterion_id + " " + std::string(to_string(op)) + " " + literal_text(threshold);
}

const Preference* RequirementSet::find_preference(std::string_view criterion_id) const {
  for (const auto& p : preferences) {
    if (p.criterion_id == criterion_id) return &p;
  }
  return nullptr;
}

void check_local_invariants(const RequirementSet& reqs) {
  std::set<std::string> seen;
  for (const auto& p : reqs.preferences) {
    if (!likert_ok(p.weight)) {
      throw ValidationError("likert out of range for '" + p.criterion_id + "': " +
                            number_text(p.weight));
    }
    if (!seen.insert(p.criterion_id).second) {
      throw ValidationError("duplicate preference for '" + p.criterion_id + "'");
    }
  }
  if (reqs.assets && !likert_ok(reqs.assets->affinity_likert)) {
    throw ValidationError("likert out of range for assets.affinity: " +
                          number_text(reqs.assets->affinity_likert));
  }
}

RequirementSet parse_requirements(std::string_view document) {
  const auto body = trim(document);
  RequirementSet reqs;
  if (!body.empty() && body.front() == '{') {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("malformed requirements document: ") + e.what());
    }
    reqs = requirements_from_json(j);
  } else {
    reqs = parse_text(document);
    check_local_invariants(reqs);
  }
  return reqs;
}

RequirementSet parse_requirements_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open requirements file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_requirements(ss.str());
}

RequirementSet requirements_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("requirements must be a JSON object");
  RequirementSet reqs;
  if (auto it = j.find("strict"); it != j.end()) {
    if (!it->is_array()) throw FormatError("'strict' must be an array");
    for (const auto& s : *it) {
      if (!s.is_object()) throw FormatError("strict entries must be objects");
      StrictRequirement r;
      r.criterion_id = json_string(s, "criterion", "strict requirement");
      const std::string where = "strict requirement on '" + r.criterion_id + "'";
      const auto op = json_string(s, "op", where);
      auto parsed = parse_operator(op);
      if (!parsed) throw FormatError(where + ": unknown operator '" + op + "'");
      r.op = *parsed;
      auto v = s.find("value");
      if (v == s.end()) throw FormatError(where + ": missing 'value'");
      r.threshold = literal_from_json(*v, where);
      reqs.strict.push_back(std::move(r));
    }
  }
  if (auto it = j.find("preferences"); it != j.end()) {
    if (!it->is_array()) throw FormatError("'preferences' must be an array");
    for (const auto& p : *it) {
      if (!p.is_object()) throw FormatError("preference entries must be objects");
      const auto id = json_string(p, "criterion", "preference");
      reqs.preferences.push_back({id, json_number(p, "weight", "preference '" + id + "'")});
    }
  }
  if (auto it = j.find("assets"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw FormatError("'assets' must be an object");
    AssetProfile a;
    a.skill_tags = json_tags(*it, "skills");
    a.infra_tags = json_tags(*it, "infra");
    a.affinity_likert = it->contains("affinity") ? json_number(*it, "affinity", "assets") : 0.0;
    reqs.assets = std::move(a);
  }
  if (auto it = j.find("options"); it != j.end()) {
    if (!it->is_object()) throw FormatError("'options' must be an object");
    if (auto s = it->find("strategy"); s != it->end()) {
      auto st = s->is_string() ? parse_strategy(s->get<std::string>()) : std::nullopt;
      if (!st) throw FormatError("options.strategy must be midpoint, pessimistic or optimistic");
      reqs.strategy = *st;
    }
    if (auto b = it->find("impute_missing_as_worst"); b != it->end()) {
      if (!b->is_boolean()) throw FormatError("options.impute_missing_as_worst must be a boolean");
      reqs.impute_missing_as_worst = b->get<bool>();
    }
  }
  check_local_invariants(reqs);
  return reqs;
}

json to_json(const RequirementSet& reqs) {
  json strict = json::array();
  for (const auto& s : reqs.strict) {
    strict.push_back({{"criterion", s.criterion_id},
                      {"op", to_string(s.op)},
                      {"value", literal_to_json(s.threshold)}});
  }
  json prefs = json::array();
  for (const auto& p : reqs.preferences) {
    prefs.push_back({{"criterion", p.criterion_id}, {"weight", p.weight}});
  }
  json j;
  j["strict"] = std::move(strict);
  j["preferences"] = std::move(prefs);
  if (reqs.assets) {
    j["assets"] = {{"skills", reqs.assets->skill_tags},
                   {"infra", reqs.assets->infra_tags},
                   {"affinity", reqs.assets->affinity_likert}};
  }
  j["options"] = {{"strategy", to_string(reqs.strategy)},
                  {"impute_missing_as_worst", reqs.impute_missing_as_worst}};
  return j;
}

std::string to_text(const RequirementSet& reqs) {
  using toml_lite::quote;
  std::ostringstream os;
  os << "[strict]\n";
  for (const auto& s : reqs.strict) {
    os << quote(s.criterion_id) << " = "
       << quote(std::string(to_string(s.op)) + " " + literal_text(s.threshold)) << "\n";
  }
  os << "\n[preferences]\n";
  for (const auto& p : reqs.preferences) {
    os << quote(p.criterion_id) << " = " << number_text(p.weight) << "\n";
  }
  if (reqs.assets) {
    auto tags = [](const LabelSet& s) {
      std::string out = "[";
      for (const auto& t : s) {
        if (out.size() > 1) out += ", ";
        out += quote(t);
      }
      return out + "]";
    };
    os << "\n[assets]\n"
       << "skills = " << tags(reqs.assets->skill_tags) << "\n"
       << "infra = " << tags(reqs.assets->infra_tags) << "\n"
       << "affinity = " << number_text(reqs.assets->affinity_likert) << "\n";
  }
  os << "\n[options]\n"
     << "strategy = " << quote(to_string(reqs.strategy)) << "\n"
     << "impute_missing_as_worst = " << (reqs.impute_missing_as_worst ? "true" : "false") << "\n";
  return os.str();
}

std::vector<Finding> validate_against(const RequirementSet& reqs, const KnowledgeBase& kb) {
  std::vector<Finding> findings;
  auto error = [&](std::string msg) { findings.push_back({Severity::error, std::move(msg)}); };

  for (const auto& s : reqs.strict) {
    const auto* c = kb.find_criterion(s.criterion_id);
    if (!c) {
      error("strict requirement references unknown criterion '" + s.criterion_id + "'");
      continue;
    }
    if (!operator_fits(s.op, c->kind)) {
      error("operator '" + std::string(to_string(s.op)) + "' does not apply to " +
            std::string(to_string(c->kind)) + " criterion '" + c->id + "'");
      continue;
    }
    if (auto problem = literal_problem(s, *c)) {
      error("strict requirement '" + s.text() + "': " + *problem);
    }
  }

  std::set<std::string> seen;
  bool any_positive = false;
  for (const auto& p : reqs.preferences) {
    if (!likert_ok(p.weight)) {
      error("likert out of range for '" + p.criterion_id + "'");
      continue;
    }
    if (!seen.insert(p.criterion_id).second) {
      error("duplicate preference for '" + p.criterion_id + "'");
      continue;
    }
    const auto* c = kb.find_criterion(p.criterion_id);
    if (!c) {
      error("preference references unknown criterion '" + p.criterion_id + "'");
      continue;
    }
    if (c->kind == CriterionKind::categorical) {
      error("categorical criterion '" + c->id + "' cannot be weighted, use a strict requirement");
      continue;
    }
    any_positive = any_positive || p.weight > 0.0;
  }
  if (reqs.assets && !likert_ok(reqs.assets->affinity_likert)) {
    error("likert out of range for assets.affinity");
  }
  if (!any_positive) error("no effective preferences: at least one weight must be positive");
  return findings;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::error; });
}

RequirementSet merge_requirements(const RequirementSet& primary, const RequirementSet& embedded,
                                  std::vector<std::string>& warnings) {
  RequirementSet out = primary;
  for (const auto& s : embedded.strict) {
    auto same = std::find_if(primary.strict.begin(), primary.strict.end(),
                             [&](const StrictRequirement& p) {
                               return p.criterion_id == s.criterion_id && p.op == s.op;
                             });
    if (same == primary.strict.end()) {
      out.strict.push_back(s);
    } else if (!(*same == s)) {
      warnings.push_back("requirements file '" + same->text() + "' overrides embedded '" +
                         s.text() + "'");
    }
  }
  for (const auto& p : embedded.preferences) {
    const auto* mine = primary.find_preference(p.criterion_id);
    if (!mine) {
      out.preferences.push_back(p);
    } else if (mine->weight != p.weight) {
      warnings.push_back("requirements file preference " + p.criterion_id + " = " +
                         number_text(mine->weight) + " overrides embedded " + number_text(p.weight));
    }
  }
  return out;
}

double jaccard(const LabelSet& a, const LabelSet& b) {
  std::size_t common = 0;
  for (const auto& x : a) common += b.count(x);
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

double asset_affinity(const AssetProfile& assets, const BlockchainProfile& profile) {
  LabelSet mine = assets.skill_tags;
  mine.insert(assets.infra_tags.begin(), assets.infra_tags.end());
  return jaccard(mine, profile.tech_tags);
}

}  // namespace blade
