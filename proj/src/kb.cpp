#include "blade/kb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "blade/error.hpp"

namespace blade {

namespace {

constexpr std::array<std::string_view, kIsoCategoryCount> kCategoryLabels = {
    "functional-suitability", "performance-efficiency", "compatibility", "usability",
    "reliability",            "security",               "maintainability", "portability",
};

constexpr std::array<std::string_view, 4> kKindLabels = {"boolean", "numeric-interval", "ordinal",
                                                         "categorical"};

const json& require_field(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(std::string(where) + ": missing field '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, std::string_view where) {
  const auto& v = require_field(obj, key, where);
  if (!v.is_string()) {
    throw FormatError(std::string(where) + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::string optional_string(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw FormatError(std::string(where) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_array(const json& v, std::string_view where) {
  if (!v.is_array()) throw FormatError(std::string(where) + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw FormatError(std::string(where) + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

CriterionDef parse_criterion(const json& j) {
  if (!j.is_object()) throw FormatError("criterion entries must be objects");
  CriterionDef c;
  c.id = require_string(j, "id", "criterion");
  const std::string where = "criterion '" + c.id + "'";
  c.name = optional_string(j, "name", where);
  const auto category = require_string(j, "category", where);
  auto cat = parse_category(category);
  if (!cat) throw ValidationError(where + ": unknown ISO 25010 category '" + category + "'");
  c.category = *cat;
  const auto direction = require_string(j, "direction", where);
  auto dir = parse_direction(direction);
  if (!dir) throw ValidationError(where + ": unknown direction '" + direction + "'");
  c.direction = *dir;
  const auto kind = require_string(j, "kind", where);
  auto k = parse_kind(kind);
  if (!k) throw ValidationError(where + ": unknown kind '" + kind + "'");
  c.kind = *k;
  c.unit = optional_string(j, "unit", where);
  if (auto it = j.find("levels"); it != j.end()) c.ordinal_levels = string_array(*it, where);
  c.description = optional_string(j, "description", where);
  return c;
}

AttributeValue parse_attribute(const json& v, const CriterionDef& c, std::string_view where) {
  const std::string ctx = std::string(where) + " attribute '" + c.id + "'";
  switch (c.kind) {
    case CriterionKind::boolean:
      if (!v.is_boolean()) throw ValidationError(ctx + ": kind mismatch, expected boolean");
      return v.get<bool>();
    case CriterionKind::numeric_interval: {
      if (v.is_number()) {
        const double x = v.get<double>();
        return Interval{x, x};
      }
      if (!v.is_object() || !v.contains("lo") || !v.contains("hi") || !v["lo"].is_number() ||
          !v["hi"].is_number()) {
        throw ValidationError(ctx + ": kind mismatch, expected {\"lo\": n, \"hi\": n}");
      }
      return Interval{v["lo"].get<double>(), v["hi"].get<double>()};
    }
    case CriterionKind::ordinal:
      if (!v.is_string()) throw ValidationError(ctx + ": kind mismatch, expected ordinal level");
      return OrdinalLevel{v.get<std::string>()};
    case CriterionKind::categorical: {
      if (!v.is_array()) throw ValidationError(ctx + ": kind mismatch, expected label array");
      LabelSet labels;
      for (const auto& e : v) {
        if (!e.is_string()) throw ValidationError(ctx + ": kind mismatch, expected label array");
        labels.insert(e.get<std::string>());
      }
      return labels;
    }
  }
  throw Error(ErrorClass::internal, "unreachable criterion kind");
}

BlockchainProfile parse_profile(const json& j, const std::vector<CriterionDef>& criteria) {
  if (!j.is_object()) throw FormatError("profile entries must be objects");
  BlockchainProfile p;
  p.id = require_string(j, "id", "profile");
  const std::string where = "profile '" + p.id + "'";
  p.name = optional_string(j, "name", where);
  if (auto it = j.find("attributes"); it != j.end()) {
    if (!it->is_object()) throw FormatError(where + ": 'attributes' must be an object");
    for (const auto& [key, value] : it->items()) {
      auto c = std::find_if(criteria.begin(), criteria.end(),
                            [&](const CriterionDef& d) { return d.id == key; });
      if (c == criteria.end()) {
        throw ValidationError(where + ": attribute references unknown criterion '" + key + "'");
      }
      p.attributes.emplace(key, parse_attribute(value, *c, where));
    }
  }
  if (auto it = j.find("tech_tags"); it != j.end()) {
    for (auto& t : string_array(*it, where)) p.tech_tags.insert(std::move(t));
  }
  if (auto it = j.find("sources"); it != j.end()) {
    if (!it->is_array()) throw FormatError(where + ": 'sources' must be an array");
    for (const auto& s : *it) {
      if (!s.is_object()) throw FormatError(where + ": source entries must be objects");
      p.sources.push_back(
          {require_string(s, "citation", where), optional_string(s, "retrieved", where)});
    }
  }
  return p;
}

void validate_criterion(const CriterionDef& c) {
  const std::string where = "criterion '" + c.id + "'";
  if (c.id.empty()) throw ValidationError("criterion with empty id");
  if (c.kind == CriterionKind::numeric_interval && c.unit.empty()) {
    throw ValidationError(where + ": numeric-interval criterion requires a unit");
  }
  if (c.kind == CriterionKind::ordinal) {
    if (c.ordinal_levels.empty()) throw ValidationError(where + ": ordinal levels are empty");
    std::unordered_set<std::string> seen;
    for (const auto& l : c.ordinal_levels) {
      if (!seen.insert(l).second) {
        throw ValidationError(where + ": duplicate ordinal level '" + l + "'");
      }
    }
  } else if (!c.ordinal_levels.empty()) {
    throw ValidationError(where + ": levels given for a non-ordinal criterion");
  }
}

void validate_value(const AttributeValue& v, const CriterionDef& c, const std::string& where) {
  if (kind_of(v) != c.kind) {
    throw ValidationError(where + ": kind mismatch for criterion '" + c.id + "' (expected " +
                          std::string(to_string(c.kind)) + ", got " +
                          std::string(to_string(kind_of(v))) + ")");
  }
  if (const auto* iv = std::get_if<Interval>(&v)) {
    if (!std::isfinite(iv->lo) || !std::isfinite(iv->hi)) {
      throw ValidationError(where + ": non-finite interval bound for '" + c.id + "'");
    }
    if (iv->lo > iv->hi) {
      throw ValidationError(where + ": interval lo > hi for '" + c.id + "'");
    }
  }
  if (const auto* ov = std::get_if<OrdinalLevel>(&v)) {
    if (!c.level_index(ov->label)) {
      throw ValidationError(where + ": unknown ordinal level '" + ov->label + "' for '" + c.id +
                            "'");
    }
  }
}

json criterion_to_json(const CriterionDef& c) {
  json j = {{"id", c.id},
            {"name", c.name},
            {"category", to_string(c.category)},
            {"direction", to_string(c.direction)},
            {"kind", to_string(c.kind)}};
  if (!c.unit.empty()) j["unit"] = c.unit;
  if (!c.ordinal_levels.empty()) j["levels"] = c.ordinal_levels;
  j["description"] = c.description;
  return j;
}

json profile_to_json(const BlockchainProfile& p) {
  json attrs = json::object();
  for (const auto& [k, v] : p.attributes) attrs[k] = attribute_to_json(v);
  json sources = json::array();
  for (const auto& s : p.sources) {
    json sj = {{"citation", s.citation}};
    if (!s.retrieved.empty()) sj["retrieved"] = s.retrieved;
    sources.push_back(std::move(sj));
  }
  return {{"id", p.id},
          {"name", p.name},
          {"attributes", std::move(attrs)},
          {"tech_tags", p.tech_tags},
          {"sources", std::move(sources)}};
}

}  // namespace

std::string_view to_string(Iso25010Category c) { return kCategoryLabels[static_cast<size_t>(c)]; }

std::string_view to_string(Direction d) { return d == Direction::benefit ? "benefit" : "cost"; }

std::string_view to_string(CriterionKind k) { return kKindLabels[static_cast<size_t>(k)]; }

std::optional<Iso25010Category> parse_category(std::string_view label) {
  for (size_t i = 0; i < kCategoryLabels.size(); ++i) {
    if (kCategoryLabels[i] == label) return static_cast<Iso25010Category>(i);
  }
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view label) {
  if (label == "benefit") return Direction::benefit;
  if (label == "cost") return Direction::cost;
  return std::nullopt;
}

std::optional<CriterionKind> parse_kind(std::string_view label) {
  for (size_t i = 0; i < kKindLabels.size(); ++i) {
    if (kKindLabels[i] == label) return static_cast<CriterionKind>(i);
  }
  return std::nullopt;
}

std::optional<std::size_t> CriterionDef::level_index(std::string_view label) const {
  auto it = std::find(ordinal_levels.begin(), ordinal_levels.end(), label);
  if (it == ordinal_levels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ordinal_levels.begin());
}

CriterionKind kind_of(const AttributeValue& v) { return static_cast<CriterionKind>(v.index()); }

std::string describe(const AttributeValue& v) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Interval& i) const {
      std::ostringstream os;
      if (i.lo == i.hi) {
        os << i.lo;
      } else {
        os << '[' << i.lo << ", " << i.hi << ']';
      }
      return os.str();
    }
    std::string operator()(const OrdinalLevel& o) const { return o.label; }
    std::string operator()(const LabelSet& s) const {
      std::string out = "{";
      for (const auto& l : s) {
        if (out.size() > 1) out += ", ";
        out += l;
      }
      return out + "}";
    }
  };
  return std::visit(Visitor{}, v);
}

const AttributeValue* BlockchainProfile::attribute(std::string_view criterion_id) const {
  auto it = attributes.find(std::string(criterion_id));
  return it == attributes.end() ? nullptr : &it->second;
}

const CriterionDef* KnowledgeBase::find_criterion(std::string_view id) const {
  for (const auto& c : criteria) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const BlockchainProfile* KnowledgeBase::find_profile(std::string_view id) const {
  for (const auto& p : profiles) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

void validate(const KnowledgeBase& kb) {
  if (kb.schema_version != kSchemaVersion) {
    throw ValidationError("unsupported schema version " + std::to_string(kb.schema_version));
  }
  std::unordered_set<std::string> ids;
  for (const auto& c : kb.criteria) {
    validate_criterion(c);
    if (!ids.insert(c.id).second) throw ValidationError("duplicate criterion id '" + c.id + "'");
  }
  ids.clear();
  for (const auto& p : kb.profiles) {
    if (p.id.empty()) throw ValidationError("profile with empty id");
    if (!ids.insert(p.id).second) throw ValidationError("duplicate profile id '" + p.id + "'");
    const std::string where = "profile '" + p.id + "'";
    for (const auto& [cid, value] : p.attributes) {
      const auto* c = kb.find_criterion(cid);
      if (!c) throw ValidationError(where + ": attribute references unknown criterion '" + cid + "'");
      validate_value(value, *c, where);
    }
  }
}

KnowledgeBase load_knowledge_base(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed knowledge base document: ") + e.what());
  }
  if (!root.is_object()) throw FormatError("knowledge base document must be a JSON object");

  KnowledgeBase kb;
  const auto& sv = require_field(root, "schema_version", "knowledge base");
  const auto& kv = require_field(root, "kb_version", "knowledge base");
  if (!sv.is_number_integer() || !kv.is_number_integer()) {
    throw FormatError("knowledge base: schema_version and kb_version must be integers");
  }
  kb.schema_version = sv.get<int>();
  kb.kb_version = kv.get<std::int64_t>();
  if (kb.schema_version != kSchemaVersion) {
    throw ValidationError("unsupported schema version " + std::to_string(kb.schema_version));
  }

  const auto& criteria = require_field(root, "criteria", "knowledge base");
  const auto& profiles = require_field(root, "profiles", "knowledge base");
  if (!criteria.is_array() || !profiles.is_array()) {
    throw FormatError("knowledge base: criteria and profiles must be arrays");
  }
  for (const auto& c : criteria) kb.criteria.push_back(parse_criterion(c));
  for (const auto& p : profiles) kb.profiles.push_back(parse_profile(p, kb.criteria));
  validate(kb);
  return kb;
}

KnowledgeBase load_knowledge_base_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open knowledge base file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_knowledge_base(ss.str());
}

json attribute_to_json(const AttributeValue& v) {
  struct Visitor {
    json operator()(bool b) const { return b; }
    json operator()(const Interval& i) const { return {{"lo", i.lo}, {"hi", i.hi}}; }
    json operator()(const OrdinalLevel& o) const { return o.label; }
    json operator()(const LabelSet& s) const { return json(s); }
  };
  return std::visit(Visitor{}, v);
}

json to_json(const KnowledgeBase& kb) {
  json criteria = json::array();
  for (const auto& c : kb.criteria) criteria.push_back(criterion_to_json(c));
  json profiles = json::array();
  for (const auto& p : kb.profiles) profiles.push_back(profile_to_json(p));
  json j;
  j["schema_version"] = kb.schema_version;
  j["kb_version"] = kb.kb_version;
  j["criteria"] = std::move(criteria);
  j["profiles"] = std::move(profiles);
  return j;
}

std::string serialize(const KnowledgeBase& kb) { return to_json(kb).dump(2) + "\n"; }

KnowledgeBase merge_knowledge(const KnowledgeBase& base, const KnowledgeBase& delta) {
  if (base.schema_version != delta.schema_version) {
    throw ValidationError("schema version mismatch: base " + std::to_string(base.schema_version) +
                          ", delta " + std::to_string(delta.schema_version));
  }
  KnowledgeBase out = base;
  for (const auto& c : delta.criteria) {
    auto it = std::find_if(out.criteria.begin(), out.criteria.end(),
                           [&](const CriterionDef& d) { return d.id == c.id; });
    if (it == out.criteria.end()) {
      out.criteria.push_back(c);
      continue;
    }
    if (it->kind != c.kind) {
      throw ValidationError("criterion kind change for '" + c.id + "' (" +
                            std::string(to_string(it->kind)) + " -> " +
                            std::string(to_string(c.kind)) + ")");
    }
    *it = c;
  }
  for (const auto& p : delta.profiles) {
    auto it = std::find_if(out.profiles.begin(), out.profiles.end(),
                           [&](const BlockchainProfile& q) { return q.id == p.id; });
    if (it == out.profiles.end()) {
      out.profiles.push_back(p);
      continue;
    }
    std::vector<Source> sources = it->sources;
    for (const auto& s : p.sources) {
      if (std::find(sources.begin(), sources.end(), s) == sources.end()) sources.push_back(s);
    }
    *it = p;
    it->sources = std::move(sources);
  }
  out.kb_version = std::max(base.kb_version, delta.kb_version) + 1;
  validate(out);
  return out;
}

}  // namespace blade
