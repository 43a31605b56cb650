#include "blade/bpmn.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace blade {

namespace {

namespace pt = boost::property_tree;

constexpr double kProbabilityTolerance = 1e-9;

using Scope = std::map<std::string, std::string>;  // prefix -> namespace uri

struct QName {
  std::string ns;
  std::string local;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(x)) {
    return std::nullopt;
  }
  return x;
}

Scope extend_scope(const Scope& parent, const pt::ptree& element) {
  Scope scope = parent;
  if (auto attrs = element.get_child_optional("<xmlattr>")) {
    for (const auto& [key, value] : *attrs) {
      if (key == "xmlns") {
        scope[""] = value.data();
      } else if (key.rfind("xmlns:", 0) == 0) {
        scope[key.substr(6)] = value.data();
      }
    }
  }
  return scope;
}

QName resolve(const std::string& tag, const Scope& scope) {
  const auto colon = tag.find(':');
  const std::string prefix = colon == std::string::npos ? "" : tag.substr(0, colon);
  const std::string local = colon == std::string::npos ? tag : tag.substr(colon + 1);
  auto it = scope.find(prefix);
  return {it == scope.end() ? std::string() : it->second, local};
}

std::string attribute(const pt::ptree& element, const std::string& name) {
  return element.get<std::string>("<xmlattr>." + name, "");
}

/// Attribute whose prefix maps to `ns` and whose local name is `local`.
std::optional<std::string> ns_attribute(const pt::ptree& element, const Scope& scope,
                                        std::string_view ns, std::string_view local) {
  auto attrs = element.get_child_optional("<xmlattr>");
  if (!attrs) return std::nullopt;
  for (const auto& [key, value] : *attrs) {
    const auto colon = key.find(':');
    if (colon == std::string::npos || key.rfind("xmlns", 0) == 0) continue;
    auto it = scope.find(key.substr(0, colon));
    if (it != scope.end() && it->second == ns && key.substr(colon + 1) == local) {
      return value.data();
    }
  }
  return std::nullopt;
}

void append_lines(std::vector<std::string>& out, std::string_view text) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty()) out.emplace_back(line);
    pos = nl + 1;
  }
}

/// Documentation lines plus blade extension elements of one flow element.
std::vector<std::string> collect_annotations(const pt::ptree& element, const Scope& scope) {
  std::vector<std::string> out;
  for (const auto& [tag, child] : element) {
    if (tag == "<xmlattr>") continue;
    const auto child_scope = extend_scope(scope, child);
    const auto q = resolve(tag, child_scope);
    if (q.ns == kBpmnModelNs && q.local == "documentation") {
      append_lines(out, child.data());
    } else if (q.ns == kBpmnModelNs && q.local == "extensionElements") {
      for (const auto& [ext_tag, ext] : child) {
        if (ext_tag == "<xmlattr>") continue;
        const auto ext_scope = extend_scope(child_scope, ext);
        const auto eq = resolve(ext_tag, ext_scope);
        if (eq.ns != kBladeNs) continue;
        const auto text = trim(ext.data());
        if (!text.empty()) {
          append_lines(out, text);
        } else {
          std::string synthesized = "blade:" + eq.local;
          const auto value = attribute(ext, "value");
          if (!value.empty()) synthesized += " " + value;
          out.push_back(std::move(synthesized));
        }
      }
    }
  }
  return out;
}

std::optional<NodeKind> node_kind(const std::string& local) {
  if (local == "startEvent") return NodeKind::start;
  if (local == "endEvent") return NodeKind::end;
  if (local == "task" || local == "userTask" || local == "serviceTask" || local == "scriptTask") {
    return NodeKind::task;
  }
  if (local == "exclusiveGateway") return NodeKind::exclusive_gateway;
  if (local == "parallelGateway") return NodeKind::parallel_gateway;
  return std::nullopt;
}

struct FoundProcess {
  const pt::ptree* element;
  Scope scope;
};

void find_processes(const pt::ptree& tree, const Scope& scope, std::vector<FoundProcess>& out) {
  for (const auto& [tag, child] : tree) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    const auto child_scope = extend_scope(scope, child);
    const auto q = resolve(tag, child_scope);
    if (q.ns == kBpmnModelNs && q.local == "process") {
      out.push_back({&child, child_scope});
    } else {
      find_processes(child, child_scope, out);
    }
  }
}

/// "blade:prob <p>" on the flow itself or "blade:prob <flow-id> <p>" on the gateway.
std::optional<double> annotated_probability(const std::vector<std::string>& lines,
                                            const std::string* flow_id,
                                            std::vector<std::string>& warnings,
                                            const std::string& owner) {
  std::optional<double> found;
  for (const auto& line : lines) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0] != "blade:prob") continue;
    std::optional<double> p;
    if (!flow_id && tokens.size() == 2) {
      p = parse_number(tokens[1]);
    } else if (flow_id && tokens.size() == 3) {
      if (tokens[1] != *flow_id) continue;
      p = parse_number(tokens[2]);
    } else if (flow_id && tokens.size() == 2) {
      continue;
    }
    if (!p || *p < 0.0 || *p > 1.0) {
      warnings.push_back("ignored malformed probability '" + line + "' on " + owner);
      continue;
    }
    found = p;
  }
  return found;
}

double edge_probability(const ProcessModel& model, const ProcessEdge& edge,
                        const std::vector<const ProcessEdge*>& siblings) {
  const auto* src = model.find_node(edge.from);
  if (!src || src->kind != NodeKind::exclusive_gateway) return 1.0;
  if (edge.probability) return *edge.probability;
  double assigned = 0.0;
  std::size_t unassigned = 0;
  for (const auto* s : siblings) {
    if (s->probability) {
      assigned += *s->probability;
    } else {
      ++unassigned;
    }
  }
  return (1.0 - assigned) / static_cast<double>(unassigned);
}

}  // namespace

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::start: return "start";
    case NodeKind::end: return "end";
    case NodeKind::task: return "task";
    case NodeKind::exclusive_gateway: return "exclusive-gateway";
    case NodeKind::parallel_gateway: return "parallel-gateway";
  }
  return "?";
}

const ProcessNode* ProcessModel::find_node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

void ProcessModel::check() const {
  std::size_t starts = 0;
  std::size_t ends = 0;
  std::set<std::string> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(n.id).second) throw ValidationError("duplicate node id '" + n.id + "'");
    starts += n.kind == NodeKind::start;
    ends += n.kind == NodeKind::end;
  }
  if (starts == 0) throw ValidationError("process '" + process_id + "' has no start event");
  if (starts > 1) throw ValidationError("process '" + process_id + "' has multiple start events");
  if (ends == 0) throw ValidationError("process '" + process_id + "' has no end event");
  for (const auto& e : edges) {
    if (!ids.count(e.from) || !ids.count(e.to)) {
      throw ValidationError("sequence flow '" + e.id + "' references an unknown node");
    }
    if (e.probability && (*e.probability < 0.0 || *e.probability > 1.0)) {
      throw ValidationError("sequence flow '" + e.id + "' has a probability outside [0,1]");
    }
  }
  for (const auto& n : nodes) {
    if (n.kind != NodeKind::exclusive_gateway) continue;
    double assigned = 0.0;
    std::size_t total = 0;
    std::size_t annotated = 0;
    for (const auto& e : edges) {
      if (e.from != n.id) continue;
      ++total;
      if (e.probability) {
        ++annotated;
        assigned += *e.probability;
      }
    }
    if (annotated == 0) continue;
    const bool complete = annotated == total;
    if ((complete && std::abs(assigned - 1.0) > kProbabilityTolerance) ||
        (!complete && assigned > 1.0 + kProbabilityTolerance)) {
      throw ValidationError("branch probabilities of gateway '" + n.id + "' sum to " +
                            json(assigned).dump() + ", expected 1");
    }
  }
}

ProcessModel parse_bpmn(std::string_view xml) {
  if (trim(xml).empty()) throw FormatError("no process element in empty document");
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw FormatError(std::string("malformed BPMN XML: ") + e.what());
  }

  std::vector<FoundProcess> processes;
  find_processes(tree, {}, processes);
  if (processes.empty()) throw FormatError("no process element");

  ProcessModel model;
  const auto& [proc, proc_scope] = processes.front();
  model.process_id = attribute(*proc, "id");
  for (std::size_t i = 1; i < processes.size(); ++i) {
    model.warnings.push_back("skipped additional process '" + attribute(*processes[i].element, "id") + "'");
  }

  struct PendingFlow {
    ProcessEdge edge;
    std::vector<std::string> annotations;
  };
  std::vector<PendingFlow> flows;
  std::set<std::string> skipped;

  for (const auto& [tag, child] : *proc) {
    if (tag == "<xmlattr>") continue;
    const auto scope = extend_scope(proc_scope, child);
    const auto q = resolve(tag, scope);
    const auto id = attribute(child, "id");
    if (q.ns == kBpmnModelNs && (q.local == "documentation" || q.local == "extensionElements")) {
      continue;
    }
    if (q.ns == kBpmnModelNs && q.local == "sequenceFlow") {
      PendingFlow f;
      f.edge.id = id;
      f.edge.from = attribute(child, "sourceRef");
      f.edge.to = attribute(child, "targetRef");
      f.annotations = collect_annotations(child, scope);
      if (auto p = ns_attribute(child, scope, kBladeNs, "prob")) {
        auto x = parse_number(*p);
        if (x && *x >= 0.0 && *x <= 1.0) {
          f.edge.probability = x;
        } else {
          model.warnings.push_back("ignored malformed probability '" + *p + "' on flow '" + id + "'");
        }
      }
      if (!f.edge.probability) {
        f.edge.probability = annotated_probability(f.annotations, nullptr, model.warnings,
                                                   "flow '" + id + "'");
      }
      flows.push_back(std::move(f));
      continue;
    }
    std::optional<NodeKind> kind;
    if (q.ns == kBpmnModelNs) kind = node_kind(q.local);
    if (!kind) {
      model.warnings.push_back("skipped unsupported element '" + tag + "'" +
                               (id.empty() ? "" : " (id '" + id + "')"));
      if (!id.empty()) skipped.insert(id);
      continue;
    }
    if (*kind == NodeKind::start &&
        std::any_of(model.nodes.begin(), model.nodes.end(),
                    [](const ProcessNode& n) { return n.kind == NodeKind::start; })) {
      throw ValidationError("process '" + model.process_id + "' has multiple start events");
    }
    model.nodes.push_back({id, *kind, attribute(child, "name"), collect_annotations(child, scope)});
  }

  for (auto& f : flows) {
    const bool known = model.find_node(f.edge.from) && model.find_node(f.edge.to);
    if (!known) {
      const bool touches_skipped = skipped.count(f.edge.from) || skipped.count(f.edge.to);
      model.warnings.push_back("dropped sequence flow '" + f.edge.id + "'" +
                               (touches_skipped ? " attached to a skipped element"
                                                : " referencing an unknown node"));
      continue;
    }
    if (!f.edge.probability) {
      const auto* src = model.find_node(f.edge.from);
      f.edge.probability = annotated_probability(src->annotations, &f.edge.id, model.warnings,
                                                 "gateway '" + src->id + "'");
    }
    model.edges.push_back(std::move(f.edge));
  }
  model.check();
  return model;
}

ProcessModel parse_bpmn_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open BPMN file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bpmn(ss.str());
}

std::map<std::string, double> expected_visits(const ProcessModel& model) {
  model.check();
  std::map<std::string, std::vector<const ProcessEdge*>> outgoing;
  std::map<std::string, std::vector<const ProcessEdge*>> incoming;
  for (const auto& e : model.edges) {
    outgoing[e.from].push_back(&e);
    incoming[e.to].push_back(&e);
  }

  std::map<std::string, std::size_t> indegree;
  for (const auto& n : model.nodes) indegree[n.id] = incoming[n.id].size();
  std::deque<std::string> ready;
  for (const auto& n : model.nodes) {
    if (indegree[n.id] == 0) ready.push_back(n.id);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto id = ready.front();
    ready.pop_front();
    order.push_back(id);
    for (const auto* e : outgoing[id]) {
      if (--indegree[e->to] == 0) ready.push_back(e->to);
    }
  }
  if (order.size() != model.nodes.size()) {
    throw ValidationError("process '" + model.process_id +
                          "' contains a cycle; loops are not supported");
  }

  std::map<std::string, double> visits;
  for (const auto& id : order) {
    const auto* node = model.find_node(id);
    double v = 0.0;
    if (node->kind == NodeKind::start) {
      v = 1.0;
    } else {
      const auto& in = incoming[id];
      for (const auto* e : in) v += visits[e->from] * edge_probability(model, *e, outgoing[e->from]);
      if (node->kind == NodeKind::parallel_gateway && in.size() > 1) {
        v /= static_cast<double>(in.size());
      }
    }
    visits[id] = v;
  }
  return visits;
}

EmbeddedRequirements extract_embedded_requirements(const ProcessModel& model) {
  EmbeddedRequirements out;
  auto& reqs = out.requirements;
  for (const auto& node : model.nodes) {
    for (const auto& line : node.annotations) {
      const auto tokens = split_ws(line);
      if (tokens.empty()) continue;
      const std::string where = " on node '" + node.id + "'";
      if (tokens[0] == "blade:require") {
        std::optional<StrictOperator> op;
        if (tokens.size() >= 4) op = parse_operator(tokens[2]);
        if (!op || *op == StrictOperator::includes_all) {
          out.warnings.push_back("malformed requirement '" + line + "'" + where);
          continue;
        }
        std::string literal = tokens[3];
        for (std::size_t k = 4; k < tokens.size(); ++k) literal += " " + tokens[k];
        reqs.strict.push_back({tokens[1], *op, parse_literal(literal)});
      } else if (tokens[0] == "blade:prefer") {
        std::optional<double> w;
        if (tokens.size() == 3) w = parse_number(tokens[2]);
        if (!w || *w < 0.0 || *w > 1.0) {
          out.warnings.push_back("malformed preference '" + line + "'" + where);
          continue;
        }
        auto it = std::find_if(reqs.preferences.begin(), reqs.preferences.end(),
                               [&](const Preference& p) { return p.criterion_id == tokens[1]; });
        if (it == reqs.preferences.end()) {
          reqs.preferences.push_back({tokens[1], *w});
        } else {
          out.warnings.push_back("duplicate preference for '" + tokens[1] + "'" + where +
                                 ", keeping the maximum weight");
          it->weight = std::max(it->weight, *w);
        }
      }
    }
  }
  return out;
}

ProcessProfile build_profile(const ProcessModel& model, double instance_rate,
                             std::string_view onchain_marker) {
  if (!std::isfinite(instance_rate) || instance_rate < 0.0) {
    throw ValidationError("instance rate must be a non-negative number");
  }
  const auto visits = expected_visits(model);
  ProcessProfile profile;
  profile.process_id = model.process_id;
  profile.instance_rate = instance_rate;
  profile.embedded = extract_embedded_requirements(model);
  double onchain_visits = 0.0;
  for (const auto& node : model.nodes) {
    if (node.kind != NodeKind::task) continue;
    const double v = visits.at(node.id);
    profile.task_visits[node.id] = v;
    const bool marked = std::any_of(node.annotations.begin(), node.annotations.end(),
                                    [&](const std::string& line) {
                                      const auto tokens = split_ws(line);
                                      return !tokens.empty() && tokens[0] == onchain_marker;
                                    });
    if (marked) {
      profile.onchain_tasks.push_back(node.id);
      onchain_visits += v;
    }
  }
  profile.tx_rate = instance_rate * onchain_visits;
  return profile;
}

json to_json(const ProcessModel& model) {
  json nodes = json::array();
  for (const auto& n : model.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", to_string(n.kind)},
                     {"name", n.name},
                     {"annotations", n.annotations}});
  }
  json edges = json::array();
  for (const auto& e : model.edges) {
    edges.push_back({{"id", e.id},
                     {"from", e.from},
                     {"to", e.to},
                     {"probability", e.probability ? json(*e.probability) : json(nullptr)}});
  }
  return {{"process_id", model.process_id},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"warnings", model.warnings}};
}

json to_json(const ProcessProfile& profile) {
  json warnings = profile.embedded.warnings;
  return {{"process_id", profile.process_id},
          {"instance_rate", profile.instance_rate},
          {"task_visits", profile.task_visits},
          {"onchain_tasks", profile.onchain_tasks},
          {"tx_rate", profile.tx_rate},
          {"embedded_requirements", to_json(profile.embedded.requirements)},
          {"warnings", std::move(warnings)}};
}

}  // namespace blade
