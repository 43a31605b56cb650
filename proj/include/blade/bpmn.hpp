#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blade/requirements.hpp"

namespace blade {

inline constexpr std::string_view kBpmnModelNs = "http://www.omg.org/spec/BPMN/20100524/MODEL";
inline constexpr std::string_view kBladeNs = "urn:blade:bpmn-extensions:1";
inline constexpr std::string_view kDefaultOnchainMarker = "blade:onchain";

enum class NodeKind { start, end, task, exclusive_gateway, parallel_gateway };

std::string_view to_string(NodeKind k);

struct ProcessNode {
  std::string id;
  NodeKind kind = NodeKind::task;
  std::string name;
  std::vector<std::string> annotations;  // one entry per non-empty line
};

struct ProcessEdge {
  std::string id;
  std::string from;
  std::string to;
  std::optional<double> probability;
};

struct ProcessModel {
  std::string process_id;
  std::vector<ProcessNode> nodes;
  std::vector<ProcessEdge> edges;
  std::vector<std::string> warnings;

  const ProcessNode* find_node(std::string_view id) const;

  /// Throws ValidationError unless there is exactly one start node, at least
  /// one end node, every edge connects known nodes and annotated
  /// exclusive-gateway branches sum to 1.
  void check() const;
};

/// Parses the first process of a BPMN 2.0 document. Unsupported flow
/// elements are dropped and reported in `warnings`.
ProcessModel parse_bpmn(std::string_view xml);
ProcessModel parse_bpmn_file(const std::string& path);

/// Expected executions per process instance for every node. Exclusive
/// branches without probabilities split uniformly; parallel branches all
/// carry 1; a parallel join fires once per synchronized set of tokens.
/// Cyclic models are rejected.
std::map<std::string, double> expected_visits(const ProcessModel& model);

struct EmbeddedRequirements {
  RequirementSet requirements;  // a fragment; may have no preferences
  std::vector<std::string> warnings;
};

EmbeddedRequirements extract_embedded_requirements(const ProcessModel& model);

struct ProcessProfile {
  std::string process_id;
  double instance_rate = 0.0;                // instances per second
  std::map<std::string, double> task_visits;  // tasks only
  std::vector<std::string> onchain_tasks;     // in model order
  EmbeddedRequirements embedded;
  double tx_rate = 0.0;                       // on-chain transactions per second
};

ProcessProfile build_profile(const ProcessModel& model, double instance_rate,
                             std::string_view onchain_marker = kDefaultOnchainMarker);

json to_json(const ProcessModel& model);
json to_json(const ProcessProfile& profile);

}  // namespace blade
