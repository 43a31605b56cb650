#pragma once

// Expected visits by explicit enumeration of every start-to-node path.
// Each path carries the product of the branch probabilities it takes and a
// factor 1/k whenever it enters a parallel join with k incoming flows.

#include <map>
#include <string>
#include <vector>

#include "blade/bpmn.hpp"

namespace oracle {

inline double branch_probability(const blade::ProcessModel& model, const blade::ProcessEdge& edge) {
  const auto* src = model.find_node(edge.from);
  if (src->kind != blade::NodeKind::exclusive_gateway) return 1.0;
  if (edge.probability) return *edge.probability;
  double rest = 1.0;
  int open = 0;
  for (const auto& e : model.edges) {
    if (e.from != edge.from) continue;
    if (e.probability) {
      rest -= *e.probability;
    } else {
      ++open;
    }
  }
  return rest / open;
}

inline void walk(const blade::ProcessModel& model, const std::string& node, double weight,
                 std::map<std::string, double>& visits) {
  visits[node] += weight;
  for (const auto& e : model.edges) {
    if (e.from != node) continue;
    double w = weight * branch_probability(model, e);
    const auto* target = model.find_node(e.to);
    if (target->kind == blade::NodeKind::parallel_gateway) {
      int indegree = 0;
      for (const auto& f : model.edges) indegree += f.to == e.to;
      if (indegree > 1) w /= indegree;
    }
    walk(model, e.to, w, visits);
  }
}

inline std::map<std::string, double> path_visits(const blade::ProcessModel& model) {
  std::map<std::string, double> visits;
  for (const auto& n : model.nodes) visits[n.id] = 0.0;
  for (const auto& n : model.nodes) {
    if (n.kind == blade::NodeKind::start) walk(model, n.id, 1.0, visits);
  }
  return visits;
}

}  // namespace oracle
