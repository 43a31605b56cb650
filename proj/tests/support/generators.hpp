#pragma once

#include <random>
#include <string>
#include <vector>

#include "blade/bpmn.hpp"
#include "blade/perfsim.hpp"

namespace gen {

struct Matrix {
  std::vector<std::vector<double>> x;
  std::vector<double> w;
  std::vector<bool> benefit;
};

/// 2-6 alternatives × 2-5 criteria, values in (0,10], positive weights.
inline Matrix random_matrix(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rows(2, 6), cols(2, 5), coin(0, 1);
  std::uniform_real_distribution<double> value(0.0, 10.0), weight(0.01, 1.0);
  Matrix m;
  const int r = rows(rng), c = cols(rng);
  m.x.assign(r, std::vector<double>(c));
  for (auto& row : m.x) {
    for (auto& v : row) {
      v = value(rng);
      if (v == 0.0) v = 10.0;
    }
  }
  for (int j = 0; j < c; ++j) {
    m.w.push_back(weight(rng));
    m.benefit.push_back(coin(rng) == 1);
  }
  return m;
}

/// Random acyclic process with at most `max_nodes` nodes: one start, tasks
/// and gateways in topological order, every dangling node wired to an end.
inline blade::ProcessModel random_process(std::mt19937_64& rng, int max_nodes = 10) {
  using blade::NodeKind;
  std::uniform_int_distribution<int> count(3, max_nodes);
  const int n = count(rng);
  blade::ProcessModel m;
  m.process_id = "random";
  m.nodes.push_back({"n0", NodeKind::start, "", {}});
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 1; i < n - 1; ++i) {
    const int r = kind(rng);
    const NodeKind k = r == 0 ? NodeKind::task
                       : r == 1 ? NodeKind::exclusive_gateway
                                : NodeKind::parallel_gateway;
    m.nodes.push_back({"n" + std::to_string(i), k, "", {}});
  }
  m.nodes.push_back({"n" + std::to_string(n - 1), NodeKind::end, "", {}});

  int edge_id = 0;
  auto add = [&](int a, int b) {
    m.edges.push_back({"e" + std::to_string(edge_id++), "n" + std::to_string(a),
                       "n" + std::to_string(b), std::nullopt});
  };
  std::vector<int> out(n, 0);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pred(0, i - 1);
    int p = pred(rng);
    if (m.nodes[p].kind == NodeKind::end) p = 0;
    add(p, i);
    ++out[p];
    std::uniform_int_distribution<int> extra(0, 3);
    if (i > 1 && extra(rng) == 0) {
      int q = pred(rng);
      if (q != p && m.nodes[q].kind != NodeKind::end) {
        add(q, i);
        ++out[q];
      }
    }
  }
  for (int i = 0; i < n - 1; ++i) {
    if (out[i] == 0) add(i, n - 1);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& node : m.nodes) {
    if (node.kind != NodeKind::exclusive_gateway) continue;
    std::vector<blade::ProcessEdge*> branches;
    for (auto& e : m.edges) {
      if (e.from == node.id) branches.push_back(&e);
    }
    const double mode = unit(rng);
    if (mode < 1.0 / 3.0) continue;
    if (mode < 2.0 / 3.0 || branches.size() == 1) {
      std::vector<double> raw;
      double sum = 0.0;
      for (std::size_t k = 0; k < branches.size(); ++k) sum += raw.emplace_back(unit(rng) + 0.05);
      double assigned = 0.0;
      for (std::size_t k = 0; k + 1 < branches.size(); ++k) {
        branches[k]->probability = raw[k] / sum;
        assigned += raw[k] / sum;
      }
      branches.back()->probability = 1.0 - assigned;
    } else {
      branches.front()->probability = 0.5 * unit(rng);
    }
  }
  return m;
}

/// Randomized chain parameters and a workload that overloads them.
struct Overload {
  blade::ChainParams params;
  blade::WorkloadSpec workload;
};

inline Overload random_overload(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> bt(0.5, 5.0), cap(5000.0, 20000.0), load(1.5, 3.0),
      share(0.1, 1.0);
  std::uniform_int_distribution<int> diff(1, 5), entries(1, 4), coin(0, 1);
  std::uniform_int_distribution<std::uint64_t> seed;
  Overload o;
  o.params.block_time = bt(rng);
  o.params.block_capacity = cap(rng);
  o.workload.arrival = coin(rng) ? blade::ArrivalProcess::poisson : blade::ArrivalProcess::deterministic;
  o.workload.seed = seed(rng);
  const int k = entries(rng);
  std::vector<double> shares;
  double total_share = 0.0;
  for (int i = 0; i < k; ++i) {
    blade::WorkloadEntry e;
    e.method = blade::kBenchMethods[std::uniform_int_distribution<int>(0, 3)(rng)];
    e.difficulty = diff(rng);
    o.workload.entries.push_back(e);
    total_share += shares.emplace_back(share(rng));
  }
  // Choose rates so the offered weight per second is `load` times capacity.
  double weight_per_unit = 0.0;
  for (int i = 0; i < k; ++i) {
    const auto& e = o.workload.entries[i];
    const auto c = o.params.method_costs.at(e.method);
    weight_per_unit += shares[i] / total_share * (c.a + c.b * e.difficulty);
  }
  const double tx_per_s = load(rng) * o.params.block_capacity / o.params.block_time / weight_per_unit;
  for (int i = 0; i < k; ++i) o.workload.entries[i].rate = tx_per_s * shares[i] / total_share;
  return o;
}

}  // namespace gen
