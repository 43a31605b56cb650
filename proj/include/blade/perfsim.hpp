#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blade/bpmn.hpp"
#include "blade/kb.hpp"

namespace blade {

/// The four benchmark contract methods. `difficulty` scales each one: loop
/// iterations, bytes stored or read, hardness of the dummy computation.
enum class BenchMethod { compute, loop, store, read };

inline constexpr std::array<BenchMethod, 4> kBenchMethods = {
    BenchMethod::compute, BenchMethod::loop, BenchMethod::store, BenchMethod::read};

std::string_view to_string(BenchMethod m);
std::optional<BenchMethod> parse_method(std::string_view label);

/// weight = a + b * difficulty
struct CostCoefficients {
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const CostCoefficients&, const CostCoefficients&) = default;
};

std::map<BenchMethod, CostCoefficients> default_method_costs();

struct ChainParams {
  double block_time = 2.0;        // seconds between blocks
  double block_capacity = 1000.0; // weight units per block
  int finality_blocks = 1;        // blocks after inclusion until final
  int node_count = 4;             // reported only; no behavioural effect
  std::map<BenchMethod, CostCoefficients> method_costs = default_method_costs();

  void check() const;

  friend bool operator==(const ChainParams&, const ChainParams&) = default;
};

enum class ArrivalProcess { deterministic, poisson };

struct WorkloadEntry {
  BenchMethod method = BenchMethod::store;
  int difficulty = 1;
  double rate = 0.0;  // transactions per second

  friend bool operator==(const WorkloadEntry&, const WorkloadEntry&) = default;
};

struct WorkloadSpec {
  std::vector<WorkloadEntry> entries;
  ArrivalProcess arrival = ArrivalProcess::deterministic;
  std::uint64_t seed = 0;

  double total_rate() const;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

struct LatencyStats {
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;

  friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

struct BlockRecord {
  std::int64_t index = 0;
  double time = 0.0;
  std::int64_t tx_count = 0;
  double weight = 0.0;
  double occupancy = 0.0;  // weight / capacity
  // Counters right after this block was sealed.
  std::int64_t submitted = 0;
  std::int64_t committed = 0;
  std::int64_t pending = 0;

  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

struct SimResult {
  double duration = 0.0;
  std::int64_t submitted = 0;
  std::int64_t committed = 0;  // included in a block
  std::int64_t pending = 0;    // still in the mempool
  double throughput = 0.0;     // committed / duration
  LatencyStats latency;        // arrival -> finality, over committed transactions
  std::vector<BlockRecord> blocks;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

struct TxRecord {
  std::size_t entry = 0;
  double arrival = 0.0;
  std::int64_t block = 0;
  double finality = 0.0;
};

/// Optional per-transaction log, in commit order.
struct SimTrace {
  std::vector<TxRecord> committed;
};

double tx_weight(BenchMethod method, int difficulty, const ChainParams& params);

/// (capacity / block_time) / rate-weighted mean transaction weight.
double analytic_capacity(const ChainParams& params, const WorkloadSpec& workload);

/// Discrete-event run: arrivals feed a FIFO mempool; every block_time a block
/// is packed in FIFO order until the next transaction no longer fits.
/// Deterministic for a fixed seed. Requires duration >= 10 * block_time.
SimResult simulate(const ChainParams& params, const WorkloadSpec& workload, double duration,
                   SimTrace* trace = nullptr);

inline constexpr std::string_view kThroughputCriterion = "throughput-tps";
inline constexpr std::string_view kLatencyCriterion = "latency-s";

/// Narrows the profile's throughput and latency intervals to bands derived
/// from simulation: saturation throughput ±5% and [0.5·p50, 1.5·p95].
/// A disjoint stored interval is replaced by the band with a conflict note.
KnowledgeBase refine_intervals(const KnowledgeBase& kb, const std::string& profile_id,
                               const std::map<std::string, ChainParams>& mapping,
                               const WorkloadSpec& workload);

struct TaskMethod {
  BenchMethod method = BenchMethod::store;
  int difficulty = 1;
};

/// One entry per on-chain task at instance_rate × expected visits; zero-rate
/// tasks are dropped. Unmapped tasks default to store with difficulty 1.
WorkloadSpec workload_from_profile(const ProcessProfile& profile,
                                   const std::map<std::string, TaskMethod>& mapping = {});

json to_json(const ChainParams& p);
json to_json(const WorkloadSpec& w);
json to_json(const SimResult& r);
ChainParams chain_params_from_json(const json& j);
WorkloadSpec workload_from_json(const json& j);
std::string occupancy_csv(const SimResult& r);

}  // namespace blade
