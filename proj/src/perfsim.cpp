#include "blade/perfsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <sstream>

#include "blade/error.hpp"

namespace blade {

namespace {

constexpr double kOverloadFactor = 2.5;
constexpr double kRefineBlocks = 200.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Portable uniform in [0, 1); std distributions differ between libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class ArrivalStream {
 public:
  ArrivalStream(const WorkloadEntry& entry, ArrivalProcess process, std::uint64_t seed,
                std::size_t index)
      : rate_(entry.rate), process_(process), rng_(splitmix64(seed + 0x632BE59BD9B4E019ULL * (index + 1))) {
    if (rate_ > 0.0 && process_ == ArrivalProcess::poisson) next_ = exponential();
  }

  bool active() const { return rate_ > 0.0; }
  double next() const { return next_; }

  void advance() {
    ++count_;
    if (process_ == ArrivalProcess::deterministic) {
      next_ = static_cast<double>(count_) / rate_;
    } else {
      next_ += exponential();
    }
  }

 private:
  double exponential() { return -std::log1p(-unit_uniform(rng_)) / rate_; }

  double rate_;
  ArrivalProcess process_;
  std::mt19937_64 rng_;
  double next_ = 0.0;
  std::uint64_t count_ = 0;
};

enum class EventKind { block = 0, arrival = 1 };

struct Event {
  double time;
  EventKind kind;
  std::size_t source;  // entry index for arrivals

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return source > o.source;
  }
};

struct PendingTx {
  std::size_t entry;
  double arrival;
  double weight;
};

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

void check_workload(const WorkloadSpec& w, const ChainParams& params) {
  if (w.entries.empty()) throw ValidationError("workload has no entries");
  for (const auto& e : w.entries) {
    if (!std::isfinite(e.rate) || e.rate < 0.0) {
      throw ValidationError("workload rate must be a non-negative number");
    }
    const double weight = tx_weight(e.method, e.difficulty, params);
    if (weight > params.block_capacity) {
      throw ValidationError("a " + std::string(to_string(e.method)) + " transaction of difficulty " +
                            std::to_string(e.difficulty) + " weighs " + json(weight).dump() +
                            ", more than the block capacity");
    }
  }
  if (!(w.total_rate() > 0.0)) throw ValidationError("workload total rate must be positive");
}

std::string interval_text(const Interval& iv) {
  return "[" + json(iv.lo).dump() + ", " + json(iv.hi).dump() + "]";
}

std::string params_text(const ChainParams& p) {
  return "block_time=" + json(p.block_time).dump() + "s, capacity=" + json(p.block_capacity).dump() +
         ", finality_blocks=" + std::to_string(p.finality_blocks) +
         ", nodes=" + std::to_string(p.node_count);
}

void narrow(BlockchainProfile& profile, const CriterionDef& c, const Interval& band,
            const std::string& basis) {
  auto* current = profile.attributes.count(c.id) ? &profile.attributes.at(c.id) : nullptr;
  if (!current) {
    profile.attributes[c.id] = band;
    profile.sources.push_back({"simulation: set " + c.id + " to " + interval_text(band) + " (" + basis + ")", ""});
    return;
  }
  const auto stored = std::get<Interval>(*current);
  const Interval cut{std::max(stored.lo, band.lo), std::min(stored.hi, band.hi)};
  if (cut.lo > cut.hi) {
    *current = band;
    profile.sources.push_back({"simulation conflict: stored " + c.id + " " + interval_text(stored) +
                                   " is disjoint from simulated band " + interval_text(band) +
                                   ", replaced by the band (" + basis + ")",
                               ""});
    return;
  }
  *current = cut;
  profile.sources.push_back({"simulation: narrowed " + c.id + " " + interval_text(stored) + " to " +
                                 interval_text(cut) + " (" + basis + ")",
                             ""});
}

const CriterionDef& interval_criterion(const KnowledgeBase& kb, std::string_view id) {
  const auto* c = kb.find_criterion(id);
  if (!c || c->kind != CriterionKind::numeric_interval) {
    throw ValidationError("knowledge base lacks numeric-interval criterion '" + std::string(id) + "'");
  }
  return *c;
}

std::int64_t json_int(const json& j, const char* key, std::int64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw FormatError(std::string("'") + key + "' must be an integer");
  return it->get<std::int64_t>();
}

double json_real(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw FormatError(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

std::string_view to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::compute: return "compute";
    case BenchMethod::loop: return "loop";
    case BenchMethod::store: return "store";
    case BenchMethod::read: return "read";
  }
  return "?";
}

std::optional<BenchMethod> parse_method(std::string_view label) {
  for (auto m : kBenchMethods) {
    if (to_string(m) == label) return m;
  }
  return std::nullopt;
}

std::map<BenchMethod, CostCoefficients> default_method_costs() {
  return {{BenchMethod::compute, {2.0, 8.0}},
          {BenchMethod::loop, {1.0, 2.0}},
          {BenchMethod::store, {4.0, 4.0}},
          {BenchMethod::read, {1.0, 0.0}}};
}

void ChainParams::check() const {
  if (!std::isfinite(block_time) || block_time <= 0.0) {
    throw ValidationError("block_time must be positive");
  }
  if (!std::isfinite(block_capacity) || block_capacity <= 0.0) {
    throw ValidationError("block_capacity must be positive");
  }
  if (finality_blocks < 0) throw ValidationError("finality_blocks must be non-negative");
  if (node_count < 1) throw ValidationError("node_count must be at least 1");
  for (auto m : kBenchMethods) {
    auto it = method_costs.find(m);
    if (it == method_costs.end()) {
      throw ValidationError("missing cost coefficients for method " + std::string(to_string(m)));
    }
    const auto& c = it->second;
    if (!(c.a >= 0.0) || !(c.b >= 0.0) || !(c.a + c.b > 0.0) || !std::isfinite(c.a + c.b)) {
      throw ValidationError("cost coefficients of " + std::string(to_string(m)) +
                            " need a >= 0, b >= 0 and a + b > 0");
    }
  }
}

double WorkloadSpec::total_rate() const {
  double total = 0.0;
  for (const auto& e : entries) total += e.rate;
  return total;
}

double tx_weight(BenchMethod method, int difficulty, const ChainParams& params) {
  if (difficulty < 1) throw ValidationError("difficulty must be at least 1");
  const auto& c = params.method_costs.at(method);
  return c.a + c.b * static_cast<double>(difficulty);
}

double analytic_capacity(const ChainParams& params, const WorkloadSpec& workload) {
  params.check();
  double rate = 0.0;
  double weighted = 0.0;
  for (const auto& e : workload.entries) {
    rate += e.rate;
    weighted += e.rate * tx_weight(e.method, e.difficulty, params);
  }
  if (!(rate > 0.0)) throw ValidationError("workload mix has no positive rate");
  const double mean_weight = weighted / rate;
  if (!(mean_weight > 0.0)) throw ValidationError("workload mean transaction weight is zero");
  return (params.block_capacity / params.block_time) / mean_weight;
}

SimResult simulate(const ChainParams& params, const WorkloadSpec& workload, double duration,
                   SimTrace* trace) {
  params.check();
  check_workload(workload, params);
  if (!std::isfinite(duration) || duration < 10.0 * params.block_time) {
    throw ValidationError("duration must be at least 10 block times");
  }

  std::vector<ArrivalStream> streams;
  std::vector<double> weights;
  for (std::size_t i = 0; i < workload.entries.size(); ++i) {
    const auto& e = workload.entries[i];
    streams.emplace_back(e, workload.arrival, workload.seed, i);
    weights.push_back(tx_weight(e.method, e.difficulty, params));
  }

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i].active() && streams[i].next() < duration) {
      events.push({streams[i].next(), EventKind::arrival, i});
    }
  }
  const auto block_count = static_cast<std::int64_t>(std::floor(duration / params.block_time + 1e-9));
  if (block_count >= 1) events.push({params.block_time, EventKind::block, 0});

  SimResult result;
  result.duration = duration;
  std::deque<PendingTx> mempool;
  std::vector<double> latencies;
  std::int64_t block_index = 0;

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    if (ev.kind == EventKind::arrival) {
      mempool.push_back({ev.source, ev.time, weights[ev.source]});
      ++result.submitted;
      auto& s = streams[ev.source];
      s.advance();
      if (s.next() < duration) events.push({s.next(), EventKind::arrival, ev.source});
      continue;
    }

    ++block_index;
    BlockRecord block;
    block.index = block_index;
    block.time = static_cast<double>(block_index) * params.block_time;
    const double finality = block.time + params.finality_blocks * params.block_time;
    while (!mempool.empty() && block.weight + mempool.front().weight <= params.block_capacity) {
      const auto tx = mempool.front();
      mempool.pop_front();
      block.weight += tx.weight;
      ++block.tx_count;
      latencies.push_back(finality - tx.arrival);
      if (trace) trace->committed.push_back({tx.entry, tx.arrival, block_index, finality});
    }
    result.committed += block.tx_count;
    block.occupancy = block.weight / params.block_capacity;
    block.submitted = result.submitted;
    block.committed = result.committed;
    block.pending = static_cast<std::int64_t>(mempool.size());
    result.blocks.push_back(block);
    if (block_index < block_count) {
      events.push({static_cast<double>(block_index + 1) * params.block_time, EventKind::block, 0});
    }
  }

  result.pending = static_cast<std::int64_t>(mempool.size());
  result.throughput = static_cast<double>(result.committed) / duration;
  if (!latencies.empty()) {
    double sum = 0.0;
    for (double l : latencies) sum += l;
    result.latency.mean = sum / static_cast<double>(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    result.latency.p50 = percentile(latencies, 0.50);
    result.latency.p95 = percentile(latencies, 0.95);
    result.latency.max = latencies.back();
  }
  return result;
}

KnowledgeBase refine_intervals(const KnowledgeBase& kb, const std::string& profile_id,
                               const std::map<std::string, ChainParams>& mapping,
                               const WorkloadSpec& workload) {
  if (!kb.find_profile(profile_id)) throw NotFoundError("unknown profile '" + profile_id + "'");
  auto it = mapping.find(profile_id);
  if (it == mapping.end()) {
    throw ValidationError("no chain parameters supplied for profile '" + profile_id + "'");
  }
  const auto& params = it->second;
  const auto& tp = interval_criterion(kb, kThroughputCriterion);
  const auto& lat = interval_criterion(kb, kLatencyCriterion);
  params.check();
  check_workload(workload, params);

  const double duration = kRefineBlocks * params.block_time;
  const double capacity = analytic_capacity(params, workload);
  WorkloadSpec overload = workload;
  const double scale = kOverloadFactor * capacity / workload.total_rate();
  for (auto& e : overload.entries) e.rate *= scale;
  const auto saturated = simulate(params, overload, duration);
  const auto nominal = simulate(params, workload, duration);

  KnowledgeBase out = kb;
  auto& profile = *std::find_if(out.profiles.begin(), out.profiles.end(),
                                [&](const BlockchainProfile& p) { return p.id == profile_id; });
  const std::string basis = params_text(params);
  narrow(profile, tp, {0.95 * saturated.throughput, 1.05 * saturated.throughput},
         "saturation throughput " + json(saturated.throughput).dump() + " tx/s, " + basis);
  if (nominal.committed > 0) {
    narrow(profile, lat, {0.5 * nominal.latency.p50, 1.5 * nominal.latency.p95},
           "latency p50 " + json(nominal.latency.p50).dump() + " s, p95 " +
               json(nominal.latency.p95).dump() + " s, " + basis);
  } else {
    profile.sources.push_back(
        {"simulation: latency left unchanged, no transaction committed (" + basis + ")", ""});
  }
  out.kb_version = kb.kb_version + 1;
  validate(out);
  return out;
}

WorkloadSpec workload_from_profile(const ProcessProfile& profile,
                                   const std::map<std::string, TaskMethod>& mapping) {
  WorkloadSpec spec;
  for (const auto& task : profile.onchain_tasks) {
    const auto visits = profile.task_visits.count(task) ? profile.task_visits.at(task) : 0.0;
    const double rate = profile.instance_rate * visits;
    if (!(rate > 0.0)) continue;
    TaskMethod m;
    if (auto it = mapping.find(task); it != mapping.end()) m = it->second;
    spec.entries.push_back({m.method, m.difficulty, rate});
  }
  return spec;
}

json to_json(const ChainParams& p) {
  json costs = json::object();
  for (const auto& [m, c] : p.method_costs) costs[std::string(to_string(m))] = {{"a", c.a}, {"b", c.b}};
  return {{"block_time", p.block_time},
          {"block_capacity", p.block_capacity},
          {"finality_blocks", p.finality_blocks},
          {"node_count", p.node_count},
          {"method_costs", std::move(costs)}};
}

json to_json(const WorkloadSpec& w) {
  json entries = json::array();
  for (const auto& e : w.entries) {
    entries.push_back(
        {{"method", to_string(e.method)}, {"difficulty", e.difficulty}, {"rate", e.rate}});
  }
  return {{"entries", std::move(entries)},
          {"arrival_process", w.arrival == ArrivalProcess::poisson ? "poisson" : "deterministic"},
          {"seed", w.seed}};
}

json to_json(const SimResult& r) {
  json blocks = json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back({{"index", b.index},
                      {"time", b.time},
                      {"tx_count", b.tx_count},
                      {"weight", b.weight},
                      {"occupancy", b.occupancy}});
  }
  return {{"duration", r.duration},
          {"submitted", r.submitted},
          {"committed", r.committed},
          {"pending", r.pending},
          {"throughput", r.throughput},
          {"latency",
           {{"mean", r.latency.mean}, {"p50", r.latency.p50}, {"p95", r.latency.p95}, {"max", r.latency.max}}},
          {"blocks", std::move(blocks)}};
}

ChainParams chain_params_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("chain parameters must be a JSON object");
  ChainParams p;
  p.block_time = json_real(j, "block_time", p.block_time);
  p.block_capacity = json_real(j, "block_capacity", p.block_capacity);
  p.finality_blocks = static_cast<int>(json_int(j, "finality_blocks", p.finality_blocks));
  p.node_count = static_cast<int>(json_int(j, "node_count", p.node_count));
  if (auto it = j.find("method_costs"); it != j.end()) {
    if (!it->is_object()) throw FormatError("'method_costs' must be an object");
    for (const auto& [name, c] : it->items()) {
      auto m = parse_method(name);
      if (!m) throw FormatError("unknown benchmark method '" + name + "'");
      if (!c.is_object()) throw FormatError("method cost entries must be objects");
      p.method_costs[*m] = {json_real(c, "a", 0.0), json_real(c, "b", 0.0)};
    }
  }
  p.check();
  return p;
}

WorkloadSpec workload_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("workload must be a JSON object");
  WorkloadSpec w;
  auto entries = j.find("entries");
  if (entries == j.end() || !entries->is_array()) throw FormatError("workload needs an 'entries' array");
  for (const auto& e : *entries) {
    if (!e.is_object()) throw FormatError("workload entries must be objects");
    WorkloadEntry entry;
    auto m = e.find("method");
    if (m == e.end() || !m->is_string()) throw FormatError("workload entry needs a 'method'");
    auto method = parse_method(m->get<std::string>());
    if (!method) throw FormatError("unknown benchmark method '" + m->get<std::string>() + "'");
    entry.method = *method;
    entry.difficulty = static_cast<int>(json_int(e, "difficulty", 1));
    entry.rate = json_real(e, "rate", 0.0);
    if (entry.difficulty < 1) throw ValidationError("difficulty must be at least 1");
    if (!std::isfinite(entry.rate) || entry.rate < 0.0) throw ValidationError("rate must be non-negative");
    w.entries.push_back(entry);
  }
  if (auto it = j.find("arrival_process"); it != j.end()) {
    const auto label = it->is_string() ? it->get<std::string>() : std::string();
    if (label == "deterministic") {
      w.arrival = ArrivalProcess::deterministic;
    } else if (label == "poisson") {
      w.arrival = ArrivalProcess::poisson;
    } else {
      throw FormatError("arrival_process must be deterministic or poisson");
    }
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      throw FormatError("'seed' must be an unsigned integer");
    }
    w.seed = it->get<std::uint64_t>();
  }
  return w;
}

std::string occupancy_csv(const SimResult& r) {
  std::ostringstream os;
  os << "index,time,tx_count,weight,occupancy,submitted,committed,pending\n";
  for (const auto& b : r.blocks) {
    os << b.index << ',' << json(b.time).dump() << ',' << b.tx_count << ',' << json(b.weight).dump()
       << ',' << json(b.occupancy).dump() << ',' << b.submitted << ',' << b.committed << ','
       << b.pending << '\n';
  }
  return os.str();
}

}  // namespace blade
