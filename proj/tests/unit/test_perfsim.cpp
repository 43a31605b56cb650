#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/generators.hpp"
#include "blade/perfsim.hpp"

using namespace blade;

namespace {

// store difficulty 1 weighs 8, so capacity 160 per 2 s block is 10 tx/s.
ChainParams ten_per_second() {
  ChainParams p;
  p.block_time = 2.0;
  p.block_capacity = 160.0;
  return p;
}

WorkloadSpec store_at(double rate, ArrivalProcess arrival = ArrivalProcess::deterministic) {
  WorkloadSpec w;
  w.entries.push_back({BenchMethod::store, 1, rate});
  w.arrival = arrival;
  w.seed = 7;
  return w;
}

}  // namespace

TEST(Perfsim, WeightsAndCapacity) {
  const ChainParams p;
  EXPECT_EQ(tx_weight(BenchMethod::compute, 3, p), 26.0);
  EXPECT_EQ(tx_weight(BenchMethod::loop, 2, p), 5.0);
  EXPECT_EQ(tx_weight(BenchMethod::store, 1, p), 8.0);
  EXPECT_EQ(tx_weight(BenchMethod::read, 9, p), 1.0);
  EXPECT_THROW(tx_weight(BenchMethod::read, 0, p), ValidationError);
  EXPECT_DOUBLE_EQ(analytic_capacity(ten_per_second(), store_at(1.0)), 10.0);
  WorkloadSpec mix;
  mix.entries = {{BenchMethod::store, 1, 1.0}, {BenchMethod::read, 1, 3.0}};
  // mean weight (8 + 3) / 4
  EXPECT_DOUBLE_EQ(analytic_capacity(p, mix), 500.0 / 2.75);
}

TEST(Perfsim, UnderloadedDeterministic) {
  const auto r = simulate(ten_per_second(), store_at(5.0), 1000.0);
  EXPECT_LE(std::abs(r.throughput - 5.0), 2.0 * r.pending / 1000.0 + 1e-12);
  EXPECT_EQ(r.submitted, 5000);
  EXPECT_EQ(r.blocks.size(), 500u);
  EXPECT_EQ(r.submitted, r.committed + r.pending);
}

TEST(Perfsim, SaturationApproachesCapacity) {
  const double duration = 1000.0;
  const auto r = simulate(ten_per_second(), store_at(20.0), duration);
  EXPECT_NEAR(r.throughput, 10.0, 0.2);
  EXPECT_NEAR(static_cast<double>(r.pending), 10.0 * duration, 0.02 * 10.0 * duration);
  for (const auto& b : r.blocks) EXPECT_EQ(b.occupancy, 1.0);
}

TEST(Perfsim, LatencyIncludesFinalityDepth) {
  auto p = ten_per_second();
  p.finality_blocks = 3;
  const auto r = simulate(p, store_at(1.0), 100.0);
  // arrivals at integer seconds; included in the next block at an even second
  EXPECT_EQ(r.latency.max, 2.0 + 3 * 2.0);
  EXPECT_GE(r.latency.p50, 3 * 2.0);
  EXPECT_LE(r.latency.p50, r.latency.p95);
  EXPECT_LE(r.latency.p95, r.latency.max);
}

TEST(Perfsim, ConservationAfterEveryBlock) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 5; ++t) {
    const auto o = gen::random_overload(rng);
    const auto r = simulate(o.params, o.workload, 50 * o.params.block_time);
    for (const auto& b : r.blocks) {
      ASSERT_EQ(b.submitted, b.committed + b.pending);
      ASSERT_LE(b.weight, o.params.block_capacity);
    }
    ASSERT_EQ(r.submitted, r.committed + r.pending);
  }
}

TEST(Perfsim, SeedDeterminismAndSensitivity) {
  const auto w = store_at(12.0, ArrivalProcess::poisson);
  const auto a = simulate(ten_per_second(), w, 200.0);
  const auto b = simulate(ten_per_second(), w, 200.0);
  EXPECT_EQ(a, b);
  auto w2 = w;
  w2.seed = 8;
  EXPECT_NE(simulate(ten_per_second(), w2, 200.0).submitted, 0);
  EXPECT_FALSE(simulate(ten_per_second(), w2, 200.0) == a);
}

TEST(Perfsim, PoissonRateIsRoughlyRight) {
  const auto r = simulate(ten_per_second(), store_at(4.0, ArrivalProcess::poisson), 5000.0);
  EXPECT_NEAR(r.submitted / 5000.0, 4.0, 0.15);
}

TEST(Perfsim, TraceRecordsFifoCommits) {
  SimTrace trace;
  const auto r = simulate(ten_per_second(), store_at(15.0), 100.0, &trace);
  ASSERT_EQ(static_cast<std::int64_t>(trace.committed.size()), r.committed);
  for (std::size_t i = 1; i < trace.committed.size(); ++i) {
    ASSERT_LE(trace.committed[i - 1].arrival, trace.committed[i].arrival);
  }
}

TEST(Perfsim, RejectsInvalidInput) {
  EXPECT_THROW(simulate(ten_per_second(), store_at(1.0), 5.0), ValidationError);
  auto p = ten_per_second();
  p.block_capacity = 4.0;
  EXPECT_THROW(simulate(p, store_at(1.0), 100.0), ValidationError);
  p = ten_per_second();
  p.block_time = 0.0;
  EXPECT_THROW(simulate(p, store_at(1.0), 100.0), ValidationError);
  EXPECT_THROW(simulate(ten_per_second(), WorkloadSpec{}, 100.0), ValidationError);
  EXPECT_THROW(simulate(ten_per_second(), store_at(0.0), 100.0), ValidationError);
}

TEST(Perfsim, JsonRoundTrip) {
  auto p = ten_per_second();
  p.method_costs[BenchMethod::read] = {2.0, 0.5};
  EXPECT_EQ(chain_params_from_json(to_json(p)), p);
  const auto w = store_at(3.0, ArrivalProcess::poisson);
  EXPECT_EQ(workload_from_json(to_json(w)), w);
  EXPECT_THROW(workload_from_json(json::parse(R"({"entries": [{"method": "mine"}]})")), FormatError);
  EXPECT_THROW(chain_params_from_json(json::array()), FormatError);
}

TEST(Perfsim, OccupancyCsv) {
  const auto r = simulate(ten_per_second(), store_at(20.0), 20.0);
  const auto csv = occupancy_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,time,tx_count,weight,occupancy,submitted,committed,pending");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}

TEST(Refine, SaturationBandAroundTen) {
  KnowledgeBase kb = fixture_knowledge_base();
  for (auto& p : kb.profiles) {
    if (p.id == "corda") p.attributes["throughput-tps"] = Interval{1, 1000};
  }
  const auto out = refine_intervals(kb, "corda", {{"corda", ten_per_second()}}, store_at(5.0));
  const auto& iv = std::get<Interval>(*out.find_profile("corda")->attribute("throughput-tps"));
  EXPECT_NEAR(iv.lo, 9.5, 0.1);
  EXPECT_NEAR(iv.hi, 10.5, 0.1);
  EXPECT_EQ(out.kb_version, kb.kb_version + 1);
  EXPECT_GT(out.find_profile("corda")->sources.size(), kb.find_profile("corda")->sources.size());
  EXPECT_EQ(*out.find_profile("fabric"), *kb.find_profile("fabric"));
}

TEST(Refine, DisjointIntervalIsReplacedWithConflictNote) {
  KnowledgeBase kb = fixture_knowledge_base();
  const auto out = refine_intervals(kb, "fabric", {{"fabric", ten_per_second()}}, store_at(5.0));
  const auto& p = *out.find_profile("fabric");
  const auto& iv = std::get<Interval>(*p.attribute("throughput-tps"));
  EXPECT_LT(iv.hi, 11.0);
  bool conflict = false;
  for (const auto& s : p.sources) conflict = conflict || s.citation.find("conflict") != std::string::npos;
  EXPECT_TRUE(conflict);
}

TEST(Refine, UnknownProfileAndMissingParams) {
  const auto kb = fixture_knowledge_base();
  EXPECT_THROW(refine_intervals(kb, "nope", {{"nope", ChainParams{}}}, store_at(1.0)), NotFoundError);
  EXPECT_THROW(refine_intervals(kb, "fabric", {}, store_at(1.0)), ValidationError);
}

TEST(Perfsim, WorkloadFromProfile) {
  ProcessProfile prof;
  prof.instance_rate = 2.0;
  prof.onchain_tasks = {"a", "b", "c"};
  prof.task_visits = {{"a", 1.0}, {"b", 0.25}, {"c", 0.0}};
  const auto w = workload_from_profile(prof, {{"b", {BenchMethod::compute, 4}}});
  ASSERT_EQ(w.entries.size(), 2u);
  EXPECT_EQ(w.entries[0], (WorkloadEntry{BenchMethod::store, 1, 2.0}));
  EXPECT_EQ(w.entries[1], (WorkloadEntry{BenchMethod::compute, 4, 0.5}));
}
