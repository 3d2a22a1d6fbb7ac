#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

using namespace leangreen;
using lgtest::make_line;

namespace {

Event at(double t, std::size_t entity) { return {SimTime{t}, 0, EventKind::ArrivalAtStation, entity, std::size_t{0}}; }

}  // namespace

TEST(EventCalendar, PopsEarlierEventFirst) {
  EventCalendar cal;
  cal.schedule(at(5, 1));
  cal.schedule(at(3, 2));
  EXPECT_EQ(*cal.pop().entity, 2u);
  EXPECT_EQ(*cal.pop().entity, 1u);
  EXPECT_TRUE(cal.empty());
}

TEST(EventCalendar, SimultaneousEventsPopInInsertionOrder) {
  EventCalendar cal;
  for (std::size_t i = 0; i < 5; ++i) cal.schedule(at(7, i));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(*cal.pop().entity, i);
}

TEST(EventCalendar, SchedulingAtTheCurrentClockIsAccepted) {
  EventCalendar cal;
  cal.schedule(at(4, 0));
  cal.pop();
  EXPECT_EQ(cal.now().minutes, 4.0);
  EXPECT_NO_THROW(cal.schedule(at(4, 1)));
}

TEST(EventCalendar, SchedulingInThePastThrows) {
  EventCalendar cal;
  cal.schedule(at(4, 0));
  cal.pop();
  EXPECT_THROW(cal.schedule(at(3.999, 1)), SchedulingInPast);
}

TEST(EventCalendar, SequenceNumbersAreUniqueAndIncreasing) {
  EventCalendar cal;
  for (int i = 0; i < 20; ++i) cal.schedule(at(i % 3, static_cast<std::size_t>(i)));
  std::set<std::uint64_t> seen;
  Event prev = cal.pop();
  seen.insert(prev.sequence);
  while (!cal.empty()) {
    Event e = cal.pop();
    EXPECT_TRUE(seen.insert(e.sequence).second);
    EXPECT_TRUE(prev.time < e.time || (prev.time == e.time && prev.sequence < e.sequence));
    prev = e;
  }
}

TEST(RandomStream, SameSeedAndIndexReproduceDraws) {
  RandomStream a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.draw_count(), 100u);
}

TEST(RandomStream, DistinctIndicesGiveDistinctStreams) {
  RandomStream a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RandomStream, SubStreamsAreUncorrelated) {
  // Sample correlation between paired uniforms of two sub-streams.
  RandomStream a(7, 0), b(7, 1);
  const int n = 20000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform(), y = b.uniform();
    sa += x, sb += y, sab += x * y, saa += x * x, sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double r = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::abs(r), 0.03);
}

TEST(RunReplication, SingleStationSingleBatch) {
  const LineConfig c = make_line({10.0}, {}, 1);
  const auto r = run_replication(c, RandomStream(1, 0));
  ASSERT_EQ(r.completed.size(), 1u);
  const Entity& e = r.completed[0];
  EXPECT_DOUBLE_EQ(e.accumulators[TimeClass::VA], 10.0);
  EXPECT_DOUBLE_EQ(e.accumulators[TimeClass::WAIT], 0.0);
  EXPECT_DOUBLE_EQ(e.accumulators[TimeClass::TRANSFER], 0.0);
  EXPECT_DOUBLE_EQ(e.flow_time(), 10.0);
}

TEST(RunReplication, SecondBatchWaitsForTheServer) {
  const LineConfig c = make_line({10.0}, {}, 2);  // shift-start release: both at t=0
  const auto r = run_replication(c, RandomStream(1, 0));
  ASSERT_EQ(r.completed.size(), 2u);
  EXPECT_DOUBLE_EQ(r.completed[0].accumulators[TimeClass::WAIT], 0.0);
  EXPECT_DOUBLE_EQ(r.completed[1].accumulators[TimeClass::WAIT], 10.0);
  EXPECT_DOUBLE_EQ(r.completed[1].flow_time(), 20.0);
}

TEST(RunReplication, TransfersAndNvaAreClassified) {
  LineConfig c = make_line({3.0, 4.0}, {2.0}, 1);
  c.stations[1].value_class = ValueClass::NVA;
  const auto r = run_replication(c, RandomStream(1, 0));
  const Entity& e = r.completed.at(0);
  EXPECT_DOUBLE_EQ(e.accumulators[TimeClass::VA], 3.0);
  EXPECT_DOUBLE_EQ(e.accumulators[TimeClass::NVA], 4.0);
  EXPECT_DOUBLE_EQ(e.accumulators[TimeClass::TRANSFER], 2.0);
  EXPECT_DOUBLE_EQ(e.flow_time(), 9.0);
}

TEST(RunReplication, PerModuleTimeScalesWithBatchSize) {
  LineConfig c = make_line({99.0}, {}, 1);
  c.batch_size = 25;
  c.stations[0].per_module_time_min = 5.0;
  const auto r = run_replication(c, RandomStream(1, 0));
  EXPECT_DOUBLE_EQ(r.completed.at(0).flow_time(), 125.0);
}

TEST(RunReplication, InFlightBatchesAreCountedNotReported) {
  LineConfig c = make_line({10.0}, {}, 5);
  c.horizon_min = 25.0;
  const auto r = run_replication(c, RandomStream(1, 0));
  EXPECT_EQ(r.completed.size(), 2u);
  EXPECT_EQ(r.in_flight, 3u);
  EXPECT_DOUBLE_EQ(r.span.minutes, 25.0);
}

TEST(RunReplication, BatchesReleasedAfterTheHorizonAreIgnored) {
  LineConfig c = make_line({1.0}, {}, 5);
  c.release.rule = ReleaseRule::Interval;
  c.release.interval_min = 10.0;
  c.horizon_min = 25.0;
  const auto r = run_replication(c, RandomStream(1, 0));
  EXPECT_EQ(r.completed.size(), 3u);
  EXPECT_EQ(r.in_flight, 0u);
}

TEST(RunReplication, WarmupDiscardsEarlyBatches) {
  LineConfig c = make_line({1.0}, {}, 4);
  c.release.rule = ReleaseRule::Interval;
  c.release.interval_min = 10.0;
  c.warmup_min = 15.0;
  const auto r = run_replication(c, RandomStream(1, 0));
  EXPECT_EQ(r.warmup_discarded, 2u);
  EXPECT_EQ(r.completed.size(), 2u);
  for (const auto& rec : r.trace) EXPECT_GE(rec.start.minutes, 15.0);
}

TEST(RunReplication, RunEndsWhenTheLineEmpties) {
  const LineConfig c = make_line({2.0, 3.0}, {1.0}, 3);
  const auto r = run_replication(c, RandomStream(1, 0));
  // Station 1 is the bottleneck: last batch leaves at 2 + 1 + 3*3 = 12.
  EXPECT_DOUBLE_EQ(r.span.minutes, 12.0);
}

TEST(RunReplication, InvalidHorizonIsRejected) {
  const LineConfig c = make_line({1.0}, {}, 1);
  EXPECT_THROW(run_replication(c, RandomStream(1, 0), 0.0), SimulationError);
}

TEST(RunReplication, CalibratedLineMatchesReferenceTimeBuckets) {
  // Calibration targets: 36.7 / 50.34 / 230.55 / 12 minutes per batch.
  const LineConfig c = lgtest::shipped_config();
  const auto results = run_replications(c, 42, 30, c.horizon());
  double va = 0, nva = 0, wait = 0, tr = 0, n = 0;
  for (const auto& r : results)
    for (const auto& e : r.completed) {
      va += e.accumulators[TimeClass::VA];
      nva += e.accumulators[TimeClass::NVA];
      wait += e.accumulators[TimeClass::WAIT];
      tr += e.accumulators[TimeClass::TRANSFER];
      ++n;
    }
  EXPECT_NEAR(va / n, 36.7, 0.05 * 36.7);
  EXPECT_NEAR(nva / n, 50.34, 0.05 * 50.34);
  EXPECT_NEAR(wait / n, 230.55, 0.05 * 230.55);
  EXPECT_NEAR(tr / n, 12.0, 0.05 * 12.0);
}

TEST(RunReplications, OneReplicationEqualsASingleRun) {
  const LineConfig c = lgtest::shipped_config();
  const auto many = run_replications(c, 9, 1, c.horizon());
  const auto one = run_replication(c, RandomStream(9, 0));
  ASSERT_EQ(many.size(), 1u);
  ASSERT_EQ(many[0].completed.size(), one.completed.size());
  for (std::size_t i = 0; i < one.completed.size(); ++i)
    EXPECT_EQ(many[0].completed[i].flow_time(), one.completed[i].flow_time());
}

namespace {

LineConfig stochastic_line() {
  LineConfig c = make_line({3, 4, 2}, {1, 1}, 12, {1, 2, 1});
  c.stations[0].service_time = Distribution::triangular(1, 3, 6);
  c.stations[1].service_time = Distribution::exponential(4);
  c.stations[2].service_time = Distribution::truncnormal(2, 0.5, 1);
  c.transfers[0].duration = Distribution::exponential(1);
  return c;
}

std::vector<double> flows(const std::vector<ReplicationResult>& rs) {
  std::vector<double> out;
  for (const auto& r : rs)
    for (const auto& e : r.completed) out.push_back(e.flow_time());
  return out;
}

}  // namespace

TEST(RunReplications, ResultIMatchesReplicationIndexI) {
  const LineConfig c = stochastic_line();
  const auto rs = run_replications(c, 77, 6, c.horizon(), 3);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto single = run_replication(c, RandomStream(77, i));
    EXPECT_EQ(rs[i].replication_index, i);
    EXPECT_EQ(flows({rs[i]}), flows({single}));
  }
}

TEST(RunReplications, FixedSeedIsDeterministic) {
  const LineConfig c = stochastic_line();
  EXPECT_EQ(flows(run_replications(c, 5, 30, c.horizon())), flows(run_replications(c, 5, 30, c.horizon())));
}

TEST(RunReplications, WorkerCountDoesNotChangeResults) {
  // Oracle: sequential execution.
  const LineConfig c = stochastic_line();
  const auto seq = flows(run_replications(c, 5, 30, c.horizon(), 1));
  EXPECT_EQ(seq, flows(run_replications(c, 5, 30, c.horizon(), 2)));
  EXPECT_EQ(seq, flows(run_replications(c, 5, 30, c.horizon(), 7)));
}

TEST(RunReplications, DifferentReplicationsDiffer) {
  const LineConfig c = stochastic_line();
  const auto rs = run_replications(c, 5, 2, c.horizon());
  EXPECT_NE(flows({rs[0]}), flows({rs[1]}));
}

TEST(RunReplications, ZeroReplicationsRejected) {
  const LineConfig c = stochastic_line();
  EXPECT_THROW(run_replications(c, 5, 0, c.horizon()), OutOfRange);
}

TEST(RunReplications, ErrorsNameTheReplication) {
  LineConfig c = stochastic_line();
  try {
    run_replications(c, 5, 3, -1.0);
    FAIL() << "expected an error";
  } catch (const SimulationError& e) {
    EXPECT_NE(std::string(e.what()).find("replication 0"), std::string::npos);
  }
}
