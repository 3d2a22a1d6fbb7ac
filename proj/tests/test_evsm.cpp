#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

using namespace leangreen;

namespace {

ReportOptions opts() { return {std::nullopt, 0.95, "2026-01-01T00:00:00Z"}; }

const RunReport& current_report() {
  static const RunReport r = simulate(lgtest::shipped_config(), 42, 30, opts());
  return r;
}

LineConfig trivial_line() {
  LineConfig c = lgtest::make_line({4.0}, {}, 3);
  c.name = "single press";
  c.stations[0].name = "Press";
  c.demand_per_day = 10;
  c.available_time_min = 480;
  c.release.rule = ReleaseRule::Interval;
  c.release.interval_min = 5.0;
  return c;
}

// Compares against tests/golden/<name>. With LG_UPDATE_GOLDEN set, the
// fixture is rewritten instead.
void expect_golden(const std::string& name, const std::string& actual) {
  const std::string path = lgtest::source_path("tests/golden/" + name);
  if (std::getenv("LG_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  std::ifstream in(path, std::ios::binary);
  ASSERT_TRUE(in) << "missing golden fixture " << path;
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(actual, ss.str()) << "rendering differs from " << path;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + needle.size())) ++n;
  return n;
}

}  // namespace

TEST(BuildEvsm, CurrentStateTotals) {
  const EvsmDocument d = build_evsm(lgtest::shipped_config(), current_report());
  ASSERT_EQ(d.stations.size(), 9u);
  ASSERT_EQ(d.links.size(), 8u);
  EXPECT_GE(d.totals.lead_time_min, 329.1);
  EXPECT_LE(d.totals.lead_time_min, 329.6);
  EXPECT_NEAR(d.totals.va_min, 36.7, 0.005 * 36.7);
  EXPECT_NEAR(d.totals.nva_min, 50.34, 0.005 * 50.34);
  EXPECT_NEAR(d.totals.wait_min, 230.55, 0.005 * 230.55);
  EXPECT_NEAR(d.totals.transfer_min, 12.0, 1e-9);
  EXPECT_NEAR(d.totals.energy.total_kwh, 86.5, 0.005 * 86.5);
  EXPECT_DOUBLE_EQ(d.takt_min, 168.0);
}

TEST(BuildEvsm, TotalsEqualTheReportAggregates) {
  const RunReport& r = current_report();
  const EvsmDocument d = build_evsm(lgtest::shipped_config(), r);
  EXPECT_NEAR(d.totals.va_min, r.time_min.va.mean, 1e-9);
  EXPECT_NEAR(d.totals.nva_min, r.time_min.nva.mean, 1e-9);
  EXPECT_NEAR(d.totals.wait_min, r.time_min.wait.mean, 1e-9);
  EXPECT_NEAR(d.totals.transfer_min, r.time_min.transfer.mean, 1e-9);
  EXPECT_NEAR(d.totals.lead_time_min, r.time_min.lead.mean, 1e-9);
  EXPECT_EQ(d.totals.energy.total_kwh, r.energy.total_kwh);
  double e = 0;
  for (const auto& s : d.stations) e += s.energy_kwh;
  for (const auto& l : d.links) e += l.energy_kwh;
  EXPECT_NEAR(e, r.energy.total_kwh, 1e-9);
}

TEST(BuildEvsm, StationOrderFollowsTheLine) {
  const LineConfig c = lgtest::shipped_config();
  const EvsmDocument d = build_evsm(c, current_report());
  for (std::size_t i = 0; i < c.stations.size(); ++i) EXPECT_EQ(d.stations[i].id, c.stations[i].id);
}

TEST(BuildEvsm, SingleStationTotalsEqualTheEntry) {
  const LineConfig c = trivial_line();
  const EvsmDocument d = build_evsm(c, simulate(c, 1, 2, opts()));
  ASSERT_EQ(d.stations.size(), 1u);
  EXPECT_TRUE(d.links.empty());
  const auto& s = d.stations[0];
  EXPECT_DOUBLE_EQ(d.totals.va_min, s.va_time_min);
  EXPECT_DOUBLE_EQ(d.totals.wait_min, s.wait_before_min);
  EXPECT_DOUBLE_EQ(d.totals.lead_time_min, s.cycle_time_min + s.wait_before_min);
  EXPECT_NEAR(d.totals.energy.total_kwh, s.energy_kwh, 1e-12);
}

TEST(BuildEvsm, ScenarioOneTotals) {
  const LineConfig c = apply_delta(lgtest::shipped_config(), lgtest::shipped_delta("scenario1"));
  const EvsmDocument d = build_evsm(c, simulate(c, 42, 30, opts()));
  EXPECT_NEAR(d.totals.lead_time_min, 158.23, 0.005 * 158.23);
  EXPECT_NEAR(d.totals.va_min, 33.45, 0.005 * 33.45);
  EXPECT_NEAR(d.totals.nva_min, 20.38, 0.005 * 20.38);
  EXPECT_NEAR(d.totals.wait_min, 97.8, 0.005 * 97.8);
  EXPECT_NEAR(d.totals.transfer_min, 6.6, 1e-9);
}

TEST(BuildEvsm, RejectsReportFromAnotherConfig) {
  LineConfig other = lgtest::shipped_config();
  other.stations[0].power_active_kw += 1;
  EXPECT_THROW(build_evsm(other, current_report()), FingerprintMismatch);
  EXPECT_THROW(build_evsm(trivial_line(), current_report()), ConsistencyError);
}

TEST(BuildEvsm, RejectsTamperedReport) {
  RunReport r = current_report();
  r.stations[3].stats.station_id = "nope";
  EXPECT_THROW(build_evsm(lgtest::shipped_config(), r), ConfigReportMismatch);
  r = current_report();
  r.stations[2].stats.mean_queue_wait += 5;
  EXPECT_THROW(build_evsm(lgtest::shipped_config(), r), ConfigReportMismatch);
  r = current_report();
  r.links.pop_back();
  EXPECT_THROW(build_evsm(lgtest::shipped_config(), r), ConfigReportMismatch);
}

TEST(RenderText, TrivialGolden) {
  const LineConfig c = trivial_line();
  expect_golden("evsm_trivial.txt", render_text(build_evsm(c, simulate(c, 1, 2, opts()))));
}

TEST(RenderText, CurrentStateGolden) {
  const std::string text = render_text(build_evsm(lgtest::shipped_config(), current_report()));
  EXPECT_NE(text.find("takt 168.0"), std::string::npos);
  EXPECT_NE(text.find("| wait 89.1 |"), std::string::npos);
  expect_golden("evsm_current_state.txt", text);
}

TEST(RenderText, StableAcrossCalls) {
  const EvsmDocument d = build_evsm(lgtest::shipped_config(), current_report());
  EXPECT_EQ(render_text(d), render_text(d));
  EXPECT_EQ(render_dot(d), render_dot(d));
}

TEST(RenderText, NoWaitSegmentsWhenNothingQueues) {
  // Releases far apart so no batch ever waits.
  LineConfig c = lgtest::make_line({2.0, 3.0, 1.0}, {0.5, 0.5}, 4);
  c.release.rule = ReleaseRule::Interval;
  c.release.interval_min = 20.0;
  const EvsmDocument d = build_evsm(c, simulate(c, 3, 2, opts()));
  EXPECT_EQ(d.totals.wait_min, 0.0);
  const std::string text = render_text(d);
  const std::string ladder = text.substr(text.find("ladder"), text.find("\nlead") - text.find("ladder"));
  EXPECT_EQ(ladder.find("| wait "), std::string::npos) << ladder;
}

TEST(RenderText, EveryStationAppearsOnce) {
  const LineConfig c = lgtest::shipped_config();
  const std::string text = render_text(build_evsm(c, current_report()));
  for (const auto& s : c.stations) EXPECT_EQ(count(text, "  " + s.name + " "), 1u) << s.name;
}

TEST(RenderDot, OneStationHasOneNodeAndNoEdges) {
  const LineConfig c = trivial_line();
  const std::string dot = render_dot(build_evsm(c, simulate(c, 1, 2, opts())));
  std::size_t nodes = 0, edges = 0;
  EXPECT_EQ(lgtest::DotChecker(dot).check(nodes, edges), "");
  EXPECT_EQ(nodes, 1u);
  EXPECT_EQ(edges, 0u);
}

TEST(RenderDot, NineStationLineParses) {
  const std::string dot = render_dot(build_evsm(lgtest::shipped_config(), current_report()));
  std::size_t nodes = 0, edges = 0;
  EXPECT_EQ(lgtest::DotChecker(dot).check(nodes, edges), "");
  EXPECT_EQ(nodes, 9u);
  EXPECT_EQ(edges, 8u);
  EXPECT_EQ(count(dot, "style=dashed"), 3u);  // three inspection stations
  EXPECT_EQ(dot.find('\r'), std::string::npos);
}

TEST(RenderDot, EscapesQuotesInNames) {
  LineConfig c = trivial_line();
  c.stations[0].name = "Press \"B\" \\ 2";
  const std::string dot = render_dot(build_evsm(c, simulate(c, 1, 2, opts())));
  std::size_t nodes = 0, edges = 0;
  EXPECT_EQ(lgtest::DotChecker(dot).check(nodes, edges), "");
  EXPECT_EQ(nodes, 1u);
}

TEST(DotChecker, RejectsMalformedInput) {
  std::size_t n = 0, e = 0;
  EXPECT_NE(lgtest::DotChecker("digraph { a -> }").check(n, e), "");
  EXPECT_NE(lgtest::DotChecker("graph g { a; }").check(n, e), "");
  EXPECT_NE(lgtest::DotChecker("digraph g { a [label=\"x]; }").check(n, e), "");
}
