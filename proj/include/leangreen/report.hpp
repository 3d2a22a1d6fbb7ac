#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "leangreen/config_io.hpp"
#include "leangreen/energy.hpp"
#include "leangreen/error.hpp"
#include "leangreen/line_model.hpp"
#include "leangreen/metrics.hpp"
#include "leangreen/simulator.hpp"
#include "leangreen/statistics.hpp"

namespace leangreen {

inline constexpr const char* kReportSchema = "leangreen.run-report/1";

enum class FactorMode { Supplied, Derived };

inline const char* to_string(FactorMode m) { return m == FactorMode::Supplied ? "supplied" : "derived"; }

struct TimeSummaries {
  StatSummary va, nva, wait, transfer, lead;
};

/// Per-station aggregates. Energies are kWh per completed batch; minutes
/// are per batch except `busy_server_min`, which is per replication.
struct StationReport {
  StationStats stats;
  std::string name;
  ValueClass value_class = ValueClass::VA;
  int servers = 1;
  double mean_service_min = 0.0;
  double busy_server_min = 0.0;
  double scheduled_server_min = 0.0;  // servers * (horizon - warmup)
  double power_active_kw = 0.0;
  double service_energy_kwh = 0.0;
  double idle_energy_kwh = 0.0;

  double energy_kwh() const { return service_energy_kwh + idle_energy_kwh; }
};

struct LinkReport {
  std::string from;
  std::string to;
  double mean_transfer_min = 0.0;
  double energy_kwh = 0.0;
};

struct MetricsBlock {
  double oee = 0.0;
  double oeee = 0.0;
  FactorMode mode = FactorMode::Supplied;
  OeeeFactors factors;
  std::optional<OeeeFactors> derived_factors;
  double pce_time = 0.0;
  double pce_energy = 0.0;
  std::vector<std::string> bottleneck_ranking;
  double takt_min = 0.0;
  double lead_time_min = 0.0;
  double takt_gap_min = 0.0;

  OeeeClass classification() const { return classify_oeee(oeee); }
};

struct RunReport {
  std::string config_name;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  double confidence = 0.95;
  double horizon_min = 0.0;
  double warmup_min = 0.0;
  StatSummary completed_batches;
  std::size_t in_flight_total = 0;
  TimeSummaries time_min;
  EnergyLedger energy;  // per batch, averaged over replications
  StatSummary energy_total_kwh;
  std::vector<StationReport> stations;
  std::vector<LinkReport> links;
  MetricsBlock metrics;
  std::vector<std::string> warnings;
  std::string timestamp;
};

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// OEEE factors computed from a finished run:
/// availability = busy server time / scheduled server time (servers times
/// the scheduled window from warmup to horizon),
/// performance = ideal cycle * completed batches / busy time (ideal cycle is
/// the sum of minimal service times), quality = product of yields,
/// sustainability = VA energy share.
inline OeeeFactors derive_factors(const RunReport& report, const LineConfig& config) {
  if (!(report.completed_batches.mean > 0)) throw InsufficientData("no completed batches to derive factors from");
  if (report.stations.size() != config.stations.size())
    throw ConfigReportMismatch("report and config list different stations");

  double busy = 0.0, scheduled = 0.0, ideal = 0.0, quality = 1.0;
  for (std::size_t j = 0; j < config.stations.size(); ++j) {
    const Station& s = config.stations[j];
    const StationReport& st = report.stations[j];
    busy += st.busy_server_min;
    scheduled += st.scheduled_server_min;
    ideal += s.effective_service(config.batch_size).minimum();
    quality *= s.yield_fraction;
  }
  OeeeFactors f;
  f.source = OeeeFactors::Source::Derived;
  f.availability = scheduled > 0 ? std::clamp(busy / scheduled, 0.0, 1.0) : 0.0;
  f.performance = busy > 0 ? std::clamp(ideal * report.completed_batches.mean / busy, 0.0, 1.0) : 0.0;
  f.quality = quality;
  f.sustainability = va_energy_share(report.energy);
  return f;
}

namespace detail {

struct RepAggregate {
  double va = 0, nva = 0, wait = 0, transfer = 0, lead = 0;
  EnergyLedger energy;  // per batch
  std::vector<double> station_wait, station_service, station_util, station_busy, station_scheduled;
  std::vector<double> station_service_kwh, station_idle_kwh, station_va_kwh;
  std::vector<double> link_time, link_kwh;
};

inline RepAggregate aggregate_replication(const LineConfig& cfg, const ReplicationResult& r) {
  const std::size_t ns = cfg.stations.size();
  const std::size_t nl = ns ? ns - 1 : 0;
  if (r.completed.empty())
    throw InsufficientData("replication " + std::to_string(r.replication_index) + " completed no batches");
  const double n = static_cast<double>(r.completed.size());

  RepAggregate a;
  a.station_wait.assign(ns, 0.0);
  a.station_service.assign(ns, 0.0);
  a.station_util.assign(ns, 0.0);
  a.station_busy.assign(ns, 0.0);
  a.station_scheduled.assign(ns, 0.0);
  a.station_service_kwh.assign(ns, 0.0);
  a.station_idle_kwh.assign(ns, 0.0);
  a.station_va_kwh.assign(ns, 0.0);
  a.link_time.assign(nl, 0.0);
  a.link_kwh.assign(nl, 0.0);

  for (const Entity& e : r.completed) {
    a.va += e.accumulators[TimeClass::VA];
    a.nva += e.accumulators[TimeClass::NVA];
    a.wait += e.accumulators[TimeClass::WAIT];
    a.transfer += e.accumulators[TimeClass::TRANSFER];
    a.lead += e.flow_time();
    for (std::size_t j = 0; j < ns; ++j) {
      a.station_wait[j] += e.waits[j];
      a.station_service[j] += e.services[j];
    }
    for (std::size_t k = 0; k < nl; ++k) a.link_time[k] += e.transfers[k];
  }
  a.va /= n;
  a.nva /= n;
  a.wait /= n;
  a.transfer /= n;
  a.lead /= n;
  for (auto& v : a.station_wait) v /= n;
  for (auto& v : a.station_service) v /= n;
  for (auto& v : a.link_time) v /= n;

  for (const ActivityRecord& rec : r.trace) {
    if (rec.where.kind == LocationKind::Link) {
      a.link_kwh[rec.where.index] += rec.energy_kwh / n;
    } else if (rec.time_class == TimeClass::WAIT) {
      a.station_idle_kwh[rec.where.index] += rec.energy_kwh / n;
    } else {
      a.station_service_kwh[rec.where.index] += rec.energy_kwh / n;
      if (rec.time_class == TimeClass::VA) a.station_va_kwh[rec.where.index] += rec.energy_kwh / n;
    }
  }
  a.energy = build_ledger(r.trace, cfg.emission_factor_kg_per_kwh, cfg.idle_bucket).scaled(1.0 / n);

  const double window = r.span - r.window_start;
  for (std::size_t j = 0; j < ns; ++j) {
    a.station_busy[j] = r.stations[j].busy_server_min;
    a.station_scheduled[j] = cfg.stations[j].servers * std::max(0.0, cfg.horizon() - r.window_start.minutes);
    a.station_util[j] = window > 0 ? r.stations[j].busy_server_min / (cfg.stations[j].servers * window) : 0.0;
  }
  return a;
}

inline double mean_of(const std::vector<RepAggregate>& reps, auto field) {
  double s = 0.0;
  for (const auto& r : reps) s += field(r);
  return s / static_cast<double>(reps.size());
}

inline StatSummary summarize_with_extremes(const std::vector<double>& rep_means, double lo, double hi,
                                           double confidence) {
  StatSummary s = summarize(rep_means, confidence);
  s.min_value = lo;
  s.max_value = hi;
  return s;
}

}  // namespace detail

struct ReportOptions {
  std::optional<FactorMode> factor_mode;  // default: supplied when the config has factors
  double confidence = 0.95;
  std::string timestamp;  // empty: current UTC time
};

/// Aggregates replication results into a report. Per-batch means are taken
/// within each replication first, then averaged across replications.
inline RunReport build_report(const LineConfig& cfg, const std::vector<ReplicationResult>& results,
                              std::uint64_t seed, const ReportOptions& opt = {}) {
  if (results.empty()) throw InsufficientData("no replications to report");
  const std::size_t ns = cfg.stations.size();
  const std::size_t nl = ns ? ns - 1 : 0;

  std::vector<detail::RepAggregate> reps;
  reps.reserve(results.size());
  for (const auto& r : results) reps.push_back(detail::aggregate_replication(cfg, r));

  RunReport rep;
  rep.config_name = cfg.name;
  rep.config_fingerprint = fingerprint(cfg);
  rep.seed = seed;
  rep.replications = results.size();
  rep.confidence = opt.confidence;
  rep.horizon_min = cfg.horizon();
  rep.warmup_min = cfg.warmup_min;
  rep.timestamp = opt.timestamp.empty() ? utc_timestamp() : opt.timestamp;

  // Cross-replication summaries with single-entity extremes.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::array<double, 5> lo{inf, inf, inf, inf, inf}, hi{-inf, -inf, -inf, -inf, -inf};
  std::vector<double> completed;
  for (const auto& r : results) {
    completed.push_back(static_cast<double>(r.completed.size()));
    rep.in_flight_total += r.in_flight;
    for (const Entity& e : r.completed) {
      const double v[5] = {e.accumulators[TimeClass::VA], e.accumulators[TimeClass::NVA],
                           e.accumulators[TimeClass::WAIT], e.accumulators[TimeClass::TRANSFER], e.flow_time()};
      for (int k = 0; k < 5; ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    }
  }
  auto column = [&](auto field) {
    std::vector<double> out;
    for (const auto& a : reps) out.push_back(field(a));
    return out;
  };
  const double c = opt.confidence;
  rep.time_min.va = detail::summarize_with_extremes(column([](auto& a) { return a.va; }), lo[0], hi[0], c);
  rep.time_min.nva = detail::summarize_with_extremes(column([](auto& a) { return a.nva; }), lo[1], hi[1], c);
  rep.time_min.wait = detail::summarize_with_extremes(column([](auto& a) { return a.wait; }), lo[2], hi[2], c);
  rep.time_min.transfer =
      detail::summarize_with_extremes(column([](auto& a) { return a.transfer; }), lo[3], hi[3], c);
  rep.time_min.lead = detail::summarize_with_extremes(column([](auto& a) { return a.lead; }), lo[4], hi[4], c);
  rep.completed_batches = summarize(completed, c);
  rep.energy_total_kwh = summarize(column([](auto& a) { return a.energy.total_kwh; }), c);

  rep.energy = EnergyLedger::from_buckets(detail::mean_of(reps, [](auto& a) { return a.energy.va_kwh; }),
                                          detail::mean_of(reps, [](auto& a) { return a.energy.nva_kwh; }),
                                          detail::mean_of(reps, [](auto& a) { return a.energy.transport_kwh; }),
                                          cfg.emission_factor_kg_per_kwh,
                                          detail::mean_of(reps, [](auto& a) { return a.energy.idle_kwh; }));

  for (std::size_t j = 0; j < ns; ++j) {
    const Station& s = cfg.stations[j];
    StationReport st;
    st.stats.station_id = s.id;
    st.name = s.name;
    st.value_class = s.value_class;
    st.servers = s.servers;
    st.power_active_kw = s.power_active_kw;
    st.stats.utilization = std::clamp(detail::mean_of(reps, [j](auto& a) { return a.station_util[j]; }), 0.0, 1.0);
    st.stats.mean_queue_wait = detail::mean_of(reps, [j](auto& a) { return a.station_wait[j]; });
    st.mean_service_min = detail::mean_of(reps, [j](auto& a) { return a.station_service[j]; });
    st.busy_server_min = detail::mean_of(reps, [j](auto& a) { return a.station_busy[j]; });
    st.scheduled_server_min = detail::mean_of(reps, [j](auto& a) { return a.station_scheduled[j]; });
    st.service_energy_kwh = detail::mean_of(reps, [j](auto& a) { return a.station_service_kwh[j]; });
    st.idle_energy_kwh = detail::mean_of(reps, [j](auto& a) { return a.station_idle_kwh[j]; });
    const double va_min = s.value_class == ValueClass::VA ? st.mean_service_min : 0.0;
    const double cycle = st.stats.mean_queue_wait + st.mean_service_min;
    st.stats.pce_time = cycle > 0 ? pce_time(std::min(va_min, cycle), cycle) : 0.0;
    const double va_kwh = detail::mean_of(reps, [j](auto& a) { return a.station_va_kwh[j]; });
    st.stats.pce_energy = st.energy_kwh() > 0 ? pce_energy(std::min(va_kwh, st.energy_kwh()), st.energy_kwh()) : 0.0;
    rep.stations.push_back(std::move(st));
  }
  for (std::size_t k = 0; k < nl; ++k) {
    LinkReport l;
    l.from = cfg.stations[k].id;
    l.to = cfg.stations[k + 1].id;
    l.mean_transfer_min = detail::mean_of(reps, [k](auto& a) { return a.link_time[k]; });
    l.energy_kwh = detail::mean_of(reps, [k](auto& a) { return a.link_kwh[k]; });
    rep.links.push_back(l);
  }

  MetricsBlock& m = rep.metrics;
  std::vector<StationStats> stats;
  for (const auto& st : rep.stations) stats.push_back(st.stats);
  m.bottleneck_ranking = rank_bottlenecks(stats);
  m.takt_min = takt_time(cfg);
  m.lead_time_min = rep.time_min.lead.mean;
  m.takt_gap_min = m.lead_time_min - m.takt_min;
  m.pce_time = m.lead_time_min > 0 ? pce_time(std::min(rep.time_min.va.mean, m.lead_time_min), m.lead_time_min) : 0.0;
  m.pce_energy = rep.energy.total_kwh > 0 ? pce_energy(rep.energy.va_kwh, rep.energy.total_kwh) : 0.0;
  if (rep.energy.total_kwh > 0) m.derived_factors = derive_factors(rep, cfg);

  m.mode = opt.factor_mode.value_or(cfg.oeee_factors ? FactorMode::Supplied : FactorMode::Derived);
  if (m.mode == FactorMode::Supplied) {
    if (!cfg.oeee_factors) throw SchemaError("oeee_factors", "supplied factor mode needs oeee_factors in the config");
    m.factors = *cfg.oeee_factors;
    m.factors.source = OeeeFactors::Source::Supplied;
  } else {
    if (!m.derived_factors) throw ZeroTotalEnergy("derived factors need a run with non-zero energy");
    m.factors = *m.derived_factors;
  }
  m.oee = compute_oee(m.factors.availability, m.factors.performance, m.factors.quality);
  m.oeee = compute_oeee(m.factors);

  if (results.size() < 2) rep.warnings.push_back("half widths need at least two replications; reported as null");
  if (rep.in_flight_total > 0)
    rep.warnings.push_back(std::to_string(rep.in_flight_total) +
                           " batch(es) were still in the line at the end of a replication and are excluded");
  return rep;
}

/// Runs replications and builds the report in one call.
inline RunReport simulate(const LineConfig& cfg, std::uint64_t seed, std::size_t reps, const ReportOptions& opt = {},
                          unsigned workers = 0) {
  return build_report(cfg, run_replications(cfg, seed, reps, cfg.horizon(), workers), seed, opt);
}

/// Re-checks the arithmetic invariants of a report; throws ConsistencyError.
inline void verify_report(const RunReport& r) {
  auto fail = [](const std::string& what) { throw ConsistencyError("report invariant violated: " + what); };
  const auto& t = r.time_min;
  const double sum = t.va.mean + t.nva.mean + t.wait.mean + t.transfer.mean;
  if (std::abs(sum - t.lead.mean) > 1e-9 * std::max(1.0, std::abs(t.lead.mean)))
    fail("time buckets do not sum to lead time");
  for (const StatSummary* s : {&t.va, &t.nva, &t.wait, &t.transfer, &t.lead}) {
    if (s->half_width && *s->half_width < 0) fail("negative half width");
    if (s->min_avg > s->mean + 1e-9 * std::max(1.0, std::abs(s->mean)) ||
        s->mean > s->max_avg + 1e-9 * std::max(1.0, std::abs(s->mean)))
      fail("mean outside the range of replication averages");
  }
  const auto& e = r.energy;
  const double esum = e.va_kwh + e.nva_kwh + e.transport_kwh + e.idle_kwh;
  if (std::abs(esum - e.total_kwh) > 1e-9 * std::max(1.0, e.total_kwh)) fail("energy buckets do not sum to total");
  for (double v : {e.va_kwh, e.nva_kwh, e.transport_kwh, e.idle_kwh})
    if (v < 0) fail("negative energy bucket");
  for (const auto& s : r.stations) {
    for (double v : {s.stats.utilization, s.stats.pce_time, s.stats.pce_energy})
      if (!(v >= 0 && v <= 1)) fail("station fraction outside [0,1] at " + s.stats.station_id);
    if (s.stats.mean_queue_wait < 0) fail("negative queue wait at " + s.stats.station_id);
  }
  const auto& m = r.metrics;
  if (std::abs(m.oeee - m.oee * m.factors.sustainability) > 1e-12) fail("oeee differs from oee * sustainability");
  if (std::abs(m.takt_gap_min - (m.lead_time_min - m.takt_min)) > 1e-9 * std::max(1.0, m.lead_time_min))
    fail("takt gap differs from lead - takt");
  if (m.bottleneck_ranking.size() != r.stations.size()) fail("bottleneck ranking is not a permutation of stations");
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline OrderedJson summary_to_json(const StatSummary& s) {
  OrderedJson j;
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["half_width"] = s.half_width ? OrderedJson(*s.half_width) : OrderedJson(nullptr);
  j["min_avg"] = s.min_avg;
  j["max_avg"] = s.max_avg;
  j["min_value"] = s.min_value;
  j["max_value"] = s.max_value;
  return j;
}

inline StatSummary summary_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  StatSummary s;
  s.n = static_cast<std::size_t>(r.integer("n"));
  s.mean = r.number("mean");
  const Json& hw = r.required("half_width");
  if (!hw.is_null()) s.half_width = ObjectReader::as_number(hw, r.field("half_width"));
  s.min_avg = r.number("min_avg");
  s.max_avg = r.number("max_avg");
  s.min_value = r.number("min_value");
  s.max_value = r.number("max_value");
  r.finish();
  return s;
}

inline OrderedJson times_to_json(const TimeSummaries& t, double k) {
  OrderedJson j;
  j["va"] = summary_to_json(t.va.scaled(k));
  j["nva"] = summary_to_json(t.nva.scaled(k));
  j["wait"] = summary_to_json(t.wait.scaled(k));
  j["transfer"] = summary_to_json(t.transfer.scaled(k));
  j["lead"] = summary_to_json(t.lead.scaled(k));
  return j;
}

inline TimeSummaries times_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  TimeSummaries t;
  t.va = summary_from_json(r.required("va"), r.field("va"));
  t.nva = summary_from_json(r.required("nva"), r.field("nva"));
  t.wait = summary_from_json(r.required("wait"), r.field("wait"));
  t.transfer = summary_from_json(r.required("transfer"), r.field("transfer"));
  t.lead = summary_from_json(r.required("lead"), r.field("lead"));
  r.finish();
  return t;
}

inline OrderedJson ledger_to_json(const EnergyLedger& l) {
  OrderedJson j;
  j["va_kwh"] = l.va_kwh;
  j["nva_kwh"] = l.nva_kwh;
  j["transport_kwh"] = l.transport_kwh;
  if (l.idle_kwh != 0.0) j["idle_kwh"] = l.idle_kwh;
  j["total_kwh"] = l.total_kwh;
  if (l.co2e_kg) j["co2e_kg"] = *l.co2e_kg;
  return j;
}

inline EnergyLedger ledger_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  EnergyLedger l;
  l.va_kwh = r.number("va_kwh");
  l.nva_kwh = r.number("nva_kwh");
  l.transport_kwh = r.number("transport_kwh");
  l.idle_kwh = r.number_or("idle_kwh", 0.0);
  l.total_kwh = r.number("total_kwh");
  if (const Json* c = r.optional("co2e_kg")) l.co2e_kg = ObjectReader::as_number(*c, r.field("co2e_kg"));
  r.finish();
  return l;
}

inline OrderedJson report_factors_to_json(const OeeeFactors& f, FactorMode mode) {
  OrderedJson j;
  j["mode"] = to_string(mode);
  j["a"] = f.availability;
  j["p"] = f.performance;
  j["q"] = f.quality;
  j["s"] = f.sustainability;
  return j;
}

inline OeeeFactors report_factors_from_json(const Json& j, const std::string& path, FactorMode* mode) {
  ObjectReader r(j, path);
  const std::string m = r.string("mode");
  FactorMode fm;
  if (m == "supplied") fm = FactorMode::Supplied;
  else if (m == "derived") fm = FactorMode::Derived;
  else throw SchemaError(r.field("mode"), "expected \"supplied\" or \"derived\"");
  if (mode) *mode = fm;
  OeeeFactors f;
  f.availability = r.number("a");
  f.performance = r.number("p");
  f.quality = r.number("q");
  f.sustainability = r.number("s");
  f.source = fm == FactorMode::Supplied ? OeeeFactors::Source::Supplied : OeeeFactors::Source::Derived;
  r.finish();
  return f;
}

}  // namespace detail

inline OrderedJson report_to_json(const RunReport& r) {
  OrderedJson j;
  j["schema"] = kReportSchema;
  j["config_name"] = r.config_name;
  j["config_fingerprint"] = r.config_fingerprint;
  j["seed"] = r.seed;
  j["replications"] = r.replications;
  j["confidence"] = r.confidence;
  j["horizon_min"] = r.horizon_min;
  j["warmup_min"] = r.warmup_min;
  j["completed_batches"] = detail::summary_to_json(r.completed_batches);
  j["in_flight_total"] = r.in_flight_total;
  j["time_min"] = detail::times_to_json(r.time_min, 1.0);
  j["time_h"] = detail::times_to_json(r.time_min, 1.0 / kMinutesPerHour);
  j["energy_basis"] = "per_batch";
  j["energy"] = detail::ledger_to_json(r.energy);
  j["energy_total_kwh"] = detail::summary_to_json(r.energy_total_kwh);

  OrderedJson stations = OrderedJson::array();
  for (const auto& s : r.stations) {
    OrderedJson o;
    o["station_id"] = s.stats.station_id;
    o["name"] = s.name;
    o["value_class"] = std::string(to_string(s.value_class));
    o["servers"] = s.servers;
    o["utilization"] = s.stats.utilization;
    o["mean_queue_wait"] = s.stats.mean_queue_wait;
    o["mean_service_min"] = s.mean_service_min;
    o["busy_server_min"] = s.busy_server_min;
    o["scheduled_server_min"] = s.scheduled_server_min;
    o["power_active_kw"] = s.power_active_kw;
    o["service_energy_kwh"] = s.service_energy_kwh;
    o["idle_energy_kwh"] = s.idle_energy_kwh;
    o["pce_time"] = s.stats.pce_time;
    o["pce_energy"] = s.stats.pce_energy;
    stations.push_back(std::move(o));
  }
  j["stations"] = std::move(stations);

  OrderedJson links = OrderedJson::array();
  for (const auto& l : r.links) {
    OrderedJson o;
    o["from"] = l.from;
    o["to"] = l.to;
    o["mean_transfer_min"] = l.mean_transfer_min;
    o["energy_kwh"] = l.energy_kwh;
    links.push_back(std::move(o));
  }
  j["links"] = std::move(links);

  const MetricsBlock& m = r.metrics;
  OrderedJson mj;
  mj["oee"] = m.oee;
  mj["oeee"] = m.oeee;
  mj["oeee_percent"] = percent_1dp(m.oeee);
  mj["classification"] = to_string(m.classification());
  mj["factors"] = detail::report_factors_to_json(m.factors, m.mode);
  mj["derived_factors"] = m.derived_factors
                              ? detail::report_factors_to_json(*m.derived_factors, FactorMode::Derived)
                              : OrderedJson(nullptr);
  mj["pce_time"] = m.pce_time;
  mj["pce_energy"] = m.pce_energy;
  OrderedJson pce = OrderedJson::array();
  for (const auto& s : r.stations) {
    OrderedJson o;
    o["station_id"] = s.stats.station_id;
    o["pce_time"] = s.stats.pce_time;
    o["pce_energy"] = s.stats.pce_energy;
    pce.push_back(std::move(o));
  }
  mj["pce_per_station"] = std::move(pce);
  mj["bottleneck_ranking"] = m.bottleneck_ranking;
  mj["takt_min"] = m.takt_min;
  mj["lead_time_min"] = m.lead_time_min;
  mj["takt_gap_min"] = m.takt_gap_min;
  j["metrics"] = std::move(mj);
  j["warnings"] = r.warnings;
  j["timestamp"] = r.timestamp;
  return j;
}

inline std::string serialize_report(const RunReport& r) { return report_to_json(r).dump(2) + "\n"; }

/// Parses a report document and re-verifies its invariants, including the
/// redundant hour-based summaries and per-station PCE listing.
inline RunReport report_from_json(const Json& j) {
  detail::ObjectReader r(j, "");
  RunReport rep;
  if (r.string("schema") != kReportSchema) throw SchemaError("schema", "unsupported report schema");
  rep.config_name = r.string("config_name");
  rep.config_fingerprint = r.string("config_fingerprint");
  rep.seed = r.required("seed").get<std::uint64_t>();
  rep.replications = static_cast<std::size_t>(r.integer("replications"));
  rep.confidence = r.number("confidence");
  rep.horizon_min = r.number("horizon_min");
  rep.warmup_min = r.number("warmup_min");
  rep.completed_batches = detail::summary_from_json(r.required("completed_batches"), "completed_batches");
  rep.in_flight_total = static_cast<std::size_t>(r.integer("in_flight_total"));
  rep.time_min = detail::times_from_json(r.required("time_min"), "time_min");
  const TimeSummaries hours = detail::times_from_json(r.required("time_h"), "time_h");
  if (r.string("energy_basis") != "per_batch") throw SchemaError("energy_basis", "expected \"per_batch\"");
  rep.energy = detail::ledger_from_json(r.required("energy"), "energy");
  rep.energy_total_kwh = detail::summary_from_json(r.required("energy_total_kwh"), "energy_total_kwh");

  const Json& stations = r.required("stations");
  if (!stations.is_array()) throw SchemaError("stations", "expected an array");
  for (std::size_t i = 0; i < stations.size(); ++i) {
    detail::ObjectReader o(stations[i], "stations[" + std::to_string(i) + "]");
    StationReport s;
    s.stats.station_id = o.string("station_id");
    s.name = o.string("name");
    auto vc = parse_value_class(o.string("value_class"));
    if (!vc) throw SchemaError(o.field("value_class"), "expected \"VA\" or \"NVA\"");
    s.value_class = *vc;
    s.servers = o.integer("servers");
    s.stats.utilization = o.number("utilization");
    s.stats.mean_queue_wait = o.number("mean_queue_wait");
    s.mean_service_min = o.number("mean_service_min");
    s.busy_server_min = o.number("busy_server_min");
    s.scheduled_server_min = o.number("scheduled_server_min");
    s.power_active_kw = o.number("power_active_kw");
    s.service_energy_kwh = o.number("service_energy_kwh");
    s.idle_energy_kwh = o.number("idle_energy_kwh");
    s.stats.pce_time = o.number("pce_time");
    s.stats.pce_energy = o.number("pce_energy");
    o.finish();
    rep.stations.push_back(std::move(s));
  }
  const Json& links = r.required("links");
  if (!links.is_array()) throw SchemaError("links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    detail::ObjectReader o(links[i], "links[" + std::to_string(i) + "]");
    LinkReport l;
    l.from = o.string("from");
    l.to = o.string("to");
    l.mean_transfer_min = o.number("mean_transfer_min");
    l.energy_kwh = o.number("energy_kwh");
    o.finish();
    rep.links.push_back(l);
  }

  detail::ObjectReader mr(r.required("metrics"), "metrics");
  MetricsBlock& m = rep.metrics;
  m.oee = mr.number("oee");
  m.oeee = mr.number("oeee");
  const double pct = mr.number("oeee_percent");
  const std::string cls = mr.string("classification");
  m.factors = detail::report_factors_from_json(mr.required("factors"), "metrics.factors", &m.mode);
  if (const Json& d = mr.required("derived_factors"); !d.is_null())
    m.derived_factors = detail::report_factors_from_json(d, "metrics.derived_factors", nullptr);
  m.pce_time = mr.number("pce_time");
  m.pce_energy = mr.number("pce_energy");
  const Json& pce = mr.required("pce_per_station");
  m.bottleneck_ranking = mr.required("bottleneck_ranking").get<std::vector<std::string>>();
  m.takt_min = mr.number("takt_min");
  m.lead_time_min = mr.number("lead_time_min");
  m.takt_gap_min = mr.number("takt_gap_min");
  mr.finish();
  rep.warnings = r.required("warnings").get<std::vector<std::string>>();
  rep.timestamp = r.string("timestamp");
  r.finish();

  // Redundant fields must agree with the primary ones.
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); };
  const std::pair<const StatSummary*, const StatSummary*> pairs[] = {{&rep.time_min.va, &hours.va},
                                                                     {&rep.time_min.nva, &hours.nva},
                                                                     {&rep.time_min.wait, &hours.wait},
                                                                     {&rep.time_min.transfer, &hours.transfer},
                                                                     {&rep.time_min.lead, &hours.lead}};
  for (auto [mins, hrs] : pairs)
    if (!close(mins->mean / kMinutesPerHour, hrs->mean)) throw ConsistencyError("time_h disagrees with time_min");
  if (pct != percent_1dp(m.oeee)) throw ConsistencyError("oeee_percent disagrees with oeee");
  if (cls != to_string(m.classification())) throw ConsistencyError("classification disagrees with oeee");
  if (!pce.is_array() || pce.size() != rep.stations.size())
    throw ConsistencyError("pce_per_station does not list every station");
  for (std::size_t i = 0; i < pce.size(); ++i)
    if (pce[i].at("station_id") != rep.stations[i].stats.station_id ||
        pce[i].at("pce_time").get<double>() != rep.stations[i].stats.pce_time ||
        pce[i].at("pce_energy").get<double>() != rep.stations[i].stats.pce_energy)
      throw ConsistencyError("pce_per_station disagrees with stations");
  if (std::abs(m.oee - m.factors.availability * m.factors.performance * m.factors.quality) > 1e-12)
    throw ConsistencyError("oee differs from the product of its factors");
  verify_report(rep);
  return rep;
}

inline RunReport load_report(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("empty report document");
  return report_from_json(parse_json_text(text));
}

}  // namespace leangreen
