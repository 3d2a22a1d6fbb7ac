#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

#include "leangreen/config_io.hpp"
#include "leangreen/error.hpp"
#include "leangreen/evsm.hpp"
#include "leangreen/report.hpp"
#include "leangreen/scenario.hpp"
#include "leangreen/text_format.hpp"

namespace leangreen::cli {

enum ExitCode : int {
  kOk = 0,
  kViolations = 1,
  kInputError = 2,
  kSimulationError = 3,
  kConsistencyError = 4,
};

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

namespace detail {

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw InputError("cannot write " + path);
}

/// Runs a command body and maps library failures onto exit codes.
inline int guarded(Streams io, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    io.err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConsistencyError& e) {
    io.err << "consistency error: " << e.what() << "\n";
    return kConsistencyError;
  } catch (const SimulationError& e) {
    io.err << "simulation error: " << e.what() << "\n";
    return kSimulationError;
  } catch (const DomainError& e) {
    io.err << "simulation error: " << e.what() << "\n";
    return kSimulationError;
  }
}

/// Loads a config and prints its violations; returns nullopt when invalid.
inline std::optional<LineConfig> load_valid(const std::string& path, Streams io) {
  LineConfig c = load_config_file(path);
  const auto v = validate(c);
  if (v.empty()) return c;
  for (const auto& x : v) io.err << "violation: " << x.to_string() << "\n";
  return std::nullopt;
}

inline std::string summary_table(const RunReport& r) {
  using leangreen::detail::fmt;
  using leangreen::detail::pad_left;
  using leangreen::detail::pad_right;
  std::string s = "replications " + std::to_string(r.replications) + ", seed " + std::to_string(r.seed) +
                  ", config " + r.config_fingerprint + "\n";
  s += pad_right("time per batch", 16) + pad_left("mean min", 11) + pad_left("half width", 12) + pad_left("mean h", 10) +
       "\n";
  const std::pair<const char*, const StatSummary*> rows[] = {{"VA", &r.time_min.va},
                                                             {"NVA", &r.time_min.nva},
                                                             {"wait", &r.time_min.wait},
                                                             {"transfer", &r.time_min.transfer},
                                                             {"lead", &r.time_min.lead}};
  for (auto [name, st] : rows)
    s += pad_right(name, 16) + pad_left(fmt("%.2f", st->mean), 11) +
         pad_left(st->half_width ? fmt("%.3f", *st->half_width) : std::string("-"), 12) +
         pad_left(fmt("%.4f", st->mean / kMinutesPerHour), 10) + "\n";
  s += "energy per batch: VA " + fmt("%.2f", r.energy.va_kwh) + " kWh, NVA " + fmt("%.2f", r.energy.nva_kwh) +
       " kWh, transport " + fmt("%.2f", r.energy.transport_kwh) + " kWh, total " + fmt("%.2f", r.energy.total_kwh) +
       " kWh";
  if (r.energy.co2e_kg) s += ", " + fmt("%.2f", *r.energy.co2e_kg) + " kg CO2e";
  s += "\n";
  const auto& m = r.metrics;
  s += "OEEE " + fmt("%.1f", percent_1dp(m.oeee)) + "% (" + to_string(m.mode) + " factors, " +
       to_string(m.classification()) + "), OEE " + fmt("%.1f", percent_1dp(m.oee)) + "%\n";
  s += "PCE time " + fmt("%.1f", percent_1dp(m.pce_time)) + "%, PCE energy " + fmt("%.1f", percent_1dp(m.pce_energy)) +
       "%\n";
  s += "takt " + fmt("%.1f", m.takt_min) + " min, lead " + fmt("%.1f", m.lead_time_min) + " min, gap " +
       fmt("%.1f", m.takt_gap_min) + " min\n";
  s += "bottlenecks:";
  for (std::size_t i = 0; i < m.bottleneck_ranking.size() && i < 3; ++i) s += " " + m.bottleneck_ranking[i];
  s += "\n";
  return s;
}

}  // namespace detail

inline int cmd_validate(const std::string& config_path, Streams io = {}) {
  return detail::guarded(io, [&] {
    const LineConfig c = load_config_file(config_path);
    const auto v = validate(c);
    for (const auto& x : v) io.out << x.to_string() << "\n";
    if (!v.empty()) return int(kViolations);
    io.out << "ok: " << c.stations.size() << " stations, takt " << leangreen::detail::fmt("%.1f", takt_time(c))
           << " min\n";
    return int(kOk);
  });
}

struct SimulateOptions {
  std::string config_path;
  std::size_t reps = 30;
  std::uint64_t seed = 42;
  std::string out_path;               // empty: JSON to the output stream
  std::optional<FactorMode> factors;  // empty: supplied when present in config
  unsigned workers = 0;
  std::string timestamp;  // fixed timestamp, mainly for tests
};

inline std::optional<FactorMode> parse_factor_mode(const std::string& s) {
  if (s == "supplied") return FactorMode::Supplied;
  if (s == "derived") return FactorMode::Derived;
  return std::nullopt;
}

/// Writes the report JSON to --out (summary on the output stream) or, without
/// --out, the JSON to the output stream and the summary to the error stream.
inline int cmd_simulate(const SimulateOptions& o, Streams io = {}) {
  return detail::guarded(io, [&] {
    auto c = detail::load_valid(o.config_path, io);
    if (!c) return int(kViolations);
    if (o.reps < 1) throw InputError("--reps must be at least 1");
    if (o.reps == 1) io.err << "warning: one replication gives no half widths; they are reported as null\n";
    const RunReport r = simulate(*c, o.seed, o.reps, {o.factors, 0.95, o.timestamp}, o.workers);
    const std::string json = serialize_report(r);
    if (o.out_path.empty()) {
      io.out << json;
      io.err << detail::summary_table(r);
    } else {
      detail::write_file(o.out_path, json);
      io.out << detail::summary_table(r);
    }
    for (const auto& w : r.warnings)
      if (o.reps != 1 || w.find("half width") == std::string::npos) io.err << "warning: " << w << "\n";
    return int(kOk);
  });
}

struct EvsmOptions {
  std::string config_path;
  std::string report_path;
  std::string format = "text";
  std::string out_path;
};

inline int cmd_evsm(const EvsmOptions& o, Streams io = {}) {
  return detail::guarded(io, [&] {
    if (o.format != "text" && o.format != "dot") throw InputError("--format must be text or dot");
    auto c = detail::load_valid(o.config_path, io);
    if (!c) return int(kViolations);
    const RunReport r = load_report(read_text_file(o.report_path));
    const EvsmDocument d = build_evsm(*c, r);
    const std::string text = o.format == "dot" ? render_dot(d) : render_text(d);
    if (o.out_path.empty()) io.out << text;
    else detail::write_file(o.out_path, text);
    return int(kOk);
  });
}

struct CompareOptions {
  std::string config_path;
  std::string delta_path;
  std::size_t reps = 30;
  std::uint64_t seed = 42;
  std::string out_path;
  std::optional<FactorMode> factors;
  unsigned workers = 0;
};

/// JSON table to --out with the text table on the output stream; without
/// --out the JSON goes to the output stream and the text to the error stream.
inline int cmd_compare(const CompareOptions& o, Streams io = {}) {
  return detail::guarded(io, [&] {
    auto base = detail::load_valid(o.config_path, io);
    if (!base) return int(kViolations);
    if (o.reps < 1) throw InputError("--reps must be at least 1");
    const ScenarioDelta delta = load_delta_file(o.delta_path);
    const ComparisonTable t = compare(*base, delta, o.reps, o.seed, {o.factors, 0.95, "-"}, o.workers);
    const std::string json = comparison_to_json(t).dump(2) + "\n";
    if (o.out_path.empty()) {
      io.out << json;
      io.err << render_comparison_text(t);
    } else {
      detail::write_file(o.out_path, json);
      io.out << render_comparison_text(t);
    }
    return int(kOk);
  });
}

}  // namespace leangreen::cli
