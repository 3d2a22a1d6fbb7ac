#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "leangreen/config_io.hpp"
#include "leangreen/error.hpp"
#include "leangreen/line_model.hpp"
#include "leangreen/report.hpp"
#include "leangreen/text_format.hpp"

namespace leangreen {

struct EvsmStation {
  std::string id;
  std::string name;
  ValueClass value_class = ValueClass::VA;
  int servers = 1;
  double cycle_time_min = 0.0;
  double va_time_min = 0.0;
  double wait_before_min = 0.0;
  double power_kw = 0.0;
  double energy_kwh = 0.0;  // service plus idle draw, per batch
  double pce_time = 0.0;
  double pce_energy = 0.0;
};

struct EvsmLink {
  std::string from;
  std::string to;
  double transfer_min = 0.0;
  double energy_kwh = 0.0;
};

struct EvsmTotals {
  double lead_time_min = 0.0;
  double va_min = 0.0;
  double nva_min = 0.0;
  double wait_min = 0.0;
  double transfer_min = 0.0;
  EnergyLedger energy;
};

struct EvsmDocument {
  std::string title;
  std::string fingerprint;
  std::vector<EvsmStation> stations;
  std::vector<EvsmLink> links;
  EvsmTotals totals;
  double takt_min = 0.0;
};

/// Assembles the map from a config and a report produced from it. Totals are
/// summed from the station and link entries and must agree with the report.
inline EvsmDocument build_evsm(const LineConfig& config, const RunReport& report) {
  if (fingerprint(config) != report.config_fingerprint)
    throw FingerprintMismatch("report fingerprint " + report.config_fingerprint + " does not match config " +
                              fingerprint(config));
  if (report.stations.size() != config.stations.size() || report.links.size() + 1 != config.stations.size())
    throw ConfigReportMismatch("report and config describe lines of different length");

  EvsmDocument d;
  d.title = config.name.empty() ? "production line" : config.name;
  d.fingerprint = report.config_fingerprint;
  d.takt_min = takt_time(config);

  for (std::size_t j = 0; j < config.stations.size(); ++j) {
    const Station& s = config.stations[j];
    const StationReport& r = report.stations[j];
    if (r.stats.station_id != s.id)
      throw ConfigReportMismatch("station " + std::to_string(j) + " is " + s.id + " in the config but " +
                                 r.stats.station_id + " in the report");
    EvsmStation e;
    e.id = s.id;
    e.name = s.name;
    e.value_class = s.value_class;
    e.servers = s.servers;
    e.cycle_time_min = r.mean_service_min;
    e.va_time_min = s.value_class == ValueClass::VA ? r.mean_service_min : 0.0;
    e.wait_before_min = r.stats.mean_queue_wait;
    e.power_kw = s.power_active_kw;
    e.energy_kwh = r.energy_kwh();
    e.pce_time = r.stats.pce_time;
    e.pce_energy = r.stats.pce_energy;
    d.totals.va_min += e.va_time_min;
    d.totals.nva_min += e.cycle_time_min - e.va_time_min;
    d.totals.wait_min += e.wait_before_min;
    d.stations.push_back(std::move(e));
  }
  double link_energy = 0.0;
  for (std::size_t k = 0; k < report.links.size(); ++k) {
    const LinkReport& l = report.links[k];
    if (l.from != config.stations[k].id || l.to != config.stations[k + 1].id)
      throw ConfigReportMismatch("link " + std::to_string(k) + " joins different stations in report and config");
    d.links.push_back({l.from, l.to, l.mean_transfer_min, l.energy_kwh});
    d.totals.transfer_min += l.mean_transfer_min;
    link_energy += l.energy_kwh;
  }
  d.totals.lead_time_min = d.totals.va_min + d.totals.nva_min + d.totals.wait_min + d.totals.transfer_min;
  d.totals.energy = report.energy;

  auto agree = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
  const auto& t = report.time_min;
  if (!agree(d.totals.va_min, t.va.mean) || !agree(d.totals.nva_min, t.nva.mean) ||
      !agree(d.totals.wait_min, t.wait.mean) || !agree(d.totals.transfer_min, t.transfer.mean) ||
      !agree(d.totals.lead_time_min, t.lead.mean))
    throw ConfigReportMismatch("per-station times do not add up to the report totals");
  double station_energy = 0.0;
  for (const auto& s : d.stations) station_energy += s.energy_kwh;
  if (!agree(station_energy + link_energy, report.energy.total_kwh))
    throw ConfigReportMismatch("per-station energy does not add up to the report total");
  return d;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace detail

/// Fixed-width text rendering: station table, a two-row ladder (VA work on
/// the upper row; waits, NVA work and transfers on the lower row) and a
/// totals footer.
inline std::string render_text(const EvsmDocument& d) {
  using detail::fmt;
  using detail::pad_left;
  using detail::pad_right;
  std::string out;
  out += "eVSM  " + d.title + "\n";
  out += "config " + d.fingerprint + "\n\n";

  std::size_t name_w = 7;
  for (const auto& s : d.stations) name_w = std::max(name_w, s.name.size());
  out += pad_left("#", 3) + "  " + pad_right("station", name_w) + "  class  srv" + pad_left("cycle", 9) +
         pad_left("wait", 9) + pad_left("kW", 9) + pad_left("kWh", 9) + pad_left("PCE t%", 8) +
         pad_left("PCE e%", 8) + "\n";
  for (std::size_t i = 0; i < d.stations.size(); ++i) {
    const auto& s = d.stations[i];
    out += pad_left(std::to_string(i + 1), 3) + "  " + pad_right(s.name, name_w) + "  " +
           pad_right(std::string(to_string(s.value_class)), 5) + pad_left(std::to_string(s.servers), 5) +
           pad_left(fmt("%.2f", s.cycle_time_min), 9) + pad_left(fmt("%.2f", s.wait_before_min), 9) +
           pad_left(fmt("%.2f", s.power_kw), 9) + pad_left(fmt("%.2f", s.energy_kwh), 9) +
           pad_left(fmt("%.1f", s.pce_time * 100.0), 8) + pad_left(fmt("%.1f", s.pce_energy * 100.0), 8) + "\n";
  }

  // Ladder: each segment occupies one column on either row.
  struct Segment {
    bool upper;
    std::string label;
  };
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < d.stations.size(); ++i) {
    const auto& s = d.stations[i];
    if (s.wait_before_min > 0) segs.push_back({false, "wait " + fmt("%.1f", s.wait_before_min)});
    segs.push_back({s.value_class == ValueClass::VA, fmt("%.1f", s.cycle_time_min)});
    if (i < d.links.size()) segs.push_back({false, "t " + fmt("%.1f", d.links[i].transfer_min)});
  }
  std::string upper = "VA      |", lower = "NVA/wait|";
  for (const auto& g : segs) {
    const std::size_t w = g.label.size() + 2;
    upper += g.upper ? " " + g.label + " |" : std::string(w, '_') + "|";
    lower += g.upper ? std::string(w, ' ') + "|" : " " + g.label + " |";
  }
  out += "\nladder (minutes)\n" + upper + "\n" + lower + "\n\n";

  const auto& t = d.totals;
  out += "lead " + fmt("%.1f", t.lead_time_min) + " min = VA " + fmt("%.1f", t.va_min) + " + NVA " +
         fmt("%.1f", t.nva_min) + " + wait " + fmt("%.1f", t.wait_min) + " + transfer " +
         fmt("%.1f", t.transfer_min) + "\n";
  out += "takt " + fmt("%.1f", d.takt_min) + " min, gap " + fmt("%.1f", t.lead_time_min - d.takt_min) + " min\n";
  out += "energy per batch " + fmt("%.2f", t.energy.total_kwh) + " kWh = VA " + fmt("%.2f", t.energy.va_kwh) +
         " + NVA " + fmt("%.2f", t.energy.nva_kwh) + " + transport " + fmt("%.2f", t.energy.transport_kwh);
  if (t.energy.idle_kwh != 0.0) out += " + idle " + fmt("%.2f", t.energy.idle_kwh);
  out += "\n";
  if (t.energy.co2e_kg) out += "co2e per batch " + fmt("%.2f", *t.energy.co2e_kg) + " kg\n";
  if (t.lead_time_min > 0 && t.energy.total_kwh > 0)
    out += "PCE time " + fmt("%.1f", 100.0 * t.va_min / t.lead_time_min) + "%, PCE energy " +
           fmt("%.1f", 100.0 * t.energy.va_kwh / t.energy.total_kwh) + "%\n";
  return out;
}

/// DOT digraph: one box per station in line order, transfer durations and
/// energies on the edges.
inline std::string render_dot(const EvsmDocument& d) {
  using detail::fmt;
  std::string out = "digraph evsm {\n";
  out += "  label=\"" + detail::dot_escape(d.title) + "  (takt " + fmt("%.1f", d.takt_min) + " min)\";\n";
  out += "  rankdir=LR;\n";
  out += "  node [shape=box, fontname=\"Helvetica\"];\n";
  for (std::size_t i = 0; i < d.stations.size(); ++i) {
    const auto& s = d.stations[i];
    out += "  s" + std::to_string(i) + " [label=\"" + detail::dot_escape(s.name) + "\\n" +
           std::string(to_string(s.value_class)) + "  cycle " + fmt("%.2f", s.cycle_time_min) + " min\\n" +
           "wait " + fmt("%.2f", s.wait_before_min) + " min\\n" + "energy " + fmt("%.2f", s.energy_kwh) +
           " kWh\\n" + "PCE t " + fmt("%.1f", s.pce_time * 100.0) + "%  e " + fmt("%.1f", s.pce_energy * 100.0) +
           "%\"" + (s.value_class == ValueClass::NVA ? ", style=dashed" : "") + "];\n";
  }
  for (std::size_t k = 0; k < d.links.size(); ++k) {
    out += "  s" + std::to_string(k) + " -> s" + std::to_string(k + 1) + " [label=\"" +
           fmt("%.2f", d.links[k].transfer_min) + " min\\n" + fmt("%.2f", d.links[k].energy_kwh) + " kWh\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace leangreen
