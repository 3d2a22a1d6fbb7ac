#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "leangreen/distribution.hpp"
#include "leangreen/types.hpp"

namespace leangreen {

/// A workstation. `service_time` is minutes per batch unless
/// `per_module_time_min` is set, in which case a batch takes
/// batch_size * per_module_time_min.
struct Station {
  std::string id;
  std::string name;
  int servers = 1;
  Distribution service_time = Distribution::constant(0.0);
  ValueClass value_class = ValueClass::VA;
  double power_active_kw = 0.0;
  double power_idle_kw = 0.0;
  double yield_fraction = 1.0;
  std::optional<double> per_module_time_min;
  std::optional<std::string> provenance;

  Distribution effective_service(int batch_size) const {
    if (per_module_time_min) return Distribution::constant(*per_module_time_min * batch_size);
    return service_time;
  }

  friend bool operator==(const Station&, const Station&) = default;
};

struct TransferLink {
  std::string from;
  std::string to;
  Distribution duration = Distribution::constant(0.0);
  double power_kw = 0.0;
  std::optional<std::string> provenance;

  friend bool operator==(const TransferLink&, const TransferLink&) = default;
};

enum class ReleaseRule { ShiftStart, Interval };

// How batches enter the line. ShiftStart releases every batch at t=0;
// Interval releases batch i at i * interval_min.
struct Release {
  ReleaseRule rule = ReleaseRule::ShiftStart;
  std::optional<int> batches;  // defaults to demand_per_day
  double interval_min = 0.0;

  friend bool operator==(const Release&, const Release&) = default;
};

enum class IdleBucket { NVA, Separate };

struct OeeeFactors {
  enum class Source { Supplied, Derived };

  double availability = 1.0;
  double performance = 1.0;
  double quality = 1.0;
  double sustainability = 1.0;
  Source source = Source::Supplied;

  friend bool operator==(const OeeeFactors&, const OeeeFactors&) = default;
};

struct CalibrationTarget {
  std::string quantity;
  double value = 0.0;

  friend bool operator==(const CalibrationTarget&, const CalibrationTarget&) = default;
};

struct LineConfig {
  std::string name;
  std::vector<Station> stations;
  std::vector<TransferLink> transfers;
  int batch_size = 1;
  double demand_per_day = 1.0;
  double available_time_min = 480.0;
  std::optional<double> emission_factor_kg_per_kwh;
  double warmup_min = 0.0;
  std::optional<double> horizon_min;  // defaults to available_time_min
  Release release;
  IdleBucket idle_bucket = IdleBucket::NVA;
  std::optional<OeeeFactors> oeee_factors;
  std::string routing = "serial";
  std::vector<CalibrationTarget> calibration_targets;
  std::string calibration_note;

  double horizon() const { return horizon_min.value_or(available_time_min); }

  int batches_released() const {
    return release.batches.value_or(static_cast<int>(std::llround(demand_per_day)));
  }

  std::optional<std::size_t> station_index(const std::string& id) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i].id == id) return i;
    return std::nullopt;
  }

  // Link carrying batches out of station i, assuming a validated serial line.
  const TransferLink* link_after(std::size_t i) const {
    if (i + 1 >= stations.size()) return nullptr;
    for (const auto& t : transfers)
      if (t.from == stations[i].id && t.to == stations[i + 1].id) return &t;
    return nullptr;
  }

  friend bool operator==(const LineConfig&, const LineConfig&) = default;
};

struct Violation {
  std::string field;
  std::string rule;
  std::string value;

  std::string to_string() const { return field + ": " + rule + " (got " + value + ")"; }

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {
inline std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace detail

/// Checks every structural and range invariant. Never throws.
inline std::vector<Violation> validate(const LineConfig& c) {
  std::vector<Violation> out;
  auto add = [&](std::string f, std::string r, std::string v) {
    out.push_back({std::move(f), std::move(r), std::move(v)});
  };

  if (c.stations.empty()) add("stations", "at least one station required", "0");
  if (c.batch_size < 1) add("batch_size", "must be >= 1", std::to_string(c.batch_size));
  if (!(c.demand_per_day > 0)) add("demand_per_day", "must be > 0", detail::num(c.demand_per_day));
  if (!(c.available_time_min > 0))
    add("available_time_min", "must be > 0", detail::num(c.available_time_min));
  if (!(c.warmup_min >= 0)) add("warmup_min", "must be >= 0", detail::num(c.warmup_min));
  if (!(c.horizon() > 0)) add("horizon_min", "must be > 0", detail::num(c.horizon()));
  if (c.emission_factor_kg_per_kwh && !(*c.emission_factor_kg_per_kwh >= 0))
    add("emission_factor_kg_per_kwh", "must be >= 0", detail::num(*c.emission_factor_kg_per_kwh));
  if (c.routing != "serial") add("routing", "only serial routing is supported", c.routing);
  if (c.batches_released() < 1)
    add("release.batches", "must be >= 1", std::to_string(c.batches_released()));
  if (c.release.rule == ReleaseRule::Interval && !(c.release.interval_min >= 0))
    add("release.interval_min", "must be >= 0", detail::num(c.release.interval_min));
  if (c.oeee_factors) {
    const auto& f = *c.oeee_factors;
    const std::pair<const char*, double> fs[] = {{"availability", f.availability},
                                                 {"performance", f.performance},
                                                 {"quality", f.quality},
                                                 {"sustainability", f.sustainability}};
    for (auto [n, v] : fs)
      if (!(v >= 0 && v <= 1)) add(std::string("oeee_factors.") + n, "must be in [0,1]", detail::num(v));
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < c.stations.size(); ++i) {
    const Station& s = c.stations[i];
    const std::string p = "stations[" + s.id + "]";
    if (s.id.empty()) add("stations[" + std::to_string(i) + "].id", "must be non-empty", "\"\"");
    if (!index.emplace(s.id, i).second) add(p + ".id", "must be unique", s.id);
    if (s.servers < 1) add(p + ".servers", "must be >= 1", std::to_string(s.servers));
    if (!(s.power_idle_kw >= 0)) add(p + ".power_idle_kw", "must be >= 0", detail::num(s.power_idle_kw));
    if (!(s.power_active_kw >= s.power_idle_kw))
      add(p + ".power_active_kw", "must be >= power_idle_kw", detail::num(s.power_active_kw));
    if (!(s.yield_fraction >= 0 && s.yield_fraction <= 1))
      add(p + ".yield_fraction", "must be in [0,1]", detail::num(s.yield_fraction));
    if (s.per_module_time_min) {
      if (!(*s.per_module_time_min >= 0) || !std::isfinite(*s.per_module_time_min))
        add(p + ".per_module_time_min", "must be finite and >= 0", detail::num(*s.per_module_time_min));
    } else if (auto msg = s.service_time.check(); !msg.empty()) {
      add(p + ".service_time", msg, std::string(to_string(s.service_time.kind)));
    }
  }

  // Serial connectivity: exactly one link between each consecutive pair and
  // no link anywhere else.
  for (std::size_t k = 0; k < c.transfers.size(); ++k) {
    const TransferLink& t = c.transfers[k];
    const std::string p = "transfers[" + t.from + "->" + t.to + "]";
    if (auto msg = t.duration.check(); !msg.empty())
      add(p + ".duration", msg, std::string(to_string(t.duration.kind)));
    if (!(t.power_kw >= 0)) add(p + ".power_kw", "must be >= 0", detail::num(t.power_kw));
    auto a = index.find(t.from);
    auto b = index.find(t.to);
    if (a == index.end()) add(p + ".from", "unknown station", t.from);
    if (b == index.end()) add(p + ".to", "unknown station", t.to);
    if (a != index.end() && b != index.end() && b->second != a->second + 1)
      add(p, "connectivity: link must join consecutive stations of the serial line", t.from + "->" + t.to);
  }
  for (std::size_t i = 0; i + 1 < c.stations.size(); ++i) {
    const auto& from = c.stations[i].id;
    const auto& to = c.stations[i + 1].id;
    auto n = std::count_if(c.transfers.begin(), c.transfers.end(),
                           [&](const TransferLink& t) { return t.from == from && t.to == to; });
    if (n != 1)
      add("transfers", "connectivity: exactly one link required between consecutive stations",
          from + "->" + to + " has " + std::to_string(n));
  }
  return out;
}

/// Available production time divided by demand, in minutes per batch.
inline double takt_time(const LineConfig& c) {
  if (!(c.demand_per_day > 0)) throw OutOfRange("takt_time requires demand_per_day > 0");
  return c.available_time_min / c.demand_per_day;
}

}  // namespace leangreen
