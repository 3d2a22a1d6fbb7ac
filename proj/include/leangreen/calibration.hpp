#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "leangreen/config_io.hpp"
#include "leangreen/error.hpp"
#include "leangreen/report.hpp"

namespace leangreen {

// Tunable config parameters and the aggregate targets they are fitted to.
// The optimiser itself lives in the calibration tool.

enum class ParamKind { ServiceTime, PerModuleTime, PowerActive, PowerIdle, LinkDuration, LinkPower };

struct FreeParam {
  ParamKind kind = ParamKind::ServiceTime;
  std::string id;  // station id, or "from->to" for link parameters
  double lower = 0.0;
  double upper = 0.0;
};

struct CalibrationSpec {
  std::vector<FreeParam> params;
  std::vector<CalibrationTarget> targets;
  std::size_t replications = 5;
  std::uint64_t seed = 42;
  double initial_step = 0.05;  // relative simplex size
  std::size_t max_iterations = 400;
  double round_to = 0.01;
  std::string note;
};

inline const std::vector<std::string>& calibration_quantities() {
  static const std::vector<std::string> q{"va_time_min",   "nva_time_min",   "wait_time_min",
                                          "transfer_time_min", "va_energy_kwh", "nva_energy_kwh",
                                          "transport_energy_kwh", "lead_time_min"};
  return q;
}

inline double report_quantity(const RunReport& r, const std::string& q) {
  if (q == "va_time_min") return r.time_min.va.mean;
  if (q == "nva_time_min") return r.time_min.nva.mean;
  if (q == "wait_time_min") return r.time_min.wait.mean;
  if (q == "transfer_time_min") return r.time_min.transfer.mean;
  if (q == "va_energy_kwh") return r.energy.va_kwh;
  if (q == "nva_energy_kwh") return r.energy.nva_kwh;
  if (q == "transport_energy_kwh") return r.energy.transport_kwh;
  if (q == "lead_time_min") return r.time_min.lead.mean;
  if (q == "total_energy_kwh") return r.energy.total_kwh;
  throw SchemaError("quantity", "unknown calibration quantity \"" + q + "\"");
}

namespace detail {

template <class Config>
auto& find_link(Config& c, const std::string& id) {
  const auto arrow = id.find("->");
  if (arrow == std::string::npos) throw SchemaError("id", "link parameters are addressed as \"from->to\"");
  const std::string from = id.substr(0, arrow), to = id.substr(arrow + 2);
  for (auto& t : c.transfers)
    if (t.from == from && t.to == to) return t;
  throw UnknownStation("no transfer link " + id);
}

template <class Config>
auto& find_station(Config& c, const std::string& id) {
  auto i = c.station_index(id);
  if (!i) throw UnknownStation("unknown station \"" + id + "\"");
  return c.stations[*i];
}

}  // namespace detail

inline double get_param(const LineConfig& config, const FreeParam& p) {
  const LineConfig& c = config;
  switch (p.kind) {
    case ParamKind::ServiceTime: return detail::find_station(c, p.id).service_time.nominal_mean();
    case ParamKind::PerModuleTime: return detail::find_station(c, p.id).per_module_time_min.value_or(0.0);
    case ParamKind::PowerActive: return detail::find_station(c, p.id).power_active_kw;
    case ParamKind::PowerIdle: return detail::find_station(c, p.id).power_idle_kw;
    case ParamKind::LinkDuration: return detail::find_link(c, p.id).duration.nominal_mean();
    case ParamKind::LinkPower: return detail::find_link(c, p.id).power_kw;
  }
  return 0.0;
}

/// Writes a parameter value into the config; times become constants.
inline void set_param(LineConfig& c, const FreeParam& p, double v) {
  switch (p.kind) {
    case ParamKind::ServiceTime: detail::find_station(c, p.id).service_time = Distribution::constant(v); break;
    case ParamKind::PerModuleTime: detail::find_station(c, p.id).per_module_time_min = v; break;
    case ParamKind::PowerActive: detail::find_station(c, p.id).power_active_kw = v; break;
    case ParamKind::PowerIdle: detail::find_station(c, p.id).power_idle_kw = v; break;
    case ParamKind::LinkDuration: detail::find_link(c, p.id).duration = Distribution::constant(v); break;
    case ParamKind::LinkPower: detail::find_link(c, p.id).power_kw = v; break;
  }
}

/// Sum of squared relative errors between simulated aggregates and targets.
/// Configs that fail validation score +infinity.
inline double calibration_loss(const LineConfig& c, const CalibrationSpec& spec) {
  if (!validate(c).empty()) return std::numeric_limits<double>::infinity();
  const RunReport r = simulate(c, spec.seed, spec.replications, {FactorMode::Derived, 0.95, "-"}, 1);
  double loss = 0.0;
  for (const auto& t : spec.targets) {
    const double e = (report_quantity(r, t.quantity) - t.value) / t.value;
    loss += e * e;
  }
  return loss;
}

inline CalibrationSpec calibration_spec_from_json(const Json& j) {
  detail::ObjectReader r(j, "");
  CalibrationSpec s;
  s.replications = static_cast<std::size_t>(r.integer_or("replications", 5));
  s.seed = static_cast<std::uint64_t>(r.integer_or("seed", 42));
  s.initial_step = r.number_or("initial_step", 0.05);
  s.max_iterations = static_cast<std::size_t>(r.integer_or("max_iterations", 400));
  s.round_to = r.number_or("round_to", 0.01);
  s.note = r.string_or("note", "");
  const Json& params = r.required("free");
  for (std::size_t i = 0; i < params.size(); ++i) {
    detail::ObjectReader pr(params[i], "free[" + std::to_string(i) + "]");
    FreeParam p;
    const std::string k = pr.string("param");
    if (k == "service_time") p.kind = ParamKind::ServiceTime;
    else if (k == "per_module_time_min") p.kind = ParamKind::PerModuleTime;
    else if (k == "power_active_kw") p.kind = ParamKind::PowerActive;
    else if (k == "power_idle_kw") p.kind = ParamKind::PowerIdle;
    else if (k == "link_duration") p.kind = ParamKind::LinkDuration;
    else if (k == "link_power_kw") p.kind = ParamKind::LinkPower;
    else throw SchemaError(pr.field("param"), "unknown parameter kind \"" + k + "\"");
    p.id = pr.string("id");
    p.lower = pr.number("min");
    p.upper = pr.number("max");
    pr.finish();
    s.params.push_back(p);
  }
  const Json& targets = r.required("targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    detail::ObjectReader tr(targets[i], "targets[" + std::to_string(i) + "]");
    CalibrationTarget t{tr.string("quantity"), tr.number("value")};
    tr.finish();
    if (t.value == 0.0) throw SchemaError(tr.field("value"), "targets must be non-zero");
    s.targets.push_back(t);
  }
  r.finish();
  return s;
}

}  // namespace leangreen
