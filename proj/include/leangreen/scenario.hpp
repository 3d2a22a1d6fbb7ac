#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "leangreen/config_io.hpp"
#include "leangreen/error.hpp"
#include "leangreen/line_model.hpp"
#include "leangreen/report.hpp"
#include "leangreen/text_format.hpp"

namespace leangreen {

namespace edit {

/// Replaces adjacent stations `ids` (in line order) with `merged`. Links
/// between them disappear; the links into the first and out of the last
/// are re-pointed at the merged station.
struct MergeStations {
  std::vector<std::string> ids;
  Station merged;
  friend bool operator==(const MergeStations&, const MergeStations&) = default;
};

/// Removes a station; `splice_transfer` replaces the two links around it.
struct RemoveStation {
  std::string id;
  std::optional<TransferLink> splice_transfer;  // not needed at the line ends
  friend bool operator==(const RemoveStation&, const RemoveStation&) = default;
};

struct SetServiceTime {
  std::string id;
  Distribution service_time;
  friend bool operator==(const SetServiceTime&, const SetServiceTime&) = default;
};

struct SetPerModuleTime {
  std::string id;
  double minutes = 0.0;
  friend bool operator==(const SetPerModuleTime&, const SetPerModuleTime&) = default;
};

struct SetPower {
  std::string id;
  double active_kw = 0.0;
  double idle_kw = 0.0;
  friend bool operator==(const SetPower&, const SetPower&) = default;
};

struct SetValueClass {
  std::string id;
  ValueClass value_class = ValueClass::VA;
  friend bool operator==(const SetValueClass&, const SetValueClass&) = default;
};

struct SetFactors {
  OeeeFactors factors;
  friend bool operator==(const SetFactors&, const SetFactors&) = default;
};

}  // namespace edit

using Edit = std::variant<edit::MergeStations, edit::RemoveStation, edit::SetServiceTime, edit::SetPerModuleTime,
                          edit::SetPower, edit::SetValueClass, edit::SetFactors>;

struct ScenarioDelta {
  std::string name;
  std::string note;
  std::vector<Edit> edits;
  std::vector<std::string> edit_notes;  // parallel to edits, may be empty strings
};

namespace detail {

inline std::size_t require_station(const LineConfig& c, const std::string& id) {
  auto i = c.station_index(id);
  if (!i) throw UnknownStation("unknown station \"" + id + "\"");
  return *i;
}

inline void apply_edit(LineConfig& c, const edit::MergeStations& e) {
  if (e.ids.size() < 2) throw InvalidMerge("merge_stations needs at least two ids");
  std::vector<std::size_t> idx;
  for (const auto& id : e.ids) idx.push_back(require_station(c, id));
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (idx[k] != idx[k - 1] + 1)
      throw InvalidMerge("stations " + e.ids[k - 1] + " and " + e.ids[k] + " are not adjacent in line order");
  const std::string first = e.ids.front(), last = e.ids.back();
  auto inside = [&](const std::string& id) { return std::find(e.ids.begin(), e.ids.end(), id) != e.ids.end(); };

  std::vector<TransferLink> links;
  for (TransferLink t : c.transfers) {
    const bool from_in = inside(t.from), to_in = inside(t.to);
    if (from_in && to_in) continue;
    if (to_in) t.to = e.merged.id;
    if (from_in) t.from = e.merged.id;
    links.push_back(std::move(t));
  }
  c.transfers = std::move(links);
  c.stations.erase(c.stations.begin() + static_cast<std::ptrdiff_t>(idx.front()),
                   c.stations.begin() + static_cast<std::ptrdiff_t>(idx.back()) + 1);
  c.stations.insert(c.stations.begin() + static_cast<std::ptrdiff_t>(idx.front()), e.merged);
}

inline void apply_edit(LineConfig& c, const edit::RemoveStation& e) {
  const std::size_t i = require_station(c, e.id);
  const bool interior = i > 0 && i + 1 < c.stations.size();
  std::erase_if(c.transfers, [&](const TransferLink& t) { return t.from == e.id || t.to == e.id; });
  if (interior) {
    if (!e.splice_transfer)
      throw ValidationFailed("removing interior station " + e.id + " needs a splice_transfer");
    TransferLink t = *e.splice_transfer;
    if (t.from != c.stations[i - 1].id || t.to != c.stations[i + 1].id)
      throw ValidationFailed("splice_transfer must join " + c.stations[i - 1].id + " and " + c.stations[i + 1].id);
    c.transfers.push_back(std::move(t));
  }
  c.stations.erase(c.stations.begin() + static_cast<std::ptrdiff_t>(i));
}

inline void apply_edit(LineConfig& c, const edit::SetServiceTime& e) {
  Station& s = c.stations[require_station(c, e.id)];
  s.service_time = e.service_time;
  s.per_module_time_min.reset();
}

inline void apply_edit(LineConfig& c, const edit::SetPerModuleTime& e) {
  c.stations[require_station(c, e.id)].per_module_time_min = e.minutes;
}

inline void apply_edit(LineConfig& c, const edit::SetPower& e) {
  Station& s = c.stations[require_station(c, e.id)];
  s.power_active_kw = e.active_kw;
  s.power_idle_kw = e.idle_kw;
}

inline void apply_edit(LineConfig& c, const edit::SetValueClass& e) {
  c.stations[require_station(c, e.id)].value_class = e.value_class;
}

inline void apply_edit(LineConfig& c, const edit::SetFactors& e) {
  c.oeee_factors = e.factors;
  c.oeee_factors->source = OeeeFactors::Source::Supplied;
}

}  // namespace detail

/// Applies the edits in order to a copy of `base` and validates the result.
inline LineConfig apply_delta(const LineConfig& base, const ScenarioDelta& delta) {
  LineConfig c = base;
  for (const Edit& e : delta.edits) std::visit([&](const auto& op) { detail::apply_edit(c, op); }, e);
  if (auto v = validate(c); !v.empty()) {
    std::string msg = "scenario \"" + delta.name + "\" produces an invalid line:";
    for (const auto& x : v) msg += "\n  " + x.to_string();
    throw ValidationFailed(msg);
  }
  if (!delta.name.empty() && !delta.edits.empty()) c.name = base.name + " / " + delta.name;
  return c;
}

// ---------------------------------------------------------------------------
// Delta documents

inline ScenarioDelta delta_from_json(const Json& j) {
  detail::ObjectReader r(j, "");
  ScenarioDelta d;
  d.name = r.string_or("name", "");
  d.note = r.string_or("note", "");
  const Json& edits = r.required("edits");
  if (!edits.is_array()) throw SchemaError("edits", "expected an array");
  for (std::size_t i = 0; i < edits.size(); ++i) {
    const std::string p = "edits[" + std::to_string(i) + "]";
    detail::ObjectReader er(edits[i], p);
    const std::string op = er.string("op");
    d.edit_notes.push_back(er.string_or("note", ""));
    if (op == "merge_stations") {
      edit::MergeStations m;
      const Json& ids = er.required("ids");
      if (!ids.is_array()) throw SchemaError(er.field("ids"), "expected an array of station ids");
      for (std::size_t k = 0; k < ids.size(); ++k)
        m.ids.push_back(detail::ObjectReader::as_string(ids[k], er.field("ids") + "[" + std::to_string(k) + "]"));
      m.merged = station_from_json(er.required("merged"), er.field("merged"));
      d.edits.push_back(std::move(m));
    } else if (op == "remove_station") {
      edit::RemoveStation m;
      m.id = er.string("id");
      if (const Json* t = er.optional("splice_transfer"))
        m.splice_transfer = transfer_from_json(*t, er.field("splice_transfer"));
      d.edits.push_back(std::move(m));
    } else if (op == "set_service_time") {
      d.edits.push_back(edit::SetServiceTime{er.string("id"),
                                             distribution_from_json(er.required("service_time"),
                                                                    er.field("service_time"))});
    } else if (op == "set_per_module_time") {
      edit::SetPerModuleTime m{er.string("id"), er.number("minutes")};
      detail::require_non_negative(m.minutes, er.field("minutes"));
      d.edits.push_back(m);
    } else if (op == "set_power") {
      edit::SetPower m{er.string("id"), er.number("active_kw"), er.number("idle_kw")};
      detail::require_non_negative(m.active_kw, er.field("active_kw"));
      detail::require_non_negative(m.idle_kw, er.field("idle_kw"));
      d.edits.push_back(m);
    } else if (op == "set_value_class") {
      const std::string v = er.string("value_class");
      auto vc = parse_value_class(v);
      if (!vc) throw SchemaError(er.field("value_class"), "expected \"VA\" or \"NVA\"");
      d.edits.push_back(edit::SetValueClass{er.string("id"), *vc});
    } else if (op == "set_factors") {
      d.edits.push_back(edit::SetFactors{factors_from_json(er.required("factors"), er.field("factors"))});
    } else {
      throw SchemaError(er.field("op"), "unknown edit \"" + op + "\"");
    }
    er.finish();
  }
  r.finish();
  return d;
}

inline ScenarioDelta load_delta(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("empty delta document");
  return delta_from_json(parse_json_text(text));
}

inline ScenarioDelta load_delta_file(const std::string& path) { return load_delta(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Comparison

/// Signed relative improvement (current - scenario) / current. Negative when
/// the scenario value is larger.
inline double improvement_rate(double current, double scenario) {
  if (current == 0.0) throw ZeroBaseline("improvement rate undefined for a zero baseline");
  return (current - scenario) / current;
}

struct ComparisonRow {
  std::string parameter;
  std::string unit;
  double scenario_value = 0.0;
  double current_value = 0.0;
  std::optional<double> improvement_rate;  // absent when the baseline is zero
};

struct ComparisonTable {
  std::string scenario_name;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  std::string base_fingerprint;
  std::string scenario_fingerprint;
  std::string base_factor_mode;
  std::string scenario_factor_mode;
  std::vector<ComparisonRow> rows;

  const ComparisonRow& row(const std::string& parameter) const {
    for (const auto& r : rows)
      if (r.parameter == parameter) return r;
    throw OutOfRange("no comparison row named " + parameter);
  }
};

inline ComparisonRow make_row(std::string parameter, std::string unit, double current, double scenario) {
  ComparisonRow r{std::move(parameter), std::move(unit), scenario, current, std::nullopt};
  if (current != 0.0) r.improvement_rate = improvement_rate(current, scenario);
  return r;
}

inline ComparisonTable build_comparison(const std::string& name, const RunReport& base, const RunReport& scen) {
  ComparisonTable t;
  t.scenario_name = name;
  t.seed = base.seed;
  t.replications = base.replications;
  t.base_fingerprint = base.config_fingerprint;
  t.scenario_fingerprint = scen.config_fingerprint;
  t.base_factor_mode = to_string(base.metrics.mode);
  t.scenario_factor_mode = to_string(scen.metrics.mode);
  const auto &a = base.time_min, &b = scen.time_min;
  t.rows.push_back(make_row("VA time", "min", a.va.mean, b.va.mean));
  t.rows.push_back(make_row("NVA time", "min", a.nva.mean, b.nva.mean));
  t.rows.push_back(make_row("Waiting time", "min", a.wait.mean, b.wait.mean));
  t.rows.push_back(make_row("Transfer time", "min", a.transfer.mean, b.transfer.mean));
  t.rows.push_back(make_row("VA energy", "kWh", base.energy.va_kwh, scen.energy.va_kwh));
  t.rows.push_back(make_row("NVA energy", "kWh", base.energy.nva_kwh, scen.energy.nva_kwh));
  t.rows.push_back(make_row("Transport energy", "kWh", base.energy.transport_kwh, scen.energy.transport_kwh));
  if (base.energy.idle_kwh != 0.0 || scen.energy.idle_kwh != 0.0)
    t.rows.push_back(make_row("Idle energy", "kWh", base.energy.idle_kwh, scen.energy.idle_kwh));
  t.rows.push_back(make_row("Lead time", "min", a.lead.mean, b.lead.mean));
  t.rows.push_back(make_row("OEEE", "fraction", base.metrics.oeee, scen.metrics.oeee));
  return t;
}

namespace detail {

template <class F>
auto on_side(const char* side, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError(std::string(side) + ": " + e.what());
  } catch (const SimulationError& e) {
    throw SimulationError(std::string(side) + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(std::string(side) + ": " + e.what());
  }
}

}  // namespace detail

/// Runs base and scenario with the same seed, so replication i of each side
/// draws from the same random sub-stream.
inline ComparisonTable compare(const LineConfig& base, const ScenarioDelta& delta, std::size_t reps,
                               std::uint64_t seed, const ReportOptions& opt = {}, unsigned workers = 0) {
  const LineConfig scen = detail::on_side("scenario", [&] { return apply_delta(base, delta); });
  const RunReport rb = detail::on_side("base", [&] { return simulate(base, seed, reps, opt, workers); });
  const RunReport rs = detail::on_side("scenario", [&] { return simulate(scen, seed, reps, opt, workers); });
  return build_comparison(delta.name, rb, rs);
}

inline OrderedJson comparison_to_json(const ComparisonTable& t) {
  OrderedJson j;
  j["scenario"] = t.scenario_name;
  j["seed"] = t.seed;
  j["replications"] = t.replications;
  j["paired_seeds"] = true;
  j["base_fingerprint"] = t.base_fingerprint;
  j["scenario_fingerprint"] = t.scenario_fingerprint;
  j["factor_mode"] = {{"base", t.base_factor_mode}, {"scenario", t.scenario_factor_mode}};
  OrderedJson rows = OrderedJson::array();
  for (const auto& r : t.rows) {
    OrderedJson o;
    o["parameter"] = r.parameter;
    o["unit"] = r.unit;
    o["scenario_value"] = r.scenario_value;
    o["current_value"] = r.current_value;
    o["improvement_rate"] = r.improvement_rate ? OrderedJson(*r.improvement_rate) : OrderedJson(nullptr);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline std::string render_comparison_text(const ComparisonTable& t) {
  const auto f = detail::fmt;
  using detail::pad_left;
  using detail::pad_right;
  std::string out = "scenario " + (t.scenario_name.empty() ? std::string("(unnamed)") : t.scenario_name) + "  reps " +
                    std::to_string(t.replications) + "  seed " + std::to_string(t.seed) + "  paired seeds\n";
  out += "factors: base " + t.base_factor_mode + ", scenario " + t.scenario_factor_mode + "\n";
  out += pad_right("parameter", 18) + pad_right("unit", 6) + pad_left("scenario", 12) + pad_left("current", 12) +
         pad_left("improvement", 13) + "\n";
  auto percent = [&](double rate) {
    const double pct = rate * 100.0;
    return f("%.2f%%", std::abs(pct) < 0.005 ? 0.0 : pct);  // no "-0.00%"
  };
  for (const auto& r : t.rows) {
    const bool frac = r.unit == "fraction";
    const double k = frac ? 100.0 : 1.0;
    out += pad_right(r.parameter, 18) + pad_right(frac ? "%" : r.unit, 6) +
           pad_left(f(frac ? "%.1f" : "%.2f", r.scenario_value * k), 12) +
           pad_left(f(frac ? "%.1f" : "%.2f", r.current_value * k), 12) +
           pad_left(r.improvement_rate ? percent(*r.improvement_rate) : std::string("n/a"), 13) + "\n";
  }
  return out;
}

}  // namespace leangreen
