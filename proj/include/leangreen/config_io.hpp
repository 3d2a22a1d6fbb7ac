#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "leangreen/error.hpp"
#include "leangreen/line_model.hpp"

namespace leangreen {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace detail {

// Strict field access: every read is recorded so leftover keys can be
// rejected as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& required(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw SchemaError(field(key), "missing required field");
    return j_.at(key);
  }

  const Json* optional(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  double number(const std::string& key) { return as_number(required(key), field(key)); }

  double number_or(const std::string& key, double fallback) {
    const Json* v = optional(key);
    return v ? as_number(*v, field(key)) : fallback;
  }

  int integer(const std::string& key) { return as_integer(required(key), field(key)); }

  int integer_or(const std::string& key, int fallback) {
    const Json* v = optional(key);
    return v ? as_integer(*v, field(key)) : fallback;
  }

  std::string string(const std::string& key) { return as_string(required(key), field(key)); }

  std::string string_or(const std::string& key, std::string fallback) {
    const Json* v = optional(key);
    return v ? as_string(*v, field(key)) : fallback;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw SchemaError(field(it.key()), "unknown field");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  static double as_number(const Json& v, const std::string& f) {
    if (!v.is_number()) throw SchemaError(f, "expected a number");
    return v.get<double>();
  }

  static int as_integer(const Json& v, const std::string& f) {
    if (!v.is_number_integer()) throw SchemaError(f, "expected an integer");
    return v.get<int>();
  }

  static std::string as_string(const Json& v, const std::string& f) {
    if (!v.is_string()) throw SchemaError(f, "expected a string");
    return v.get<std::string>();
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void require_non_negative(double v, const std::string& field) {
  if (v < 0) throw SchemaError(field, "must be non-negative, got " + std::to_string(v));
}

}  // namespace detail

inline Distribution distribution_from_json(const Json& j, const std::string& path) {
  detail::ObjectReader r(j, path);
  Distribution d;
  const std::string kind = r.string("dist");
  if (!parse_dist_kind(kind, d.kind)) throw SchemaError(r.field("dist"), "unknown distribution '" + kind + "'");
  const Json& params = r.required("params");
  if (!params.is_array()) throw SchemaError(r.field("params"), "expected an array");
  d.params.clear();
  for (std::size_t i = 0; i < params.size(); ++i)
    d.params.push_back(detail::ObjectReader::as_number(params[i], r.field("params") + "[" + std::to_string(i) + "]"));
  r.finish();
  if (auto msg = d.check(); !msg.empty()) throw SchemaError(path, msg);
  return d;
}

inline OrderedJson distribution_to_json(const Distribution& d) {
  OrderedJson j;
  j["dist"] = std::string(to_string(d.kind));
  j["params"] = d.params;
  return j;
}

inline Station station_from_json(const Json& j, const std::string& path) {
  detail::ObjectReader r(j, path);
  Station s;
  s.id = r.string("id");
  s.name = r.string_or("name", s.id);
  s.servers = r.integer_or("servers", 1);
  if (const Json* v = r.optional("per_module_time_min")) {
    s.per_module_time_min = detail::ObjectReader::as_number(*v, r.field("per_module_time_min"));
    detail::require_non_negative(*s.per_module_time_min, r.field("per_module_time_min"));
  }
  if (const Json* v = r.optional("service_time")) {
    s.service_time = distribution_from_json(*v, r.field("service_time"));
  } else if (!s.per_module_time_min) {
    throw SchemaError(r.field("service_time"), "missing required field");
  }
  const std::string cls = r.string("value_class");
  auto vc = parse_value_class(cls);
  if (!vc) throw SchemaError(r.field("value_class"), "expected \"VA\" or \"NVA\", got \"" + cls + "\"");
  s.value_class = *vc;
  s.power_active_kw = r.number("power_active_kw");
  detail::require_non_negative(s.power_active_kw, r.field("power_active_kw"));
  s.power_idle_kw = r.number_or("power_idle_kw", 0.0);
  detail::require_non_negative(s.power_idle_kw, r.field("power_idle_kw"));
  s.yield_fraction = r.number_or("yield_fraction", 1.0);
  if (const Json* v = r.optional("provenance")) s.provenance = detail::ObjectReader::as_string(*v, r.field("provenance"));
  r.finish();
  return s;
}

inline OrderedJson station_to_json(const Station& s) {
  OrderedJson j;
  j["id"] = s.id;
  j["name"] = s.name;
  j["servers"] = s.servers;
  if (s.per_module_time_min) j["per_module_time_min"] = *s.per_module_time_min;
  if (!s.per_module_time_min || s.service_time != Distribution::constant(0.0))
    j["service_time"] = distribution_to_json(s.service_time);
  j["value_class"] = std::string(to_string(s.value_class));
  j["power_active_kw"] = s.power_active_kw;
  j["power_idle_kw"] = s.power_idle_kw;
  j["yield_fraction"] = s.yield_fraction;
  if (s.provenance) j["provenance"] = *s.provenance;
  return j;
}

inline TransferLink transfer_from_json(const Json& j, const std::string& path) {
  detail::ObjectReader r(j, path);
  TransferLink t;
  t.from = r.string("from");
  t.to = r.string("to");
  t.duration = distribution_from_json(r.required("duration"), r.field("duration"));
  t.power_kw = r.number_or("power_kw", 0.0);
  detail::require_non_negative(t.power_kw, r.field("power_kw"));
  if (const Json* v = r.optional("provenance")) t.provenance = detail::ObjectReader::as_string(*v, r.field("provenance"));
  r.finish();
  return t;
}

inline OrderedJson transfer_to_json(const TransferLink& t) {
  OrderedJson j;
  j["from"] = t.from;
  j["to"] = t.to;
  j["duration"] = distribution_to_json(t.duration);
  j["power_kw"] = t.power_kw;
  if (t.provenance) j["provenance"] = *t.provenance;
  return j;
}

inline OeeeFactors factors_from_json(const Json& j, const std::string& path) {
  detail::ObjectReader r(j, path);
  OeeeFactors f;
  f.availability = r.number("availability");
  f.performance = r.number("performance");
  f.quality = r.number("quality");
  f.sustainability = r.number("sustainability");
  f.source = OeeeFactors::Source::Supplied;
  r.finish();
  for (double v : {f.availability, f.performance, f.quality, f.sustainability})
    if (v < 0 || v > 1) throw SchemaError(path, "factors must lie in [0,1]");
  return f;
}

inline OrderedJson factors_to_json(const OeeeFactors& f) {
  OrderedJson j;
  j["availability"] = f.availability;
  j["performance"] = f.performance;
  j["quality"] = f.quality;
  j["sustainability"] = f.sustainability;
  return j;
}

inline Json parse_json_text(std::string_view text) {
  try {
    Json j = Json::parse(text.begin(), text.end());
    return j;
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

/// Parses a line configuration document. Unknown keys are rejected.
inline LineConfig config_from_json(const Json& j) {
  detail::ObjectReader r(j, "");
  LineConfig c;
  c.name = r.string_or("name", "");

  const Json& stations = r.required("stations");
  if (!stations.is_array()) throw SchemaError("stations", "expected an array");
  for (std::size_t i = 0; i < stations.size(); ++i)
    c.stations.push_back(station_from_json(stations[i], "stations[" + std::to_string(i) + "]"));

  const Json& transfers = r.required("transfers");
  if (!transfers.is_array()) throw SchemaError("transfers", "expected an array");
  for (std::size_t i = 0; i < transfers.size(); ++i)
    c.transfers.push_back(transfer_from_json(transfers[i], "transfers[" + std::to_string(i) + "]"));

  c.batch_size = r.integer("batch_size");
  c.demand_per_day = r.number("demand_per_day");
  c.available_time_min = r.number("available_time_min");

  // Required key; null means "no emission factor known".
  const Json& ef = r.required("emission_factor_kg_per_kwh");
  if (!ef.is_null()) {
    c.emission_factor_kg_per_kwh = detail::ObjectReader::as_number(ef, "emission_factor_kg_per_kwh");
    detail::require_non_negative(*c.emission_factor_kg_per_kwh, "emission_factor_kg_per_kwh");
  }

  c.warmup_min = r.number_or("warmup_min", 0.0);
  if (const Json* h = r.optional("horizon_min"); h && !h->is_null())
    c.horizon_min = detail::ObjectReader::as_number(*h, "horizon_min");

  if (const Json* rel = r.optional("release")) {
    detail::ObjectReader rr(*rel, "release");
    const std::string rule = rr.string("rule");
    if (rule == "shift_start") c.release.rule = ReleaseRule::ShiftStart;
    else if (rule == "interval") c.release.rule = ReleaseRule::Interval;
    else throw SchemaError("release.rule", "expected \"shift_start\" or \"interval\", got \"" + rule + "\"");
    if (const Json* b = rr.optional("batches")) c.release.batches = detail::ObjectReader::as_integer(*b, "release.batches");
    if (c.release.rule == ReleaseRule::Interval) c.release.interval_min = rr.number("interval_min");
    rr.finish();
  }

  const std::string bucket = r.string_or("idle_bucket", "nva");
  if (bucket == "nva") c.idle_bucket = IdleBucket::NVA;
  else if (bucket == "separate") c.idle_bucket = IdleBucket::Separate;
  else throw SchemaError("idle_bucket", "expected \"nva\" or \"separate\", got \"" + bucket + "\"");

  if (const Json* f = r.optional("oeee_factors")) c.oeee_factors = factors_from_json(*f, "oeee_factors");
  c.routing = r.string_or("routing", "serial");

  if (const Json* cal = r.optional("calibration")) {
    detail::ObjectReader cr(*cal, "calibration");
    c.calibration_note = cr.string_or("note", "");
    if (const Json* targets = cr.optional("targets")) {
      if (!targets->is_array()) throw SchemaError("calibration.targets", "expected an array");
      for (std::size_t i = 0; i < targets->size(); ++i) {
        detail::ObjectReader tr((*targets)[i], "calibration.targets[" + std::to_string(i) + "]");
        CalibrationTarget t;
        t.quantity = tr.string("quantity");
        t.value = tr.number("value");
        tr.finish();
        c.calibration_targets.push_back(t);
      }
    }
    cr.finish();
  }
  r.finish();
  return c;
}

inline LineConfig load_config(std::string_view document) {
  if (document.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError("empty configuration document");
  return config_from_json(parse_json_text(document));
}

inline OrderedJson config_to_json(const LineConfig& c) {
  OrderedJson j;
  if (!c.name.empty()) j["name"] = c.name;
  j["stations"] = OrderedJson::array();
  for (const auto& s : c.stations) j["stations"].push_back(station_to_json(s));
  j["transfers"] = OrderedJson::array();
  for (const auto& t : c.transfers) j["transfers"].push_back(transfer_to_json(t));
  j["batch_size"] = c.batch_size;
  j["demand_per_day"] = c.demand_per_day;
  j["available_time_min"] = c.available_time_min;
  if (c.emission_factor_kg_per_kwh) j["emission_factor_kg_per_kwh"] = *c.emission_factor_kg_per_kwh;
  else j["emission_factor_kg_per_kwh"] = nullptr;
  j["warmup_min"] = c.warmup_min;
  if (c.horizon_min) j["horizon_min"] = *c.horizon_min;
  OrderedJson rel;
  rel["rule"] = c.release.rule == ReleaseRule::ShiftStart ? "shift_start" : "interval";
  if (c.release.batches) rel["batches"] = *c.release.batches;
  if (c.release.rule == ReleaseRule::Interval) rel["interval_min"] = c.release.interval_min;
  j["release"] = rel;
  j["idle_bucket"] = c.idle_bucket == IdleBucket::NVA ? "nva" : "separate";
  if (c.oeee_factors) j["oeee_factors"] = factors_to_json(*c.oeee_factors);
  j["routing"] = c.routing;
  if (!c.calibration_targets.empty() || !c.calibration_note.empty()) {
    OrderedJson cal;
    if (!c.calibration_note.empty()) cal["note"] = c.calibration_note;
    cal["targets"] = OrderedJson::array();
    for (const auto& t : c.calibration_targets) cal["targets"].push_back({{"quantity", t.quantity}, {"value", t.value}});
    j["calibration"] = cal;
  }
  return j;
}

inline std::string serialize_config(const LineConfig& c) { return config_to_json(c).dump(2) + "\n"; }

/// 64-bit FNV-1a over the canonical serialisation, as 16 hex digits.
/// Formatting differences in the source file do not change it.
inline std::string fingerprint(const LineConfig& c) {
  const std::string canonical = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LineConfig load_config_file(const std::string& path) { return load_config(read_text_file(path)); }

}  // namespace leangreen
