#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "leangreen/error.hpp"
#include "leangreen/line_model.hpp"
#include "leangreen/types.hpp"

namespace leangreen {

enum class LocationKind : std::uint8_t { Station, Link };

// Station index, or link index k for the link leaving station k.
struct Location {
  LocationKind kind = LocationKind::Station;
  std::size_t index = 0;

  friend bool operator==(const Location&, const Location&) = default;
};

/// One timed, energy-bearing episode. Idle episodes (time_class WAIT) belong
/// to a station rather than an entity and carry the idle draw of however many
/// servers were idle over the interval.
struct ActivityRecord {
  std::optional<std::size_t> entity;
  Location where;
  TimeClass time_class = TimeClass::VA;
  SimTime start;
  SimTime end;
  double power_kw = 0.0;
  double energy_kwh = 0.0;

  double duration_min() const { return end - start; }
};

/// kWh drawn at constant `power_kw` between two clock readings.
inline double activity_energy(double power_kw, SimTime start, SimTime end) {
  if (end < start) throw NegativeDuration("activity ends before it starts");
  if (power_kw < 0) throw OutOfRange("power must be non-negative");
  return power_kw * (end - start) / kMinutesPerHour;
}

inline ActivityRecord make_record(std::optional<std::size_t> entity, Location where, TimeClass cls,
                                  SimTime start, SimTime end, double power_kw) {
  return ActivityRecord{entity, where, cls, start, end, power_kw, activity_energy(power_kw, start, end)};
}

struct EnergyLedger {
  double va_kwh = 0.0;
  double nva_kwh = 0.0;
  double transport_kwh = 0.0;
  // Only non-zero when idle draw is kept out of the NVA bucket.
  double idle_kwh = 0.0;
  double total_kwh = 0.0;
  std::optional<double> co2e_kg;

  static EnergyLedger from_buckets(double va, double nva, double transport,
                                   std::optional<double> emission_factor, double idle = 0.0) {
    EnergyLedger l{va, nva, transport, idle, 0.0, std::nullopt};
    l.finalize(emission_factor);
    return l;
  }

  void finalize(std::optional<double> emission_factor) {
    total_kwh = va_kwh + nva_kwh + transport_kwh + idle_kwh;
    if (emission_factor) co2e_kg = total_kwh * *emission_factor;
    else co2e_kg.reset();
  }

  EnergyLedger scaled(double k) const {
    EnergyLedger l = *this;
    l.va_kwh *= k;
    l.nva_kwh *= k;
    l.transport_kwh *= k;
    l.idle_kwh *= k;
    l.total_kwh *= k;
    if (l.co2e_kg) *l.co2e_kg *= k;
    return l;
  }
};

/// Buckets a trace: VA -> va, NVA and idle -> nva (or idle when separate),
/// TRANSFER -> transport.
inline EnergyLedger build_ledger(std::span<const ActivityRecord> trace, std::optional<double> emission_factor,
                                 IdleBucket idle = IdleBucket::NVA) {
  EnergyLedger l;
  for (const auto& r : trace) {
    switch (r.time_class) {
      case TimeClass::VA: l.va_kwh += r.energy_kwh; break;
      case TimeClass::NVA: l.nva_kwh += r.energy_kwh; break;
      case TimeClass::TRANSFER: l.transport_kwh += r.energy_kwh; break;
      case TimeClass::WAIT:
        (idle == IdleBucket::NVA ? l.nva_kwh : l.idle_kwh) += r.energy_kwh;
        break;
    }
  }
  l.finalize(emission_factor);
  return l;
}

/// Fraction of all energy spent on value-added work.
inline double va_energy_share(const EnergyLedger& l) {
  if (!(l.total_kwh > 0)) throw ZeroTotalEnergy("VA energy share undefined for zero total energy");
  return l.va_kwh / l.total_kwh;
}

}  // namespace leangreen
