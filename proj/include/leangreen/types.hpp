#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "leangreen/error.hpp"

namespace leangreen {

inline constexpr double kMinutesPerHour = 60.0;

// A point on the simulation clock, in minutes. Always finite and non-negative.
struct SimTime {
  double minutes = 0.0;

  constexpr SimTime() = default;
  constexpr explicit SimTime(double m) : minutes(m) {}

  static SimTime checked(double m) {
    if (!std::isfinite(m) || m < 0.0) {
      throw OutOfRange("SimTime must be finite and non-negative, got " + std::to_string(m));
    }
    return SimTime{m};
  }

  constexpr double hours() const { return minutes / kMinutesPerHour; }

  friend constexpr auto operator<=>(const SimTime&, const SimTime&) = default;
};

constexpr SimTime operator+(SimTime t, double dt) { return SimTime{t.minutes + dt}; }
constexpr double operator-(SimTime a, SimTime b) { return a.minutes - b.minutes; }

enum class ValueClass : std::uint8_t { VA, NVA };

// How an entity's elapsed time (and the energy drawn meanwhile) is classified.
enum class TimeClass : std::uint8_t { VA = 0, NVA = 1, WAIT = 2, TRANSFER = 3 };

inline constexpr std::array<TimeClass, 4> kTimeClasses{TimeClass::VA, TimeClass::NVA,
                                                       TimeClass::WAIT, TimeClass::TRANSFER};

constexpr std::size_t index_of(TimeClass c) { return static_cast<std::size_t>(c); }

constexpr TimeClass time_class_of(ValueClass v) {
  return v == ValueClass::VA ? TimeClass::VA : TimeClass::NVA;
}

inline std::string_view to_string(ValueClass v) { return v == ValueClass::VA ? "VA" : "NVA"; }

inline std::string_view to_string(TimeClass c) {
  switch (c) {
    case TimeClass::VA: return "VA";
    case TimeClass::NVA: return "NVA";
    case TimeClass::WAIT: return "WAIT";
    case TimeClass::TRANSFER: return "TRANSFER";
  }
  return "?";
}

inline std::optional<ValueClass> parse_value_class(std::string_view s) {
  if (s == "VA") return ValueClass::VA;
  if (s == "NVA") return ValueClass::NVA;
  return std::nullopt;
}

// Per-class durations (or energies) indexed by TimeClass.
struct ClassTotals {
  std::array<double, 4> values{};

  double& operator[](TimeClass c) { return values[index_of(c)]; }
  double operator[](TimeClass c) const { return values[index_of(c)]; }

  double sum() const { return values[0] + values[1] + values[2] + values[3]; }
};

}  // namespace leangreen
