#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "leangreen/error.hpp"
#include "leangreen/line_model.hpp"

namespace leangreen {

namespace detail {
inline void require_fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw OutOfRange(std::string(what) + " must lie in [0,1], got " + std::to_string(v));
}
}  // namespace detail

inline double compute_oee(double availability, double performance, double quality) {
  detail::require_fraction(availability, "availability");
  detail::require_fraction(performance, "performance");
  detail::require_fraction(quality, "quality");
  return availability * performance * quality;
}

/// OEE scaled by the sustainability factor.
inline double compute_oeee(const OeeeFactors& f) {
  detail::require_fraction(f.sustainability, "sustainability");
  return compute_oee(f.availability, f.performance, f.quality) * f.sustainability;
}

/// Rounds a fraction to a percentage with one decimal, e.g. 0.13042 -> 13.0.
inline double percent_1dp(double fraction) { return std::round(fraction * 1000.0) / 10.0; }

enum class OeeeClass { Acceptable, NeedsImprovement };

inline constexpr double kAcceptableOeee = 0.5;

inline OeeeClass classify_oeee(double value) {
  detail::require_fraction(value, "OEEE");
  return value >= kAcceptableOeee ? OeeeClass::Acceptable : OeeeClass::NeedsImprovement;
}

inline const char* to_string(OeeeClass c) {
  return c == OeeeClass::Acceptable ? "acceptable" : "needs_improvement";
}

/// Process cycle efficiency for time.
inline double pce_time(double va_minutes, double cycle_minutes) {
  if (!(cycle_minutes > 0)) throw ZeroCycle("cycle time must be positive");
  if (va_minutes < 0) throw OutOfRange("VA time must be non-negative");
  if (va_minutes > cycle_minutes) throw VAExceedsCycle("VA time exceeds cycle time");
  return va_minutes / cycle_minutes;
}

/// Process cycle efficiency for energy.
inline double pce_energy(double va_kwh, double total_kwh) {
  if (!(total_kwh > 0)) throw ZeroEnergy("total energy must be positive");
  if (va_kwh < 0) throw OutOfRange("VA energy must be non-negative");
  if (va_kwh > total_kwh) throw VAExceedsTotal("VA energy exceeds total energy");
  return va_kwh / total_kwh;
}

struct StationStats {
  std::string station_id;
  double utilization = 0.0;
  double mean_queue_wait = 0.0;
  double pce_time = 0.0;
  double pce_energy = 0.0;
};

/// Station ids by descending mean queue wait; equal waits keep line order.
inline std::vector<std::string> rank_bottlenecks(const std::vector<StationStats>& stats) {
  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return stats[a].mean_queue_wait > stats[b].mean_queue_wait;
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(stats[i].station_id);
  return out;
}

}  // namespace leangreen
