#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "leangreen/error.hpp"

namespace leangreen {

/// Cross-replication summary in the layout of a replication report:
/// mean with its confidence half width, the smallest and largest
/// per-replication average, and the extreme single observations.
struct StatSummary {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> half_width;  // absent for n < 2
  double min_avg = 0.0;
  double max_avg = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;

  StatSummary scaled(double k) const {
    StatSummary s = *this;
    s.mean *= k;
    if (s.half_width) *s.half_width *= k;
    s.min_avg *= k;
    s.max_avg *= k;
    s.min_value *= k;
    s.max_value *= k;
    return s;
  }
};

/// Exact two-sided Student-t quantile t(1 - alpha/2, df).
inline double student_t_quantile(double confidence, std::size_t df) {
  if (!(confidence > 0 && confidence < 1)) throw OutOfRange("confidence must lie in (0,1)");
  if (df < 1) throw TooFewReplications("t quantile needs at least one degree of freedom");
  boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 1.0 - (1.0 - confidence) / 2.0);
}

/// Critical value used for half widths: the exact quantile rounded to three
/// decimals, i.e. the value printed in standard t tables (2.045 for 95%, 29 df).
inline double t_critical(double confidence, std::size_t df) {
  return std::round(student_t_quantile(confidence, df) * 1000.0) / 1000.0;
}

inline double sample_mean(std::span<const double> v) {
  if (v.empty()) throw InsufficientData("mean of an empty sample");
  // Shifted by the first value so that a constant sample has an exact mean.
  const double shift = v.front();
  double d = 0.0;
  for (double x : v) d += x - shift;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return std::clamp(shift + d / static_cast<double>(v.size()), *lo, *hi);
}

inline double sample_stddev(std::span<const double> v) {
  if (v.size() < 2) throw TooFewReplications("sample standard deviation needs n >= 2");
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Half width t * s / sqrt(n); throws TooFewReplications for n < 2.
inline double half_width(std::span<const double> values, double confidence = 0.95) {
  if (values.size() < 2) throw TooFewReplications("half width needs at least two replications");
  const double s = sample_stddev(values);
  if (s == 0.0) return 0.0;
  return t_critical(confidence, values.size() - 1) * s / std::sqrt(static_cast<double>(values.size()));
}

/// Summarises per-replication values. With a single value the half width
/// is left empty rather than failing; use half_width() to get the error.
inline StatSummary summarize(std::span<const double> values, double confidence = 0.95) {
  if (values.empty()) throw InsufficientData("summarize needs at least one value");
  StatSummary s;
  s.n = values.size();
  s.mean = sample_mean(values);
  if (values.size() >= 2) s.half_width = half_width(values, confidence);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min_avg = *lo;
  s.max_avg = *hi;
  s.min_value = *lo;
  s.max_value = *hi;
  return s;
}

}  // namespace leangreen
