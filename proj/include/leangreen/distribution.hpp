#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "leangreen/random_stream.hpp"

namespace leangreen {

enum class DistKind { Constant, Triangular, Exponential, TruncNormal };

inline std::string_view to_string(DistKind k) {
  switch (k) {
    case DistKind::Constant: return "constant";
    case DistKind::Triangular: return "triangular";
    case DistKind::Exponential: return "exponential";
    case DistKind::TruncNormal: return "truncnormal";
  }
  return "?";
}

inline bool parse_dist_kind(std::string_view s, DistKind& out) {
  if (s == "constant") out = DistKind::Constant;
  else if (s == "triangular") out = DistKind::Triangular;
  else if (s == "exponential") out = DistKind::Exponential;
  else if (s == "truncnormal") out = DistKind::TruncNormal;
  else return false;
  return true;
}

inline std::size_t param_count(DistKind k) {
  switch (k) {
    case DistKind::Constant: return 1;
    case DistKind::Triangular: return 3;
    case DistKind::Exponential: return 1;
    case DistKind::TruncNormal: return 3;
  }
  return 0;
}

/// A duration distribution in minutes.
///
/// Parameters by kind:
///   constant     [value]
///   triangular   [min, mode, max]
///   exponential  [mean]
///   truncnormal  [mean, sd, min]   (normal rejected below `min`)
struct Distribution {
  DistKind kind = DistKind::Constant;
  std::vector<double> params{0.0};

  static Distribution constant(double v) { return {DistKind::Constant, {v}}; }
  static Distribution triangular(double lo, double mode, double hi) {
    return {DistKind::Triangular, {lo, mode, hi}};
  }
  static Distribution exponential(double mean) { return {DistKind::Exponential, {mean}}; }
  static Distribution truncnormal(double mean, double sd, double lo) {
    return {DistKind::TruncNormal, {mean, sd, lo}};
  }

  // Empty string when well formed; otherwise a description of the problem.
  std::string check() const {
    if (params.size() != param_count(kind)) {
      return std::string(to_string(kind)) + " expects " + std::to_string(param_count(kind)) +
             " parameter(s), got " + std::to_string(params.size());
    }
    for (double p : params) {
      if (!std::isfinite(p)) return "parameters must be finite";
    }
    switch (kind) {
      case DistKind::Constant:
        if (params[0] < 0) return "constant value must be >= 0";
        break;
      case DistKind::Triangular:
        if (!(params[0] >= 0 && params[0] <= params[1] && params[1] <= params[2]))
          return "triangular requires 0 <= min <= mode <= max";
        break;
      case DistKind::Exponential:
        if (params[0] < 0) return "exponential mean must be >= 0";
        break;
      case DistKind::TruncNormal:
        if (params[1] < 0) return "truncnormal sd must be >= 0";
        if (params[2] < 0) return "truncnormal min must be >= 0";
        break;
    }
    return {};
  }

  // Smallest value the distribution can produce.
  double minimum() const {
    switch (kind) {
      case DistKind::Constant: return params[0];
      case DistKind::Triangular: return params[0];
      case DistKind::Exponential: return 0.0;
      case DistKind::TruncNormal: return params[1] == 0.0 ? std::max(params[0], params[2]) : params[2];
    }
    return 0.0;
  }

  // Untruncated mean for truncnormal; only used for reporting.
  double nominal_mean() const {
    switch (kind) {
      case DistKind::Constant: return params[0];
      case DistKind::Triangular: return (params[0] + params[1] + params[2]) / 3.0;
      case DistKind::Exponential: return params[0];
      case DistKind::TruncNormal: return std::max(params[0], params[2]);
    }
    return 0.0;
  }

  Distribution scaled(double k) const {
    Distribution d = *this;
    for (auto& p : d.params) p *= k;
    return d;
  }

  double sample(RandomStream& rng) const {
    switch (kind) {
      case DistKind::Constant:
        return params[0];
      case DistKind::Triangular: {
        const double lo = params[0], mode = params[1], hi = params[2];
        if (hi == lo) return lo;
        const double u = rng.uniform();
        const double cut = (mode - lo) / (hi - lo);
        if (u < cut) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
        return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
      }
      case DistKind::Exponential:
        if (params[0] == 0.0) return 0.0;
        return -params[0] * std::log(rng.uniform_open());
      case DistKind::TruncNormal: {
        const double mean = params[0], sd = params[1], lo = params[2];
        if (sd == 0.0) return std::max(mean, lo);
        // Rejection is fine while the cut sits no more than a few sd above the
        // mean; beyond that fall back to the bound.
        for (int attempt = 0; attempt < 1000; ++attempt) {
          const double x = mean + sd * rng.standard_normal();
          if (x >= lo) return x;
        }
        return lo;
      }
    }
    return 0.0;
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

}  // namespace leangreen
