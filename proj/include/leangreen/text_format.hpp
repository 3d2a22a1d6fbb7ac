#pragma once

#include <cstdio>
#include <string>

namespace leangreen::detail {

// Numbers go through snprintf. Nothing in the library or tools calls
// setlocale, so the decimal point stays '.'.
inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::string pad_left(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

}  // namespace leangreen::detail
