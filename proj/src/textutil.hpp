#pragma once

// Small text helpers shared across the library's CSV writers/readers.

#include <cstdio>
#include <string>
#include <vector>

namespace smtt {

// Fixed-point with up to `maxdec` decimals, trailing zeros trimmed but at
// least one decimal kept ("0.2", "0.25", "1.0").
inline std::string fmt_trim(double v, int maxdec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", maxdec, v);
  std::string s(buf);
  auto dot = s.find('.');
  if (dot == std::string::npos) return s;
  auto last = s.find_last_not_of('0');
  if (last == dot) last = dot + 1;  // keep one decimal
  s.erase(last + 1);
  return s;
}

// Plain comma split; none of the formats emitted here quote fields.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace smtt
