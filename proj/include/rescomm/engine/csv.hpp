#pragma once

#include <ostream>
#include <string>

#include <fmt/format.h>

namespace rescomm::csv {

/// Shortest representation that round-trips to the same double; `.` decimal
/// separator regardless of locale.
inline std::string number(double x) { return fmt::format("{}", x); }

/// Writes `values...` comma-separated and terminated by a single LF.
template <typename... Ts>
void row(std::ostream& os, const Ts&... values) {
  bool first = true;
  auto put = [&](const auto& v) {
    if (!first) os << ',';
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      os << number(static_cast<double>(v));
    } else {
      os << v;
    }
  };
  (put(values), ...);
  os << '\n';
}

}  // namespace rescomm::csv
