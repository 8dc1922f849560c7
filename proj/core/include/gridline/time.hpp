#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gridline {

/// A UTC hour, stored as whole hours since 1970-01-01T00:00Z.
struct HourStamp {
  std::int64_t value = 0;

  friend constexpr auto operator<=>(HourStamp, HourStamp) = default;
  constexpr HourStamp next() const { return HourStamp{value + 1}; }
};

/// Parses `YYYY-MM-DDTHH[:MM[:SS]][Z]` (a space may replace the `T`).
/// Minutes and seconds, when present, must be zero; anything else throws
/// DomainError.
HourStamp parse_hour(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:00:00Z`.
std::string format_hour(HourStamp hour);

}  // namespace gridline
