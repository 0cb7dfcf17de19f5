#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "patrol/domain.hpp"

namespace patrol {

/// Parses `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM` or `YYYY-MM-DDTHH:MM:SS` (a space may
/// replace the `T`). Seconds are truncated.
std::optional<Minutes> parse_timestamp(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SS`.
std::string format_timestamp(Minutes t);

/// Formats as `YYYY-MM-DD`.
std::string format_date(Minutes t);

constexpr Minutes kMinutesPerDay = 24 * 60;

constexpr Minutes floor_div(Minutes a, Minutes b) {
  Minutes q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Absolute day number since the epoch.
constexpr Minutes day_number(Minutes t) { return floor_div(t, kMinutesPerDay); }
constexpr int minute_of_day(Minutes t) { return static_cast<int>(t - day_number(t) * kMinutesPerDay); }
constexpr int slot_of(Minutes t) { return minute_of_day(t) / kSlotMinutes; }

/// (year, month) of a timestamp, month 1..12.
std::pair<int, int> year_month(Minutes t);

}  // namespace patrol
