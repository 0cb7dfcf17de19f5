#include "patrol/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace patrol {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p)
    if (*p < '0' || *p > '9') return false;
  return std::from_chars(first, last, out).ec == std::errc{};
}

}  // namespace

std::optional<Minutes> parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || !read_int(text, 5, 2, mo) ||
      text[7] != '-' || !read_int(text, 8, 2, d))
    return std::nullopt;
  if (text.size() > 10) {
    if ((text[10] != 'T' && text[10] != ' ') || text.size() < 16 || !read_int(text, 11, 2, h) ||
        text[13] != ':' || !read_int(text, 14, 2, mi))
      return std::nullopt;
    if (text.size() > 16) {
      if (text.size() != 19 || text[16] != ':' || !read_int(text, 17, 2, s)) return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  const Minutes days = sys_days{ymd}.time_since_epoch().count();
  return days * kMinutesPerDay + h * 60 + mi;
}

std::string format_timestamp(Minutes t) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day_number(t)}}};
  const int mod = minute_of_day(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), mod / 60, mod % 60);
  return buf;
}

std::string format_date(Minutes t) { return format_timestamp(t).substr(0, 10); }

std::pair<int, int> year_month(Minutes t) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day_number(t)}}};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month()))};
}

}  // namespace patrol
