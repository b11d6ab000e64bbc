#include "deskzone/time.hpp"

#include <cstdio>

#include "deskzone/error.hpp"

namespace deskzone {

namespace {

bool read_int(std::string_view s, std::size_t& pos, int digits, int& out) {
  if (pos + digits > s.size()) return false;
  int v = 0;
  for (int i = 0; i < digits; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += digits;
  out = v;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

}  // namespace

Instant parse_instant(std::string_view text) {
  using namespace std::chrono;
  auto fail = [&]() -> Instant { throw InputError("invalid ISO-8601 timestamp '" + std::string(text) + "'"); };

  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  if (!read_int(text, pos, 4, y) || !expect(text, pos, '-') || !read_int(text, pos, 2, mo) ||
      !expect(text, pos, '-') || !read_int(text, pos, 2, d))
    return fail();
  if (!(expect(text, pos, 'T') || expect(text, pos, ' '))) return fail();
  if (!read_int(text, pos, 2, h) || !expect(text, pos, ':') || !read_int(text, pos, 2, mi)) return fail();
  if (expect(text, pos, ':')) {
    if (!read_int(text, pos, 2, sec)) return fail();
    if (expect(text, pos, '.')) {
      int scale = 100;
      bool any = false;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        ms += (text[pos] - '0') * scale;
        scale /= 10;
        ++pos;
        any = true;
      }
      if (!any) return fail();
    }
  }
  int offset_min = 0;
  if (pos < text.size()) {
    char z = text[pos++];
    if (z == 'Z') {
    } else if (z == '+' || z == '-') {
      int oh = 0, om = 0;
      if (!read_int(text, pos, 2, oh) || !expect(text, pos, ':') || !read_int(text, pos, 2, om)) return fail();
      offset_min = (z == '+' ? 1 : -1) * (oh * 60 + om);
    } else {
      return fail();
    }
  }
  if (pos != text.size()) return fail();

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return fail();
  Instant t = time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{sec} +
              milliseconds{ms};
  return t - minutes{offset_min};
}

std::string format_instant(Instant t) {
  using namespace std::chrono;
  auto day = floor<days>(t);
  year_month_day ymd{day};
  auto rem = t - day;
  auto hh = duration_cast<hours>(rem);
  rem -= hh;
  auto mm = duration_cast<minutes>(rem);
  rem -= mm;
  auto ss = duration_cast<seconds>(rem);
  rem -= ss;
  char buf[40];
  if (rem.count() != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hh.count()), static_cast<int>(mm.count()), static_cast<int>(ss.count()),
                  static_cast<int>(rem.count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hh.count()), static_cast<int>(mm.count()), static_cast<int>(ss.count()));
  }
  return buf;
}

Instant Calendar::day_start(Instant t) const {
  using namespace std::chrono;
  auto local = t + offset();
  return time_point_cast<milliseconds>(floor<days>(local)) - offset();
}

int Calendar::hour(Instant t) const {
  using namespace std::chrono;
  auto local = t + offset();
  return static_cast<int>(duration_cast<hours>(local - floor<days>(local)).count());
}

int Calendar::day_of_week(Instant t) const {
  using namespace std::chrono;
  weekday wd{floor<days>(t + offset())};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

std::string Calendar::civil_date(Instant t) const {
  using namespace std::chrono;
  year_month_day ymd{floor<days>(t + offset())};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace deskzone

namespace deskzone {

StepInfo DayAxis::step_info(std::size_t col) const {
  StepInfo info;
  info.start = column_start(col);
  info.hour = static_cast<int>((col % kStepsPerDay) / 4);
  info.day_of_week = calendar.day_of_week(info.start);
  info.weekend = info.day_of_week >= 5;
  return info;
}

DayAxis DayAxis::contiguous(Instant first, std::size_t count, Calendar calendar) {
  if (!calendar.is_midnight(first)) throw InputError("day axis must start at civil midnight");
  DayAxis axis;
  axis.calendar = calendar;
  axis.day_starts.reserve(count);
  for (std::size_t d = 0; d < count; ++d) axis.day_starts.push_back(first + kDayMs * static_cast<long long>(d));
  return axis;
}

}  // namespace deskzone
