#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace deskzone {

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

inline constexpr int kStepsPerDay = 96;
inline constexpr std::chrono::minutes kStep{15};
inline constexpr std::chrono::milliseconds kStepMs{15 * 60 * 1000};
inline constexpr std::chrono::milliseconds kDayMs{24LL * 3600 * 1000};

/// Parses `YYYY-MM-DDTHH:MM[:SS[.fff]]` followed by `Z` or `+HH:MM`/`-HH:MM`.
/// A missing zone designator is read as UTC. Throws InputError.
Instant parse_instant(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`, with `.mmm` appended when the instant
/// has a sub-second part.
std::string format_instant(Instant t);

/// Fixed-offset civil time used for day boundaries and hour/day-of-week
/// features. Offset is minutes east of UTC.
class Calendar {
 public:
  Calendar() = default;
  explicit Calendar(int utc_offset_minutes) : offset_minutes_(utc_offset_minutes) {}

  int utc_offset_minutes() const noexcept { return offset_minutes_; }

  /// Civil midnight (as a UTC instant) of the civil day containing `t`.
  Instant day_start(Instant t) const;
  bool is_midnight(Instant t) const { return day_start(t) == t; }

  int hour(Instant t) const;
  /// Monday = 0 ... Sunday = 6.
  int day_of_week(Instant t) const;
  bool is_weekend(Instant t) const { return day_of_week(t) >= 5; }
  /// `YYYY-MM-DD` of the civil day containing `t`.
  std::string civil_date(Instant t) const;

 private:
  std::chrono::milliseconds offset() const { return std::chrono::minutes(offset_minutes_); }
  int offset_minutes_ = 0;
};

/// Calendar info for one 15-minute column of a day-structured grid.
struct StepInfo {
  Instant start;
  int hour = 0;
  int day_of_week = 0;
  bool weekend = false;
};

}  // namespace deskzone

namespace deskzone {

/// Day structure shared by every per-step grid: columns are laid out as
/// `day_index * 96 + step`, and days need not be contiguous once excluded
/// ranges are dropped.
struct DayAxis {
  std::vector<Instant> day_starts;
  Calendar calendar;

  std::size_t days() const noexcept { return day_starts.size(); }
  std::size_t columns() const noexcept { return day_starts.size() * kStepsPerDay; }
  Instant column_start(std::size_t col) const {
    return day_starts[col / kStepsPerDay] + kStepMs * static_cast<long long>(col % kStepsPerDay);
  }
  StepInfo step_info(std::size_t col) const;

  /// `count` consecutive civil days beginning at civil midnight `first`.
  static DayAxis contiguous(Instant first, std::size_t count, Calendar calendar = {});

  friend bool operator==(const DayAxis& a, const DayAxis& b) {
    return a.day_starts == b.day_starts && a.calendar.utc_offset_minutes() == b.calendar.utc_offset_minutes();
  }
};

}  // namespace deskzone
