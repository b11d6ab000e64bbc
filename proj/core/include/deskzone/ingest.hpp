#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deskzone/matrix.hpp"
#include "deskzone/time.hpp"

namespace deskzone {

struct PlugLoadEvent {
  Instant time;
  double power_w = 0.0;
};

/// Change-triggered power reports for one occupant, strictly increasing in time.
struct OccupantEvents {
  std::string occupant_id;
  std::vector<PlugLoadEvent> events;
};

using PlugLoadEvents = std::vector<OccupantEvents>;

/// Mean power per occupant per 15-minute step. `values` is occupants x columns.
struct TimeSeriesGrid {
  std::vector<std::string> occupants;
  DayAxis axis;
  Matrix values;

  std::size_t columns() const noexcept { return axis.columns(); }
};

/// Inclusive range of civil dates, `YYYY-MM-DD`.
struct DayRange {
  std::string first;
  std::string last;
};

struct ZoneMapEntry {
  std::string occupant_id;  // empty for a vacant desk
  std::string desk_id;
  std::string zone_id;
};

struct ZoneMap {
  std::vector<ZoneMapEntry> entries;
  /// Zones in order of first appearance.
  std::vector<std::string> zone_ids;
  std::map<std::string, std::size_t> zone_sizes;
};

struct LightingRecord {
  std::string zone_id;
  Instant hour_start;
  double energy_wh = 0.0;
};

/// Hourly zone lighting energy keyed by (zone, hour start).
class LightingData {
 public:
  LightingData() = default;
  explicit LightingData(std::vector<LightingRecord> records);

  const std::vector<LightingRecord>& records() const noexcept { return records_; }
  std::optional<double> energy(const std::string& zone_id, Instant hour_start) const;

 private:
  std::vector<LightingRecord> records_;
  std::map<std::pair<std::string, Instant>, std::size_t> index_;
};

/// Reads `occupant_id,timestamp,power_w`. Occupants keep first-appearance
/// order; each occupant's timestamps must be strictly increasing in file order.
PlugLoadEvents load_plug_load(const std::string& path);
PlugLoadEvents parse_plug_load(std::istream& in, const std::string& source_name);
void write_plug_load(std::ostream& out, const PlugLoadEvents& events);

/// Time-weighted mean of the last-observation-carried-forward signal on each
/// 15-minute cell of [start, end). Both ends must be civil midnights.
/// Intervals before an occupant's first event take that event's value.
TimeSeriesGrid resample_15min(const PlugLoadEvents& events, Instant start, Instant end,
                              Calendar calendar = {});

/// Drops the columns of every day in `ranges`.
TimeSeriesGrid exclude_days(const TimeSeriesGrid& grid, const std::vector<DayRange>& ranges);

/// Grids use the plug-load schema with one row per occupant per cell.
void write_grid(std::ostream& out, const TimeSeriesGrid& grid);
TimeSeriesGrid read_grid(const std::string& path, Calendar calendar = {});

ZoneMap load_zone_map(const std::string& path);
void write_zone_map(std::ostream& out, const ZoneMap& map);

LightingData load_lighting(const std::string& path, Calendar calendar = {});
void write_lighting(std::ostream& out, const LightingData& data);

}  // namespace deskzone
