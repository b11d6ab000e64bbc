#include "deskzone/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "deskzone/csv.hpp"
#include "deskzone/error.hpp"

namespace deskzone {

namespace {

Instant parse_instant_at(const std::string& text, const std::string& source, long line) {
  try {
    return parse_instant(text);
  } catch (const InputError& e) {
    throw FileError(source, e.what(), line);
  }
}

// Integral of the carried-forward signal over [a, b), in watt-milliseconds.
// `cursor` is the index of the first event with time > a on entry; it is
// advanced past every event before b.
double integrate_cell(const std::vector<PlugLoadEvent>& ev, std::size_t& cursor, Instant a, Instant b) {
  double level = cursor == 0 ? ev.front().power_w : ev[cursor - 1].power_w;
  Instant t = a;
  double area = 0.0;
  while (cursor < ev.size() && ev[cursor].time < b) {
    area += level * static_cast<double>((ev[cursor].time - t).count());
    t = ev[cursor].time;
    level = ev[cursor].power_w;
    ++cursor;
  }
  area += level * static_cast<double>((b - t).count());
  return area;
}

}  // namespace

LightingData::LightingData(std::vector<LightingRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!(r.energy_wh >= 0.0) || !std::isfinite(r.energy_wh))
      throw InputError("lighting energy must be finite and >= 0 (zone " + r.zone_id + ")");
    if (!index_.emplace(std::make_pair(r.zone_id, r.hour_start), i).second)
      throw InputError("duplicate lighting record for zone " + r.zone_id + " at " + format_instant(r.hour_start));
  }
}

std::optional<double> LightingData::energy(const std::string& zone_id, Instant hour_start) const {
  auto it = index_.find(std::make_pair(zone_id, hour_start));
  if (it == index_.end()) return std::nullopt;
  return records_[it->second].energy_wh;
}

PlugLoadEvents parse_plug_load(std::istream& in, const std::string& source_name) {
  auto table = csv::parse(in, source_name);
  csv::require_header(table, {"occupant_id", "timestamp", "power_w"});
  PlugLoadEvents out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    const auto& id = row.fields[0];
    if (id.empty()) throw FileError(source_name, "empty occupant_id", row.line);
    Instant t = parse_instant_at(row.fields[1], source_name, row.line);
    double p = csv::parse_double(row.fields[2], source_name, row.line);
    if (!std::isfinite(p) || p < 0.0) throw FileError(source_name, "power must be finite and >= 0", row.line);
    auto [it, inserted] = index.emplace(id, out.size());
    if (inserted) out.push_back(OccupantEvents{id, {}});
    auto& events = out[it->second].events;
    if (!events.empty() && !(events.back().time < t))
      throw FileError(source_name, "timestamps for occupant '" + id + "' are not strictly increasing", row.line);
    events.push_back(PlugLoadEvent{t, p});
  }
  return out;
}

PlugLoadEvents load_plug_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path, "cannot open file");
  return parse_plug_load(in, path);
}

void write_plug_load(std::ostream& out, const PlugLoadEvents& events) {
  out << "occupant_id,timestamp,power_w\n";
  for (const auto& occ : events)
    for (const auto& e : occ.events)
      out << occ.occupant_id << ',' << format_instant(e.time) << ',' << csv::format_double(e.power_w) << '\n';
}

TimeSeriesGrid resample_15min(const PlugLoadEvents& events, Instant start, Instant end, Calendar calendar) {
  if (!(start < end)) throw InputError("resample window is empty");
  if (!calendar.is_midnight(start) || !calendar.is_midnight(end))
    throw InputError("resample window must start and end at civil midnight");
  std::vector<std::string> missing;
  for (const auto& occ : events)
    if (occ.events.empty() || !(occ.events.front().time < end)) missing.push_back(occ.occupant_id);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw InputError("no plug-load events before window end for occupant(s): " + list);
  }

  const auto n_days = static_cast<std::size_t>((end - start) / kDayMs);
  TimeSeriesGrid grid;
  grid.axis = DayAxis::contiguous(start, n_days, calendar);
  grid.values = Matrix(events.size(), grid.columns());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i].events;
    grid.occupants.push_back(events[i].occupant_id);
    std::size_t cursor = static_cast<std::size_t>(
        std::upper_bound(ev.begin(), ev.end(), start, [](Instant t, const PlugLoadEvent& e) { return t < e.time; }) -
        ev.begin());
    for (std::size_t c = 0; c < grid.columns(); ++c) {
      Instant a = grid.axis.column_start(c);
      double area = integrate_cell(ev, cursor, a, a + kStepMs);
      grid.values(i, c) = area / static_cast<double>(kStepMs.count());
    }
  }
  return grid;
}

TimeSeriesGrid exclude_days(const TimeSeriesGrid& grid, const std::vector<DayRange>& ranges) {
  if (ranges.empty()) return grid;
  const auto& cal = grid.axis.calendar;
  const std::size_t n_days = grid.axis.days();
  if (n_days == 0) throw InputError("empty grid");
  const std::string first_day = cal.civil_date(grid.axis.day_starts.front());
  const std::string last_day = cal.civil_date(grid.axis.day_starts.back());
  for (const auto& r : ranges) {
    // ISO dates compare correctly as strings.
    if (r.first.size() != 10 || r.last.size() != 10 || r.first > r.last)
      throw InputError("invalid day range " + r.first + ".." + r.last);
    if (r.first < first_day || r.last > last_day)
      throw InputError("day range " + r.first + ".." + r.last + " lies outside the grid window " + first_day + ".." +
                       last_day);
  }
  std::vector<std::size_t> keep;
  for (std::size_t d = 0; d < n_days; ++d) {
    const auto date = cal.civil_date(grid.axis.day_starts[d]);
    bool drop = std::any_of(ranges.begin(), ranges.end(),
                            [&](const DayRange& r) { return r.first <= date && date <= r.last; });
    if (!drop) keep.push_back(d);
  }
  if (keep.empty()) throw InputError("empty grid: every day was excluded");

  TimeSeriesGrid out;
  out.occupants = grid.occupants;
  out.axis.calendar = cal;
  for (auto d : keep) out.axis.day_starts.push_back(grid.axis.day_starts[d]);
  out.values = Matrix(grid.values.rows(), out.columns());
  for (std::size_t i = 0; i < grid.values.rows(); ++i)
    for (std::size_t k = 0; k < keep.size(); ++k)
      for (int s = 0; s < kStepsPerDay; ++s)
        out.values(i, k * kStepsPerDay + s) = grid.values(i, keep[k] * kStepsPerDay + s);
  return out;
}

void write_grid(std::ostream& out, const TimeSeriesGrid& grid) {
  out << "occupant_id,timestamp,power_w\n";
  for (std::size_t i = 0; i < grid.occupants.size(); ++i)
    for (std::size_t c = 0; c < grid.columns(); ++c)
      out << grid.occupants[i] << ',' << format_instant(grid.axis.column_start(c)) << ','
          << csv::format_double(grid.values(i, c)) << '\n';
}

TimeSeriesGrid read_grid(const std::string& path, Calendar calendar) {
  auto events = load_plug_load(path);
  TimeSeriesGrid grid;
  grid.axis.calendar = calendar;
  if (events.empty()) return grid;

  std::set<Instant> days;
  for (const auto& occ : events)
    for (const auto& e : occ.events) {
      if ((e.time - calendar.day_start(e.time)) % kStepMs != std::chrono::milliseconds(0))
        throw FileError(path, "grid timestamp " + format_instant(e.time) + " is not on a 15-minute boundary");
      days.insert(calendar.day_start(e.time));
    }
  grid.axis.day_starts.assign(days.begin(), days.end());
  std::map<Instant, std::size_t> day_index;
  for (std::size_t d = 0; d < grid.axis.day_starts.size(); ++d) day_index[grid.axis.day_starts[d]] = d;

  grid.values = Matrix(events.size(), grid.columns());
  for (std::size_t i = 0; i < events.size(); ++i) {
    grid.occupants.push_back(events[i].occupant_id);
    if (events[i].events.size() != grid.columns())
      throw FileError(path, "occupant '" + events[i].occupant_id + "' does not cover every grid cell");
    for (const auto& e : events[i].events) {
      const Instant ds = calendar.day_start(e.time);
      const auto col = day_index[ds] * kStepsPerDay + static_cast<std::size_t>((e.time - ds) / kStepMs);
      grid.values(i, col) = e.power_w;
    }
  }
  return grid;
}

ZoneMap load_zone_map(const std::string& path) {
  auto table = csv::read_file(path);
  csv::require_header(table, {"occupant_id", "desk_id", "zone_id"});
  ZoneMap map;
  std::set<std::string> desks, occupants;
  for (const auto& row : table.rows) {
    ZoneMapEntry e{row.fields[0], row.fields[1], row.fields[2]};
    if (e.desk_id.empty() || e.zone_id.empty()) throw FileError(path, "desk_id and zone_id are required", row.line);
    if (!desks.insert(e.desk_id).second) throw FileError(path, "duplicate desk_id '" + e.desk_id + "'", row.line);
    if (!e.occupant_id.empty() && !occupants.insert(e.occupant_id).second)
      throw FileError(path, "occupant '" + e.occupant_id + "' is assigned to more than one desk", row.line);
    if (map.zone_sizes.find(e.zone_id) == map.zone_sizes.end()) map.zone_ids.push_back(e.zone_id);
    ++map.zone_sizes[e.zone_id];
    map.entries.push_back(std::move(e));
  }
  return map;
}

void write_zone_map(std::ostream& out, const ZoneMap& map) {
  out << "occupant_id,desk_id,zone_id\n";
  for (const auto& e : map.entries) out << e.occupant_id << ',' << e.desk_id << ',' << e.zone_id << '\n';
}

LightingData load_lighting(const std::string& path, Calendar calendar) {
  auto table = csv::read_file(path);
  csv::require_header(table, {"zone_id", "hour_start", "energy_wh"});
  std::vector<LightingRecord> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    LightingRecord r;
    r.zone_id = row.fields[0];
    r.hour_start = parse_instant_at(row.fields[1], path, row.line);
    if ((r.hour_start - calendar.day_start(r.hour_start)) % std::chrono::hours(1) != std::chrono::milliseconds(0))
      throw FileError(path, "hour_start is not on the hour", row.line);
    r.energy_wh = csv::parse_double(row.fields[2], path, row.line);
    if (!std::isfinite(r.energy_wh) || r.energy_wh < 0.0) throw FileError(path, "energy must be >= 0", row.line);
    records.push_back(std::move(r));
  }
  try {
    return LightingData(std::move(records));
  } catch (const FileError&) {
    throw;
  } catch (const InputError& e) {
    throw FileError(path, e.what());
  }
}

void write_lighting(std::ostream& out, const LightingData& data) {
  out << "zone_id,hour_start,energy_wh\n";
  for (const auto& r : data.records())
    out << r.zone_id << ',' << format_instant(r.hour_start) << ',' << csv::format_double(r.energy_wh) << '\n';
}

}  // namespace deskzone
