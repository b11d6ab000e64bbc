#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "deskzone/error.hpp"
#include "deskzone/ingest.hpp"

namespace deskzone::cli {

namespace fs = std::filesystem;

OutputDir::OutputDir(const RunConfig& config, std::string command)
    : dir_(config.output_dir()), provenance_(config.provenance(command)) {}

namespace {

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw FileError(path.parent_path().string(), "cannot create directory: " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError(path.string(), "cannot open for writing");
  out << bytes;
  if (!out) throw FileError(path.string(), "write failed");
}

// Midnight of a `YYYY-MM-DD` civil date, or a full timestamp that must fall on one.
Instant civil_midnight(const std::string& text, const Calendar& cal) {
  Instant t;
  if (text.size() == 10) {
    t = parse_instant(text + "T00:00:00Z") - std::chrono::minutes(cal.utc_offset_minutes());
  } else {
    t = parse_instant(text);
  }
  if (!cal.is_midnight(t)) throw InputError("'" + text + "' is not a civil midnight");
  return t;
}

}  // namespace

std::string OutputDir::csv(const std::string& name, const std::function<void(std::ostream&)>& body,
                           const csv::Provenance& extra) const {
  std::ostringstream text;
  csv::write_comment_header(text, provenance_);
  csv::write_comment_header(text, extra);
  body(text);
  const fs::path p = dir_ / name;
  write_bytes(p, text.str());
  return p.string();
}

std::string OutputDir::json(const std::string& name, nlohmann::json document) const {
  nlohmann::json prov = nlohmann::json::object();
  for (const auto& [k, v] : provenance_) prov[k] = v;
  document["provenance"] = std::move(prov);
  const fs::path p = dir_ / name;
  write_bytes(p, document.dump(1) + "\n");
  return p.string();
}

std::string cell(double v) { return std::isnan(v) ? std::string() : csv::format_double(v); }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, "cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TimeSeriesGrid load_grid(const RunConfig& config) {
  const Calendar cal = config.calendar();
  TimeSeriesGrid grid;
  if (!config.path("grid").empty()) {
    grid = read_grid(config.require_path("grid"), cal);
  } else {
    const std::string src = config.require_path("plug_load");
    const PlugLoadEvents events = load_plug_load(src);
    if (events.empty()) throw FileError(src, "no plug-load events");
    Instant first = Instant::max(), last = Instant::min();
    for (const auto& occ : events) {
      first = std::min(first, occ.events.front().time);
      last = std::max(last, occ.events.back().time);
    }
    const auto start_text = config.get<std::string>("ingest/start");
    const auto end_text = config.get<std::string>("ingest/end");
    const Instant start = start_text.empty() ? cal.day_start(first) : civil_midnight(start_text, cal);
    const Instant end = end_text.empty() ? cal.day_start(last) + kDayMs : civil_midnight(end_text, cal);
    grid = resample_15min(events, start, end, cal);
  }
  const auto excluded = config.excluded_days();
  return excluded.empty() ? grid : exclude_days(grid, excluded);
}

StateGrid load_states(const RunConfig& config) {
  return read_states(config.require_path("states"), config.calendar());
}

Layout load_current_layout(const RunConfig& config) {
  if (!config.path("layout").empty()) return read_layout(config.require_path("layout"));
  if (config.path("zone_map").empty())
    throw InputError("missing required path: set paths.layout or paths.zone_map (--layout / --zone-map)");
  return layout_from_zone_map(load_zone_map(config.require_path("zone_map")));
}

EnergyModel load_model(const RunConfig& config) {
  const std::string path = config.require_path("model");
  try {
    return energy_model_from_json(read_text(path));
  } catch (const FileError&) {
    throw;
  } catch (const InputError& e) {
    throw FileError(path, e.what());
  }
}

}  // namespace deskzone::cli
