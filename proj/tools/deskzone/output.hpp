#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "deskzone/layout.hpp"
#include "deskzone/states.hpp"
#include "deskzone/surrogate.hpp"

namespace deskzone::cli {

/// Files written by one command invocation. Every file starts with the
/// command's provenance so identical config and seed give identical bytes.
class OutputDir {
 public:
  OutputDir(const RunConfig& config, std::string command);

  /// Writes `name` (relative to the output directory) and returns its path.
  std::string csv(const std::string& name, const std::function<void(std::ostream&)>& body,
                  const csv::Provenance& extra = {}) const;
  /// JSON documents carry the provenance under a "provenance" key.
  std::string json(const std::string& name, nlohmann::json document) const;

  const std::filesystem::path& path() const noexcept { return dir_; }
  const csv::Provenance& provenance() const noexcept { return provenance_; }

 private:
  std::filesystem::path dir_;
  csv::Provenance provenance_;
};

/// Empty for NaN, shortest round-trip text otherwise.
std::string cell(double v);

// Loaders that resolve their inputs from the config paths.
TimeSeriesGrid load_grid(const RunConfig& config);
StateGrid load_states(const RunConfig& config);
/// From paths.layout if set, else from paths.zone_map.
Layout load_current_layout(const RunConfig& config);
EnergyModel load_model(const RunConfig& config);
std::string read_text(const std::string& path);

}  // namespace deskzone::cli
