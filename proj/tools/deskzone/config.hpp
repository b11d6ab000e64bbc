#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deskzone/csv.hpp"
#include "deskzone/genetic.hpp"
#include "deskzone/states.hpp"
#include "deskzone/surrogate.hpp"
#include "deskzone/synth.hpp"
#include "deskzone/time.hpp"

namespace deskzone::cli {

/// Effective run configuration: built-in defaults, then the JSON config file,
/// then command-line overrides. Unknown keys are rejected so typos surface.
class RunConfig {
 public:
  RunConfig();

  /// Merges a JSON document on top of the current values.
  void merge_file(const std::string& path);
  void merge(const nlohmann::json& patch, const std::string& source);

  /// Sets one value by a `/`-separated pointer such as "optimize/dims".
  template <typename T>
  void set(const std::string& pointer, const T& value) {
    doc_[nlohmann::json::json_pointer("/" + pointer)] = value;
  }

  const nlohmann::json& document() const noexcept { return doc_; }

  std::uint64_t seed() const;
  Calendar calendar() const;
  std::string path(const std::string& key) const;  // empty when unset
  /// Path that must be set and exist; throws InputError naming it otherwise.
  std::string require_path(const std::string& key) const;
  std::string output_dir() const;

  std::vector<DayRange> excluded_days() const;
  StateInferenceConfig states() const;
  ModelSpec surrogate() const;
  GaConfig ga() const;
  LightingOracleConfig oracle() const;
  PopulationSpec population() const;
  CorpusSpec corpus() const;

  /// 16 hex digits identifying the effective configuration.
  std::string hash() const;

  /// Comment-header entries recorded in every output file.
  csv::Provenance provenance(const std::string& command) const;

  template <typename T>
  T get(const std::string& pointer) const {
    return at(pointer).get<T>();
  }

 private:
  const nlohmann::json& at(const std::string& pointer) const;
  nlohmann::json doc_;
};

}  // namespace deskzone::cli
