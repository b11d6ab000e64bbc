#pragma once

#include <cstddef>

#include "config.hpp"

namespace deskzone::cli {

void cmd_ingest(const RunConfig& config);
void cmd_infer_states(const RunConfig& config);
void cmd_diversity_report(const RunConfig& config);
void cmd_train_surrogate(const RunConfig& config);
void cmd_simulate(const RunConfig& config, bool oracle);
void cmd_optimize(const RunConfig& config);
void cmd_count_layouts(std::size_t occupants, std::size_t zones, bool distinct_zones);
void cmd_synth_demo(const RunConfig& config);

}  // namespace deskzone::cli
