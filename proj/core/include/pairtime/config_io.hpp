#pragma once

#include <filesystem>
#include <string>

#include "pairtime/experiment_config.hpp"

namespace pairtime {

// INI-style scenario files: [source], [arm_signal], [arm_idler],
// [detector_signal], [detector_idler], [correlator], [run], and for sweeps
// a [sweep] section. Keys carry units in their names. Fiber segments are
// repeatable lines:  segment = <length_km> <lambda0_nm> <s0> <atten_db_km>.
// Unknown sections or keys are errors. '#' or ';' start comments.

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig parse_experiment_file(const std::filesystem::path& path);

SweepSpec parse_sweep_config(const std::string& text);
SweepSpec parse_sweep_file(const std::filesystem::path& path);

bool config_has_sweep_section(const std::string& text);

// Canonical serialization, parse-compatible with the functions above.
// output_dir is omitted unless include_output_dir is set, so echoed
// configs are byte-identical across output locations.
std::string serialize_config(const ExperimentConfig& config,
                             bool include_output_dir = false);
std::string serialize_sweep(const SweepSpec& sweep,
                            bool include_output_dir = false);

}  // namespace pairtime
