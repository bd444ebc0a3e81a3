#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condot/errors.hpp"

namespace condot {

inline constexpr const char* kVersionString = "condot 0.1.0";

// Commands: counterexample, beta_sweep, duality_check, geodesic_check,
// particle_flow, gmm_train, gmm_eval.
std::vector<std::string> command_names();

// Default config document for a command (what --print-defaults shows).
std::string command_defaults(const std::string& command);

// Validates the config against the command schema (unknown keys rejected),
// runs the command, and writes manifest.json, metrics.csv, report.json and
// artifacts under <out_dir>/<command>/<stamp>-seed<seed>/. Returns the
// report JSON. jobs > 1 parallelizes independent seeds/instances; outputs
// are deterministic either way.
std::string run_command(const std::string& command,
                        const std::string& config_json,
                        std::optional<int64_t> seed_override,
                        const std::string& out_dir, int jobs = 1);

} // namespace condot
