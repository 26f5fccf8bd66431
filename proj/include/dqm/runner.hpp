#pragma once

#include <string>

#include "dqm/scenario.hpp"

namespace dqm {

enum class Command { analyze, evolve, sweep_lambda, check };

ScenarioConfig config_from_json_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
// Fully-resolved (defaults materialized) config document.
std::string config_to_json_text(const ScenarioConfig& cfg);

// Runs one command, writing config.json, report.json and the command's
// artifacts into out_dir (which must be absent or empty; one run owns its
// output directory). Returns the exit code: 0 on success, 1 when `check`
// finds an invariant violation. Throws ConfigError / NumericalAbort on
// failure after removing partial outputs.
int run_command(const ScenarioConfig& cfg, Command cmd,
                const std::string& out_dir);

}  // namespace dqm
