// Batch commands behind the eigenflow tool. Each produces a JSON report and,
// where meaningful, CSV plot data.

#pragma once

#include "eigenflow/scene.hpp"

#include <json.hpp>

#include <functional>

#include <string>
#include <vector>

namespace eigenflow {

struct CommandOutput {
    nlohmann::ordered_json report;
    std::string csv;  // empty when the command has no tabular output
    int exit_code = 0;
};

const std::vector<std::string>& command_names();

// Never throws for library errors: they become a report with status "error"
// and the matching exit code (2 input, 3 degeneracy, 4 numerical).
CommandOutput run_command(const std::string& command, const std::string& scene_location, const std::string& name,
                          const std::function<void(Scene&)>& overrides = {});

int exit_code_for(const Error& e);

}  // namespace eigenflow
