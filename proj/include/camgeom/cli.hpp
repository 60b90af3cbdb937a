#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace camgeom::cli {

enum ExitCode : int { kOk = 0, kIoFailure = 1, kValidationFailure = 2 };

/// Built-in defaults for every configurable key.
nlohmann::json default_config();

/// Loads `path` (JSON) and merge-patches it over `base`.
nlohmann::json merge_config_file(nlohmann::json base, const std::string& path);

/// Runs the command line (argv[0] excluded) and returns the process exit code.
/// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace camgeom::cli
