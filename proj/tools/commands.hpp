#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace ekcli {

const std::vector<std::string>& subcommands();

// Exit status: 0 success, 2 invalid input, 3 numerical failure (diagnostic.json written to out_dir).
int run(const std::string& subcommand, const RunConfig& cfg, const std::string& out_dir, int verbosity = 1);

// Parses a config file (JSON); throws ek::Error (configuration) naming the offending field.
RunConfig load_config(const std::string& path);

}  // namespace ekcli
