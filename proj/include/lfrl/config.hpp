#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lfrl/harness.hpp"

namespace lfrl {

// INI-style config: [section] headers, `key = value` lines, ';' or '#'
// comments. Unknown sections or keys are rejected. Keys left out keep their
// defaults.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

// Writes every key, so the output alone reproduces the run.
void write_config(std::ostream& out, const RunConfig& cfg);

// One line per key with its default, for --help.
std::string config_reference();

}  // namespace lfrl
