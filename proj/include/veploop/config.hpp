#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "veploop/looprunner.hpp"

namespace veploop::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse a JSON config. Missing fields take the documented defaults; unknown
/// keys, type mismatches, and out-of-range values are rejected with the
/// offending field path. The result is fully validated.
loop::FullConfig parse_config(const std::string& json_text);

loop::FullConfig load_config(const std::filesystem::path& path);

/// Complete JSON snapshot of a config; parse_config(serialize_config(c))
/// reproduces c.
std::string serialize_config(const loop::FullConfig& cfg);

}  // namespace veploop::cli
