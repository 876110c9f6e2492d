#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reuse/sim.hpp"

namespace reuse {

/// A configuration problem tied to one field (or "config" for cross-field checks).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Parses flat `key = value` text. `#` starts a comment. Keys use dotted
/// section prefixes (`cost.edge_bandwidth`). `mode` is required; every other
/// key has a default. `overrides` are `key=value` strings applied after the
/// file. The result is validated.
SimConfig parse_config(std::istream& in, std::span<const std::string> overrides = {});
SimConfig parse_config_file(const std::filesystem::path& path, std::span<const std::string> overrides = {});

/// Applies `key=value` overrides to an existing configuration and validates it.
void apply_overrides(SimConfig& config, std::span<const std::string> overrides);

/// Configuration with every default filled in and the given mode.
SimConfig default_config(Mode mode = Mode::EdgeWithReuse);

/// Every recognised key, in documentation order.
std::vector<std::string> config_keys();

}  // namespace reuse
