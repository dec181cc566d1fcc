#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emhd/fields.hpp"

namespace emhd {

/// configuration error carrying the JSON pointer of the offending key
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer.empty() ? message : pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// subcommands with a config schema
const std::vector<std::string>& command_names();

/// Defaults table for one subcommand, including the global keys seed, threads and out.
/// Every key a config may contain appears here; field specs carry their own per-type tables.
nlohmann::json command_defaults(const std::string& command);
/// defaults for one field type: e3, uniform, bump, cos_modes, null_point, file
nlohmann::json field_defaults(const std::string& type);

nlohmann::json parse_config_text(const std::string& text);
/// user values merged over the defaults; unknown keys and type mismatches raise ConfigError
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& user);

/// closed-form evaluator for a resolved field spec; the grid fixes the lattice of cos_modes and file fields
FieldPtr make_field(const nlohmann::json& spec, const Grid3& g);
/// unitary spectrum of the field on the grid, Leray-projected
SpectralVectorField make_spectral(const nlohmann::json& spec, const Grid3& g);
/// short identifier such as "e3" or "bump(delta=0.001)"
std::string field_id(const nlohmann::json& spec);

Grid3 grid_from(const nlohmann::json& grid);

}  // namespace emhd
