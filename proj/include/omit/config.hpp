#pragma once

#include "omit/params.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omit {

/// Contents of config/paper-params.cfg, embedded at build time.
std::string_view paper_params_text();

struct ConfigEntry {
  std::string key;
  std::string value;  // as written, whitespace-trimmed
};

/// `key = value` configuration with explicit unit suffixes.
///
/// Numeric keys carry their unit in the name: `_hz` (ordinary frequency,
/// times 2pi), `_rad_s`, `_mw`, `_w`, `_nm`, `_mm`, `_m`, `_ng`, `_kg`, `_nf`,
/// `_v`, `_rad`; dimensionless keys have none. Switches are written with dashes
/// (`pump-convention`, `lambda-is-angular`, `detuning-mode`, `branch-policy`).
/// Unknown keys are rejected. A later assignment to the same quantity replaces
/// the earlier one, whatever unit it was given in.
class Config {
 public:
  static Config parse(std::string_view text, std::string_view origin = "<config>");
  static Config load(const std::string& path);
  static Config paper_defaults();

  /// Validates and stores one assignment.
  void set(const std::string& key, const std::string& value);
  /// `key=value` form used by `--set`.
  void set_assignment(const std::string& assignment);

  const std::vector<ConfigEntry>& entries() const { return entries_; }
  bool has(std::string_view key) const;

  /// Numeric value of `key` converted to SI / angular units.
  std::optional<double> si_value(std::string_view quantity) const;

  /// Re-emits every entry in its original unit, numbers as %.17g.
  std::string emit() const;

  RawInputs raw_inputs() const;
  DriveSettings drive_settings() const;
  bool lambda_is_angular() const;

  /// Resolved inputs in SI / angular units, for output metadata.
  nlohmann::json resolved_json() const;

 private:
  std::vector<ConfigEntry> entries_;
};

/// Known numeric quantity names (without unit suffix), in emission order.
std::vector<std::string> config_quantities();

/// True for a numeric key with a valid unit suffix, e.g. `pump_power_mw`.
bool is_numeric_config_key(std::string_view key);

}  // namespace omit
