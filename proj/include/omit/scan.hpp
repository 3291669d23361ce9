#pragma once

#include "omit/config.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omit {

inline constexpr std::string_view tool_version = "0.1.0";

enum class ScanKind { spectrum, amplitude, phase_map, delay_vs_power, sideband2, bistability, stability_map, coulomb };

std::string_view to_string(ScanKind k);
/// Throws ConfigError for unknown names.
ScanKind parse_scan_kind(std::string_view name);
std::vector<std::string_view> scan_kind_names();

/// One sweep axis over a numeric config key (unit suffix included).
struct Axis {
  std::string key;
  double start = 0.0, stop = 0.0;
  int count = 2;
  bool log = false;

  double value(int i) const;
};

/// `key=start:stop:count[:log]`. Throws ConfigError.
Axis parse_axis(std::string_view text);

/// Axes used when none are given on the command line.
std::vector<Axis> default_axes(ScanKind kind);

struct ScanSpec {
  ScanKind kind = ScanKind::spectrum;
  Config config;
  std::vector<Axis> axes;  // empty: default_axes(kind)
  std::optional<std::array<int, 2>> point;  // evaluate a single row
  int workers = 1;
};

inline constexpr std::size_t max_scan_points = 10'000'000;

struct ScanResult {
  std::vector<std::string> columns;        // numeric columns; `status` is kept separately
  std::vector<std::vector<double>> rows;   // NaN marks an empty cell
  std::vector<std::string> status;         // ok | singular | unstable-branch | nonfinite | no-branch
  nlohmann::json metadata;
};

/// Evaluates every grid point (or the one selected by `point`). Per-point
/// numerical failures become flagged rows. Throws ConfigError for invalid
/// specs, including grids beyond max_scan_points.
ScanResult run_scan(const ScanSpec& spec);

/// Deterministic text: '#' metadata lines, header, %.17g cells.
std::string to_csv(const ScanResult& r);
/// Metadata envelope plus table. The timestamp comes from SOURCE_DATE_EPOCH
/// when set, the wall clock otherwise.
std::string to_json_text(const ScanResult& r);

/// Parses text written by to_csv back into a table (metadata is skipped).
ScanResult parse_csv(std::string_view text);

/// Writes `text` to `path`; throws IoError.
void write_file(const std::string& path, std::string_view text);

}  // namespace omit
