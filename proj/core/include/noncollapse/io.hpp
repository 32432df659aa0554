#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "noncollapse/flow.hpp"
#include "noncollapse/geometry.hpp"
#include "noncollapse/monitor.hpp"

namespace noncollapse {

/// "%.17g"; non-finite values print as "nan", "inf", "-inf".
std::string format_double(double v);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Flow configuration JSON:
///   {"speed": "sigma-ratio:2",
///    "body": {"mode": "axisymmetric", "N": 256, "shape": "ellipsoid", "a": 1, "c": 1.5},
///    "cfl": 0.1, "t_end": null, "stop_max_f": null, "snapshot_every": 100, "seed": 0}
/// Missing keys take their defaults; unknown keys are a ConfigError.
FlowConfig parse_flow_config(const std::string& json);
std::string to_json(const FlowConfig& config);

/// Snapshot JSON: {"mode", "N", "t", "h": [...], "offset": [x, y, z]}.
std::string snapshot_json(const ConvexBody& body);
ConvexBody parse_snapshot(const std::string& json);

inline constexpr const char* kMonitorCsvHeader =
    "t,maxF,minF,r_plus,r_minus,min_ratio_lower,max_ratio_upper,hausdorff_rescaled,T_hat_lo,T_hat_hi,phi,"
    "diag_residual";

std::string monitor_csv(const std::vector<MonitorRow>& rows);
std::vector<MonitorRow> parse_monitor_csv(const std::string& csv);

}  // namespace noncollapse
