#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "platoon/freq_analysis.hpp"
#include "platoon/region.hpp"
#include "platoon/simulation.hpp"

namespace platoon {

/// Values are printed with 9 significant digits.
std::string format_value(double value);

/// Writes speed.csv, spacing.csv, accel.csv, control.csv (header
/// `t,veh0,veh1,...`) and metrics.csv into `dir`, creating it if needed.
/// Throws IoError.
void write_timeseries_csv(const SimulationResult& result, const std::filesystem::path& dir);

/// Columns of a numeric CSV with a single header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

/// Reads a file written by this module. Throws IoError or ParseError.
CsvTable read_numeric_csv(const std::filesystem::path& path);

/// grid.csv with header `x,y,m,stable` (stable as 1/0) in RegionGrid cell order.
void write_region_csv(const RegionGrid& grid, const std::filesystem::path& path);

/// Same order with header `x,y,m,norm_sum`; `nan` where the norm is undefined.
void write_region_norms_csv(const RegionGrid& grid, const std::filesystem::path& path);

/// One row per channel plus the summary verdict.
void write_stability_csv(const StabilityVerdict& verdict, const std::filesystem::path& path);

/// Per-vehicle metric differences `b - a`, one row per vehicle.
void write_metrics_diff_csv(const SimulationResult& a, const SimulationResult& b,
                            const std::filesystem::path& path);

}  // namespace platoon
