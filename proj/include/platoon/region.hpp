#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "platoon/freq_analysis.hpp"

namespace platoon {

enum class SweepAxis { Headway, CommDelay, ActuationDelay, Pole };

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
struct AxisSpec {
    SweepAxis axis = SweepAxis::Headway;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t steps = 2;

    double value(std::size_t k) const;
};

/// Parses `name:lo:hi:steps` with name one of h, dc, D, p. Throws InvalidAxis.
AxisSpec parse_axis(std::string_view text);
std::string_view axis_name(SweepAxis axis);

/// Fixed parameters of a region sweep. Headways and communication delays are
/// homogeneous across predecessors; the swept axes overwrite the template.
/// When one axis is the pole, the gains come from pole_placement_gains().
struct RegionTemplate {
    double alpha = 5.0;
    double b = 10.0;
    double c = 2.0;
    double tau = 0.1;
    double h = 1.0;
    double comm_delay = 0.0;
    double actuation_delay = 0.7;
    double pole = -2.0;
    bool pole_placement = false;
};

struct RegionCell {
    double x = 0.0;
    double y = 0.0;
    std::size_t m = 1;
    bool stable = false;
    /// Sum of channel norms; NaN when the closed loop is not Hurwitz or the
    /// pole gives inadmissible gains.
    double norm_sum = 0.0;
};

/// Cells ordered by m (outer), then axis1 index, then axis2 index (inner).
struct RegionGrid {
    AxisSpec axis1;
    AxisSpec axis2;
    std::vector<std::size_t> m_values;
    std::vector<RegionCell> cells;

    const RegionCell& at(std::size_t m_index, std::size_t i1, std::size_t i2) const;
};

/// Channel for one grid point. Throws NonPositiveGain when a pole axis leaves
/// the admissible gain region.
ChannelParams region_channel(const RegionTemplate& base, const AxisSpec& axis1, double x,
                             const AxisSpec& axis2, double y, std::size_t m);

/// One grid point: Hurwitz and the summed channel norms within 1.
RegionCell evaluate_region_cell(const RegionTemplate& base, const AxisSpec& axis1, double x,
                                const AxisSpec& axis2, double y, std::size_t m,
                                const SweepOptions& opts = {});

/// Reference implementation, one cell after another.
RegionGrid region_sweep_serial(const RegionTemplate& base, const AxisSpec& axis1,
                               const AxisSpec& axis2, const std::vector<std::size_t>& m_values,
                               const SweepOptions& opts = {});

/// OpenMP version; identical output to the serial sweep. `threads` <= 0 keeps
/// the OpenMP default.
RegionGrid region_sweep(const RegionTemplate& base, const AxisSpec& axis1, const AxisSpec& axis2,
                        const std::vector<std::size_t>& m_values, const SweepOptions& opts = {},
                        int threads = 0);

/// Smallest axis1 value that is stable at the given axis2 index, if any.
std::optional<double> minimal_stable_axis1(const RegionGrid& grid, std::size_t m_index,
                                           std::size_t i2);

}  // namespace platoon
