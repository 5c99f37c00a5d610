#include "platoon/region.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>
#include <omp.h>

#include "platoon/error.hpp"

namespace platoon {

namespace {

double parse_number(std::string_view text, std::string_view whole) {
    const std::string buf(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(buf, &used);
        if (used == buf.size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    throw Error(ErrorCode::InvalidAxis, fmt::format("bad number '{}' in axis '{}'", text, whole));
}

void apply_axis(ChannelParams& p, double& pole, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::Headway:
            p.h = value;
            break;
        case SweepAxis::CommDelay:
            p.pred_comm_delays.assign(p.m, value);
            break;
        case SweepAxis::ActuationDelay:
            p.actuation_delay = value;
            break;
        case SweepAxis::Pole:
            pole = value;
            break;
    }
}

std::size_t cell_count(const AxisSpec& a1, const AxisSpec& a2, const std::vector<std::size_t>& ms) {
    return ms.size() * a1.steps * a2.steps;
}

RegionCell cell_at(std::size_t flat, const RegionTemplate& base, const AxisSpec& a1,
                   const AxisSpec& a2, const std::vector<std::size_t>& ms,
                   const SweepOptions& opts) {
    const std::size_t i2 = flat % a2.steps;
    const std::size_t i1 = (flat / a2.steps) % a1.steps;
    const std::size_t im = flat / (a2.steps * a1.steps);
    return evaluate_region_cell(base, a1, a1.value(i1), a2, a2.value(i2), ms[im], opts);
}

void check_axes(const AxisSpec& a1, const AxisSpec& a2, const std::vector<std::size_t>& ms) {
    if (a1.steps < 2 || a2.steps < 2) {
        throw Error(ErrorCode::InvalidAxis, "each axis needs at least 2 steps");
    }
    if (a1.axis == a2.axis) {
        throw Error(ErrorCode::InvalidAxis, "the two axes must differ");
    }
    for (auto m : ms) {
        if (m == 0) throw Error(ErrorCode::InvalidAxis, "m values must be positive");
    }
}

}  // namespace

double AxisSpec::value(std::size_t k) const {
    if (steps < 2) return lo;
    if (k + 1 == steps) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

std::string_view axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Headway: return "h";
        case SweepAxis::CommDelay: return "dc";
        case SweepAxis::ActuationDelay: return "D";
        case SweepAxis::Pole: return "p";
    }
    return "?";
}

AxisSpec parse_axis(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 4) {
        throw Error(ErrorCode::InvalidAxis,
                    fmt::format("axis '{}' must look like name:lo:hi:steps", text));
    }
    AxisSpec spec;
    if (parts[0] == "h") {
        spec.axis = SweepAxis::Headway;
    } else if (parts[0] == "dc") {
        spec.axis = SweepAxis::CommDelay;
    } else if (parts[0] == "D") {
        spec.axis = SweepAxis::ActuationDelay;
    } else if (parts[0] == "p") {
        spec.axis = SweepAxis::Pole;
    } else {
        throw Error(ErrorCode::InvalidAxis,
                    fmt::format("unknown axis '{}' (expected h, dc, D or p)", parts[0]));
    }
    spec.lo = parse_number(parts[1], text);
    spec.hi = parse_number(parts[2], text);
    std::size_t steps = 0;
    const auto [ptr, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), steps);
    if (ec != std::errc{} || ptr != parts[3].data() + parts[3].size() || steps < 2) {
        throw Error(ErrorCode::InvalidAxis,
                    fmt::format("axis '{}' needs an integer step count >= 2", text));
    }
    spec.steps = steps;
    if (spec.lo > spec.hi) {
        throw Error(ErrorCode::InvalidAxis, fmt::format("axis '{}' needs lo <= hi", text));
    }
    return spec;
}

const RegionCell& RegionGrid::at(std::size_t m_index, std::size_t i1, std::size_t i2) const {
    return cells.at((m_index * axis1.steps + i1) * axis2.steps + i2);
}

ChannelParams region_channel(const RegionTemplate& base, const AxisSpec& axis1, double x,
                             const AxisSpec& axis2, double y, std::size_t m) {
    ChannelParams p = ChannelParams::homogeneous(base.alpha, base.b, base.c, base.tau, base.h, m,
                                                 base.comm_delay, base.actuation_delay);
    double pole = base.pole;
    apply_axis(p, pole, axis1.axis, x);
    apply_axis(p, pole, axis2.axis, y);
    p.pred_headways.assign(m, p.h);
    if (base.pole_placement || axis1.axis == SweepAxis::Pole || axis2.axis == SweepAxis::Pole) {
        const Gains g = pole_placement_gains(pole, p.h, m, p.tau);
        p.alpha = g.alpha;
        p.b = g.b;
        p.c = g.c;
    }
    return p;
}

RegionCell evaluate_region_cell(const RegionTemplate& base, const AxisSpec& axis1, double x,
                                const AxisSpec& axis2, double y, std::size_t m,
                                const SweepOptions& opts) {
    RegionCell cell{x, y, m, false, std::numeric_limits<double>::quiet_NaN()};
    ChannelParams p;
    try {
        p = region_channel(base, axis1, x, axis2, y, m);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonPositiveGain) return cell;
        throw;
    }
    if (!routh_stable(p).stable) return cell;
    const NormReport norms = string_stable_norm(p, opts);
    cell.norm_sum = norms.sum;
    cell.stable = norms.ok;
    return cell;
}

RegionGrid region_sweep_serial(const RegionTemplate& base, const AxisSpec& axis1,
                               const AxisSpec& axis2, const std::vector<std::size_t>& m_values,
                               const SweepOptions& opts) {
    check_axes(axis1, axis2, m_values);
    RegionGrid grid{axis1, axis2, m_values, {}};
    const std::size_t total = cell_count(axis1, axis2, m_values);
    grid.cells.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        grid.cells.push_back(cell_at(k, base, axis1, axis2, m_values, opts));
    }
    return grid;
}

RegionGrid region_sweep(const RegionTemplate& base, const AxisSpec& axis1, const AxisSpec& axis2,
                        const std::vector<std::size_t>& m_values, const SweepOptions& opts,
                        int threads) {
    check_axes(axis1, axis2, m_values);
    RegionGrid grid{axis1, axis2, m_values, {}};
    const auto total = static_cast<std::int64_t>(cell_count(axis1, axis2, m_values));
    grid.cells.resize(static_cast<std::size_t>(total));
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();

    // Exceptions may not cross the parallel region; keep the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
    for (std::int64_t k = 0; k < total; ++k) {
        try {
            grid.cells[static_cast<std::size_t>(k)] =
                cell_at(static_cast<std::size_t>(k), base, axis1, axis2, m_values, opts);
        } catch (...) {
#pragma omp critical(region_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return grid;
}

std::optional<double> minimal_stable_axis1(const RegionGrid& grid, std::size_t m_index,
                                           std::size_t i2) {
    for (std::size_t i1 = 0; i1 < grid.axis1.steps; ++i1) {
        if (grid.at(m_index, i1, i2).stable) return grid.axis1.value(i1);
    }
    return std::nullopt;
}

}  // namespace platoon
