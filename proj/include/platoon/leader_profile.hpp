#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <utility>
#include <vector>

namespace platoon {

enum class LeaderMode {
    /// Knots of a piecewise-linear speed reference. The leader tracks it through
    /// its own lag dynamics.
    Piecewise,
    /// Recorded speed series. The leader's speed and acceleration are overridden
    /// by the data.
    DataDriven,
};

/// Leader speed and acceleration sampled on the simulation grid.
struct SampledProfile {
    double sample_time = 0.0;
    std::vector<double> speed;
    std::vector<double> accel;
};

class LeaderProfile {
public:
    LeaderProfile() = default;

    /// Throws NonMonotoneTime, NegativeSpeed or EmptyFile.
    static LeaderProfile piecewise(std::vector<std::pair<double, double>> knots);
    static LeaderProfile data_driven(std::vector<double> times, std::vector<double> speeds);
    static LeaderProfile constant(double speed);

    LeaderMode mode() const noexcept { return mode_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& speeds() const noexcept { return speeds_; }

    /// Linear interpolation; held constant outside the sampled span.
    double speed_at(double t) const;

    /// Speeds at k*Ts for k in [0, count) and accelerations by central
    /// differences (one-sided at the two ends).
    SampledProfile sample(double sample_time, std::size_t count) const;

    /// Copy with every knot moved later by `dt`; the value before the first
    /// knot is held.
    LeaderProfile shifted(double dt) const;

private:
    LeaderProfile(LeaderMode mode, std::vector<double> times, std::vector<double> speeds);

    LeaderMode mode_ = LeaderMode::Piecewise;
    std::vector<double> times_{0.0};
    std::vector<double> speeds_{0.0};
};

/// Reads a `t,v` CSV (seconds, m/s) as a data-driven profile.
LeaderProfile parse_leader_csv(std::istream& in);
LeaderProfile load_leader_csv(const std::filesystem::path& path);

}  // namespace platoon
