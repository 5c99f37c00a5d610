#pragma once

#include <cstddef>
#include <vector>

#include "platoon/model.hpp"

namespace platoon {

struct VehicleMetrics {
    double peak_speed = 0.0;
    /// max(0, peak speed - v_ss)
    double overshoot = 0.0;
    /// L2 norm of v_i - v_ss over the horizon (trapezoidal).
    double l2_speed_dev = 0.0;
    /// s_i - h_i v_i at the last sample.
    double terminal_spacing_error = 0.0;
    /// Largest |v_i - v_ss| over the final 10% of the horizon.
    double steady_speed_error = 0.0;
    /// Largest |s_i - h_i v_ss| over the final 10% of the horizon.
    double steady_spacing_error = 0.0;
    double min_spacing = 0.0;
    /// L2 deviation exceeds that of every communicated predecessor by more
    /// than 1e-9.
    bool amplifies = false;
};

/// Series indexed [vehicle][sample]; sample k is at t = k*Ts.
struct SimulationResult {
    double sample_time = 0.0;
    std::vector<double> time;
    std::vector<std::vector<double>> spacing;
    std::vector<std::vector<double>> speed;
    std::vector<std::vector<double>> accel;
    std::vector<std::vector<double>> control;

    double v_ss = 0.0;
    std::vector<VehicleMetrics> metrics;

    std::size_t vehicle_count() const noexcept { return speed.size(); }
    std::size_t sample_count() const noexcept { return time.size(); }
};

/// Closed-loop simulation with explicit Euler steps. Per step: record the
/// states, compute every control (leader first, then followers in index
/// order), apply u_i(t - D), advance. Fills metrics with v_ss set to the
/// leader's final profile speed.
SimulationResult run_scenario(const ValidatedConfig& config);

/// Runs independent scenarios in parallel; results keep the input order.
std::vector<SimulationResult> run_batch(const std::vector<ValidatedConfig>& configs,
                                        int threads = 0);

std::vector<VehicleMetrics> compute_metrics(const SimulationResult& result,
                                            const std::vector<VehicleParams>& vehicles,
                                            double v_ss);

/// Positions anchored at x_0(0) = 0, x_0 advanced by Euler steps of v_0 and
/// x_i = x_{i-1} - s_i - l_i.
std::vector<std::vector<double>> reconstruct_positions(const SimulationResult& result,
                                                       const std::vector<VehicleParams>& vehicles);

/// Same configuration with every follower switched to single-predecessor
/// following.
PlatoonConfig with_single_predecessor(PlatoonConfig config);

}  // namespace platoon
