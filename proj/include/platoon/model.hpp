#pragma once

#include <cstddef>
#include <vector>

#include "platoon/leader_profile.hpp"

namespace platoon {

/// Physical and control parameters of one vehicle. Index 0 is the leader,
/// which only needs `tau`, `dc` and `length`.
struct VehicleParams {
    std::size_t index = 0;
    double tau = 0.3;     ///< actuator lag [s]
    double h = 1.0;       ///< desired time headway [s]
    double dc = 0.0;      ///< latency others see on this vehicle's broadcasts [s]
    std::size_t m = 1;    ///< number of predecessors used
    double alpha = 5.0;
    double b = 10.0;
    double c = 2.0;
    double length = 0.0;  ///< only used to reconstruct positions [m]
};

/// Spacing to the predecessor, speed and acceleration.
struct VehicleState {
    double s = 0.0;
    double v = 0.0;
    double a = 0.0;

    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct StateDerivative {
    double ds = 0.0;
    double dv = 0.0;
    double da = 0.0;

    friend bool operator==(const StateDerivative&, const StateDerivative&) = default;
};

struct PlatoonConfig {
    std::vector<VehicleParams> vehicles;
    double actuation_delay = 0.7;
    double sample_time = 0.01;
    double horizon = 120.0;
    LeaderProfile leader_profile;
    /// One entry per vehicle; left empty to use default_initial_state().
    std::vector<VehicleState> initial_state;
};

/// A configuration whose delays sit on the sample grid and whose invariants
/// have been checked. Only validate_platoon() creates one.
class ValidatedConfig {
public:
    const PlatoonConfig& config() const noexcept { return config_; }
    std::size_t vehicle_count() const noexcept { return config_.vehicles.size(); }
    const VehicleParams& vehicle(std::size_t i) const { return config_.vehicles.at(i); }

    std::size_t delay_steps() const noexcept { return delay_steps_; }
    std::size_t comm_delay_steps(std::size_t i) const { return comm_delay_steps_.at(i); }
    /// Number of recorded samples, t_k = k*Ts for k in [0, step_count).
    std::size_t step_count() const noexcept { return step_count_; }
    /// Largest communication delay, in steps, read by any follower.
    std::size_t max_comm_delay_steps() const noexcept { return max_comm_delay_steps_; }

private:
    friend ValidatedConfig validate_platoon(PlatoonConfig config);
    ValidatedConfig() = default;

    PlatoonConfig config_;
    std::size_t delay_steps_ = 0;
    std::vector<std::size_t> comm_delay_steps_;
    std::size_t step_count_ = 0;
    std::size_t max_comm_delay_steps_ = 0;
};

/// Checks every invariant and snaps D and each dc onto the Ts grid (within
/// 1e-9). Throws EmptyPlatoon, NonPositiveLag, BadMpfDepth, OffGridDelay or
/// InvalidParameter.
ValidatedConfig validate_platoon(PlatoonConfig config);

/// Snaps a delay onto the grid or throws OffGridDelay. Returns the step count.
std::size_t delay_to_steps(double delay, double sample_time);

/// Followers start at `follower_speed` with s_i = h_i v_i and a_i = 0, the
/// leader at `leader_speed`.
std::vector<VehicleState> default_initial_state(const std::vector<VehicleParams>& vehicles,
                                                double leader_speed, double follower_speed);

/// Every vehicle at `speed`, spacing h_i*speed, zero acceleration.
std::vector<VehicleState> equilibrium_state(const std::vector<VehicleParams>& vehicles,
                                            double speed);

/// ds = v_pred - v, dv = a, da = (u_delayed - a) / tau.
constexpr StateDerivative vehicle_derivative(const VehicleState& state, double v_pred,
                                             double u_delayed, double tau) noexcept {
    return {v_pred - state.v, state.a, -state.a / tau + u_delayed / tau};
}

constexpr VehicleState euler_step(const VehicleState& state, const StateDerivative& deriv,
                                  double sample_time) noexcept {
    return {state.s + sample_time * deriv.ds, state.v + sample_time * deriv.dv,
            state.a + sample_time * deriv.da};
}

}  // namespace platoon
