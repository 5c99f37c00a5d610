#include "platoon/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "platoon/error.hpp"

namespace platoon {

namespace {

constexpr double kGridTolerance = 1e-9;

void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

}  // namespace

std::size_t delay_to_steps(double delay, double sample_time) {
    require(std::isfinite(delay) && delay >= 0.0, ErrorCode::InvalidParameter,
            fmt::format("delay {} must be finite and non-negative", delay));
    const double steps = std::round(delay / sample_time);
    if (std::abs(delay - steps * sample_time) > kGridTolerance) {
        throw Error(ErrorCode::OffGridDelay,
                    fmt::format("delay {} is not a multiple of Ts = {}", delay, sample_time));
    }
    return static_cast<std::size_t>(steps);
}

ValidatedConfig validate_platoon(PlatoonConfig config) {
    auto& vehicles = config.vehicles;
    require(!vehicles.empty(), ErrorCode::EmptyPlatoon, "platoon has no vehicles");

    const double ts = config.sample_time;
    require(std::isfinite(ts) && ts > 0.0, ErrorCode::InvalidParameter,
            fmt::format("sample time {} must be positive", ts));
    require(std::isfinite(config.horizon) && config.horizon > ts, ErrorCode::InvalidParameter,
            fmt::format("horizon {} must exceed the sample time", config.horizon));

    ValidatedConfig out;
    out.delay_steps_ = delay_to_steps(config.actuation_delay, ts);
    config.actuation_delay = static_cast<double>(out.delay_steps_) * ts;

    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        auto& veh = vehicles[i];
        veh.index = i;
        require(std::isfinite(veh.tau) && veh.tau > 0.0, ErrorCode::NonPositiveLag,
                fmt::format("vehicle {}: lag {} must be positive", i, veh.tau));
        require(std::isfinite(veh.length) && veh.length >= 0.0, ErrorCode::InvalidParameter,
                fmt::format("vehicle {}: length {} must be non-negative", i, veh.length));
        const std::size_t dc_steps = delay_to_steps(veh.dc, ts);
        veh.dc = static_cast<double>(dc_steps) * ts;
        out.comm_delay_steps_.push_back(dc_steps);
        if (i == 0) continue;

        require(veh.m >= 1 && veh.m <= i, ErrorCode::BadMpfDepth,
                fmt::format("vehicle {}: MPF depth {} must lie in [1, {}]", i, veh.m, i));
        require(std::isfinite(veh.h) && veh.h > 0.0, ErrorCode::InvalidParameter,
                fmt::format("vehicle {}: headway {} must be positive", i, veh.h));
        require(veh.alpha > 0.0 && veh.b > 0.0 && veh.c > 0.0 && std::isfinite(veh.alpha) &&
                    std::isfinite(veh.b) && std::isfinite(veh.c),
                ErrorCode::InvalidParameter,
                fmt::format("vehicle {}: gains alpha, b, c must be positive", i));
    }

    // Only broadcasts that some follower actually reads size the buffers.
    for (std::size_t i = 1; i < vehicles.size(); ++i) {
        for (std::size_t j = 1; j <= vehicles[i].m; ++j) {
            out.max_comm_delay_steps_ =
                std::max(out.max_comm_delay_steps_, out.comm_delay_steps_[i - j]);
        }
    }

    if (config.initial_state.empty()) {
        config.initial_state =
            default_initial_state(vehicles, config.leader_profile.speed_at(0.0), 15.0);
    }
    require(config.initial_state.size() == vehicles.size(), ErrorCode::DimensionMismatch,
            fmt::format("{} initial states for {} vehicles", config.initial_state.size(),
                        vehicles.size()));
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const auto& st = config.initial_state[i];
        require(std::isfinite(st.s) && std::isfinite(st.v) && std::isfinite(st.a),
                ErrorCode::InvalidParameter, fmt::format("vehicle {}: initial state not finite", i));
    }
    // The leader has no predecessor.
    config.initial_state[0].s = 0.0;

    out.step_count_ = static_cast<std::size_t>(std::floor(config.horizon / ts + kGridTolerance));
    out.config_ = std::move(config);
    return out;
}

std::vector<VehicleState> default_initial_state(const std::vector<VehicleParams>& vehicles,
                                                double leader_speed, double follower_speed) {
    std::vector<VehicleState> states;
    states.reserve(vehicles.size());
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        if (i == 0) {
            states.push_back({0.0, leader_speed, 0.0});
        } else {
            states.push_back({vehicles[i].h * follower_speed, follower_speed, 0.0});
        }
    }
    return states;
}

std::vector<VehicleState> equilibrium_state(const std::vector<VehicleParams>& vehicles,
                                            double speed) {
    return default_initial_state(vehicles, speed, speed);
}

}  // namespace platoon
