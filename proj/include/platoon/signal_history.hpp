#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "platoon/model.hpp"

namespace platoon {

/// Fixed-capacity ring buffer of scalar samples taken every `sample_time`
/// seconds starting at t = 0. Step k holds the sample at t = k*Ts.
///
/// Reads before t = 0 return the configured initial value. Reads of a step
/// that has already been overwritten, or that has not been pushed yet, throw
/// HistoryUnderflow.
class SignalHistory {
public:
    SignalHistory(std::size_t capacity, double sample_time, double initial_value = 0.0);

    /// Capacity large enough for reads `max_delay` seconds back, plus slack.
    static std::size_t capacity_for(double max_delay, double sample_time);

    void push(double value);

    /// Number of samples pushed so far; the latest is at step size()-1.
    std::int64_t size() const noexcept { return count_; }
    std::size_t capacity() const noexcept { return buffer_.size(); }
    double sample_time() const noexcept { return sample_time_; }
    double initial_value() const noexcept { return initial_value_; }

    double at_step(std::int64_t step) const;

    /// Value at `now_step - delay_steps`.
    double delayed(std::int64_t now_step, std::int64_t delay_steps) const {
        return at_step(now_step - delay_steps);
    }

    /// Value at time t, which must sit on the sample grid within 1e-9 s.
    double at_time(double t) const;

    /// Last pushed value.
    double latest() const { return at_step(count_ - 1); }

private:
    std::vector<double> buffer_;
    double sample_time_;
    double initial_value_;
    std::int64_t count_ = 0;
};

/// Spacing, speed, acceleration and control histories of one vehicle. State
/// reads before t = 0 return the initial state; control reads return 0.
struct VehicleHistory {
    VehicleHistory(std::size_t capacity, double sample_time, const VehicleState& initial)
        : s(capacity, sample_time, initial.s),
          v(capacity, sample_time, initial.v),
          a(capacity, sample_time, initial.a),
          u(capacity, sample_time, 0.0) {}

    void push_state(const VehicleState& state) {
        s.push(state.s);
        v.push(state.v);
        a.push(state.a);
    }

    VehicleState state_at_step(std::int64_t step) const {
        return {s.at_step(step), v.at_step(step), a.at_step(step)};
    }

    SignalHistory s;
    SignalHistory v;
    SignalHistory a;
    SignalHistory u;
};

}  // namespace platoon
