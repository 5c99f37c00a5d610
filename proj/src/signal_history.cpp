#include "platoon/signal_history.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "platoon/error.hpp"

namespace platoon {

SignalHistory::SignalHistory(std::size_t capacity, double sample_time, double initial_value)
    : buffer_(capacity, initial_value), sample_time_(sample_time), initial_value_(initial_value) {
    if (capacity == 0) {
        throw Error(ErrorCode::InvalidParameter, "history capacity must be positive");
    }
    if (!(sample_time > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "history sample time must be positive");
    }
}

std::size_t SignalHistory::capacity_for(double max_delay, double sample_time) {
    return static_cast<std::size_t>(std::ceil(max_delay / sample_time - 1e-9)) + 2;
}

void SignalHistory::push(double value) {
    buffer_[static_cast<std::size_t>(count_ % static_cast<std::int64_t>(buffer_.size()))] = value;
    ++count_;
}

double SignalHistory::at_step(std::int64_t step) const {
    if (step < 0) return initial_value_;
    const auto cap = static_cast<std::int64_t>(buffer_.size());
    if (step >= count_ || step < count_ - cap) {
        throw Error(ErrorCode::HistoryUnderflow,
                    fmt::format("step {} outside stored window [{}, {})", step,
                                std::max<std::int64_t>(0, count_ - cap), count_));
    }
    return buffer_[static_cast<std::size_t>(step % cap)];
}

double SignalHistory::at_time(double t) const {
    const double steps = std::round(t / sample_time_);
    if (std::abs(t - steps * sample_time_) > 1e-9) {
        throw Error(ErrorCode::OffGridDelay,
                    fmt::format("time {} is not on the {} s sample grid", t, sample_time_));
    }
    return at_step(static_cast<std::int64_t>(steps));
}

}  // namespace platoon
