#include "platoon/leader_profile.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "platoon/error.hpp"

namespace platoon {

namespace {

void check_series(const std::vector<double>& times, const std::vector<double>& speeds) {
    if (times.empty()) {
        throw Error(ErrorCode::EmptyFile, "leader profile has no samples");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k])) {
            throw Error(ErrorCode::NonMonotoneTime, fmt::format("non-finite time at sample {}", k));
        }
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw Error(ErrorCode::NonMonotoneTime,
                        fmt::format("time {} at sample {} does not exceed {}", times[k], k,
                                    times[k - 1]));
        }
        if (!std::isfinite(speeds[k]) || speeds[k] < 0.0) {
            throw Error(ErrorCode::NegativeSpeed,
                        fmt::format("speed {} at sample {} is negative or not finite", speeds[k], k));
        }
    }
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

LeaderProfile::LeaderProfile(LeaderMode mode, std::vector<double> times, std::vector<double> speeds)
    : mode_(mode), times_(std::move(times)), speeds_(std::move(speeds)) {
    check_series(times_, speeds_);
}

LeaderProfile LeaderProfile::piecewise(std::vector<std::pair<double, double>> knots) {
    std::vector<double> t;
    std::vector<double> v;
    t.reserve(knots.size());
    v.reserve(knots.size());
    for (const auto& [tk, vk] : knots) {
        t.push_back(tk);
        v.push_back(vk);
    }
    return LeaderProfile(LeaderMode::Piecewise, std::move(t), std::move(v));
}

LeaderProfile LeaderProfile::data_driven(std::vector<double> times, std::vector<double> speeds) {
    if (times.size() != speeds.size()) {
        throw Error(ErrorCode::DimensionMismatch, "time and speed columns differ in length");
    }
    return LeaderProfile(LeaderMode::DataDriven, std::move(times), std::move(speeds));
}

LeaderProfile LeaderProfile::constant(double speed) { return piecewise({{0.0, speed}}); }

double LeaderProfile::speed_at(double t) const {
    if (t <= times_.front()) return speeds_.front();
    if (t >= times_.back()) return speeds_.back();
    auto hi = std::upper_bound(times_.begin(), times_.end(), t);
    const auto k = static_cast<std::size_t>(hi - times_.begin());
    const double t0 = times_[k - 1];
    const double t1 = times_[k];
    if (t == t0) return speeds_[k - 1];
    const double w = (t - t0) / (t1 - t0);
    return speeds_[k - 1] + w * (speeds_[k] - speeds_[k - 1]);
}

SampledProfile LeaderProfile::sample(double sample_time, std::size_t count) const {
    SampledProfile out;
    out.sample_time = sample_time;
    out.speed.resize(count);
    out.accel.assign(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        out.speed[k] = speed_at(static_cast<double>(k) * sample_time);
    }
    if (count < 2) return out;
    out.accel.front() = (out.speed[1] - out.speed[0]) / sample_time;
    out.accel.back() = (out.speed[count - 1] - out.speed[count - 2]) / sample_time;
    for (std::size_t k = 1; k + 1 < count; ++k) {
        out.accel[k] = (out.speed[k + 1] - out.speed[k - 1]) / (2.0 * sample_time);
    }
    return out;
}

LeaderProfile LeaderProfile::shifted(double dt) const {
    LeaderProfile copy = *this;
    for (double& t : copy.times_) t += dt;
    if (dt > 0.0 && copy.times_.front() > 0.0) {
        copy.times_.insert(copy.times_.begin(), 0.0);
        copy.speeds_.insert(copy.speeds_.begin(), copy.speeds_.front());
    }
    return copy;
}

LeaderProfile parse_leader_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<double> times;
    std::vector<double> speeds;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            std::string compact;
            std::remove_copy_if(line.begin(), line.end(), std::back_inserter(compact),
                                [](unsigned char ch) { return std::isspace(ch); });
            // A UTF-8 byte order mark may precede the header.
            if (compact.rfind("\xEF\xBB\xBF", 0) == 0) compact.erase(0, 3);
            if (compact != "t,v") {
                throw Error(ErrorCode::ParseError,
                            fmt::format("line {}: expected header 't,v', got '{}'", line_no, line));
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: expected two columns", line_no));
        }
        try {
            std::size_t used = 0;
            const std::string t_str = trim(line.substr(0, comma));
            const std::string v_str = trim(line.substr(comma + 1));
            const double t = std::stod(t_str, &used);
            if (used != t_str.size()) throw std::invalid_argument(t_str);
            const double v = std::stod(v_str, &used);
            if (used != v_str.size()) throw std::invalid_argument(v_str);
            times.push_back(t);
            speeds.push_back(v);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: malformed number", line_no));
        }
    }
    if (times.empty()) {
        throw Error(ErrorCode::EmptyFile, "leader CSV contains no samples");
    }
    return LeaderProfile::data_driven(std::move(times), std::move(speeds));
}

LeaderProfile load_leader_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, fmt::format("cannot open leader CSV '{}'", path.string()));
    }
    return parse_leader_csv(in);
}

}  // namespace platoon
