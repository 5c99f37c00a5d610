#include <cmath>
#include <functional>
#include <sstream>

#include <gtest/gtest.h>

#include "platoon/error.hpp"
#include "platoon/leader_profile.hpp"

using namespace platoon;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::IoError;
}

}  // namespace

TEST(LeaderProfile, ConstantKnots) {
    const auto p = LeaderProfile::piecewise({{0, 14}, {10, 14}});
    const auto s = p.sample(0.01, 2000);
    for (std::size_t k = 0; k < s.speed.size(); ++k) {
        EXPECT_EQ(s.speed[k], 14.0);
        EXPECT_EQ(s.accel[k], 0.0);
    }
}

TEST(LeaderProfile, RampAcceleration) {
    const auto p = LeaderProfile::piecewise({{0, 10}, {2, 10}, {4, 14}, {10, 14}});
    const auto s = p.sample(0.01, 1000);
    EXPECT_NEAR(s.speed[300], 12.0, 1e-12);
    EXPECT_NEAR(s.accel[300], 2.0, 1e-9);
    EXPECT_NEAR(s.accel[100], 0.0, 1e-12);
    EXPECT_NEAR(s.accel[200], 1.0, 1e-9);  // kink: central difference averages
    EXPECT_NEAR(p.speed_at(50.0), 14.0, 0.0);
}

TEST(LeaderProfile, CsvResampledThroughSamples) {
    std::stringstream csv;
    csv << "t,v\n";
    for (int k = 0; k <= 50; ++k) csv << k * 0.1 << ',' << 14.9 + std::sin(k * 0.1) << '\n';
    const auto p = parse_leader_csv(csv);
    EXPECT_EQ(p.mode(), LeaderMode::DataDriven);
    const auto s = p.sample(0.01, 501);
    EXPECT_DOUBLE_EQ(s.speed[0], 14.9);
    for (int k = 0; k <= 50; ++k) {
        EXPECT_NEAR(s.speed[static_cast<std::size_t>(10 * k)], p.speeds()[static_cast<std::size_t>(k)], 1e-12);
    }
}

TEST(LeaderProfile, CsvErrors) {
    EXPECT_EQ(code_of([] {
                  std::stringstream in("t,v\n");
                  parse_leader_csv(in);
              }),
              ErrorCode::EmptyFile);
    EXPECT_EQ(code_of([] {
                  std::stringstream in("t,v\n0,1\n0,2\n");
                  parse_leader_csv(in);
              }),
              ErrorCode::NonMonotoneTime);
    EXPECT_EQ(code_of([] {
                  std::stringstream in("t,v\n0,1\n1,-2\n");
                  parse_leader_csv(in);
              }),
              ErrorCode::NegativeSpeed);
    EXPECT_EQ(code_of([] {
                  std::stringstream in("time,speed\n0,1\n");
                  parse_leader_csv(in);
              }),
              ErrorCode::ParseError);
    EXPECT_EQ(code_of([] {
                  std::stringstream in("t,v\n0,1\n1,x\n");
                  parse_leader_csv(in);
              }),
              ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { load_leader_csv("/nonexistent/leader.csv"); }), ErrorCode::IoError);
}

TEST(LeaderProfile, ByteOrderMarkTolerated) {
    std::stringstream in("\xEF\xBB\xBFt,v\n0,14.9\n1,15\n");
    EXPECT_DOUBLE_EQ(parse_leader_csv(in).speed_at(0.0), 14.9);
}

TEST(LeaderProfile, ShiftHoldsFrontValue) {
    const auto p = LeaderProfile::piecewise({{0, 14}, {5, 14}, {10, 20}}).shifted(1.0);
    EXPECT_DOUBLE_EQ(p.speed_at(0.0), 14.0);
    EXPECT_DOUBLE_EQ(p.speed_at(8.5), 17.0);
}
