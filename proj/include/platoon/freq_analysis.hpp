#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "platoon/model.hpp"

namespace platoon {

/// Everything the speed-propagation transfer functions G_{i,i-n} of one ego
/// vehicle depend on.
struct ChannelParams {
    double alpha = 5.0;
    double b = 10.0;
    double c = 2.0;
    double tau = 0.1;
    double h = 1.0;
    std::size_t m = 1;
    /// h_{i-1}, ..., h_{i-m}
    std::vector<double> pred_headways{1.0};
    /// dc_{i-1}, ..., dc_{i-m}
    std::vector<double> pred_comm_delays{0.0};
    double actuation_delay = 0.0;

    /// All predecessors share the ego headway and one communication delay.
    static ChannelParams homogeneous(double alpha, double b, double c, double tau, double h,
                                     std::size_t m, double comm_delay, double actuation_delay);
};

/// Channel of follower `i` inside a platoon. For the leader (index 0) the
/// headway slot is unused, so the ego headway is substituted.
ChannelParams channel_from_platoon(const std::vector<VehicleParams>& vehicles, std::size_t i,
                                   double actuation_delay);

/// Monic closed-loop cubic s^3 + d2 s^2 + d1 s + d0.
struct Cubic {
    double d2 = 0.0;
    double d1 = 0.0;
    double d0 = 0.0;
};

Cubic denominator_coeffs(const ChannelParams& p);

struct RouthResult {
    bool stable = false;
    /// (1/tau + m c)(alpha + b) - alpha/h
    double margin = 0.0;
};

RouthResult routh_stable(const ChannelParams& p);

/// G_{i,i-n}(j omega), 1 <= n <= m.
std::complex<double> transfer_function(const ChannelParams& p, std::size_t n, double omega);
double tf_magnitude(const ChannelParams& p, std::size_t n, double omega);

struct SweepOptions {
    double omega_min = 1e-4;
    double omega_max = 1e4;
    std::size_t points = 2048;
    /// How many of the largest grid maxima get golden-section refinement.
    std::size_t refine_candidates = 4;
};

/// sup over omega > 0 of |G_{i,i-n}(j omega)|, including the analytic DC
/// limit 1/m. Throws UnstableChannel when the closed loop is not Hurwitz.
double hinf_norm(const ChannelParams& p, std::size_t n, const SweepOptions& opts = {});

/// Ties within this tolerance count as string stable.
inline constexpr double kStringStabilityTolerance = 1e-9;

struct NormReport {
    /// (n, ||G_{i,i-n}||_inf) for n = 1..m
    std::vector<std::pair<std::size_t, double>> per_channel;
    double sum = 0.0;
    /// max_n m * ||G_{i,i-n}||_inf
    double worst_scaled = 0.0;
    bool ok = false;
};

/// Throws UnstableChannel when routh_stable fails.
NormReport string_stable_norm(const ChannelParams& p, const SweepOptions& opts = {});

struct StabilityVerdict {
    bool routh_ok = false;
    double routh_margin = 0.0;

    bool theorem1_ok = false;
    double beta_bar = 0.0;
    double beta = 0.0;
    double gamma_bar = 0.0;
    /// (n, gamma_{i,n}); n runs over 2..m for the delayed checker and 1..m for
    /// the delay-free one.
    std::vector<std::pair<std::size_t, double>> gamma;

    bool norm_ok = false;
    double norm_sum = 0.0;
    std::vector<std::pair<std::size_t, double>> hinf_per_channel;
};

/// Analytic sufficient conditions with communication delays. Fills the
/// routh and theorem fields only.
StabilityVerdict theorem1_conditions(const ChannelParams& p);

/// Delay-free specialisation; throws NonzeroCommDelay if any dc != 0.
StabilityVerdict corollary1_conditions(const ChannelParams& p);

/// theorem1_conditions plus the numerical norm check (when Hurwitz).
StabilityVerdict analyze_channel(const ChannelParams& p, const SweepOptions& opts = {});

struct Gains {
    double alpha = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Gains that place all three closed-loop poles at `pole`. Throws
/// NonNegativePole or NonPositiveGain.
Gains pole_placement_gains(double pole, double h, std::size_t m, double tau);

/// |G_{i,i-n}(j omega)| written directly in terms of the pole, for homogeneous
/// headways h.
double tf_parameterized_magnitude(double pole, double h, std::size_t m, double tau,
                                  std::span<const double> comm_delays, double actuation_delay,
                                  std::size_t n, double omega);

}  // namespace platoon
