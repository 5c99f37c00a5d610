#include "platoon/freq_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "platoon/error.hpp"

namespace platoon {

namespace {

using cplx = std::complex<double>;

void check_channel(const ChannelParams& p) {
    if (p.m == 0 || p.pred_headways.size() != p.m || p.pred_comm_delays.size() != p.m) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("channel with m = {} needs {} predecessor headways and delays", p.m,
                                p.m));
    }
    if (!(p.tau > 0.0) || !(p.h > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "tau and h must be positive");
    }
}

void check_offset(const ChannelParams& p, std::size_t n) {
    if (n < 1 || n > p.m) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("predecessor offset {} outside [1, {}]", n, p.m));
    }
}

cplx delay(double seconds, double omega) { return std::polar(1.0, -omega * seconds); }

// b - (m - n) alpha h_{i-n} / h
double speed_coefficient(const ChannelParams& p, std::size_t n) {
    const double ratio = p.pred_headways[n - 1] / p.h;
    return p.b - static_cast<double>(p.m - n) * p.alpha * ratio;
}

double golden_max(const auto& f, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    double best = std::max(f1, f2);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

}  // namespace

ChannelParams ChannelParams::homogeneous(double alpha, double b, double c, double tau, double h,
                                         std::size_t m, double comm_delay,
                                         double actuation_delay) {
    ChannelParams p;
    p.alpha = alpha;
    p.b = b;
    p.c = c;
    p.tau = tau;
    p.h = h;
    p.m = m;
    p.pred_headways.assign(m, h);
    p.pred_comm_delays.assign(m, comm_delay);
    p.actuation_delay = actuation_delay;
    return p;
}

ChannelParams channel_from_platoon(const std::vector<VehicleParams>& vehicles, std::size_t i,
                                   double actuation_delay) {
    if (i == 0 || i >= vehicles.size()) {
        throw Error(ErrorCode::InvalidParameter, fmt::format("vehicle {} is not a follower", i));
    }
    const auto& ego = vehicles[i];
    if (ego.m < 1 || ego.m > i) {
        throw Error(ErrorCode::BadMpfDepth,
                    fmt::format("vehicle {}: MPF depth {} must lie in [1, {}]", i, ego.m, i));
    }
    ChannelParams p;
    p.alpha = ego.alpha;
    p.b = ego.b;
    p.c = ego.c;
    p.tau = ego.tau;
    p.h = ego.h;
    p.m = ego.m;
    p.actuation_delay = actuation_delay;
    p.pred_headways.clear();
    p.pred_comm_delays.clear();
    for (std::size_t n = 1; n <= ego.m; ++n) {
        const auto& pred = vehicles[i - n];
        p.pred_headways.push_back(i - n == 0 ? ego.h : pred.h);
        p.pred_comm_delays.push_back(pred.dc);
    }
    return p;
}

Cubic denominator_coeffs(const ChannelParams& p) {
    const double m = static_cast<double>(p.m);
    return {(1.0 + m * p.tau * p.c) / p.tau, m * (p.alpha + p.b), m * p.alpha / p.h};
}

RouthResult routh_stable(const ChannelParams& p) {
    check_channel(p);
    const Cubic d = denominator_coeffs(p);
    const double m = static_cast<double>(p.m);
    RouthResult r;
    r.margin = (1.0 / p.tau + m * p.c) * (p.alpha + p.b) - p.alpha / p.h;
    r.stable = d.d2 > 0.0 && d.d1 > 0.0 && d.d0 > 0.0 && d.d2 * d.d1 > d.d0;
    return r;
}

std::complex<double> transfer_function(const ChannelParams& p, std::size_t n, double omega) {
    check_channel(p);
    check_offset(p, n);
    const Cubic d = denominator_coeffs(p);
    const cplx s(0.0, omega);
    const cplx den = ((s + d.d2) * s + d.d1) * s + d.d0;
    const double k = speed_coefficient(p, n);
    const double dc_n = p.pred_comm_delays[n - 1];
    cplx num;
    if (n == 1) {
        const cplx e_dc = delay(dc_n, omega);
        const cplx e_d = delay(p.actuation_delay, omega);
        const double m = static_cast<double>(p.m);
        num = (p.c * s + k) * s * e_dc + (p.alpha / p.h) * (e_dc + m * e_d * (1.0 - e_dc));
    } else {
        num = ((p.c * s + k) * s + p.alpha / p.h) * delay(dc_n, omega);
    }
    return num / den;
}

double tf_magnitude(const ChannelParams& p, std::size_t n, double omega) {
    if (n == 1) return std::abs(transfer_function(p, n, omega));
    check_channel(p);
    check_offset(p, n);
    const Cubic d = denominator_coeffs(p);
    const cplx s(0.0, omega);
    const cplx den = ((s + d.d2) * s + d.d1) * s + d.d0;
    const cplx num = (p.c * s + speed_coefficient(p, n)) * s + p.alpha / p.h;
    return std::abs(num) / std::abs(den);
}

double hinf_norm(const ChannelParams& p, std::size_t n, const SweepOptions& opts) {
    check_offset(p, n);
    if (!routh_stable(p).stable) {
        throw Error(ErrorCode::UnstableChannel, "closed-loop cubic is not Hurwitz");
    }
    if (opts.points < 2 || !(opts.omega_min > 0.0) || !(opts.omega_max > opts.omega_min)) {
        throw Error(ErrorCode::InvalidParameter, "frequency grid needs >= 2 points on a positive range");
    }
    const double log_lo = std::log(opts.omega_min);
    const double log_hi = std::log(opts.omega_max);
    const double step = (log_hi - log_lo) / static_cast<double>(opts.points - 1);
    auto mag_at_log = [&](double lw) { return tf_magnitude(p, n, std::exp(lw)); };

    std::vector<double> mags(opts.points);
    for (std::size_t k = 0; k < opts.points; ++k) {
        mags[k] = mag_at_log(log_lo + step * static_cast<double>(k));
    }

    // Local maxima of the sampled curve, largest first.
    std::vector<std::size_t> peaks;
    for (std::size_t k = 0; k < opts.points; ++k) {
        const bool left = k == 0 || mags[k] >= mags[k - 1];
        const bool right = k + 1 == opts.points || mags[k] >= mags[k + 1];
        if (left && right) peaks.push_back(k);
    }
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t x, std::size_t y) { return mags[x] > mags[y]; });
    if (peaks.size() > opts.refine_candidates) peaks.resize(opts.refine_candidates);

    double best = 1.0 / static_cast<double>(p.m);
    for (double mg : mags) best = std::max(best, mg);
    for (std::size_t k : peaks) {
        const double lo = log_lo + step * static_cast<double>(k == 0 ? 0 : k - 1);
        const double hi =
            log_lo + step * static_cast<double>(std::min(k + 1, opts.points - 1));
        best = std::max(best, golden_max(mag_at_log, lo, hi));
    }
    return best;
}

NormReport string_stable_norm(const ChannelParams& p, const SweepOptions& opts) {
    NormReport r;
    const double m = static_cast<double>(p.m);
    for (std::size_t n = 1; n <= p.m; ++n) {
        const double norm = hinf_norm(p, n, opts);
        r.per_channel.emplace_back(n, norm);
        r.sum += norm;
        r.worst_scaled = std::max(r.worst_scaled, m * norm);
    }
    r.ok = r.sum <= 1.0 + kStringStabilityTolerance;
    return r;
}

StabilityVerdict theorem1_conditions(const ChannelParams& p) {
    check_channel(p);
    StabilityVerdict v;
    const auto routh = routh_stable(p);
    v.routh_ok = routh.stable;
    v.routh_margin = routh.margin;

    const double m = static_cast<double>(p.m);
    const double m2 = m * m;
    const double lead = (1.0 + m * p.tau * p.c) / p.tau;
    const double dc1 = p.pred_comm_delays[0];
    const double k1 = speed_coefficient(p, 1);
    const double ed = m * p.alpha / p.h * dc1;
    const double window = 2.0 * dc1 + p.actuation_delay;

    v.beta_bar = lead * lead - 2.0 * m * (p.alpha + p.b) - m2 * p.c * p.c -
                 m2 * 2.0 * p.c * ed * window;
    v.beta = 1.0 / (p.tau * p.tau) + 2.0 * m * p.c / p.tau - 2.0 * m * (p.alpha + p.b);
    v.gamma_bar = m2 * (p.alpha + p.b) * (p.alpha + p.b) - 2.0 * lead * m * p.alpha / p.h -
                  m2 * (-2.0 * p.c * p.alpha / p.h + k1 * k1 + 2.0 * ed * ed +
                        4.0 * std::abs(k1) * ed) -
                  2.0 * m2 * p.alpha / p.h * ed * window;

    for (std::size_t n = 2; n <= p.m; ++n) {
        const double r = static_cast<double>(p.m - n) * p.pred_headways[n - 1] / p.h;
        const double g = -2.0 * m * p.alpha / (p.h * p.tau) + 2.0 * m2 * (1.0 + r) * p.alpha * p.b +
                         m2 * (1.0 - r * r) * p.alpha * p.alpha;
        v.gamma.emplace_back(n, g);
    }

    const bool nonneg_branch =
        v.beta_bar >= 0.0 && v.beta >= 0.0 && v.gamma_bar >= 0.0 &&
        std::all_of(v.gamma.begin(), v.gamma.end(), [](const auto& g) { return g.second >= 0.0; });
    const bool discriminant_branch =
        4.0 * v.gamma_bar - v.beta_bar * v.beta_bar >= 0.0 && v.beta_bar < 0.0 && v.beta < 0.0 &&
        std::all_of(v.gamma.begin(), v.gamma.end(),
                    [&](const auto& g) { return 4.0 * g.second - v.beta * v.beta >= 0.0; });
    v.theorem1_ok = v.routh_ok && (nonneg_branch || discriminant_branch);
    return v;
}

StabilityVerdict corollary1_conditions(const ChannelParams& p) {
    check_channel(p);
    for (double dc : p.pred_comm_delays) {
        if (dc != 0.0) {
            throw Error(ErrorCode::NonzeroCommDelay,
                        "delay-free conditions need every communication delay to be zero");
        }
    }
    StabilityVerdict v;
    const auto routh = routh_stable(p);
    v.routh_ok = routh.stable;
    v.routh_margin = routh.margin;

    const double m = static_cast<double>(p.m);
    const double m2 = m * m;
    v.beta = 1.0 / (p.tau * p.tau) + 2.0 * m * p.c / p.tau - 2.0 * m * (p.alpha + p.b);
    v.beta_bar = v.beta;
    for (std::size_t n = 1; n <= p.m; ++n) {
        const double r = static_cast<double>(p.m - n) * p.pred_headways[n - 1] / p.h;
        const double g = -2.0 * m * p.alpha / (p.h * p.tau) + 2.0 * m2 * (1.0 + r) * p.alpha * p.b +
                         m2 * (1.0 - r * r) * p.alpha * p.alpha;
        v.gamma.emplace_back(n, g);
    }
    v.gamma_bar = v.gamma.front().second;

    const bool nonneg_branch =
        v.beta >= 0.0 &&
        std::all_of(v.gamma.begin(), v.gamma.end(), [](const auto& g) { return g.second >= 0.0; });
    const bool discriminant_branch =
        v.beta < 0.0 && std::all_of(v.gamma.begin(), v.gamma.end(), [&](const auto& g) {
            return 4.0 * g.second - v.beta * v.beta >= 0.0;
        });
    v.theorem1_ok = v.routh_ok && (nonneg_branch || discriminant_branch);
    return v;
}

StabilityVerdict analyze_channel(const ChannelParams& p, const SweepOptions& opts) {
    StabilityVerdict v = theorem1_conditions(p);
    if (v.routh_ok) {
        const auto norms = string_stable_norm(p, opts);
        v.norm_ok = norms.ok;
        v.norm_sum = norms.sum;
        v.hinf_per_channel = norms.per_channel;
    }
    return v;
}

Gains pole_placement_gains(double pole, double h, std::size_t m, double tau) {
    if (!(pole < 0.0)) {
        throw Error(ErrorCode::NonNegativePole, fmt::format("pole {} must be negative", pole));
    }
    if (m == 0 || !(h > 0.0) || !(tau > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "pole placement needs m >= 1, h > 0, tau > 0");
    }
    const double md = static_cast<double>(m);
    const double p2 = pole * pole;
    const double p3 = p2 * pole;
    Gains g;
    g.alpha = -(h / md) * p3;
    g.b = (h / md) * p3 + (3.0 / md) * p2;
    g.c = -1.0 / (md * tau) - (3.0 / md) * pole;
    if (!(g.alpha > 0.0) || !(g.b > 0.0) || !(g.c > 0.0)) {
        throw Error(ErrorCode::NonPositiveGain,
                    fmt::format("pole {} gives alpha = {}, b = {}, c = {}", pole, g.alpha, g.b, g.c));
    }
    return g;
}

double tf_parameterized_magnitude(double pole, double h, std::size_t m, double tau,
                                  std::span<const double> comm_delays, double actuation_delay,
                                  std::size_t n, double omega) {
    if (!(pole < 0.0)) {
        throw Error(ErrorCode::NonNegativePole, fmt::format("pole {} must be negative", pole));
    }
    if (comm_delays.size() != m || n < 1 || n > m) {
        throw Error(ErrorCode::DimensionMismatch, "one communication delay per predecessor required");
    }
    const double md = static_cast<double>(m);
    const cplx s(0.0, omega);
    const cplx e_dc = delay(comm_delays[n - 1], omega);
    const double mu1 = -(1.0 / md) * (1.0 / tau + 3.0 * pole);
    const double mu2 =
        (pole * pole / md) * (3.0 + h * pole + static_cast<double>(m - n) * h * pole);
    const double dc_gain = -pole * pole * pole / md;
    cplx num = (mu1 * s + mu2) * s * e_dc;
    if (n == 1) {
        num += dc_gain * (e_dc + md * delay(actuation_delay, omega) * (1.0 - e_dc));
    } else {
        num += dc_gain * e_dc;
    }
    const cplx shifted = s - pole;
    return std::abs(num / (shifted * shifted * shifted));
}

}  // namespace platoon
