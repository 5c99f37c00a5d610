#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// None of these call into the code under test beyond plain data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "platoon/freq_analysis.hpp"
#include "platoon/model.hpp"

namespace platoon::oracle {

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double t) {
    const Eigen::MatrixXd at = a * t;
    return at.exp();
}

/// Multiple-predecessor law written out term by term.
/// states[0] is the ego, states[n] the vehicle n places ahead.
inline double nominal_law(const std::vector<VehicleParams>& veh, const std::vector<VehicleState>& states) {
    const VehicleParams& ego = veh[0];
    const auto m = ego.m;
    const double md = static_cast<double>(m);
    double spacing = 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
        const auto& k = veh[n - 1];
        const auto& x = states[n - 1];
        spacing += static_cast<double>(m - n + 1) * (k.h / ego.h) * (x.s / k.h - x.v);
    }
    double vsum = 0.0;
    double asum = 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
        vsum += states[n].v;
        asum += states[n].a;
    }
    return ego.tau * ego.alpha * spacing + ego.tau * ego.b * (vsum - md * states[0].v) +
           ego.tau * ego.c * (asum - md * states[0].a);
}

/// Roots of s^3 + d2 s^2 + d1 s + d0 through the companion matrix.
inline bool cubic_hurwitz(double d2, double d1, double d0) {
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(0, 0) = -d2;
    comp(0, 1) = -d1;
    comp(0, 2) = -d0;
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    const Eigen::Vector3cd roots = comp.eigenvalues();
    return std::all_of(roots.data(), roots.data() + 3, [](const std::complex<double>& r) { return r.real() < 0.0; });
}

/// Stacked-state matrices written out from the model equations, with the
/// ego at slot 0 and predecessor k at slot k. taus[k], heads[k] as above.
struct StackedModel {
    Eigen::MatrixXd gamma;
    std::vector<Eigen::VectorXd> b;
    Eigen::VectorXd gain;
};

inline StackedModel stacked_model(std::size_t m, const std::vector<double>& taus, const std::vector<double>& heads,
                                  double alpha, double bgain, double c) {
    const auto dim = static_cast<Eigen::Index>(3 * m + 2);
    const auto s_at = [](std::size_t k) { return static_cast<Eigen::Index>(k); };
    const auto v_at = [m](std::size_t k) { return static_cast<Eigen::Index>(m + k); };
    const auto a_at = [m](std::size_t k) { return static_cast<Eigen::Index>(2 * m + 1 + k); };
    StackedModel out;
    out.gamma = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < m; ++k) {
        out.gamma(s_at(k), v_at(k + 1)) += 1.0;
        out.gamma(s_at(k), v_at(k)) -= 1.0;
    }
    for (std::size_t k = 0; k <= m; ++k) {
        out.gamma(v_at(k), a_at(k)) = 1.0;
        out.gamma(a_at(k), a_at(k)) = -1.0 / taus[k];
        Eigen::VectorXd bk = Eigen::VectorXd::Zero(dim);
        bk(a_at(k)) = 1.0 / taus[k];
        out.b.push_back(bk);
    }
    // Coefficients of the nominal law collected per stacked entry.
    const double tau = taus[0];
    const double md = static_cast<double>(m);
    out.gain = Eigen::VectorXd::Zero(dim);
    for (std::size_t n = 1; n <= m; ++n) {
        const double w = static_cast<double>(m - n + 1) * heads[n - 1] / heads[0];
        out.gain(s_at(n - 1)) += tau * alpha * w / heads[n - 1];
        out.gain(v_at(n - 1)) -= tau * alpha * w;
        out.gain(v_at(n)) += tau * bgain;
        out.gain(a_at(n)) += tau * c;
    }
    out.gain(v_at(0)) -= tau * bgain * md;
    out.gain(a_at(0)) -= tau * c * md;
    return out;
}

/// V_i / V_{i-n} at s = j omega, solved from the closed loop in the
/// frequency domain: vehicle dynamics with the input delay, delayed
/// broadcasts, and the predictor integral taken in closed form,
///   int_0^D e^{(Gamma - sI) r} dr = (Gamma - sI)^{-1} (e^{Gamma D} e^{-sD} - I).
/// `pred_taus` are the lags of the predecessors; the result must not depend
/// on them.
inline std::complex<double> closed_loop_channel(const ChannelParams& p, std::size_t n, double omega,
                                                const std::vector<double>& pred_taus) {
    using cd = std::complex<double>;
    using VecC = Eigen::VectorXcd;
    const std::size_t m = p.m;
    const cd s(0.0, omega);
    std::vector<double> taus{p.tau};
    std::vector<double> heads{p.h};
    for (std::size_t k = 0; k < m; ++k) {
        taus.push_back(pred_taus[k]);
        heads.push_back(p.pred_headways[k]);
    }
    const StackedModel sm = stacked_model(m, taus, heads, p.alpha, p.b, p.c);
    const auto dim = sm.gamma.rows();

    // Predecessor speeds: only predecessor n is excited.
    std::vector<cd> vp(m + 1, cd(0.0));
    vp[n] = 1.0;
    std::vector<cd> delay(m + 1, cd(1.0));
    for (std::size_t k = 1; k <= m; ++k) delay[k] = std::exp(-s * p.pred_comm_delays[k - 1]);
    const cd ahead = std::exp(s * p.actuation_delay);

    // x0 + V_i x1
    VecC x0 = VecC::Zero(dim);
    VecC x1 = VecC::Zero(dim);
    x0(0) = vp[1] / s;
    x1(0) = -1.0 / s;
    for (std::size_t k = 1; k < m; ++k) {
        x0(static_cast<Eigen::Index>(k)) = delay[k] * (vp[k + 1] - vp[k]) / s;
    }
    x1(static_cast<Eigen::Index>(m)) = 1.0;
    x1(static_cast<Eigen::Index>(2 * m + 1)) = s;
    for (std::size_t k = 1; k <= m; ++k) {
        x0(static_cast<Eigen::Index>(m + k)) = delay[k] * vp[k];
        x0(static_cast<Eigen::Index>(2 * m + 1 + k)) = delay[k] * s * vp[k];
    }

    const Eigen::MatrixXcd ed = expm(sm.gamma, p.actuation_delay).cast<cd>();
    const Eigen::MatrixXcd shifted = sm.gamma.cast<cd>() - s * Eigen::MatrixXcd::Identity(dim, dim);
    const Eigen::MatrixXcd integral =
        shifted.partialPivLu().solve(ed * std::exp(-s * p.actuation_delay) - Eigen::MatrixXcd::Identity(dim, dim));

    // Forcing: u_i = c_ego V_i, delayed predecessor inputs fixed.
    const cd c_ego = ahead * (p.tau * s + 1.0) * s;
    VecC f0 = VecC::Zero(dim);
    for (std::size_t k = 1; k <= m; ++k) {
        f0 += sm.b[k].cast<cd>() * (delay[k] * ahead * (taus[k] * s + 1.0) * s * vp[k]);
    }
    const VecC f1 = sm.b[0].cast<cd>() * c_ego;

    const Eigen::VectorXcd kc = sm.gain.cast<cd>();
    const cd r0 = kc.dot(ed * x0 + integral * f0);
    const cd r1 = kc.dot(ed * x1 + integral * f1);
    return r0 / (c_ego - r1);
}

/// Maximum of |G| over `points` frequencies in [lo, hi] spaced uniformly
/// or logarithmically, with the DC value 1/m included.
inline double brute_force_hinf(const std::function<double(double)>& magnitude, std::size_t m,
                               std::size_t points, bool log_spacing, double lo = 1e-4, double hi = 1e4) {
    double best = 1.0 / static_cast<double>(m);
    const double a = log_spacing ? std::log(lo) : lo;
    const double b = log_spacing ? std::log(hi) : hi;
    for (std::size_t k = 0; k < points; ++k) {
        const double x = a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1);
        best = std::max(best, magnitude(log_spacing ? std::exp(x) : x));
    }
    return best;
}

/// Classical RK4 for x' = f(t, x).
inline Eigen::VectorXd rk4(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                           Eigen::VectorXd x, double t0, double t1, double dt) {
    const auto steps = static_cast<long>(std::llround((t1 - t0) / dt));
    double t = t0;
    for (long k = 0; k < steps; ++k) {
        const Eigen::VectorXd k1 = f(t, x);
        const Eigen::VectorXd k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = f(t + dt, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
    }
    return x;
}

/// Random homogeneous-gain channel with heterogeneous predecessor headways
/// and delays, not necessarily stable.
inline ChannelParams random_channel(std::mt19937_64& rng, std::size_t max_m = 4, double max_dc = 0.3,
                                    double max_d = 2.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto range = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    ChannelParams p;
    p.m = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(max_m)) % max_m;
    p.alpha = range(0.5, 10.0);
    p.b = range(0.5, 20.0);
    p.c = range(0.1, 4.0);
    p.tau = range(0.05, 0.5);
    p.h = range(0.2, 3.0);
    p.actuation_delay = range(0.0, max_d);
    p.pred_headways.clear();
    p.pred_comm_delays.clear();
    for (std::size_t n = 0; n < p.m; ++n) {
        p.pred_headways.push_back(range(0.2, 3.0));
        p.pred_comm_delays.push_back(range(0.0, max_dc));
    }
    return p;
}

}  // namespace platoon::oracle
