#include "platoon/predictor.hpp"

#include <cmath>

#include <fmt/format.h>

#include "platoon/error.hpp"
#include "platoon/matrix_exp.hpp"

namespace platoon {

namespace {

void check_predecessors(const VehicleParams& ego, std::size_t count) {
    if (ego.m == 0 || count != ego.m) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("vehicle {} uses {} predecessors but {} were supplied", ego.index,
                                ego.m, count));
    }
}

// Parameters of the vehicle k places ahead of the ego (k = 0 is the ego).
const VehicleParams& ahead(const VehicleParams& ego, std::span<const VehicleParams> preds,
                           std::size_t k) {
    return k == 0 ? ego : preds[k - 1];
}

std::int64_t grid_steps(double t, double sample_time) {
    const double steps = std::round(t / sample_time);
    if (std::abs(t - steps * sample_time) > 1e-9) {
        throw Error(ErrorCode::OffGridDelay,
                    fmt::format("{} s is not on the {} s sample grid", t, sample_time));
    }
    return static_cast<std::int64_t>(steps);
}

}  // namespace

Eigen::MatrixXd build_gamma(const VehicleParams& ego, std::span<const VehicleParams> predecessors) {
    check_predecessors(ego, predecessors.size());
    const std::size_t m = ego.m;
    const auto dim = static_cast<Eigen::Index>(stacked_dim(m));
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < m; ++k) {
        // s_{i-k}' = v_{i-k-1} - v_{i-k}
        gamma(spacing_row(m, k), speed_row(m, k)) = -1.0;
        gamma(spacing_row(m, k), speed_row(m, k + 1)) = 1.0;
    }
    for (std::size_t k = 0; k <= m; ++k) {
        gamma(speed_row(m, k), accel_row(m, k)) = 1.0;
        gamma(accel_row(m, k), accel_row(m, k)) = -1.0 / ahead(ego, predecessors, k).tau;
    }
    return gamma;
}

std::vector<Eigen::VectorXd> build_b_vectors(const VehicleParams& ego,
                                             std::span<const VehicleParams> predecessors) {
    check_predecessors(ego, predecessors.size());
    const std::size_t m = ego.m;
    std::vector<Eigen::VectorXd> out;
    out.reserve(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(stacked_dim(m)));
        b(accel_row(m, j)) = 1.0 / ahead(ego, predecessors, j).tau;
        out.push_back(std::move(b));
    }
    return out;
}

Eigen::VectorXd build_gain_vector(const VehicleParams& ego,
                                  std::span<const VehicleParams> predecessors) {
    check_predecessors(ego, predecessors.size());
    const std::size_t m = ego.m;
    const double md = static_cast<double>(m);
    const double ta = ego.tau * ego.alpha;
    Eigen::VectorXd k = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(stacked_dim(m)));

    for (std::size_t j = 0; j < m; ++j) {
        k(spacing_row(m, j)) = static_cast<double>(m - j) * ta / ego.h;
    }
    k(speed_row(m, 0)) = -md * ego.tau * (ego.alpha + ego.b);
    for (std::size_t j = 1; j < m; ++j) {
        k(speed_row(m, j)) = ego.tau * ego.b -
                             ta * static_cast<double>(m - j) * predecessors[j - 1].h / ego.h;
    }
    k(speed_row(m, m)) = ego.tau * ego.b;
    k(accel_row(m, 0)) = -md * ego.tau * ego.c;
    for (std::size_t j = 1; j <= m; ++j) k(accel_row(m, j)) = ego.tau * ego.c;
    return k;
}

ControllerRealization make_realization(const VehicleParams& ego,
                                       std::span<const VehicleParams> predecessors,
                                       double actuation_delay, double sample_time) {
    if (!(sample_time > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "sample time must be positive");
    }
    ControllerRealization r;
    r.m = ego.m;
    r.dim = stacked_dim(ego.m);
    r.gamma = build_gamma(ego, predecessors);
    r.b_vectors = build_b_vectors(ego, predecessors);
    r.gain = build_gain_vector(ego, predecessors);
    r.window_steps = static_cast<std::size_t>(grid_steps(actuation_delay, sample_time));
    r.actuation_delay = static_cast<double>(r.window_steps) * sample_time;
    r.sample_time = sample_time;
    r.exp_gamma_d = matrix_exponential(r.gamma, r.actuation_delay);
    r.gain_exp = r.gain.transpose() * r.exp_gamma_d;

    const auto channels = static_cast<Eigen::Index>(r.m + 1);
    Eigen::MatrixXd b_bar(static_cast<Eigen::Index>(r.dim), channels);
    for (Eigen::Index j = 0; j < channels; ++j) b_bar.col(j) = r.b_vectors[j];

    const std::size_t window = r.window_steps;
    r.gain_kernels = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(window + 1), channels);
    if (window > 0) {
        r.quad_weights.assign(window + 1, sample_time);
        r.quad_weights.front() = 0.5 * sample_time;
        r.quad_weights.back() = 0.5 * sample_time;
        r.kernels.reserve(window + 1);
        for (std::size_t k = 0; k <= window; ++k) {
            r.kernels.push_back(
                matrix_exponential(r.gamma, static_cast<double>(k) * sample_time) * b_bar);
            r.gain_kernels.row(static_cast<Eigen::Index>(k)) = r.gain.transpose() * r.kernels.back();
        }
    }
    return r;
}

Eigen::VectorXd assemble_measurement_vector(const VehicleState& ego,
                                            std::span<const VehicleHistory* const> predecessors,
                                            std::span<const double> comm_delays, double t) {
    if (predecessors.empty() || comm_delays.size() != predecessors.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one communication delay per predecessor required");
    }
    const std::size_t m = predecessors.size();
    const double ts = predecessors.front()->s.sample_time();
    const std::int64_t now = grid_steps(t, ts);
    Eigen::VectorXd x(static_cast<Eigen::Index>(stacked_dim(m)));
    x(spacing_row(m, 0)) = ego.s;
    x(speed_row(m, 0)) = ego.v;
    x(accel_row(m, 0)) = ego.a;
    for (std::size_t j = 1; j <= m; ++j) {
        const auto& hist = *predecessors[j - 1];
        const std::int64_t step = now - grid_steps(comm_delays[j - 1], ts);
        if (j < m) x(spacing_row(m, j)) = hist.s.at_step(step);
        x(speed_row(m, j)) = hist.v.at_step(step);
        x(accel_row(m, j)) = hist.a.at_step(step);
    }
    return x;
}

Eigen::VectorXd predictor_state(const ControllerRealization& realization,
                                const Eigen::VectorXd& xbar, const SignalHistory& ego_u,
                                std::span<const SignalHistory* const> predecessor_u,
                                std::span<const double> comm_delays, double t) {
    if (static_cast<std::size_t>(xbar.size()) != realization.dim ||
        predecessor_u.size() != realization.m || comm_delays.size() != realization.m) {
        throw Error(ErrorCode::DimensionMismatch, "predictor inputs do not match the realization");
    }
    const double ts = realization.sample_time;
    const std::int64_t now = grid_steps(t, ts);
    Eigen::VectorXd q = realization.exp_gamma_d * xbar;
    for (std::size_t k = 0; k < realization.quad_weights.size(); ++k) {
        const auto& kernel = realization.kernels[k];
        const double w = realization.quad_weights[k];
        const auto back = static_cast<std::int64_t>(k);
        q.noalias() += (w * ego_u.at_step(now - back)) * kernel.col(0);
        for (std::size_t j = 1; j <= realization.m; ++j) {
            const std::int64_t dc = grid_steps(comm_delays[j - 1], ts);
            q.noalias() += (w * predecessor_u[j - 1]->at_step(now - back - dc)) *
                           kernel.col(static_cast<Eigen::Index>(j));
        }
    }
    return q;
}

double predictor_control(const ControllerRealization& realization, const Eigen::VectorXd& q) {
    if (static_cast<std::size_t>(q.size()) != realization.dim) {
        throw Error(ErrorCode::DimensionMismatch, "predictor state has the wrong length");
    }
    return realization.gain.dot(q);
}

double nominal_control(const VehicleParams& ego, std::span<const VehicleParams> predecessors,
                       const VehicleState& ego_state,
                       std::span<const VehicleState> predecessor_states) {
    check_predecessors(ego, predecessors.size());
    if (predecessor_states.size() != ego.m) {
        throw Error(ErrorCode::DimensionMismatch, "one state per predecessor required");
    }
    const std::size_t m = ego.m;
    auto state = [&](std::size_t k) -> const VehicleState& {
        return k == 0 ? ego_state : predecessor_states[k - 1];
    };

    double spacing_term = 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
        const double h_ahead = ahead(ego, predecessors, n - 1).h;
        const auto& st = state(n - 1);
        spacing_term += static_cast<double>(m - n + 1) * (h_ahead / ego.h) *
                        (st.s / h_ahead - st.v);
    }
    double speed_sum = 0.0;
    double accel_sum = 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
        speed_sum += state(n).v;
        accel_sum += state(n).a;
    }
    const double md = static_cast<double>(m);
    return ego.tau * ego.alpha * spacing_term + ego.tau * ego.b * (speed_sum - md * ego_state.v) +
           ego.tau * ego.c * (accel_sum - md * ego_state.a);
}

PredictorController::PredictorController(const VehicleParams& ego,
                                         std::vector<VehicleParams> predecessors,
                                         double actuation_delay, double sample_time)
    : realization_(make_realization(ego, predecessors, actuation_delay, sample_time)) {
    comm_delay_steps_.reserve(predecessors.size());
    for (const auto& p : predecessors) {
        comm_delay_steps_.push_back(static_cast<std::size_t>(grid_steps(p.dc, sample_time)));
    }
    if (!realization_.quad_weights.empty()) {
        endpoint_denominator_ =
            1.0 - realization_.quad_weights.front() * realization_.gain_kernels(0, 0);
    }
}

Eigen::VectorXd PredictorController::measurement(
    const VehicleState& ego, std::span<const VehicleHistory* const> predecessors,
    std::int64_t step) const {
    const std::size_t m = realization_.m;
    if (predecessors.size() != m) {
        throw Error(ErrorCode::DimensionMismatch, "one history per predecessor required");
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(realization_.dim));
    x(spacing_row(m, 0)) = ego.s;
    x(speed_row(m, 0)) = ego.v;
    x(accel_row(m, 0)) = ego.a;
    for (std::size_t j = 1; j <= m; ++j) {
        const auto& hist = *predecessors[j - 1];
        const std::int64_t at = step - static_cast<std::int64_t>(comm_delay_steps_[j - 1]);
        if (j < m) x(spacing_row(m, j)) = hist.s.at_step(at);
        x(speed_row(m, j)) = hist.v.at_step(at);
        x(accel_row(m, j)) = hist.a.at_step(at);
    }
    return x;
}

Eigen::VectorXd PredictorController::predict(const Eigen::VectorXd& xbar,
                                             const SignalHistory& ego_u,
                                             std::span<const SignalHistory* const> predecessor_u,
                                             std::int64_t step) const {
    std::vector<double> dc;
    dc.reserve(comm_delay_steps_.size());
    for (auto steps : comm_delay_steps_) {
        dc.push_back(static_cast<double>(steps) * realization_.sample_time);
    }
    return predictor_state(realization_, xbar, ego_u, predecessor_u, dc,
                           static_cast<double>(step) * realization_.sample_time);
}

double PredictorController::control(const Eigen::VectorXd& xbar, const SignalHistory& ego_u,
                                    std::span<const SignalHistory* const> predecessor_u,
                                    std::int64_t step) const {
    const std::size_t m = realization_.m;
    if (predecessor_u.size() != m) {
        throw Error(ErrorCode::DimensionMismatch, "one control history per predecessor required");
    }
    double u = realization_.gain_exp.dot(xbar);
    const auto& weights = realization_.quad_weights;
    const auto& g = realization_.gain_kernels;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const auto back = static_cast<std::int64_t>(k);
        const auto row = static_cast<Eigen::Index>(k);
        double acc = 0.0;
        if (k > 0) acc += g(row, 0) * ego_u.at_step(step - back);
        for (std::size_t j = 1; j <= m; ++j) {
            const auto dc = static_cast<std::int64_t>(comm_delay_steps_[j - 1]);
            acc += g(row, static_cast<Eigen::Index>(j)) * predecessor_u[j - 1]->at_step(step - back - dc);
        }
        u += weights[k] * acc;
    }
    return u / endpoint_denominator_;
}

}  // namespace platoon
