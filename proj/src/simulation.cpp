#include "platoon/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>

#include <omp.h>

#include "platoon/error.hpp"
#include "platoon/predictor.hpp"
#include "platoon/signal_history.hpp"

namespace platoon {

namespace {

// Leader command u_0 on the grid, long enough for look-ahead by D.
std::vector<double> leader_commands(const ValidatedConfig& cfg, const SampledProfile& profile) {
    const auto& leader = cfg.vehicle(0);
    const std::size_t ahead = cfg.delay_steps();
    const std::size_t n = cfg.step_count();
    std::vector<double> u(n, 0.0);
    const double ts = cfg.config().sample_time;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = std::min(k + ahead, profile.accel.size() - 1);
        if (cfg.config().leader_profile.mode() == LeaderMode::Piecewise) {
            // Delayed by D, this reproduces the reference acceleration through
            // the leader's own lag.
            u[k] = profile.accel[j];
        } else {
            // Recorded data: the command that yields the recorded
            // acceleration exactly, a + tau * da/dt.
            const std::size_t lo = j == 0 ? 0 : j - 1;
            const std::size_t hi = std::min(j + 1, profile.accel.size() - 1);
            const double jerk =
                hi > lo ? (profile.accel[hi] - profile.accel[lo]) / (static_cast<double>(hi - lo) * ts)
                        : 0.0;
            u[k] = profile.accel[j] + leader.tau * jerk;
        }
    }
    return u;
}

// L2 differences below this are rounding, not amplification.
constexpr double kAmplificationFloor = 1e-9;

double trapezoid_l2(const std::vector<double>& series, double ref, double ts) {
    if (series.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double e0 = series[k] - ref;
        const double e1 = series[k + 1] - ref;
        acc += 0.5 * ts * (e0 * e0 + e1 * e1);
    }
    return std::sqrt(acc);
}

}  // namespace

SimulationResult run_scenario(const ValidatedConfig& cfg) {
    const auto& config = cfg.config();
    const std::size_t n_veh = cfg.vehicle_count();
    const std::size_t n_steps = cfg.step_count();
    const double ts = config.sample_time;
    const auto d_steps = static_cast<std::int64_t>(cfg.delay_steps());

    const SampledProfile profile =
        config.leader_profile.sample(ts, n_steps + cfg.delay_steps() + 2);
    const std::vector<double> leader_u = leader_commands(cfg, profile);
    const bool data_driven = config.leader_profile.mode() == LeaderMode::DataDriven;

    std::vector<VehicleState> states = config.initial_state;
    if (data_driven) states[0] = {0.0, profile.speed[0], profile.accel[0]};

    const double max_delay =
        config.actuation_delay + static_cast<double>(cfg.max_comm_delay_steps()) * ts;
    const std::size_t capacity = SignalHistory::capacity_for(max_delay, ts);
    std::vector<VehicleHistory> hist;
    hist.reserve(n_veh);
    for (std::size_t i = 0; i < n_veh; ++i) hist.emplace_back(capacity, ts, states[i]);

    std::vector<std::unique_ptr<PredictorController>> controllers(n_veh);
    std::vector<std::vector<const VehicleHistory*>> pred_hist(n_veh);
    std::vector<std::vector<const SignalHistory*>> pred_u(n_veh);
    for (std::size_t i = 1; i < n_veh; ++i) {
        const auto& ego = cfg.vehicle(i);
        std::vector<VehicleParams> preds;
        for (std::size_t j = 1; j <= ego.m; ++j) {
            preds.push_back(cfg.vehicle(i - j));
            pred_hist[i].push_back(&hist[i - j]);
            pred_u[i].push_back(&hist[i - j].u);
        }
        controllers[i] = std::make_unique<PredictorController>(ego, std::move(preds),
                                                               config.actuation_delay, ts);
    }

    SimulationResult out;
    out.sample_time = ts;
    out.time.resize(n_steps);
    for (auto* series : {&out.spacing, &out.speed, &out.accel, &out.control}) {
        series->assign(n_veh, std::vector<double>(n_steps, 0.0));
    }

    std::vector<VehicleState> next(n_veh);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const auto step = static_cast<std::int64_t>(k);
        out.time[k] = static_cast<double>(k) * ts;
        for (std::size_t i = 0; i < n_veh; ++i) {
            hist[i].push_state(states[i]);
            out.spacing[i][k] = states[i].s;
            out.speed[i][k] = states[i].v;
            out.accel[i][k] = states[i].a;
        }

        hist[0].u.push(leader_u[k]);
        out.control[0][k] = leader_u[k];
        for (std::size_t i = 1; i < n_veh; ++i) {
            const auto& ctrl = *controllers[i];
            const Eigen::VectorXd xbar = ctrl.measurement(states[i], pred_hist[i], step);
            const double u = ctrl.control(xbar, hist[i].u, pred_u[i], step);
            hist[i].u.push(u);
            out.control[i][k] = u;
        }

        for (std::size_t i = 0; i < n_veh; ++i) {
            const double u_delayed = hist[i].u.at_step(step - d_steps);
            const double v_pred = i == 0 ? states[0].v : states[i - 1].v;
            next[i] = euler_step(states[i],
                                 vehicle_derivative(states[i], v_pred, u_delayed, cfg.vehicle(i).tau),
                                 ts);
        }
        if (data_driven) {
            next[0] = {0.0, profile.speed[k + 1], profile.accel[k + 1]};
        }
        std::swap(states, next);
    }

    out.v_ss = config.leader_profile.speeds().back();
    out.metrics = compute_metrics(out, config.vehicles, out.v_ss);
    return out;
}

std::vector<SimulationResult> run_batch(const std::vector<ValidatedConfig>& configs, int threads) {
    std::vector<SimulationResult> results(configs.size());
    const auto n = static_cast<std::int64_t>(configs.size());
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
    for (std::int64_t k = 0; k < n; ++k) {
        try {
            results[static_cast<std::size_t>(k)] = run_scenario(configs[static_cast<std::size_t>(k)]);
        } catch (...) {
#pragma omp critical(batch_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::vector<VehicleMetrics> compute_metrics(const SimulationResult& result,
                                            const std::vector<VehicleParams>& vehicles,
                                            double v_ss) {
    const std::size_t n_veh = result.vehicle_count();
    const std::size_t n = result.sample_count();
    if (n == 0 || vehicles.size() != n_veh) {
        throw Error(ErrorCode::DimensionMismatch, "metrics need a non-empty result for every vehicle");
    }
    const std::size_t tail_start = n - std::max<std::size_t>(1, n / 10);

    std::vector<VehicleMetrics> metrics(n_veh);
    for (std::size_t i = 0; i < n_veh; ++i) {
        const auto& v = result.speed[i];
        const auto& s = result.spacing[i];
        auto& mt = metrics[i];
        mt.peak_speed = *std::max_element(v.begin(), v.end());
        mt.overshoot = std::max(0.0, mt.peak_speed - v_ss);
        mt.l2_speed_dev = trapezoid_l2(v, v_ss, result.sample_time);
        if (i == 0) continue;
        const double h = vehicles[i].h;
        mt.terminal_spacing_error = s.back() - h * v.back();
        mt.min_spacing = *std::min_element(s.begin(), s.end());
        for (std::size_t k = tail_start; k < n; ++k) {
            mt.steady_speed_error = std::max(mt.steady_speed_error, std::abs(v[k] - v_ss));
            mt.steady_spacing_error = std::max(mt.steady_spacing_error, std::abs(s[k] - h * v_ss));
        }
    }
    for (std::size_t i = 1; i < n_veh; ++i) {
        double worst_pred = 0.0;
        const std::size_t m = std::min(vehicles[i].m, i);
        for (std::size_t j = 1; j <= m; ++j) {
            worst_pred = std::max(worst_pred, metrics[i - j].l2_speed_dev);
        }
        metrics[i].amplifies = metrics[i].l2_speed_dev > worst_pred + kAmplificationFloor;
    }
    return metrics;
}

std::vector<std::vector<double>> reconstruct_positions(const SimulationResult& result,
                                                       const std::vector<VehicleParams>& vehicles) {
    const std::size_t n_veh = result.vehicle_count();
    const std::size_t n = result.sample_count();
    if (vehicles.size() != n_veh) {
        throw Error(ErrorCode::DimensionMismatch, "one parameter set per simulated vehicle required");
    }
    std::vector<std::vector<double>> x(n_veh, std::vector<double>(n, 0.0));
    for (std::size_t k = 1; k < n; ++k) {
        x[0][k] = x[0][k - 1] + result.sample_time * result.speed[0][k - 1];
    }
    for (std::size_t i = 1; i < n_veh; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            x[i][k] = x[i - 1][k] - result.spacing[i][k] - vehicles[i].length;
        }
    }
    return x;
}

PlatoonConfig with_single_predecessor(PlatoonConfig config) {
    for (std::size_t i = 1; i < config.vehicles.size(); ++i) config.vehicles[i].m = 1;
    return config;
}

}  // namespace platoon
