#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "platoon/model.hpp"
#include "platoon/signal_history.hpp"

namespace platoon {

// Stacked state layout for a vehicle i following m predecessors (dim 3m+2):
//   [s_i, s_{i-1}, ..., s_{i-m+1},  v_i, v_{i-1}, ..., v_{i-m},  a_i, ..., a_{i-m}]
// Predecessor entries are the communication-delayed samples.

constexpr std::size_t stacked_dim(std::size_t m) noexcept { return 3 * m + 2; }
constexpr std::size_t spacing_row(std::size_t /*m*/, std::size_t k) noexcept { return k; }
constexpr std::size_t speed_row(std::size_t m, std::size_t k) noexcept { return m + k; }
constexpr std::size_t accel_row(std::size_t m, std::size_t k) noexcept { return 2 * m + 1 + k; }

/// Matrices of the predictor-feedback law for one vehicle. Immutable once
/// built and safe to share across threads.
struct ControllerRealization {
    std::size_t m = 0;
    std::size_t dim = 0;
    double actuation_delay = 0.0;
    double sample_time = 0.0;
    /// D / Ts.
    std::size_t window_steps = 0;

    Eigen::MatrixXd gamma;
    Eigen::MatrixXd exp_gamma_d;
    /// [B_i, B_{i-1}, ..., B_{i-m}], each of length dim.
    std::vector<Eigen::VectorXd> b_vectors;
    Eigen::VectorXd gain;
    /// Trapezoidal weights at offsets k*Ts, k = 0..window_steps; empty when D = 0.
    std::vector<double> quad_weights;
    /// kernels[k] = e^{Gamma k Ts} [B_i ... B_{i-m}], dim x (m+1).
    std::vector<Eigen::MatrixXd> kernels;

    /// gain^T e^{Gamma D}.
    Eigen::RowVectorXd gain_exp;
    /// gain_kernels(k, j) = gain^T kernels[k].col(j).
    Eigen::MatrixXd gain_kernels;
};

/// Predecessors are ordered i-1, i-2, ..., i-m. Throws DimensionMismatch when
/// the list length differs from ego.m.
Eigen::MatrixXd build_gamma(const VehicleParams& ego, std::span<const VehicleParams> predecessors);
std::vector<Eigen::VectorXd> build_b_vectors(const VehicleParams& ego,
                                             std::span<const VehicleParams> predecessors);
Eigen::VectorXd build_gain_vector(const VehicleParams& ego,
                                  std::span<const VehicleParams> predecessors);

ControllerRealization make_realization(const VehicleParams& ego,
                                       std::span<const VehicleParams> predecessors,
                                       double actuation_delay, double sample_time);

/// Stacked measurement: ego entries undelayed, predecessor j read `dc[j-1]`
/// seconds in the past (including s_{i-1} and v_{i-1}).
Eigen::VectorXd assemble_measurement_vector(const VehicleState& ego,
                                            std::span<const VehicleHistory* const> predecessors,
                                            std::span<const double> comm_delays, double t);

/// Predictor state q_i(t). `ego_u` must already hold u_i(t); predecessor j's
/// control is read `comm_delays[j-1]` seconds late.
Eigen::VectorXd predictor_state(const ControllerRealization& realization,
                                const Eigen::VectorXd& xbar, const SignalHistory& ego_u,
                                std::span<const SignalHistory* const> predecessor_u,
                                std::span<const double> comm_delays, double t);

/// u_i = K_i^T q_i.
double predictor_control(const ControllerRealization& realization, const Eigen::VectorXd& q);

/// Delay-free multiple-predecessor law evaluated term by term.
double nominal_control(const VehicleParams& ego, std::span<const VehicleParams> predecessors,
                       const VehicleState& ego_state,
                       std::span<const VehicleState> predecessor_states);

/// Per-vehicle controller used inside the simulation loop. Works on step
/// indices and evaluates u_i(t) without forming q_i.
class PredictorController {
public:
    PredictorController(const VehicleParams& ego, std::vector<VehicleParams> predecessors,
                        double actuation_delay, double sample_time);

    const ControllerRealization& realization() const noexcept { return realization_; }
    const std::vector<std::size_t>& comm_delay_steps() const noexcept { return comm_delay_steps_; }

    Eigen::VectorXd measurement(const VehicleState& ego,
                                std::span<const VehicleHistory* const> predecessors,
                                std::int64_t step) const;

    /// Full predictor state; `ego_u` must contain the sample at `step`.
    Eigen::VectorXd predict(const Eigen::VectorXd& xbar, const SignalHistory& ego_u,
                            std::span<const SignalHistory* const> predecessor_u,
                            std::int64_t step) const;

    /// Control at `step` when `ego_u` holds samples only up to step-1. The
    /// trapezoid node at theta = t carries u_i(t) itself, so the linear
    /// equation u = K^T q(u) is solved for u in closed form.
    double control(const Eigen::VectorXd& xbar, const SignalHistory& ego_u,
                   std::span<const SignalHistory* const> predecessor_u, std::int64_t step) const;

private:
    ControllerRealization realization_;
    std::vector<std::size_t> comm_delay_steps_;
    double endpoint_denominator_ = 1.0;
};

}  // namespace platoon
