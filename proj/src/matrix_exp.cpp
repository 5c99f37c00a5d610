#include "platoon/matrix_exp.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "platoon/error.hpp"

namespace platoon {

namespace {

// Pade [13/13] coefficients and the matching 1-norm threshold.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("matrix exponential of a {}x{} matrix", a.rows(), a.cols()));
    }
    const auto n = a.rows();
    if (n == 0) return a;

    Eigen::MatrixXd scaled = a * t;
    const double norm1 = scaled.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm1)) {
        throw Error(ErrorCode::InvalidParameter, "matrix exponential of a non-finite matrix");
    }
    if (norm1 == 0.0) return Eigen::MatrixXd::Identity(n, n);

    int squarings = 0;
    if (norm1 > kTheta13) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
        scaled /= std::ldexp(1.0, squarings);
    }

    const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd a2 = scaled * scaled;
    const Eigen::MatrixXd a4 = a2 * a2;
    const Eigen::MatrixXd a6 = a4 * a2;
    const auto& b = kPade13;

    const Eigen::MatrixXd u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    const Eigen::MatrixXd u =
        scaled * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    const Eigen::MatrixXd v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    const Eigen::MatrixXd v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

    Eigen::MatrixXd result = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) result = result * result;
    return result;
}

}  // namespace platoon
