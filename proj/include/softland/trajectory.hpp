#pragma once

// Quintic soft-landing reference: the unique 5th-degree polynomial through
// position z0 at t0 and zf at tf with zero velocity and zero acceleration at
// both ends. In normalized time s = (t - t0)/(tf - t0) it reduces to
//   z(s) = z0 + (zf - z0) * (10 s^3 - 15 s^4 + 6 s^5).
// Coefficients are stored in normalized time for conditioning; evaluation
// chain-rules derivatives by (tf - t0)^-k. Outside [t0, tf] the reference
// holds the nearer endpoint value with zero derivatives.

#include <array>
#include <cstddef>
#include <stdexcept>

namespace softland {

struct Trajectory {
    double t0;  ///< start time, s
    double tf;  ///< end time, s
    double z0;  ///< start value
    double zf;  ///< end value
    std::array<double, 6> coeffs;  ///< monomial coefficients in s = (t-t0)/(tf-t0)

    double duration() const { return tf - t0; }
};

/// Fits the soft-landing quintic for the six boundary conditions above.
/// Throws std::invalid_argument unless tf > t0.
inline Trajectory design_quintic(double z0, double zf, double t0, double tf) {
    if (!(tf > t0))
        throw std::invalid_argument("design_quintic: need tf > t0");
    const double d = zf - z0;
    return Trajectory{t0, tf, z0, zf, {z0, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d}};
}

/// Evaluates the reference or one of its time derivatives (order 0..3).
/// Times outside [t0, tf] clamp to the endpoint: order 0 returns the held
/// endpoint value, orders 1..3 return zero there.
inline double eval(const Trajectory& traj, double t, int order = 0) {
    if (order < 0 || order > 3)
        throw std::invalid_argument("trajectory eval: order must be in 0..3");
    const double T = traj.tf - traj.t0;
    if (t <= traj.t0) {
        if (t < traj.t0) return order == 0 ? traj.z0 : 0.0;
    } else if (t >= traj.tf) {
        return order == 0 ? traj.zf : 0.0;
    }
    const double s = (t - traj.t0) / T;
    // differentiate the monomial basis in s, then chain-rule by T^-order
    double acc = 0.0;
    for (std::size_t k = 5;; --k) {
        double factor = 1.0;
        for (int j = 0; j < order; ++j) factor *= static_cast<double>(k - j);
        if (static_cast<int>(k) >= order) acc = acc * s + traj.coeffs[k] * factor;
        if (k == 0) break;
    }
    double scale = 1.0;
    for (int j = 0; j < order; ++j) scale /= T;
    return acc * scale;
}

/// Reference position and its first three derivatives at one instant.
struct RefPoint {
    double z;
    double z_dot;
    double z_ddot;
    double z_dddot;
};

inline RefPoint eval_all(const Trajectory& traj, double t) {
    return RefPoint{eval(traj, t, 0), eval(traj, t, 1), eval(traj, t, 2), eval(traj, t, 3)};
}

}  // namespace softland
