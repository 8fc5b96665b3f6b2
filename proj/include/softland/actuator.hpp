#pragma once

// Lumped-parameter model of a single-coil reluctance actuator.
//
// Electrical/magnetic side:   lam_dot = -R * (Rc(lam) + Rg(z)) * lam + u
// Mechanical side:            m * z_ddot = F_pas(z, z_dot) + F_mag(z, lam)
//
// with core and gap reluctances (per turn squared)
//
//   Rc(lam) = kappa1 / (1 - |lam|/kappa2)                 (saturation)
//   Rg(z)   = kappa3 + kappa4*z / (1 + kappa5*z*ln(kappa6/z))   (fringing)
//
// an ideal return spring F_pas = -k_sp*(z - z_sp), and the magnetic force
// F_mag = -1/2 * Rg'(z) * lam^2. The armature travels between two stops,
// z in [z_min, z_max]; flux is admissible for |lam| < lambda_sat.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "softland/errors.hpp"

namespace softland {

struct ActuatorParams {
    double kappa1;      ///< core reluctance at zero flux, 1/H
    double kappa2;      ///< saturation flux-linkage scale, Wb
    double kappa3;      ///< gap reluctance at zero gap, 1/H
    double kappa4;      ///< gap reluctance slope at zero gap, 1/(H m)
    double kappa5;      ///< fringing shape constant, 1/m
    double kappa6;      ///< fringing length constant, m
    double z_min;       ///< lower mechanical stop, m
    double z_max;       ///< upper mechanical stop, m
    double mass;        ///< armature mass, kg
    double k_sp;        ///< spring stiffness, N/m
    double z_sp;        ///< spring resting position, m
    double resistance;  ///< coil resistance, Ohm
    double lambda_sat;  ///< admissible flux-linkage bound, Wb

    /// Throws std::invalid_argument if any structural invariant is violated.
    void validate() const {
        auto require = [](bool ok, const char* msg) {
            if (!ok) throw std::invalid_argument(std::string("ActuatorParams: ") + msg);
        };
        require(kappa1 > 0 && kappa2 > 0 && kappa3 > 0 && kappa4 > 0 &&
                    kappa5 > 0 && kappa6 > 0,
                "kappa1..kappa6 must be strictly positive");
        require(mass > 0, "mass must be strictly positive");
        require(k_sp > 0, "k_sp must be strictly positive");
        require(resistance > 0, "resistance must be strictly positive");
        require(z_min >= 0 && z_min < z_max, "need 0 <= z_min < z_max");
        require(z_max < kappa6, "z_max must lie below kappa6 (gap model domain)");
        require(lambda_sat > 0 && lambda_sat <= kappa2,
                "need 0 < lambda_sat <= kappa2");
    }
};

/// Armature contact situation. The stops are unilateral: while seated the
/// position is pinned to the stop coordinate and the velocity is zero.
enum class Contact { interior, at_lower_stop, at_upper_stop };

struct State {
    double z;        ///< armature position, m
    double z_dot;    ///< armature velocity, m/s
    double lam;      ///< flux linkage, Wb
    Contact contact = Contact::interior;
};

/// Time derivative of the continuous state.
struct StateRate {
    double z_dot;
    double z_ddot;
    double lam_dot;
};

/// Core reluctance Rc(lam) = kappa1 / (1 - |lam|/kappa2). Even in lam.
/// Throws std::domain_error at or beyond the saturation pole |lam| >= kappa2.
inline double reluctance_core(double lam, const ActuatorParams& p) {
    const double a = std::abs(lam);
    if (!(a < p.kappa2))
        throw std::domain_error("reluctance_core: |lam| >= kappa2 (saturation pole)");
    return p.kappa1 / (1.0 - a / p.kappa2);
}

namespace detail {
// Shared fringing denominator 1 + kappa5*z*ln(kappa6/z), z in (0, kappa6].
inline double gap_denominator(double z, const ActuatorParams& p) {
    return 1.0 + p.kappa5 * z * std::log(p.kappa6 / z);
}
inline void check_gap_domain(double z, const ActuatorParams& p, const char* who) {
    if (!(z >= 0.0) || z > p.kappa6)
        throw std::domain_error(std::string(who) + ": z outside [0, kappa6]");
}
}  // namespace detail

/// Gap reluctance Rg(z). The z = 0 value is the analytic limit kappa3
/// (z*ln(kappa6/z) -> 0); at z = kappa6 the log term vanishes exactly.
inline double reluctance_gap(double z, const ActuatorParams& p) {
    detail::check_gap_domain(z, p, "reluctance_gap");
    if (z == 0.0) return p.kappa3;
    return p.kappa3 + p.kappa4 * z / detail::gap_denominator(z, p);
}

/// First derivative of Rg, which simplifies to
///   Rg'(z) = kappa4*(1 + kappa5*z) / (1 + kappa5*z*ln(kappa6/z))^2,
/// with analytic limit kappa4 at z = 0.
inline double reluctance_gap_d1(double z, const ActuatorParams& p) {
    detail::check_gap_domain(z, p, "reluctance_gap_d1");
    if (z == 0.0) return p.kappa4;
    const double den = detail::gap_denominator(z, p);
    return p.kappa4 * (1.0 + p.kappa5 * z) / (den * den);
}

/// Second derivative of Rg,
///   Rg''(z) = kappa4*kappa5*(3 + 2*kappa5*z - (2 + kappa5*z)*ln(kappa6/z))
///             / (1 + kappa5*z*ln(kappa6/z))^3.
/// The z -> 0 limit diverges like -2*kappa4*kappa5*ln(kappa6/z); at exactly
/// z = 0 the (signed) limit value -inf is returned. Callers that form the
/// product Rg''*z_dot at a trajectory endpoint must skip the term when
/// z_dot == 0 (the product's limit is zero).
inline double reluctance_gap_d2(double z, const ActuatorParams& p) {
    detail::check_gap_domain(z, p, "reluctance_gap_d2");
    if (z == 0.0) return -std::numeric_limits<double>::infinity();
    const double L = std::log(p.kappa6 / z);
    const double den = detail::gap_denominator(z, p);
    return p.kappa4 * p.kappa5 * (3.0 + 2.0 * p.kappa5 * z - (2.0 + p.kappa5 * z) * L) /
           (den * den * den);
}

/// Passive (spring) force -k_sp*(z - z_sp). The velocity argument is unused
/// by the ideal spring but kept so velocity-dependent passive forces remain
/// pluggable; the flatness inversion consumes the two partials below.
inline double passive_force(double z, double /*z_dot*/, const ActuatorParams& p) {
    return -p.k_sp * (z - p.z_sp);
}

/// d F_pas / d z for the ideal spring.
inline double passive_force_dz(const ActuatorParams& p) { return -p.k_sp; }

/// d F_pas / d z_dot for the ideal spring.
inline double passive_force_dv(const ActuatorParams&) { return 0.0; }

/// Magnetic force F_mag = -1/2 * Rg'(z) * lam^2. Attractive (negative) for
/// all admissible z: the single coil can only pull the gap shut.
inline double magnetic_force(double z, double lam, const ActuatorParams& p) {
    return -0.5 * reluctance_gap_d1(z, p) * lam * lam;
}

/// Full state derivative (z_dot, z_ddot, lam_dot) for coil voltage u.
/// Pure function of its arguments.
inline StateRate state_derivative(const State& s, double u, const ActuatorParams& p) {
    const double f = passive_force(s.z, s.z_dot, p) + magnetic_force(s.z, s.lam, p);
    const double lam_dot =
        -p.resistance * (reluctance_core(s.lam, p) + reluctance_gap(s.z, p)) * s.lam + u;
    return StateRate{s.z_dot, f / p.mass, lam_dot};
}

}  // namespace softland
