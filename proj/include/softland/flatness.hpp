#pragma once

// Exact feedforward linearization of the actuator model. Position is a flat
// output: along a reference z(t) with derivatives up to the third, the flux,
// flux rate, and coil voltage follow algebraically:
//
//   lam     = + sqrt( 2*(F_pas(z, z_dot) - m*z_ddot) / Rg'(z) )
//   lam_dot = (lam * Rg'(z))^-1 * ( dFpas/dz * z_dot + dFpas/dz_dot * z_ddot
//                                   - m*z_dddot - 1/2 * Rg''(z) * z_dot * lam^2 )
//   u       = R * (Rg(z) + Rc(lam)) * lam + lam_dot
//
// The positive flux branch is fixed throughout (the force is even in lam, so
// the choice is physically immaterial and keeps lam_dot single-valued).
//
// synthesize_signal turns a soft-landing trajectory into a complete sampled
// voltage signal with three phases:
//   pre-charge  flux ramped to the start balance value while the armature is
//               held at z0 by its stop (quintic flux ramp);
//   tracking    the flatness inversion along the reference;
//   hold        closing: a gentle "seat" level (margin * end balance flux)
//               for a short window, then a "retention" level referenced to
//               the start-position balance flux with the same margin, so the
//               armature is guaranteed to be pulled in and retained even when
//               the controller's parameters are off;
//               opening: zero voltage (the spring retains the open state).
//
// Voltage samples are zero-order-hold values taken at the midpoint of each
// sample interval, which removes the first-order hold bias from the inversion.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "softland/actuator.hpp"
#include "softland/errors.hpp"
#include "softland/trajectory.hpp"

namespace softland {

/// Reference feasibility floor on the force radicand of the flux inversion,
/// N m/H. References whose radicand dips below this are rejected, not clamped.
inline constexpr double kRadicandFloor = 1e-12;

/// Flux magnitude floor guarding the division in the flux-rate inversion, Wb.
inline constexpr double kFluxFloor = 1e-9;

/// Flux linkage along the reference (positive branch). `min_radicand` is the
/// rejection threshold for the force radicand: point evaluations accept a
/// zero radicand (zero flux), while signal synthesis enforces kRadicandFloor.
/// Throws InfeasibleTrajectoryError below the threshold and SaturationError
/// when the required flux reaches lambda_sat.
inline double flat_flux(double z, double z_ddot, const ActuatorParams& p,
                        double min_radicand = 0.0, double time_s = 0.0) {
    const double d1 = reluctance_gap_d1(z, p);
    const double radicand = 2.0 * (passive_force(z, 0.0, p) - p.mass * z_ddot) / d1;
    if (!(radicand >= min_radicand))
        throw InfeasibleTrajectoryError(
            time_s, "flat_flux: force radicand below feasibility floor");
    const double lam = std::sqrt(radicand);
    if (lam >= p.lambda_sat)
        throw SaturationError(time_s, lam,
                              "flat_flux: required flux reaches lambda_sat");
    return lam;
}

/// Flux, flux rate, and voltage of the inversion at one reference point.
struct FlatOutput {
    double flux;       ///< Wb
    double flux_rate;  ///< Wb/s
    double voltage;    ///< V
};

/// Single-pass evaluation of the full inversion (shared by the per-quantity
/// accessors and the signal synthesizer).
inline FlatOutput flat_invert(double z, double z_dot, double z_ddot, double z_dddot,
                              const ActuatorParams& p, double min_radicand = 0.0,
                              double time_s = 0.0) {
    const double d1 = reluctance_gap_d1(z, p);
    const double radicand = 2.0 * (passive_force(z, z_dot, p) - p.mass * z_ddot) / d1;
    if (!(radicand >= min_radicand))
        throw InfeasibleTrajectoryError(
            time_s, "flatness inversion: force radicand below feasibility floor");
    const double lam = std::sqrt(radicand);
    if (lam >= p.lambda_sat)
        throw SaturationError(time_s, lam,
                              "flatness inversion: required flux reaches lambda_sat");
    if (lam < kFluxFloor)
        throw FluxSingularityError(
            "flatness inversion: flux below the rate-inversion floor");
    // Rg'' diverges (log) toward z = 0; the term's limit with z_dot -> 0 is
    // zero, so it is skipped exactly at standstill (trajectory endpoints).
    const double curvature_term =
        (z_dot != 0.0) ? 0.5 * reluctance_gap_d2(z, p) * z_dot * lam * lam : 0.0;
    const double lam_dot = (passive_force_dz(p) * z_dot + passive_force_dv(p) * z_ddot -
                            p.mass * z_dddot - curvature_term) /
                           (lam * d1);
    const double volt =
        p.resistance * (reluctance_gap(z, p) + reluctance_core(lam, p)) * lam + lam_dot;
    return FlatOutput{lam, lam_dot, volt};
}

/// Flux rate along the reference. Throws FluxSingularityError when the flux
/// magnitude falls below kFluxFloor (the inversion divides by it).
inline double flat_flux_rate(double z, double z_dot, double z_ddot, double z_dddot,
                             const ActuatorParams& p) {
    return flat_invert(z, z_dot, z_ddot, z_dddot, p).flux_rate;
}

/// Feedforward coil voltage along the reference.
inline double flat_voltage(double z, double z_dot, double z_ddot, double z_dddot,
                           const ActuatorParams& p) {
    return flat_invert(z, z_dot, z_ddot, z_dddot, p).voltage;
}

enum class SignalPhase { precharge, tracking, hold };

inline const char* to_string(SignalPhase ph) {
    switch (ph) {
        case SignalPhase::precharge: return "precharge";
        case SignalPhase::tracking: return "tracking";
        default: return "hold";
    }
}

/// Uniformly sampled voltage signal. samples[k] is held (zero-order hold)
/// over [t_start + k*dt, t_start + (k+1)*dt); the last sample is held beyond
/// the end of the sequence.
struct ControlSignal {
    double t_start = 0.0;  ///< time of the first sample interval, s
    double dt = 1e-6;      ///< sample period, s
    std::vector<double> samples;            ///< voltages, V
    std::array<std::size_t, 2> phase_marks{0, 0};  ///< {tracking begin, hold begin}

    std::size_t size() const { return samples.size(); }
    double end_time() const { return t_start + dt * static_cast<double>(samples.size()); }

    SignalPhase phase_of(std::size_t index) const {
        if (index < phase_marks[0]) return SignalPhase::precharge;
        if (index < phase_marks[1]) return SignalPhase::tracking;
        return SignalPhase::hold;
    }

    /// ZOH lookup; times before the first interval clamp to the first sample,
    /// times past the end hold the last.
    double at_time(double t) const {
        const double x = (t - t_start) / dt;
        if (!(x > 0.0)) return samples.front();
        std::size_t k = static_cast<std::size_t>(x);
        if (k >= samples.size()) k = samples.size() - 1;
        return samples[k];
    }

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("ControlSignal: dt must be > 0");
        if (samples.empty()) throw std::invalid_argument("ControlSignal: no samples");
        if (phase_marks[0] > phase_marks[1] || phase_marks[1] > samples.size())
            throw std::invalid_argument("ControlSignal: phase marks out of order");
        for (double v : samples)
            if (!std::isfinite(v))
                throw std::invalid_argument("ControlSignal: non-finite sample");
    }
};

struct PrechargeConfig {
    double duration = 2e-3;  ///< s
};

struct HoldConfig {
    double duration = 4.5e-3;   ///< total hold phase length, s
    double margin = 1.2;        ///< flux margin factor over the balance value
    double seat_window = 1e-3;  ///< closing: gentle-seat interval before retention, s
};

/// Constant-voltage signal (single held sample); used for the uncontrolled
/// baseline operation. Carries no pre-charge or tracking phase.
inline ControlSignal constant_signal(double voltage, double t_start = 0.0,
                                     double dt = 1e-6) {
    return ControlSignal{t_start, dt, {voltage}, {0, 0}};
}

/// Builds the complete three-phase feedforward signal for a soft-landing
/// trajectory. Closing is recognized by traj.z0 > traj.zf. Throws
/// InfeasibleTrajectoryError (first offending sample time) when the reference
/// violates the radicand floor, SaturationError when it demands flux at or
/// beyond lambda_sat.
inline ControlSignal synthesize_signal(const Trajectory& traj, const ActuatorParams& p,
                                       double dt, const PrechargeConfig& pre = {},
                                       const HoldConfig& hold = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("synthesize_signal: dt must be > 0");
    const bool closing = traj.z0 > traj.zf;
    const double lam_cap = 0.95 * p.lambda_sat;

    // balance fluxes at the endpoints (z_ddot = 0 by the boundary conditions)
    const double lam_t0 = flat_flux(traj.z0, 0.0, p, 0.0, traj.t0);
    const double lam_tf = flat_flux(traj.zf, 0.0, p, 0.0, traj.tf);

    const auto n_pre = static_cast<std::size_t>(std::llround(pre.duration / dt));
    const auto n_trk = static_cast<std::size_t>(std::llround(traj.duration() / dt));
    const auto n_hold = static_cast<std::size_t>(std::llround(hold.duration / dt));

    ControlSignal sig;
    sig.t_start = traj.t0 - pre.duration;
    sig.dt = dt;
    sig.phase_marks = {n_pre, n_pre + n_trk};
    sig.samples.reserve(n_pre + n_trk + n_hold);

    // pre-charge: quintic flux ramp at the parked position z0. Closing starts
    // de-energized; opening starts from the held-closed flux level.
    const double lam_init = closing ? 0.0 : std::min(hold.margin * lam_t0, lam_cap);
    const Trajectory ramp = design_quintic(lam_init, lam_t0, sig.t_start, traj.t0);
    const double rg_z0 = reluctance_gap(traj.z0, p);
    for (std::size_t k = 0; k < n_pre; ++k) {
        const double tm = sig.t_start + (static_cast<double>(k) + 0.5) * dt;
        const double lam = eval(ramp, tm, 0);
        const double lam_dot = eval(ramp, tm, 1);
        sig.samples.push_back(
            p.resistance * (reluctance_core(lam, p) + rg_z0) * lam + lam_dot);
    }

    // tracking: flatness inversion along the reference
    for (std::size_t k = 0; k < n_trk; ++k) {
        const double tm = traj.t0 + (static_cast<double>(k) + 0.5) * dt;
        const RefPoint r = eval_all(traj, tm);
        sig.samples.push_back(
            flat_invert(r.z, r.z_dot, r.z_ddot, r.z_dddot, p, kRadicandFloor, tm).voltage);
    }

    // hold
    if (closing) {
        const double lam_seat = std::min(hold.margin * lam_tf, lam_cap);
        const double lam_ret = std::min(hold.margin * lam_t0, lam_cap);
        const double u_seat =
            p.resistance * (reluctance_core(lam_seat, p) + reluctance_gap(traj.zf, p)) *
            lam_seat;
        const double u_ret =
            p.resistance * (reluctance_core(lam_ret, p) + rg_z0) * lam_ret;
        const auto n_seat = std::min(
            n_hold, static_cast<std::size_t>(std::llround(hold.seat_window / dt)));
        sig.samples.insert(sig.samples.end(), n_seat, u_seat);
        sig.samples.insert(sig.samples.end(), n_hold - n_seat, u_ret);
    } else {
        sig.samples.insert(sig.samples.end(), n_hold, 0.0);
    }

    sig.validate();
    return sig;
}

}  // namespace softland
