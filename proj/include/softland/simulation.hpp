#pragma once

// Hybrid integration of the actuator dynamics under a sampled voltage signal.
//
// Classical fixed-step 4th-order integration with zero-order-hold input.
// Unilateral stops: while the armature is seated on a stop, position and
// velocity are frozen and only the flux integrates; the armature is released
// when the net mechanical force points into the interior. Both the release
// instant and the first crossing of the destination stop are localized by
// bisection inside the step (the release instant seeds the open-loop tracking
// error and needs the same care as the impact itself). Integration halts at
// impact and the pre-impact velocity is recorded.
//
// Faults: |lam| >= lambda_sat aborts with SaturationError, non-finite state
// with NumericalFault, both carrying the fault time. simulate_operation is a
// pure function of its arguments; results are bit-reproducible.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "softland/actuator.hpp"
#include "softland/errors.hpp"
#include "softland/flatness.hpp"

namespace softland {

struct SimConfig {
    double dt = 1e-6;          ///< integration step, s
    double t_end = 10e-3;      ///< absolute end time of the horizon, s
    double event_tol = 1e-12;  ///< impact localization tolerance on position, m
    int trace_decimation = 1;  ///< record every k-th step when tracing
    bool record_trace = false;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
        if (!std::isfinite(t_end)) throw std::invalid_argument("SimConfig: bad t_end");
        if (!(event_tol > 0.0))
            throw std::invalid_argument("SimConfig: event_tol must be > 0");
        if (trace_decimation < 1)
            throw std::invalid_argument("SimConfig: trace_decimation must be >= 1");
    }
};

struct TraceRow {
    double t;
    State state;
    double u;
};

struct OperationResult {
    std::optional<double> impact_velocity;  ///< signed pre-impact velocity, m/s
    std::optional<double> impact_time;      ///< s
    std::optional<double> cost;             ///< |impact_velocity| when contact occurred
    std::vector<TraceRow> trace;

    bool contact() const { return impact_velocity.has_value(); }
};

/// Impact-velocity cost (the soft-landing performance index).
/// Throws NoContactError when the operation never reached the destination stop.
inline double cost_impact(const OperationResult& r) {
    if (!r.contact()) throw NoContactError("cost_impact: operation made no contact");
    return std::abs(*r.impact_velocity);
}

/// Evaluates an arbitrary total cost functional on the operation result,
/// e.g. an acoustic-style proxy computed from the trace.
inline double cost_custom(const OperationResult& r,
                          const std::function<double(const OperationResult&)>& f) {
    return f(r);
}

namespace detail {

struct SimCore {
    const ActuatorParams& p;
    const ControlSignal& sig;

    // Derivative with the position clamped into the travel range for the
    // constitutive evaluations (integration stages may poke past a stop
    // before the event is localized).
    StateRate rate(double t, double z, double v, double lam, bool frozen) const {
        if (!(std::isfinite(z) && std::isfinite(v) && std::isfinite(lam)))
            throw NumericalFault(t, "simulate_operation: non-finite state");
        if (std::abs(lam) >= p.lambda_sat)
            throw SaturationError(t, lam, "simulate_operation: flux saturation");
        const double zc = std::min(std::max(z, p.z_min), p.z_max);
        const double u = sig.at_time(t);
        const double lam_dot =
            -p.resistance * (reluctance_core(lam, p) + reluctance_gap(zc, p)) * lam + u;
        if (frozen) return StateRate{0.0, 0.0, lam_dot};
        const double f = passive_force(zc, v, p) + magnetic_force(zc, lam, p);
        return StateRate{v, f / p.mass, lam_dot};
    }

    // One classical 4th-order step of size h from (t, z, v, lam).
    void step(double t, double h, double& z, double& v, double& lam, bool frozen) const {
        const StateRate k1 = rate(t, z, v, lam, frozen);
        const StateRate k2 = rate(t + h / 2, z + h / 2 * k1.z_dot, v + h / 2 * k1.z_ddot,
                                  lam + h / 2 * k1.lam_dot, frozen);
        const StateRate k3 = rate(t + h / 2, z + h / 2 * k2.z_dot, v + h / 2 * k2.z_ddot,
                                  lam + h / 2 * k2.lam_dot, frozen);
        const StateRate k4 = rate(t + h, z + h * k3.z_dot, v + h * k3.z_ddot,
                                  lam + h * k3.lam_dot, frozen);
        z += h / 6 * (k1.z_dot + 2 * k2.z_dot + 2 * k3.z_dot + k4.z_dot);
        v += h / 6 * (k1.z_ddot + 2 * k2.z_ddot + 2 * k3.z_ddot + k4.z_ddot);
        lam += h / 6 * (k1.lam_dot + 2 * k2.lam_dot + 2 * k3.lam_dot + k4.lam_dot);
    }

    double net_force(double z, double lam) const {
        return passive_force(z, 0.0, p) + magnetic_force(z, lam, p);
    }
};

}  // namespace detail

/// Integrates one switching operation of the plant `p_true` under the signal
/// `sig` from the state `start` (which must satisfy the model domain and the
/// stop/contact consistency rules). The destination stop is the one opposite
/// the starting contact; from an interior start, either stop counts as the
/// destination. Reaching the starting stop again merely re-seats the armature
/// (plastic contact). Returns at impact or at cfg.t_end.
inline OperationResult simulate_operation(const ActuatorParams& p_true,
                                          const ControlSignal& sig, const SimConfig& cfg,
                                          const State& start) {
    p_true.validate();
    sig.validate();
    cfg.validate();
    if (!(start.z >= p_true.z_min && start.z <= p_true.z_max))
        throw std::invalid_argument("simulate_operation: start position out of range");
    if (!(std::abs(start.lam) < p_true.lambda_sat))
        throw std::invalid_argument("simulate_operation: start flux out of domain");
    const bool on_lower = start.z == p_true.z_min;
    const bool on_upper = start.z == p_true.z_max;
    const bool flag_ok = (start.contact == Contact::at_lower_stop && on_lower) ||
                         (start.contact == Contact::at_upper_stop && on_upper) ||
                         (start.contact == Contact::interior && !on_lower && !on_upper);
    if (!flag_ok)
        throw std::invalid_argument("simulate_operation: contact flag inconsistent");

    const detail::SimCore core{p_true, sig};
    const bool lower_is_target = start.contact != Contact::at_lower_stop;
    const bool upper_is_target = start.contact != Contact::at_upper_stop;

    double t = sig.t_start;
    double z = start.z, v = start.z_dot, lam = start.lam;
    Contact contact = start.contact;

    OperationResult res;
    long step_count = 0;
    auto record = [&](double tt) {
        if (cfg.record_trace)
            res.trace.push_back(TraceRow{tt, State{z, v, lam, contact}, sig.at_time(tt)});
    };
    record(t);

    const double time_eps = cfg.dt * 0x1p-46;  // bisection resolution floor

    while (t < cfg.t_end - 1e-18) {
        // step to the next integration grid point (events leave t off-grid)
        const double k_next = std::floor((t - sig.t_start) / cfg.dt + 1e-9) + 1.0;
        double h = std::min(sig.t_start + k_next * cfg.dt, cfg.t_end) - t;
        if (h <= time_eps) h = std::min(cfg.dt, cfg.t_end - t);

        if (contact != Contact::interior) {
            // seated: flux-only integration, then release detection
            const bool upper = contact == Contact::at_upper_stop;
            auto released = [&](double l) {
                const double f = core.net_force(z, l);
                return upper ? f < 0.0 : f > 0.0;
            };
            if (released(lam)) {  // net force already interior-pointing
                contact = Contact::interior;
                continue;
            }
            const double lam0 = lam;
            double z_dummy = z, v_dummy = v;
            core.step(t, h, z_dummy, v_dummy, lam, true);
            if (released(lam)) {
                // bisect the release instant on the flux-only flow
                double lo = 0.0, hi = h, lam_hi = lam;
                while (hi - lo > time_eps) {
                    const double mid = 0.5 * (lo + hi);
                    double lm = lam0, zd = z, vd = v;
                    core.step(t, mid, zd, vd, lm, true);
                    if (released(lm)) {
                        hi = mid;
                        lam_hi = lm;
                    } else {
                        lo = mid;
                    }
                }
                t += hi;
                lam = lam_hi;
                contact = Contact::interior;
                continue;  // resume free integration from the release instant
            }
            t += h;
        } else {
            // free flight
            const double z0 = z, v0 = v, lam0 = lam;
            core.step(t, h, z, v, lam, false);

            const bool hit_lower = z <= p_true.z_min && lower_is_target;
            const bool hit_upper = z >= p_true.z_max && upper_is_target;
            if (hit_lower || hit_upper) {
                const double stop = hit_lower ? p_true.z_min : p_true.z_max;
                // bisect the crossing instant from the step start
                double lo = 0.0, hi = h;
                double zc = z, vc = v;
                while (hi - lo > time_eps && std::abs(zc - stop) > cfg.event_tol) {
                    const double mid = 0.5 * (lo + hi);
                    double zm = z0, vm = v0, lm = lam0;
                    core.step(t, mid, zm, vm, lm, false);
                    const bool crossed = hit_lower ? zm <= stop : zm >= stop;
                    if (crossed) {
                        hi = mid;
                        zc = zm;
                        vc = vm;
                    } else {
                        lo = mid;
                    }
                }
                t += hi;
                z = stop;
                res.impact_velocity = vc;
                res.impact_time = t;
                res.cost = std::abs(vc);
                contact = hit_lower ? Contact::at_lower_stop : Contact::at_upper_stop;
                v = 0.0;
                record(t);
                return res;
            }
            // plastic re-seat on the starting stop
            if (z >= p_true.z_max && !upper_is_target) {
                z = p_true.z_max;
                v = 0.0;
                contact = Contact::at_upper_stop;
            } else if (z <= p_true.z_min && !lower_is_target) {
                z = p_true.z_min;
                v = 0.0;
                contact = Contact::at_lower_stop;
            }
            t += h;
        }

        ++step_count;
        if (step_count % cfg.trace_decimation == 0) record(t);
    }
    return res;
}

}  // namespace softland
