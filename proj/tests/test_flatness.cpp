#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "softland/flatness.hpp"

using namespace softland;
using testutil::rel_err;

TEST_CASE("flat flux: zero radicand gives zero flux") {
    const ActuatorParams p = testutil::desk().actuator;
    const double z = 5e-4;
    const double z_dd = passive_force(z, 0.0, p) / p.mass;  // exact force balance
    CHECK(flat_flux(z, z_dd, p) == 0.0);
}

TEST_CASE("flat flux on verbatim published parameters exceeds the flux domain") {
    const ActuatorParams p = testutil::table1().actuator;
    // the inversion algebra demands sqrt(2*8.195/1.11033) = 3.8420...
    const double demanded =
        std::sqrt(2.0 * passive_force(1e-3, 0.0, p) / reluctance_gap_d1(1e-3, p));
    CHECK(rel_err(demanded, 3.8420589439228494) < 1e-13);
    CHECK(demanded > p.kappa2);  // hence the saturation error:
    CHECK_THROWS_AS(flat_flux(1e-3, 0.0, p), SaturationError);
}

TEST_CASE("flat flux on the desk set stays below half the saturation scale") {
    const ActuatorParams p = testutil::desk().actuator;
    const double lam = flat_flux(1e-3, 0.0, p);
    CHECK(rel_err(lam, 0.011091068827581332) < 1e-13);
    CHECK(lam < 0.5 * p.kappa2);
}

TEST_CASE("flux rate: standstill gives zero, vanishing flux is singular") {
    const ActuatorParams p = testutil::desk().actuator;
    CHECK(flat_flux_rate(5e-4, 0.0, 0.0, 0.0, p) == 0.0);
    const double z = 5e-4;
    const double z_dd = passive_force(z, 0.0, p) / p.mass;  // flux -> 0
    CHECK_THROWS_AS(flat_flux_rate(z, 0.1, z_dd, 0.0, p), FluxSingularityError);
}

TEST_CASE("flux rate matches the time derivative of the flux along a reference") {
    const ActuatorParams p = testutil::desk().actuator;
    const Trajectory traj = design_quintic(p.z_max, p.z_min, 0.0, 3.5e-3);
    const double h = 1e-9;
    for (int i = 1; i < 50; ++i) {
        const double t = traj.duration() * i / 50.0;
        const RefPoint r = eval_all(traj, t);
        const auto flux_at = [&](double tt) {
            return flat_flux(eval(traj, tt, 0), eval(traj, tt, 2), p);
        };
        const double fd = (flux_at(t + h) - flux_at(t - h)) / (2 * h);
        REQUIRE(rel_err(flat_flux_rate(r.z, r.z_dot, r.z_ddot, r.z_dddot, p), fd) < 1e-5);
    }
}

TEST_CASE("frozen mid-trajectory inversion values on the desk set") {
    const ActuatorParams p = testutil::desk().actuator;
    const Trajectory traj = design_quintic(p.z_max, p.z_min, 0.0, 3.5e-3);
    const RefPoint r = eval_all(traj, 1.75e-3);
    const FlatOutput f = flat_invert(r.z, r.z_dot, r.z_ddot, r.z_dddot, p);
    // independently computed with 50-digit arithmetic
    CHECK(rel_err(f.flux, 0.0097081598641819033) < 1e-12);
    CHECK(rel_err(f.flux_rate, -3.1422569102618487) < 1e-12);
    CHECK(rel_err(f.voltage, 75.368986847227989) < 1e-12);
}

TEST_CASE("static hold voltage reduces to the resistive balance term") {
    const ActuatorParams p = testutil::desk().actuator;
    const double z = 3e-4;
    const double lam0 = flat_flux(z, 0.0, p);
    const double want =
        p.resistance * (reluctance_gap(z, p) + reluctance_core(lam0, p)) * lam0;
    CHECK(rel_err(flat_voltage(z, 0.0, 0.0, 0.0, p), want) < 1e-14);
}

TEST_CASE("synthesized closing signal: layout, boundary samples, continuity") {
    const ActuatorParams p = testutil::desk().actuator;
    const Trajectory traj = design_quintic(p.z_max, p.z_min, 0.0, 3.5e-3);
    const ControlSignal sig = synthesize_signal(traj, p, 1e-6);

    const std::size_t n_pre = sig.phase_marks[0];
    const std::size_t n_trk = sig.phase_marks[1] - sig.phase_marks[0];
    CHECK(n_pre == 2000);
    CHECK(n_trk == 3500);  // 3.5 ms / 1 us
    CHECK(sig.t_start == Catch::Approx(-2e-3).margin(1e-15));

    // de-energized start: flux ramp and its rate both begin at zero
    CHECK(std::abs(sig.samples.front()) < 1e-4);

    // continuity at the tracking boundary within one sample's discretization
    const RefPoint r0 = eval_all(traj, 0.5e-6);
    const double u_t0 = flat_voltage(r0.z, r0.z_dot, r0.z_ddot, r0.z_dddot, p);
    CHECK(std::abs(sig.samples[n_pre] - u_t0) < 1e-6);
    CHECK(std::abs(sig.samples[n_pre] - sig.samples[n_pre - 1]) < 2.0);

    // sample-period override halves the tracking sample count
    const ControlSignal sig2 = synthesize_signal(traj, p, 2e-6);
    CHECK(sig2.phase_marks[1] - sig2.phase_marks[0] == 1750);
}

TEST_CASE("pre-charge keeps the armature seated: magnetic never beats passive") {
    const ActuatorParams p = testutil::desk().actuator;
    const Trajectory traj = design_quintic(p.z_max, p.z_min, 0.0, 3.5e-3);
    const double lam_t0 = flat_flux(p.z_max, 0.0, p);
    const Trajectory ramp = design_quintic(0.0, lam_t0, -2e-3, 0.0);
    const double f_pas = passive_force(p.z_max, 0.0, p);
    for (int i = 0; i <= 400; ++i) {
        const double t = -2e-3 + 2e-3 * i / 400.0;
        const double lam = eval(ramp, t, 0);
        REQUIRE(std::abs(magnetic_force(p.z_max, lam, p)) <= std::abs(f_pas) * (1 + 1e-12));
    }
}

TEST_CASE("closing hold carries a seat level and a stronger retention level") {
    const ActuatorParams p = testutil::desk().actuator;
    const Trajectory traj = design_quintic(p.z_max, p.z_min, 0.0, 3.5e-3);
    const HoldConfig hold;  // defaults: 1.2 margin, 1 ms seat window
    const ControlSignal sig = synthesize_signal(traj, p, 1e-6, {}, hold);
    const double u_seat = sig.samples[sig.phase_marks[1]];
    const double u_ret = sig.samples.back();
    CHECK(u_seat > 0.0);
    CHECK(u_ret > 10 * u_seat);  // retention references the start-position balance
    // retention must exceed the quasi-static pull-in voltage at z_max
    const double lam_t0 = flat_flux(p.z_max, 0.0, p);
    const double u_pullin =
        p.resistance * (reluctance_core(lam_t0, p) + reluctance_gap(p.z_max, p)) * lam_t0;
    CHECK(u_ret > u_pullin);
}

TEST_CASE("opening signal: ramp starts at the held flux level, hold is zero") {
    const ActuatorParams p = testutil::desk().actuator;
    const Trajectory traj = design_quintic(p.z_min, p.z_max, 0.0, 3.5e-3);
    const ControlSignal sig = synthesize_signal(traj, p, 1e-6);
    CHECK(sig.samples.front() > 0.0);  // holding flux against the spring
    for (std::size_t k = sig.phase_marks[1]; k < sig.size(); ++k)
        REQUIRE(sig.samples[k] == 0.0);
}

TEST_CASE("infeasible reference is rejected with the first offending time") {
    const ActuatorParams p = testutil::desk().actuator;
    // 0.5 ms full stroke needs |z_ddot| ~ 23000 m/s^2 >> F_pas/m: negative radicand
    const Trajectory traj = design_quintic(p.z_max, p.z_min, 0.0, 0.5e-3);
    try {
        synthesize_signal(traj, p, 1e-6);
        FAIL("expected InfeasibleTrajectoryError");
    } catch (const InfeasibleTrajectoryError& e) {
        CHECK(e.time_s > 0.0);
        CHECK(e.time_s < 0.5e-3);
    }
}

TEST_CASE("signal phase bookkeeping and ZOH lookup") {
    ControlSignal sig;
    sig.t_start = 0.0;
    sig.dt = 1e-3;
    sig.samples = {1.0, 2.0, 3.0, 4.0};
    sig.phase_marks = {1, 3};
    sig.validate();
    CHECK(sig.phase_of(0) == SignalPhase::precharge);
    CHECK(sig.phase_of(2) == SignalPhase::tracking);
    CHECK(sig.phase_of(3) == SignalPhase::hold);
    CHECK(sig.at_time(-1.0) == 1.0);
    CHECK(sig.at_time(1.5e-3) == 2.0);
    CHECK(sig.at_time(99.0) == 4.0);  // last sample held
    sig.phase_marks = {3, 1};
    CHECK_THROWS_AS(sig.validate(), std::invalid_argument);
}
