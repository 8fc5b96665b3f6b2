#pragma once

// Monte-Carlo study harness: perturbed initial controller parameters,
// N-operation run-to-run adaptation against the nominal plant, percentile
// aggregation over experiments, and the constant-voltage uncontrolled
// baseline that normalizes all costs.
//
// Reproducibility contract: every result is a pure function of the
// ExperimentConfig. Per-experiment RNG streams are derived by a documented
// mixing function (seed_k = splitmix64(rng_seed + golden * (k + 1)), golden =
// 0x9E3779B97F4A7C15), so adding experiments never reshuffles earlier ones,
// and uniform draws map mt19937_64 outputs through (x >> 11) * 2^-53, which
// is bit-stable across platforms (std::uniform_real_distribution is not).

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "softland/actuator.hpp"
#include "softland/errors.hpp"
#include "softland/flatness.hpp"
#include "softland/params_json.hpp"
#include "softland/pattern_search.hpp"
#include "softland/simulation.hpp"
#include "softland/trajectory.hpp"

namespace softland {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream seed for experiment k under a master seed.
inline std::uint64_t experiment_stream_seed(std::uint64_t master, int k) {
    return splitmix64(master + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1));
}

/// Uniform draw in [0, 1) from the top 53 bits of the generator output.
inline double uniform_unit(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1p-53;
}

enum class OperationKind { closing, opening };
enum class CostKind { impact, custom };

struct ExperimentConfig {
    ParameterSet nominal;  ///< plant truth and baseline activation voltage
    int n_experiments = 200;
    int n_operations = 250;
    double perturbation_fraction = 0.05;
    std::uint64_t rng_seed = 1;
    OperationKind operation = OperationKind::closing;
    double trajectory_duration = 3.5e-3;  ///< s
    double trajectory_t0 = 0.0;           ///< s
    double signal_dt = 1e-6;               ///< feedforward sample period, s
    PrechargeConfig precharge;
    HoldConfig hold;
    SimConfig sim;
    PatternSearchOptions search;
    int workers = 0;  ///< 0: hardware concurrency
    CostKind cost = CostKind::impact;
    std::function<double(const OperationResult&)> custom_cost;  ///< used when cost == custom
    double fault_cost_factor = 10.0;  ///< penalty = factor * J_unc for failed operations

    void validate() const {
        nominal.actuator.validate();
        if (n_experiments < 1)
            throw std::invalid_argument("ExperimentConfig: n_experiments >= 1 required");
        if (n_operations < 0)
            throw std::invalid_argument("ExperimentConfig: n_operations >= 0 required");
        if (!(perturbation_fraction >= 0.0 && perturbation_fraction < 1.0))
            throw std::invalid_argument(
                "ExperimentConfig: perturbation_fraction must be in [0, 1)");
        if (!(trajectory_duration > 0.0))
            throw std::invalid_argument("ExperimentConfig: trajectory_duration > 0 required");
        if (cost == CostKind::custom && !custom_cost)
            throw std::invalid_argument("ExperimentConfig: custom cost handle missing");
        sim.validate();
    }
};

/// Per-operation cost percentiles across experiments plus the baseline.
struct PercentileTable {
    std::vector<std::array<double, 3>> rows;  ///< (p10, p50, p90) per operation index
    double j_unc = 0.0;
};

struct MonteCarloResult {
    PercentileTable percentiles;
    std::vector<std::vector<HistoryEntry>> histories;  ///< one per experiment
};

/// The six adapted magnetic parameters as a vector (kappa1..kappa6).
inline std::vector<double> magnetics_vector(const ActuatorParams& p) {
    return {p.kappa1, p.kappa2, p.kappa3, p.kappa4, p.kappa5, p.kappa6};
}

/// Copy of `base` with the magnetic parameters replaced. lambda_sat scales
/// with kappa2 so the flux-domain invariant (lambda_sat <= kappa2) survives
/// perturbation and adaptation of kappa2.
inline ActuatorParams with_magnetics(const ActuatorParams& base,
                                     const std::vector<double>& kappas) {
    if (kappas.size() != 6)
        throw std::invalid_argument("with_magnetics: need exactly 6 components");
    ActuatorParams p = base;
    p.kappa1 = kappas[0];
    p.kappa2 = kappas[1];
    p.kappa3 = kappas[2];
    p.kappa4 = kappas[3];
    p.kappa5 = kappas[4];
    p.kappa6 = kappas[5];
    p.lambda_sat = base.lambda_sat * (p.kappa2 / base.kappa2);
    p.validate();
    return p;
}

/// Independent uniform +/- fraction scaling of the six magnetic parameters;
/// mechanical and electrical parameters are untouched (assumed known).
inline ActuatorParams perturb_parameters(const ActuatorParams& nominal, double fraction,
                                         std::mt19937_64& rng) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("perturb_parameters: fraction must be in [0, 1)");
    std::vector<double> k = magnetics_vector(nominal);
    for (double& x : k) {
        const double factor = 1.0 - fraction + 2.0 * fraction * uniform_unit(rng);
        x *= factor;
    }
    return with_magnetics(nominal, k);
}

/// Soft-landing reference for the configured operation direction.
inline Trajectory make_trajectory(const ExperimentConfig& cfg) {
    const ActuatorParams& p = cfg.nominal.actuator;
    const double t0 = cfg.trajectory_t0;
    const double tf = t0 + cfg.trajectory_duration;
    return cfg.operation == OperationKind::closing
               ? design_quintic(p.z_max, p.z_min, t0, tf)
               : design_quintic(p.z_min, p.z_max, t0, tf);
}

/// Plant state at the beginning of an operation. Closing starts de-energized
/// on the upper stop; opening starts held closed at the seat-level flux the
/// controller would have applied.
inline State operation_start_state(const ExperimentConfig& cfg,
                                   const ActuatorParams& controller) {
    const ActuatorParams& p = cfg.nominal.actuator;
    if (cfg.operation == OperationKind::closing)
        return State{p.z_max, 0.0, 0.0, Contact::at_upper_stop};
    const double lam_bal = flat_flux(p.z_min, 0.0, controller);
    const double lam_hold =
        std::min(cfg.hold.margin * lam_bal, 0.95 * controller.lambda_sat);
    return State{p.z_min, 0.0, lam_hold, Contact::at_lower_stop};
}

/// Cost of the selected kind for a finished operation.
inline double select_cost(const ExperimentConfig& cfg, const OperationResult& r) {
    return cfg.cost == CostKind::impact ? cost_impact(r) : cost_custom(r, cfg.custom_cost);
}

/// One full switching operation: synthesize the feedforward with `controller`
/// parameters, run it against the nominal plant, evaluate the cost. Synthesis
/// or simulation faults and contactless operations are penalized with
/// fault_cost_factor * j_unc so the adaptation keeps a total cost ordering.
inline double evaluate_operation(const ExperimentConfig& cfg,
                                 const ActuatorParams& controller, double j_unc) {
    const double penalty = cfg.fault_cost_factor * j_unc;
    try {
        const Trajectory traj = make_trajectory(cfg);
        const ControlSignal sig =
            synthesize_signal(traj, controller, cfg.signal_dt, cfg.precharge, cfg.hold);
        const State start = operation_start_state(cfg, controller);
        const OperationResult r =
            simulate_operation(cfg.nominal.actuator, sig, cfg.sim, start);
        if (!r.contact()) return penalty;
        return select_cost(cfg, r);
    } catch (const NoContactError&) {
        return penalty;
    } catch (const Error&) {
        return penalty;
    }
}

/// Impact speed of the conventional (uncontrolled) operation: a constant
/// activation voltage for closing, abrupt de-energization for opening, on the
/// nominal plant. Throws NoContactError if the device does not switch.
inline double uncontrolled_baseline(const ExperimentConfig& cfg) {
    const ActuatorParams& p = cfg.nominal.actuator;
    ControlSignal sig;
    State start;
    if (cfg.operation == OperationKind::closing) {
        sig = constant_signal(cfg.nominal.baseline_voltage_V, 0.0, cfg.sim.dt);
        start = State{p.z_max, 0.0, 0.0, Contact::at_upper_stop};
    } else {
        sig = constant_signal(0.0, 0.0, cfg.sim.dt);
        start = operation_start_state(cfg, p);
    }
    SimConfig sim = cfg.sim;
    sim.record_trace = false;
    const OperationResult r = simulate_operation(p, sig, sim, start);
    return cost_impact(r);
}

/// One adaptation experiment: controller initialized from the perturbed
/// magnetic vector, plant at nominal truth, n_operations run-to-run rounds.
inline std::vector<HistoryEntry> run_experiment(const ExperimentConfig& cfg,
                                                int experiment_index, double j_unc) {
    std::mt19937_64 rng(experiment_stream_seed(cfg.rng_seed, experiment_index));
    const ActuatorParams perturbed =
        perturb_parameters(cfg.nominal.actuator, cfg.perturbation_fraction, rng);
    const std::vector<double> p0 = magnetics_vector(perturbed);
    auto plant = [&](const std::vector<double>& kappas) {
        return evaluate_operation(cfg, with_magnetics(cfg.nominal.actuator, kappas),
                                  j_unc);
    };
    AdaptationState s = run_loop(p0, plant, cfg.n_operations, cfg.search,
                                 cfg.fault_cost_factor * j_unc);
    return std::move(s.history);
}

inline std::vector<HistoryEntry> run_experiment(const ExperimentConfig& cfg,
                                                int experiment_index) {
    return run_experiment(cfg, experiment_index, uncontrolled_baseline(cfg));
}

/// Percentile with linear interpolation between order statistics on the
/// sorted sample: h = (n-1)q, value = x[floor(h)] + frac(h) * (x[floor(h)+1]
/// - x[floor(h)]). `sorted` must be ascending and non-empty.
inline double percentile_linear(const std::vector<double>& sorted, double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Runs the full Monte-Carlo study (experiments are independent and run on a
/// small worker pool; results are identical for any worker count).
inline MonteCarloResult monte_carlo(const ExperimentConfig& cfg) {
    cfg.validate();
    const double j_unc = uncontrolled_baseline(cfg);

    MonteCarloResult out;
    out.histories.resize(static_cast<std::size_t>(cfg.n_experiments));

    unsigned n_workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                         : std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(cfg.n_experiments));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= cfg.n_experiments) return;
            try {
                out.histories[static_cast<std::size_t>(k)] = run_experiment(cfg, k, j_unc);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i + 1 < n_workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    out.percentiles.j_unc = j_unc;
    out.percentiles.rows.resize(static_cast<std::size_t>(cfg.n_operations));
    std::vector<double> column(static_cast<std::size_t>(cfg.n_experiments));
    for (int n = 0; n < cfg.n_operations; ++n) {
        for (int k = 0; k < cfg.n_experiments; ++k)
            column[static_cast<std::size_t>(k)] =
                out.histories[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)].cost;
        std::sort(column.begin(), column.end());
        out.percentiles.rows[static_cast<std::size_t>(n)] = {
            percentile_linear(column, 0.10), percentile_linear(column, 0.50),
            percentile_linear(column, 0.90)};
    }
    return out;
}

}  // namespace softland
