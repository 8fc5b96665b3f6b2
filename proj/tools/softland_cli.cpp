// softland: batch driver for the reluctance-actuator soft-landing toolkit.
//
// Subcommands
//   feedforward   synthesize the flatness feedforward signal -> signal.csv
//   simulate      run one operation (synthesized or replayed signal) -> trace.csv
//   baseline      uncontrolled constant-activation operation -> baseline.json
//   montecarlo    perturbed-controller adaptation study -> percentiles.csv
//
// One JSON config document drives everything (see README for the schema);
// command-line flags override config fields. Every output set is accompanied
// by an atomically written manifest.json capturing the resolved config, seed,
// tool version, output list, and wall-clock duration.
//
// Exit codes: 0 success, 2 config/schema error, 3 simulation/synthesis fault.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "softland/csv_io.hpp"
#include "softland/experiment.hpp"
#include "softland/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace softland;

namespace {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<double> dt;
    std::optional<int> experiments;
    std::optional<int> operations;
    std::string out_dir = ".";
    std::string signal_path;  // simulate: replay an existing signal CSV
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    in >> j;
    return j;
}

// Resolved run setup shared by all subcommands.
struct Setup {
    ExperimentConfig cfg;
    json resolved;  // config snapshot with overrides applied
    bool emit_histories = false;
};

Setup resolve(const std::string& config_path, const CliOverrides& cli) {
    const json doc = load_json(config_path);
    Setup s;

    const fs::path config_dir = fs::path(config_path).parent_path();
    const std::string param_field = doc.at("parameters").get<std::string>();
    fs::path param_path = param_field;
    if (param_path.is_relative()) param_path = config_dir / param_path;
    s.cfg.nominal = load_parameter_set(param_path.string());

    if (doc.contains("trajectory")) {
        const json& t = doc["trajectory"];
        const std::string op = t.value("operation", "closing");
        if (op == "closing")
            s.cfg.operation = OperationKind::closing;
        else if (op == "opening")
            s.cfg.operation = OperationKind::opening;
        else
            throw std::invalid_argument("trajectory.operation must be closing|opening");
        s.cfg.trajectory_duration = t.value("duration_s", s.cfg.trajectory_duration);
        s.cfg.trajectory_t0 = t.value("t0_s", s.cfg.trajectory_t0);
    }
    if (doc.contains("feedforward")) {
        const json& f = doc["feedforward"];
        s.cfg.signal_dt = f.value("dt_s", s.cfg.signal_dt);
        s.cfg.precharge.duration = f.value("precharge_duration_s", s.cfg.precharge.duration);
        s.cfg.hold.duration = f.value("hold_duration_s", s.cfg.hold.duration);
        s.cfg.hold.margin = f.value("hold_margin", s.cfg.hold.margin);
        s.cfg.hold.seat_window = f.value("seat_window_s", s.cfg.hold.seat_window);
    }
    if (doc.contains("simulation")) {
        const json& m = doc["simulation"];
        s.cfg.sim.dt = m.value("dt_s", s.cfg.sim.dt);
        s.cfg.sim.t_end = m.value("t_end_s", s.cfg.sim.t_end);
        s.cfg.sim.event_tol = m.value("event_tol_m", s.cfg.sim.event_tol);
        s.cfg.sim.trace_decimation = m.value("trace_decimation", s.cfg.sim.trace_decimation);
    }
    if (doc.contains("experiment")) {
        const json& e = doc["experiment"];
        s.cfg.n_experiments = e.value("n_experiments", s.cfg.n_experiments);
        s.cfg.n_operations = e.value("n_operations", s.cfg.n_operations);
        s.cfg.perturbation_fraction =
            e.value("perturbation_fraction", s.cfg.perturbation_fraction);
        s.cfg.rng_seed = e.value("rng_seed", s.cfg.rng_seed);
        s.cfg.workers = e.value("workers", s.cfg.workers);
        s.emit_histories = e.value("emit_histories", false);
    }

    // precedence: flag > environment > config > default (workers only for env)
    if (const char* env = std::getenv("SOFTLAND_WORKERS")) {
        try {
            s.cfg.workers = std::stoi(env);
        } catch (...) {
            throw std::invalid_argument("SOFTLAND_WORKERS is not an integer");
        }
    }
    if (cli.workers) s.cfg.workers = *cli.workers;
    if (cli.seed) s.cfg.rng_seed = *cli.seed;
    if (cli.experiments) s.cfg.n_experiments = *cli.experiments;
    if (cli.operations) s.cfg.n_operations = *cli.operations;
    if (cli.dt) {
        s.cfg.signal_dt = *cli.dt;
        s.cfg.sim.dt = *cli.dt;
    }
    s.cfg.validate();

    s.resolved = doc;
    s.resolved["parameters"] = param_path.string();
    s.resolved["resolved"] = {
        {"operation", s.cfg.operation == OperationKind::closing ? "closing" : "opening"},
        {"trajectory_duration_s", s.cfg.trajectory_duration},
        {"signal_dt_s", s.cfg.signal_dt},
        {"sim_dt_s", s.cfg.sim.dt},
        {"sim_t_end_s", s.cfg.sim.t_end},
        {"n_experiments", s.cfg.n_experiments},
        {"n_operations", s.cfg.n_operations},
        {"perturbation_fraction", s.cfg.perturbation_fraction},
        {"rng_seed", s.cfg.rng_seed},
        {"workers", s.cfg.workers},
    };
    return s;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
    }
    fs::rename(tmp, path);
}

struct ManifestWriter {
    json manifest;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    ManifestWriter(const std::string& command, const Setup& s) {
        manifest["tool"] = "softland";
        manifest["version"] = kVersion;
        manifest["command"] = command;
        manifest["seed"] = s.cfg.rng_seed;
        manifest["config"] = s.resolved;
    }
    void add_output(const fs::path& p) { outputs.push_back(p.string()); }
    void finish(const fs::path& out_dir) {
        manifest["outputs"] = outputs;
        manifest["wall_clock_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_text_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
};

int cmd_feedforward(const Setup& s, const CliOverrides& cli) {
    const fs::path out_dir = cli.out_dir;
    fs::create_directories(out_dir);
    ManifestWriter mw("feedforward", s);

    const Trajectory traj = make_trajectory(s.cfg);
    const ControlSignal sig = synthesize_signal(traj, s.cfg.nominal.actuator,
                                                s.cfg.signal_dt, s.cfg.precharge, s.cfg.hold);
    const fs::path csv = out_dir / "signal.csv";
    write_signal_csv(sig, csv.string());
    mw.add_output(csv);
    mw.manifest["samples"] = sig.samples.size();
    mw.finish(out_dir);
    std::cout << "wrote " << csv.string() << " (" << sig.samples.size() << " samples)\n";
    return 0;
}

int cmd_simulate(const Setup& s, const CliOverrides& cli) {
    const fs::path out_dir = cli.out_dir;
    fs::create_directories(out_dir);
    ManifestWriter mw("simulate", s);

    ControlSignal sig;
    if (!cli.signal_path.empty()) {
        sig = read_signal_csv(cli.signal_path);
    } else {
        const Trajectory traj = make_trajectory(s.cfg);
        sig = synthesize_signal(traj, s.cfg.nominal.actuator, s.cfg.signal_dt,
                                s.cfg.precharge, s.cfg.hold);
    }
    SimConfig sim = s.cfg.sim;
    sim.record_trace = true;
    const State start = operation_start_state(s.cfg, s.cfg.nominal.actuator);
    const OperationResult r =
        simulate_operation(s.cfg.nominal.actuator, sig, sim, start);

    const fs::path trace = out_dir / "trace.csv";
    write_trace_csv(r, sig, trace.string());
    mw.add_output(trace);

    json summary;
    summary["contact"] = r.contact();
    if (r.contact()) {
        summary["impact_velocity_mps"] = *r.impact_velocity;
        summary["impact_time_s"] = *r.impact_time;
        summary["cost"] = *r.cost;
    }
    const fs::path res = out_dir / "result.json";
    write_text_atomic(res, summary.dump(2) + "\n");
    mw.add_output(res);
    mw.finish(out_dir);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_baseline(const Setup& s, const CliOverrides& cli) {
    const fs::path out_dir = cli.out_dir;
    fs::create_directories(out_dir);
    ManifestWriter mw("baseline", s);

    const double j_unc = uncontrolled_baseline(s.cfg);
    json summary;
    summary["j_unc_mps"] = j_unc;
    summary["baseline_voltage_V"] = s.cfg.nominal.baseline_voltage_V;
    const fs::path res = out_dir / "baseline.json";
    write_text_atomic(res, summary.dump(2) + "\n");
    mw.add_output(res);
    mw.finish(out_dir);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_montecarlo(const Setup& s, const CliOverrides& cli) {
    const fs::path out_dir = cli.out_dir;
    fs::create_directories(out_dir);
    ManifestWriter mw("montecarlo", s);

    const MonteCarloResult mc = monte_carlo(s.cfg);
    const fs::path csv = out_dir / "percentiles.csv";
    write_percentiles_csv(mc.percentiles, csv.string());
    mw.add_output(csv);

    if (s.emit_histories) {
        for (std::size_t k = 0; k < mc.histories.size(); ++k) {
            const fs::path h = out_dir / ("history_" + std::to_string(k) + ".csv");
            write_history_csv(mc.histories[k], h.string());
            mw.add_output(h);
        }
    }

    json medians = json::array();
    for (const auto& row : mc.percentiles.rows) medians.push_back(row[1]);
    mw.manifest["j_unc_mps"] = mc.percentiles.j_unc;
    mw.manifest["median_curve_mps"] = medians;
    mw.finish(out_dir);
    std::cout << "wrote " << csv.string() << " (J_unc = " << mc.percentiles.j_unc
              << " m/s)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"soft-landing feedforward toolkit for reluctance actuators"};
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides cli;
    std::uint64_t seed_val = 0;
    int workers_val = 0, experiments_val = 0, operations_val = 0;
    double dt_val = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config document")->required();
        sub->add_option("--out-dir", cli.out_dir, "output directory");
        sub->add_option("--seed", seed_val, "override experiment.rng_seed")
            ->each([&](const std::string&) { cli.seed = seed_val; });
        sub->add_option("--workers", workers_val, "override worker count")
            ->each([&](const std::string&) { cli.workers = workers_val; });
        sub->add_option("--dt", dt_val, "override signal and simulation step, s")
            ->each([&](const std::string&) { cli.dt = dt_val; });
        sub->add_option("--experiments", experiments_val, "override n_experiments")
            ->each([&](const std::string&) { cli.experiments = experiments_val; });
        sub->add_option("--operations", operations_val, "override n_operations")
            ->each([&](const std::string&) { cli.operations = operations_val; });
    };

    CLI::App* ff = app.add_subcommand("feedforward", "synthesize the voltage signal");
    add_common(ff);
    CLI::App* sim = app.add_subcommand("simulate", "simulate one switching operation");
    add_common(sim);
    sim->add_option("--signal", cli.signal_path, "replay a signal CSV instead of synthesizing");
    CLI::App* base = app.add_subcommand("baseline", "uncontrolled constant activation");
    add_common(base);
    CLI::App* mc = app.add_subcommand("montecarlo", "perturbed-controller adaptation study");
    add_common(mc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const Setup setup = resolve(config_path, cli);
        if (ff->parsed()) return cmd_feedforward(setup, cli);
        if (sim->parsed()) return cmd_simulate(setup, cli);
        if (base->parsed()) return cmd_baseline(setup, cli);
        return cmd_montecarlo(setup, cli);
    } catch (const InfeasibleTrajectoryError& e) {
        std::cerr << "fault: " << e.what() << " (first offending time " << e.time_s
                  << " s)\n";
        return 3;
    } catch (const SaturationError& e) {
        std::cerr << "fault: " << e.what() << " at t = " << e.time_s << " s\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "fault: " << e.what() << '\n';
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
