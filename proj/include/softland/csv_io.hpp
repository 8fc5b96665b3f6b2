#pragma once

// CSV emission and parsing for the toolkit's numeric artifacts. All numbers
// are written with "%.17g" so outputs are byte-reproducible for identical
// inputs (doubles round-trip exactly).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "softland/errors.hpp"
#include "softland/experiment.hpp"
#include "softland/flatness.hpp"
#include "softland/pattern_search.hpp"
#include "softland/simulation.hpp"

namespace softland {

inline std::string fmt_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

/// Columns: time_s, voltage_V, phase. One row per sample interval start.
inline void write_signal_csv(const ControlSignal& sig, const std::string& path) {
    auto out = open_output(path);
    out << "time_s,voltage_V,phase\n";
    for (std::size_t k = 0; k < sig.samples.size(); ++k) {
        const double t = sig.t_start + static_cast<double>(k) * sig.dt;
        out << fmt_g17(t) << ',' << fmt_g17(sig.samples[k]) << ','
            << to_string(sig.phase_of(k)) << '\n';
    }
}

/// Parses a signal CSV written by write_signal_csv (replay input).
inline ControlSignal read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open signal file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("time_s,voltage_V,phase", 0) != 0)
        throw Error("signal CSV: missing header in " + path);
    ControlSignal sig;
    std::vector<double> times;
    sig.phase_marks = {0, 0};
    bool saw_tracking = false, saw_hold = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string t_s, u_s, ph;
        if (!std::getline(row, t_s, ',') || !std::getline(row, u_s, ',') ||
            !std::getline(row, ph))
            throw Error("signal CSV: malformed row: " + line);
        times.push_back(std::stod(t_s));
        sig.samples.push_back(std::stod(u_s));
        if (!saw_tracking && ph == "tracking") {
            sig.phase_marks[0] = sig.samples.size() - 1;
            saw_tracking = true;
        }
        if (!saw_hold && ph == "hold") {
            sig.phase_marks[1] = sig.samples.size() - 1;
            saw_hold = true;
        }
    }
    if (sig.samples.empty()) throw Error("signal CSV: no samples in " + path);
    sig.t_start = times.front();
    sig.dt = times.size() > 1 ? times[1] - times[0] : 1e-6;
    if (!saw_tracking) sig.phase_marks[0] = saw_hold ? sig.phase_marks[1] : sig.samples.size();
    if (!saw_hold) sig.phase_marks[1] = sig.samples.size();
    sig.validate();
    return sig;
}

/// Columns: t_s, z_m, v_mps, lambda_Wb, u_V, phase (phase of the drive signal).
inline void write_trace_csv(const OperationResult& r, const ControlSignal& sig,
                            const std::string& path) {
    auto out = open_output(path);
    out << "t_s,z_m,v_mps,lambda_Wb,u_V,phase\n";
    for (const TraceRow& row : r.trace) {
        const double x = (row.t - sig.t_start) / sig.dt;
        std::size_t k = x > 0.0 ? static_cast<std::size_t>(x) : 0;
        if (k >= sig.samples.size()) k = sig.samples.size() - 1;
        out << fmt_g17(row.t) << ',' << fmt_g17(row.state.z) << ','
            << fmt_g17(row.state.z_dot) << ',' << fmt_g17(row.state.lam) << ','
            << fmt_g17(row.u) << ',' << to_string(sig.phase_of(k)) << '\n';
    }
}

/// Columns: n, J, p1..pd (normalized), step, accepted.
inline void write_history_csv(const std::vector<HistoryEntry>& history,
                              const std::string& path) {
    auto out = open_output(path);
    out << "n,J";
    const std::size_t d = history.empty() ? 0 : history.front().candidate.size();
    for (std::size_t i = 1; i <= d; ++i) out << ",p" << i << "_norm";
    out << ",step,accepted\n";
    for (const HistoryEntry& e : history) {
        out << e.n << ',' << fmt_g17(e.cost);
        for (double x : e.candidate) out << ',' << fmt_g17(x);
        out << ',' << fmt_g17(e.step) << ',' << (e.accepted ? 1 : 0) << '\n';
    }
}

/// Columns: n, p10, p50, p90, J_unc.
inline void write_percentiles_csv(const PercentileTable& table, const std::string& path) {
    auto out = open_output(path);
    out << "n,p10,p50,p90,J_unc\n";
    for (std::size_t n = 0; n < table.rows.size(); ++n) {
        out << n << ',' << fmt_g17(table.rows[n][0]) << ',' << fmt_g17(table.rows[n][1])
            << ',' << fmt_g17(table.rows[n][2]) << ',' << fmt_g17(table.j_unc) << '\n';
    }
}

}  // namespace softland
