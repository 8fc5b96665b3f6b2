#pragma once

// Run-to-run adaptation of the feedforward parameter vector: a compass
// (pattern) search that evaluates exactly one candidate per switching
// operation. The search runs in normalized coordinates (each component is the
// physical value divided by its initial value) so parameters spanning many
// decades share one mesh size.
//
// Schedule: fixed polling order +e1, -e1, ..., +ed, -ed; a strictly improving
// candidate becomes the incumbent and restarts the poll; after a complete
// unsuccessful poll of all 2d directions the step halves. No expansion step.
// Candidates are projected componentwise onto the bound box.

#include <cstddef>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace softland {

struct PatternSearchOptions {
    double step_init = 0.05;    ///< initial mesh size, normalized coordinates
    double contraction = 0.5;   ///< step multiplier after a full failed poll
    double bound_lower = 0.5;   ///< box bound, normalized
    double bound_upper = 2.0;   ///< box bound, normalized
};

/// One evaluated operation: candidate in normalized coordinates, its cost,
/// the mesh size it was proposed at, and whether it became the incumbent.
struct HistoryEntry {
    int n;
    std::vector<double> candidate;  ///< normalized
    double cost;
    double step;
    bool accepted;
};

struct AdaptationState {
    std::vector<double> reference;  ///< initial physical values (normalizers)
    std::vector<double> incumbent;  ///< normalized, always inside the bounds
    double best_cost = 0.0;
    bool has_cost = false;  ///< false until the baseline evaluation lands
    double step = 0.0;
    std::size_t poll_index = 0;  ///< position in the 2d-direction poll cycle
    PatternSearchOptions opts;
    std::vector<HistoryEntry> history;

    bool pending = false;  ///< a proposal awaits its cost
    std::vector<double> pending_candidate;

    std::size_t dim() const { return reference.size(); }

    /// Next candidate as a physical parameter vector. The first call proposes
    /// the unperturbed reference itself (baseline evaluation). Repeated calls
    /// without an intervening update return the same pending candidate.
    std::vector<double> propose() {
        if (!pending) {
            if (!has_cost) {
                pending_candidate = incumbent;  // all-ones baseline
            } else {
                pending_candidate = incumbent;
                const std::size_t comp = poll_index / 2;
                const double sign = (poll_index % 2 == 0) ? 1.0 : -1.0;
                double& x = pending_candidate[comp];
                x = std::min(opts.bound_upper,
                             std::max(opts.bound_lower, x + sign * step));
            }
            pending = true;
        }
        std::vector<double> phys(dim());
        for (std::size_t i = 0; i < dim(); ++i)
            phys[i] = pending_candidate[i] * reference[i];
        return phys;
    }

    /// Feeds back the cost of the pending candidate and advances the search.
    void update(double cost) {
        if (!pending)
            throw std::logic_error("AdaptationState::update: no proposal pending");
        if (!(std::isfinite(cost) && cost >= 0.0))
            throw std::invalid_argument("AdaptationState::update: cost must be finite and >= 0");
        const double step_proposed = step;
        bool accepted = false;
        if (!has_cost) {
            best_cost = cost;
            has_cost = true;
            accepted = true;
        } else if (cost < best_cost) {
            incumbent = pending_candidate;
            best_cost = cost;
            poll_index = 0;
            accepted = true;
        } else {
            ++poll_index;
            if (poll_index == 2 * dim()) {
                step *= opts.contraction;
                poll_index = 0;
            }
        }
        history.push_back(HistoryEntry{static_cast<int>(history.size()),
                                       pending_candidate, cost, step_proposed, accepted});
        pending = false;
    }
};

/// Initializes the adaptation for a componentwise-positive physical vector.
inline AdaptationState init_adaptation(const std::vector<double>& p0,
                                       PatternSearchOptions opts = {}) {
    if (p0.empty())
        throw std::invalid_argument("init_adaptation: empty parameter vector");
    for (double x : p0)
        if (!(x > 0.0))
            throw std::invalid_argument(
                "init_adaptation: parameters must be strictly positive");
    AdaptationState s;
    s.reference = p0;
    s.incumbent.assign(p0.size(), 1.0);
    s.step = opts.step_init;
    s.opts = opts;
    return s;
}

/// Runs n_operations propose/evaluate/update rounds against a plant handle
/// mapping a physical parameter vector to a cost. Plant exceptions are
/// recorded as `fault_cost` instead of aborting the loop.
inline AdaptationState run_loop(const std::vector<double>& p0,
                                const std::function<double(const std::vector<double>&)>& plant,
                                int n_operations, PatternSearchOptions opts = {},
                                double fault_cost = 1e30) {
    AdaptationState s = init_adaptation(p0, opts);
    for (int n = 0; n < n_operations; ++n) {
        const std::vector<double> candidate = s.propose();
        double cost;
        try {
            cost = plant(candidate);
        } catch (const std::exception&) {
            cost = fault_cost;
        }
        s.update(cost);
    }
    return s;
}

}  // namespace softland
