#pragma once

// Sampled runs. `times` is strictly increasing and starts at 0; `integrals`
// carries the entrywise-nondecreasing accumulated coupling integral of a_ij in
// continuous time and cumulative activation counts in discrete time. Event-
// refined switching instants and declared breakpoints appear as extra samples
// (flagged), so every sample-to-sample interval lives in a single regime.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"

namespace cutbal {

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<CoefficientMatrix> integrals;
    std::vector<std::uint8_t> event_sample;

    std::size_t size() const { return times.size(); }
    int n() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    const StateVector& final_state() const { return states.back(); }

    void check_consistent() const {
        if (times.empty() || times.front() != 0.0)
            throw PreconditionError("trajectory: must start with a sample at t = 0");
        if (states.size() != times.size() || integrals.size() != times.size() ||
            event_sample.size() != times.size())
            throw PreconditionError("trajectory: parallel arrays have mismatched lengths");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (!(times[k] > times[k - 1]))
                throw PreconditionError("trajectory: times must be strictly increasing");
    }

    // Index of the sample closest to t (ties resolve to the earlier one).
    std::size_t index_near(double t) const {
        std::size_t best = 0;
        double dist = std::abs(times[0] - t);
        for (std::size_t k = 1; k < times.size(); ++k) {
            const double d = std::abs(times[k] - t);
            if (d < dist) {
                dist = d;
                best = k;
            }
        }
        return best;
    }
};

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

// Header "t,x_1,...,x_n"; all floats with 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const int n = tr.n();
    os << 't';
    for (int i = 1; i <= n; ++i) os << ",x_" << i;
    os << '\n';
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << format_g17(tr.times[k]);
        for (int i = 0; i < n; ++i) os << ',' << format_g17(tr.states[k][i]);
        os << '\n';
    }
}

// Companion file for the accumulated coupling integrals: one column per ordered pair
// (i, j), i != j, row-major; header "t,I_1_2,...,I_n_n-1".
inline void write_integrals_csv(std::ostream& os, const Trajectory& tr) {
    const int n = tr.n();
    os << 't';
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j) os << ",I_" << i << '_' << j;
    os << '\n';
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << format_g17(tr.times[k]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) os << ',' << format_g17(tr.integrals[k](i, j));
        os << '\n';
    }
}

struct ConvergenceCheck {
    bool converged = false;
    double window_start = 0.0;
    double trailing_spread = 0.0;  // max over coordinates of (max - min) in the window
};

// Empirical convergence monitor: every coordinate must vary by less than
// 10 * tol over the last 10% of the horizon.
inline ConvergenceCheck trailing_window_convergence(const Trajectory& tr, double tol) {
    ConvergenceCheck out;
    out.window_start = tr.horizon() * 0.9;
    const int n = tr.n();
    StateVector lo, hi;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.times[k] < out.window_start) continue;
        if (lo.empty()) {
            lo = hi = tr.states[k];
            continue;
        }
        for (int i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], tr.states[k][i]);
            hi[i] = std::max(hi[i], tr.states[k][i]);
        }
    }
    for (int i = 0; i < n && !lo.empty(); ++i)
        out.trailing_spread = std::max(out.trailing_spread, hi[i] - lo[i]);
    out.converged = !lo.empty() && out.trailing_spread < 10.0 * tol;
    return out;
}

}  // namespace cutbal
