#pragma once

// Fixed-step rk4/euler integration of dx_i/dt = sum_j a_ij(t,x) (x_j - x_i).
//
// Steps never straddle a declared time breakpoint, and when event refinement
// is on, steps that cross an endogenous switching surface (or, optionally, a
// value-order crossing) are bisected down to 1e-10 in time. The coefficient
// regime is frozen at the step's start for all stage evaluations, i.e. the
// rule's left limit rules the step. Switching instants and breakpoints are
// recorded as extra samples, so each sample-to-sample interval is regime-pure
// and the trapezoid rule for the accumulated coupling integral matches the
// residual re-check grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/scenario.hpp"
#include "cutbal/schedule.hpp"
#include "cutbal/trajectory.hpp"

namespace cutbal {

constexpr double kEventTimeResolution = 1e-10;

namespace detail {

struct EventSignature {
    RegimeSignature regime;
    std::vector<std::uint64_t> order_bits;
    bool operator==(const EventSignature&) const = default;
};

inline EventSignature event_signature(const CoefficientSchedule& sched, double t,
                                      const StateVector& x, bool order_events) {
    EventSignature sig;
    sig.regime = sched.signature(t, x);
    if (order_events) {
        const int n = static_cast<int>(x.size());
        sig.order_bits.assign((n * (n - 1) / 2 + 63) / 64, 0);
        int k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++k)
                if (x[i] < x[j]) sig.order_bits[k / 64] |= std::uint64_t{1} << (k % 64);
    }
    return sig;
}

// One explicit step of length dt with the coefficient regime frozen to `sig`.
inline StateVector frozen_step(const CoefficientSchedule& sched, IntegratorMethod method,
                               double t, const StateVector& x, double dt,
                               const RegimeSignature& sig) {
    const int n = static_cast<int>(x.size());
    const StateVector k1 = consensus_rhs(sched.at_signature(t, x, sig), x);
    if (method == IntegratorMethod::Euler) {
        StateVector out(n);
        for (int i = 0; i < n; ++i) out[i] = x[i] + dt * k1[i];
        return out;
    }
    StateVector tmp(n);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    const StateVector k2 = consensus_rhs(sched.at_signature(t + 0.5 * dt, tmp, sig), tmp);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    const StateVector k3 = consensus_rhs(sched.at_signature(t + 0.5 * dt, tmp, sig), tmp);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    const StateVector k4 = consensus_rhs(sched.at_signature(t + dt, tmp, sig), tmp);
    StateVector out(n);
    for (int i = 0; i < n; ++i)
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace detail

inline Trajectory integrate(const Scenario& sc) {
    if (sc.mode != TimeMode::Continuous)
        throw PreconditionError("integrate: scenario must be continuous-time");
    if (!sc.schedule.finalized()) throw PreconditionError("integrate: schedule not finalized");
    if (static_cast<int>(sc.x0.size()) != sc.n)
        throw PreconditionError("integrate: x0 has the wrong dimension");
    validate_state(sc.x0, "integrate: x0");
    if (!(sc.integrator.h > 0.0) || !std::isfinite(sc.integrator.h))
        throw PreconditionError("integrate: step size must be positive and finite");
    if (!(sc.horizon > 0.0) || !std::isfinite(sc.horizon))
        throw PreconditionError("integrate: horizon must be positive and finite");
    if (sc.sampling.stride < 1) throw PreconditionError("integrate: stride must be >= 1");

    const double h = sc.integrator.h;
    const double horizon = sc.horizon;
    const int stride = sc.sampling.stride;
    const bool refine = sc.integrator.event_refine && sc.schedule.endogenous();
    const bool order_events = sc.integrator.refine_order_events;
    const bool track_events = refine || order_events;
    const auto total_steps = static_cast<long long>(std::ceil(horizon / h - 1e-9));

    Trajectory tr;
    double t = 0.0;
    StateVector x = sc.x0;
    CoefficientMatrix integral(sc.n);

    // State of the currently open sample interval: trapezoid accumulation
    // happens when it closes, using the regime that governs its interior.
    double t_open = 0.0;
    StateVector x_open = x;

    tr.times.push_back(0.0);
    tr.states.push_back(x);
    tr.integrals.push_back(integral);
    tr.event_sample.push_back(0);

    StateVector xmid(sc.n);
    auto close_sample = [&](double tb, const StateVector& xb, bool is_event) {
        if (tb - tr.times.back() <= kEventTimeResolution * 1e-3) return;  // avoid duplicate times
        for (int i = 0; i < sc.n; ++i) xmid[i] = 0.5 * (x_open[i] + xb[i]);
        const RegimeSignature sig = sc.schedule.signature(0.5 * (t_open + tb), xmid);
        const CoefficientMatrix aa = sc.schedule.at_signature(t_open, x_open, sig);
        const CoefficientMatrix ab = sc.schedule.at_signature(tb, xb, sig);
        const double half = 0.5 * (tb - t_open);
        for (int i = 0; i < sc.n; ++i)
            for (int j = 0; j < sc.n; ++j)
                if (i != j) integral(i, j) += half * (aa(i, j) + ab(i, j));
        tr.times.push_back(tb);
        tr.states.push_back(xb);
        tr.integrals.push_back(integral);
        tr.event_sample.push_back(is_event ? 1 : 0);
        t_open = tb;
        x_open = xb;
    };

    for (long long step = 1; step <= total_steps; ++step) {
        const double target = step == total_steps ? horizon : std::min(step * h, horizon);
        while (t < target - 1e-15 * std::max(1.0, target)) {
            const double bp = sc.schedule.next_breakpoint_after(t);
            const double stop = std::min(target, bp);
            const bool stop_is_breakpoint = bp <= target;

            int events_here = 0;
            while (t < stop - 1e-15 * std::max(1.0, stop)) {
                const detail::EventSignature sig0 =
                    detail::event_signature(sc.schedule, t, x, order_events);
                const double dt = stop - t;
                StateVector trial =
                    detail::frozen_step(sc.schedule, sc.integrator.method, t, x, dt, sig0.regime);
                const bool changed =
                    track_events &&
                    !(detail::event_signature(sc.schedule, stop, trial, order_events) == sig0);
                if (!changed) {
                    t = stop;
                    x = std::move(trial);
                    break;
                }
                if (++events_here > 1000)
                    throw NumericError("integrate: over 1000 switching events inside one step near t = " +
                                       std::to_string(t) + "; surface chatter suspected");
                double lo = 0.0, hi = dt;
                while (hi - lo > kEventTimeResolution) {
                    const double mid = 0.5 * (lo + hi);
                    const StateVector xm = detail::frozen_step(sc.schedule, sc.integrator.method,
                                                               t, x, mid, sig0.regime);
                    if (detail::event_signature(sc.schedule, t + mid, xm, order_events) == sig0)
                        lo = mid;
                    else
                        hi = mid;
                }
                x = detail::frozen_step(sc.schedule, sc.integrator.method, t, x, hi, sig0.regime);
                t += hi;
                close_sample(t, x, true);
            }
            for (double v : x)
                if (!std::isfinite(v))
                    throw NumericError("integrate: state blew up near t = " + std::to_string(t));
            if (stop_is_breakpoint && stop < target) {
                t = stop;
                close_sample(t, x, true);
            }
        }
        t = target;
        if (step % stride == 0 || step == total_steps) close_sample(t, x, false);
    }

    // Values can never leave the initial range; allow integrator-order slack.
    double lo0 = sc.x0[0], hi0 = sc.x0[0];
    for (double v : sc.x0) {
        lo0 = std::min(lo0, v);
        hi0 = std::max(hi0, v);
    }
    const double slack = 10.0 * sc.integrator.tol * std::max(1.0, hi0 - lo0) + 1e-12;
    for (std::size_t k = 0; k < tr.size(); ++k)
        for (double v : tr.states[k])
            if (v < lo0 - slack || v > hi0 + slack)
                throw NumericError("integrate: state left the initial value range at t = " +
                                   std::to_string(tr.times[k]));
    return tr;
}

// ---- independent re-checks --------------------------------------------------

struct ResidualReport {
    double max_residual = 0.0;
    double at_t = 0.0;
    int agent = 0;  // 1-indexed
};

// Re-evaluates the integral form x_i(t) = x_i(0) + integral of sum_j a_ij (x_j - x_i)
// at the sample times by trapezoid quadrature; the largest absolute gap is an
// integrator-independent consistency certificate.
inline ResidualReport residual_check(const Trajectory& tr, const CoefficientSchedule& sched) {
    tr.check_consistent();
    const int n = tr.n();
    ResidualReport rep;
    std::vector<double> q(n, 0.0);
    StateVector xmid(n);
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
        const double ta = tr.times[k], tb = tr.times[k + 1];
        const StateVector& xa = tr.states[k];
        const StateVector& xb = tr.states[k + 1];
        for (int i = 0; i < n; ++i) xmid[i] = 0.5 * (xa[i] + xb[i]);
        const RegimeSignature sig = sched.signature(0.5 * (ta + tb), xmid);
        const StateVector va = consensus_rhs(sched.at_signature(ta, xa, sig), xa);
        const StateVector vb = consensus_rhs(sched.at_signature(tb, xb, sig), xb);
        for (int i = 0; i < n; ++i) {
            q[i] += 0.5 * (tb - ta) * (va[i] + vb[i]);
            const double r = std::abs(xb[i] - tr.states.front()[i] - q[i]);
            if (r > rep.max_residual) {
                rep.max_residual = r;
                rep.at_t = tb;
                rep.agent = i + 1;
            }
        }
    }
    return rep;
}

// Largest coefficient asymmetry seen along the run: entry (i, j) holds the
// maximum over samples of a_ij / a_ji, with 0/0 -> 1 and x/0 -> +inf.
inline SquareMatrix<double> accumulate_ratio_growth(const Trajectory& tr,
                                                    const CoefficientSchedule& sched) {
    tr.check_consistent();
    const int n = tr.n();
    SquareMatrix<double> worst(n, 1.0);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const CoefficientMatrix a = sched.at(tr.times[k], tr.states[k]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double ratio;
                if (a(i, j) == 0.0 && a(j, i) == 0.0) ratio = 1.0;
                else if (a(j, i) == 0.0) ratio = std::numeric_limits<double>::infinity();
                else ratio = a(i, j) / a(j, i);
                worst(i, j) = std::max(worst(i, j), ratio);
            }
    }
    return worst;
}

// ---- named experiments ------------------------------------------------------

// The three-agent system whose middle value oscillates forever: the outer
// agents pin themselves to +-3 while agent 2 follows sin(t). Shows that
// plain nonnegativity without any flow balance permits non-convergence.
struct Example1Evidence {
    Trajectory trajectory;
    double x2_tail_spread = 0.0;      // oscillation spread over the final 20%
    double max_ratio_a21_a12 = 0.0;   // how one-sided the coupling becomes
    double x1_final_error = 0.0;      // |x_1(T) - 3|
    double x3_final_error = 0.0;      // |x_3(T) + 3|
    bool claim_holds = false;         // spread >= 1.9 certifies persistent oscillation
};

inline Example1Evidence run_example1(double horizon = 50.0, double h = 1e-3) {
    Scenario sc;
    sc.n = 3;
    sc.mode = TimeMode::Continuous;
    sc.horizon = horizon;
    sc.x0 = {4.0, 0.0, -4.0};
    sc.schedule = CoefficientSchedule::example1();
    sc.schedule.finalize(sc.n, sc.horizon, sc.mode);
    sc.integrator.h = h;
    sc.integrator.tol = 1e-6;
    sc.sampling.stride = 1;

    Example1Evidence ev;
    ev.trajectory = integrate(sc);
    const Trajectory& tr = ev.trajectory;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.times[k] >= 0.8 * horizon) {
            lo = std::min(lo, tr.states[k][1]);
            hi = std::max(hi, tr.states[k][1]);
        }
        const CoefficientMatrix a = sc.schedule.at(tr.times[k], tr.states[k]);
        if (a(0, 1) > 0.0)
            ev.max_ratio_a21_a12 = std::max(ev.max_ratio_a21_a12, a(1, 0) / a(0, 1));
    }
    ev.x2_tail_spread = hi - lo;
    ev.x1_final_error = std::abs(tr.final_state()[0] - 3.0);
    ev.x3_final_error = std::abs(tr.final_state()[2] + 3.0);
    ev.claim_holds = ev.x2_tail_spread >= 1.9;
    return ev;
}

// Endogenous four-agent rule where the middle pair meets in finite time and
// every interaction shuts off at that instant.
struct Example2Result {
    Trajectory trajectory;
    double merge_time = std::numeric_limits<double>::infinity();
    StateVector limits;
    bool froze_after_merge = false;
    double post_merge_drift = 0.0;
};

inline Example2Result run_example2(const StateVector& x0, double horizon = 6.0, double h = 1e-4) {
    if (x0.size() != 4)
        throw PreconditionError("run_example2: exactly four agents required");
    for (std::size_t i = 1; i < x0.size(); ++i)
        if (x0[i] < x0[i - 1])
            throw PreconditionError("run_example2: x0 must be sorted ascending");

    Scenario sc;
    sc.n = 4;
    sc.mode = TimeMode::Continuous;
    sc.horizon = horizon;
    sc.x0 = x0;
    sc.schedule = CoefficientSchedule::example2();
    sc.schedule.finalize(sc.n, sc.horizon, sc.mode);
    sc.integrator.h = h;
    sc.integrator.tol = 1e-8;
    sc.sampling.stride = 1;

    Example2Result res;
    res.trajectory = integrate(sc);
    const Trajectory& tr = res.trajectory;
    for (std::size_t k = 0; k < tr.size(); ++k)
        if (!sc.schedule.signature(tr.times[k], tr.states[k]).test(0)) {
            res.merge_time = tr.times[k];
            break;
        }
    res.limits = tr.final_state();
    if (std::isfinite(res.merge_time)) {
        for (std::size_t k = 0; k < tr.size(); ++k) {
            if (tr.times[k] < res.merge_time) continue;
            for (int i = 0; i < 4; ++i)
                res.post_merge_drift =
                    std::max(res.post_merge_drift, std::abs(tr.states[k][i] - res.limits[i]));
        }
        res.froze_after_merge = res.post_merge_drift <= 1e-9;
    }
    return res;
}

// Two groups started at 0 and 1 with an integrable cross-coupling tail. When
// the tail budget stays at or below 1/4, neither group can travel far enough
// to meet the other: the lower group stays within [0, 1/4] and the upper
// within [3/4, 1] for all time.
struct TQuarterCertificate {
    Trajectory trajectory;
    double tail_budget = 0.0;
    double max_group1 = 0.0;  // largest value any group-1 agent ever takes
    double min_group2 = 1.0;  // smallest value any group-2 agent ever takes
    bool bounds_hold = false;
};

inline TQuarterCertificate run_t_quarter_experiment(int m, int n_total, double tail_budget,
                                                    double intra = 1.0, double horizon = 30.0,
                                                    double h = 1e-3) {
    if (tail_budget > 0.25)
        throw PreconditionError("run_t_quarter_experiment: tail budget " +
                                std::to_string(tail_budget) +
                                " exceeds 1/4; the separation bound needs budget <= 1/4");
    if (m < 1 || m >= n_total)
        throw PreconditionError("run_t_quarter_experiment: need 1 <= m < n");

    Scenario sc;
    sc.n = n_total;
    sc.mode = TimeMode::Continuous;
    sc.horizon = horizon;
    sc.x0.assign(n_total, 1.0);
    for (int i = 0; i < m; ++i) sc.x0[i] = 0.0;
    sc.schedule = CoefficientSchedule::t_quarter(m, tail_budget, intra);
    sc.schedule.finalize(sc.n, sc.horizon, sc.mode);
    sc.integrator.h = h;
    sc.integrator.tol = 1e-8;
    sc.sampling.stride = 1;

    TQuarterCertificate cert;
    cert.tail_budget = tail_budget;
    cert.trajectory = integrate(sc);
    const Trajectory& tr = cert.trajectory;
    for (std::size_t k = 0; k < tr.size(); ++k)
        for (int i = 0; i < n_total; ++i) {
            if (i < m) cert.max_group1 = std::max(cert.max_group1, tr.states[k][i]);
            else cert.min_group2 = std::min(cert.min_group2, tr.states[k][i]);
        }
    cert.bounds_hold = cert.max_group1 <= 0.25 + 1e-6 && cert.min_group2 >= 0.75 - 1e-6;
    return cert;
}

}  // namespace cutbal
