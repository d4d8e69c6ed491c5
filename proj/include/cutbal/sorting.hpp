#pragma once

// The sorted-process machinery: relabel agents by current value (ties broken
// by original index), track the weighted partial sums
//   S_m(t) = sum_{i=1..m} K^{-i} y_i(t),
// which are nondecreasing along cut-balanced runs, and re-check that the
// sorted values satisfy their own integral equation (the i-th smallest value
// moves with the velocity of whichever agent currently holds that rank).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <vector>

#include "cutbal/balance.hpp"
#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/schedule.hpp"
#include "cutbal/trajectory.hpp"

namespace cutbal {

// p[i] = original index of the i-th smallest value; equal values keep index
// order, so the permutation is unique (lexicographic tie-breaking).
inline std::vector<int> sort_permutation(const StateVector& x) {
    std::vector<int> p(x.size());
    std::iota(p.begin(), p.end(), 0);
    std::stable_sort(p.begin(), p.end(), [&](int i, int j) { return x[i] < x[j]; });
    return p;
}

struct SortedView {
    std::vector<double> y;   // sorted values
    CoefficientMatrix b;     // coefficients in sorted labels: b_ij = a_{p_i p_j}
    std::vector<int> perm;
};

inline SortedView sorted_view(const StateVector& x, const CoefficientMatrix& a) {
    const int n = a.n();
    if (static_cast<int>(x.size()) != n)
        throw PreconditionError("sorted_view: state and matrix dimensions differ");
    SortedView out;
    out.perm = sort_permutation(x);
    out.y.resize(n);
    out.b = CoefficientMatrix(n);
    for (int i = 0; i < n; ++i) {
        out.y[i] = x[out.perm[i]];
        for (int j = 0; j < n; ++j) out.b(i, j) = a(out.perm[i], out.perm[j]);
    }
    return out;
}

struct WeightedSumSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> s;  // s[m-1][k] = S_m(times[k])
    double k_used = 1.0;
    bool k_ok = true;          // false when some sampled matrix needs a larger K
    double first_bad_t = 0.0;  // earliest offending sample when !k_ok
};

namespace detail {

// Cheap admissibility test "is this matrix cut-balanced with constant K?".
// Symmetry and the entrywise ratio bound are sufficient conditions; exhaustive
// enumeration settles small matrices exactly. For n > 16 without a cheap
// certificate the sample is conservatively flagged.
inline bool k_admissible(const CoefficientMatrix& a, double k) {
    if (is_symmetric(a)) return true;
    double worst = 1.0;
    bool type_sym = true;
    for (int i = 0; i < a.n() && type_sym; ++i)
        for (int j = i + 1; j < a.n(); ++j) {
            const bool za = a(i, j) <= kDefaultEpsZero, zb = a(j, i) <= kDefaultEpsZero;
            if (za && zb) continue;
            if (za || zb) {
                type_sym = false;
                break;
            }
            worst = std::max(worst, std::max(a(i, j) / a(j, i), a(j, i) / a(i, j)));
        }
    if (type_sym && worst <= k * (1.0 + 1e-12)) return true;
    if (a.n() > 16) return false;
    const MinimalK mk = minimal_cut_balance_k(a);
    return mk.feasible && mk.k <= k * (1.0 + 1e-12);
}

}  // namespace detail

// Samples S_m(t) for m = 1..n along a run. The schedule is re-evaluated at
// each sample to confirm K is admissible there; an inadmissible sample only
// flags the series (warning-level), the values are still produced.
inline WeightedSumSeries weighted_sum_series(const Trajectory& tr,
                                             const CoefficientSchedule& sched, double k) {
    if (!(k >= 1.0)) throw PreconditionError("weighted_sum_series: K must be >= 1");
    if (!std::isfinite(k))
        throw PreconditionError("weighted_sum_series: K must be finite; no finite cut-balance "
                                "constant means the series carries no guarantee");
    const int n = tr.n();
    WeightedSumSeries out;
    out.k_used = k;
    out.times = tr.times;
    out.s.assign(n, std::vector<double>(tr.size(), 0.0));
    for (std::size_t idx = 0; idx < tr.size(); ++idx) {
        const StateVector& x = tr.states[idx];
        std::vector<double> y = x;
        std::sort(y.begin(), y.end());
        double acc = 0.0, weight = 1.0;
        for (int m = 1; m <= n; ++m) {
            weight /= k;
            acc += weight * y[m - 1];
            out.s[m - 1][idx] = acc;
        }
        if (out.k_ok && !detail::k_admissible(sched.at(tr.times[idx], x), k)) {
            out.k_ok = false;
            out.first_bad_t = tr.times[idx];
        }
    }
    return out;
}

struct MonotonicityReport {
    bool pass = true;
    double worst_drop = 0.0;  // largest decrease S_m(t_k) - S_m(t_{k+1}) seen
    double worst_t = 0.0;
    int worst_m = 0;
};

inline MonotonicityReport monotonicity_check(const WeightedSumSeries& series, double slack) {
    MonotonicityReport rep;
    for (std::size_t m = 0; m < series.s.size(); ++m) {
        const auto& row = series.s[m];
        for (std::size_t idx = 0; idx + 1 < row.size(); ++idx) {
            const double drop = row[idx] - row[idx + 1];
            if (drop > rep.worst_drop) {
                rep.worst_drop = drop;
                rep.worst_t = series.times[idx + 1];
                rep.worst_m = static_cast<int>(m) + 1;
            }
        }
    }
    rep.pass = rep.worst_drop <= slack;
    return rep;
}

inline void write_weighted_sums_csv(std::ostream& os, const WeightedSumSeries& series) {
    const int n = static_cast<int>(series.s.size());
    os << 't';
    for (int m = 1; m <= n; ++m) os << ",S_" << m;
    os << '\n';
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        os << format_g17(series.times[k]);
        for (int m = 0; m < n; ++m) os << ',' << format_g17(series.s[m][k]);
        os << '\n';
    }
}

namespace detail {

// Order of the agents on the open interval between two consecutive samples:
// primary key is the left state, ties resolve by where the value is heading,
// then by index. Event-refined grids change order only at sample points, so
// this recovers the interval's constant permutation.
inline std::vector<int> interval_permutation(const StateVector& xa, const StateVector& xb) {
    std::vector<int> p(xa.size());
    std::iota(p.begin(), p.end(), 0);
    std::stable_sort(p.begin(), p.end(), [&](int i, int j) {
        if (xa[i] != xa[j]) return xa[i] < xa[j];
        return xb[i] < xb[j];
    });
    return p;
}

}  // namespace detail

// Largest deviation, over samples and ranks, between the sorted values and
// the trapezoid quadrature of their rank-resolved velocities:
//   y_i(t) - y_i(0) - integral of v_{p_i(tau)} dtau.
inline double sorted_evolution_residual(const Trajectory& tr, const CoefficientSchedule& sched) {
    tr.check_consistent();
    const int n = tr.n();
    const std::vector<int> p0 = sort_permutation(tr.states.front());
    std::vector<double> y0(n);
    for (int i = 0; i < n; ++i) y0[i] = tr.states.front()[p0[i]];

    std::vector<double> q(n, 0.0);
    double worst = 0.0;
    StateVector xmid(n);
    for (std::size_t idx = 0; idx + 1 < tr.size(); ++idx) {
        const double ta = tr.times[idx], tb = tr.times[idx + 1];
        const StateVector& xa = tr.states[idx];
        const StateVector& xb = tr.states[idx + 1];
        for (int i = 0; i < n; ++i) xmid[i] = 0.5 * (xa[i] + xb[i]);
        const RegimeSignature sig = sched.signature(0.5 * (ta + tb), xmid);
        const StateVector va = consensus_rhs(sched.at_signature(ta, xa, sig), xa);
        const StateVector vb = consensus_rhs(sched.at_signature(tb, xb, sig), xb);
        const std::vector<int> p = detail::interval_permutation(xa, xb);
        for (int i = 0; i < n; ++i) q[i] += 0.5 * (tb - ta) * (va[p[i]] + vb[p[i]]);

        std::vector<double> yb = xb;
        std::sort(yb.begin(), yb.end());
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(yb[i] - y0[i] - q[i]));
    }
    return worst;
}

}  // namespace cutbal
