#pragma once

// Cut-balance verification. A nonnegative coefficient matrix is cut-balanced
// with constant K >= 1 when, for every nonempty proper agent subset S, the
// total flow out of S and into S bound each other within a factor K:
//
//   (1/K) * sum_{i in S, j not in S} a_ji  <=  sum_{i in S, j not in S} a_ij
//                                          <=   K * sum_{i in S, j not in S} a_ji
//
// Cuts are unordered (S and its complement give the same constraint), so
// there are 2^(n-1) - 1 of them; exhaustive enumeration is capped at n <= 24.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/rng.hpp"

namespace cutbal {

constexpr int kMaxCutEnumerationAgents = 24;
constexpr double kDefaultEpsZero = 1e-12;

struct CutRecord {
    std::uint32_t subset = 0;  // bit i set <=> agent i+1 lies in S (S always contains agent 1)
    double forward = 0.0;      // sum of a_ij over i in S, j outside
    double reverse = 0.0;      // sum of a_ji over i in S, j outside
    double ratio = 1.0;        // max(forward/reverse, reverse/forward); 1 for 0/0, inf for x/0
};

struct CutReport {
    int n = 0;
    std::vector<CutRecord> cuts;
    bool feasible = true;     // false when some cut has one-directional flow
    double minimal_k = 1.0;   // max ratio over cuts with flow; +inf when infeasible
    std::uint32_t extremal_cut = 0;  // argmax cut (or the first infeasible one)
};

inline std::string subset_to_string(std::uint32_t mask, int n) {
    std::string out = "{";
    bool first = true;
    for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) {
            if (!first) out += ",";
            out += std::to_string(i + 1);
            first = false;
        }
    return out + "}";
}

namespace detail {

inline void require_enumerable(const CoefficientMatrix& a) {
    if (a.n() < 1) throw PreconditionError("cut enumeration: empty matrix");
    if (a.n() > kMaxCutEnumerationAgents)
        throw PreconditionError("cut enumeration: n = " + std::to_string(a.n()) +
                                " exceeds the exhaustive cap of " +
                                std::to_string(kMaxCutEnumerationAgents));
}

inline CutRecord make_record(std::uint32_t mask, double f, double r, double eps_zero) {
    CutRecord rec;
    rec.subset = mask;
    rec.forward = f;
    rec.reverse = r;
    const bool fz = f <= eps_zero, rz = r <= eps_zero;
    if (fz && rz) rec.ratio = 1.0;
    else if (fz || rz) rec.ratio = std::numeric_limits<double>::infinity();
    else rec.ratio = std::max(f / r, r / f);
    return rec;
}

}  // namespace detail

// Enumerates every unordered cut and records both flows. Single agents are
// trivially balanced (no cuts exist for n = 1). For n <= 16 each cut's flows
// are summed afresh; above that a Gray-code walk updates them incrementally.
inline CutReport enumerate_cuts(const CoefficientMatrix& a, double eps_zero = kDefaultEpsZero) {
    detail::require_enumerable(a);
    const int n = a.n();
    CutReport report;
    report.n = n;
    if (n == 1) return report;

    const std::uint32_t count = (1u << (n - 1)) - 1;
    report.cuts.reserve(count);
    double best = 0.0;
    bool have_best = false;

    auto consider = [&](const CutRecord& rec) {
        report.cuts.push_back(rec);
        if (std::isinf(rec.ratio)) {
            if (report.feasible) {
                report.feasible = false;
                report.extremal_cut = rec.subset;
                report.minimal_k = rec.ratio;
            }
            return;
        }
        if (!report.feasible) return;
        if (rec.forward <= eps_zero && rec.reverse <= eps_zero) return;  // 0/0: skipped by the max
        if (!have_best || rec.ratio > best) {
            best = rec.ratio;
            have_best = true;
            report.extremal_cut = rec.subset;
            report.minimal_k = rec.ratio;
        }
    };

    if (n <= 16) {
        // Flows are summed in value-sorted order, which makes them invariant
        // under agent relabeling (same multiset of addends, same rounding).
        std::vector<double> fbuf, rbuf;
        fbuf.reserve(static_cast<std::size_t>(n) * n);
        rbuf.reserve(static_cast<std::size_t>(n) * n);
        for (std::uint32_t sub = 0; sub < count; ++sub) {
            const std::uint32_t mask = (sub << 1) | 1u;  // agent 1 always in S
            fbuf.clear();
            rbuf.clear();
            for (int i = 0; i < n; ++i) {
                if (!(mask & (1u << i))) continue;
                for (int j = 0; j < n; ++j) {
                    if (mask & (1u << j)) continue;
                    fbuf.push_back(a(i, j));
                    rbuf.push_back(a(j, i));
                }
            }
            std::sort(fbuf.begin(), fbuf.end());
            std::sort(rbuf.begin(), rbuf.end());
            double f = 0.0, r = 0.0;
            for (double v : fbuf) f += v;
            for (double v : rbuf) r += v;
            consider(detail::make_record(mask, f, r, eps_zero));
        }
        return report;
    }

    // Gray-code walk over the other n-1 agents; toggling one membership
    // updates both flows in O(n).
    std::uint32_t mask = 1u;
    double f = 0.0, r = 0.0;
    for (int j = 1; j < n; ++j) {
        f += a(0, j);
        r += a(j, 0);
    }
    consider(detail::make_record(mask, f, r, eps_zero));
    std::uint32_t gray = 0;
    for (std::uint32_t g = 1; g < count; ++g) {
        const std::uint32_t next = g ^ (g >> 1);
        const std::uint32_t toggled = next ^ gray;
        gray = next;
        int e = 0;
        while (!((toggled >> e) & 1u)) ++e;
        const int agent = e + 1;
        const bool entering = (next >> e) & 1u;
        const std::uint32_t old_mask = mask;
        mask = (next << 1) | 1u;
        if (entering) {
            for (int i = 0; i < n; ++i) {
                if (i == agent) continue;
                if (old_mask & (1u << i)) {
                    f -= a(i, agent);
                    r -= a(agent, i);
                } else {
                    f += a(agent, i);
                    r += a(i, agent);
                }
            }
        } else {
            for (int i = 0; i < n; ++i) {
                if (i == agent) continue;
                if (mask & (1u << i)) {
                    f += a(i, agent);
                    r += a(agent, i);
                } else {
                    f -= a(agent, i);
                    r -= a(i, agent);
                }
            }
        }
        // Guard against drift pushing a genuinely zero flow slightly negative.
        f = std::max(f, 0.0);
        r = std::max(r, 0.0);
        consider(detail::make_record(mask, f, r, eps_zero));
    }
    return report;
}

struct MinimalK {
    bool feasible = true;
    double k = 1.0;                 // +inf when infeasible
    std::uint32_t witness_cut = 0;  // cut attaining the max (or proving infeasibility)
};

inline MinimalK minimal_cut_balance_k(const CoefficientMatrix& a,
                                      double eps_zero = kDefaultEpsZero) {
    const CutReport rep = enumerate_cuts(a, eps_zero);
    return MinimalK{rep.feasible, rep.minimal_k, rep.extremal_cut};
}

struct CutBalanceVerdict {
    bool balanced = false;
    std::optional<std::uint32_t> violating_cut;
    CutReport report;
};

// True iff every cut satisfies the two-sided bound with constant K. Flows at
// or below eps_zero count as structural zeros.
inline CutBalanceVerdict verify_cut_balance(const CoefficientMatrix& a, double k,
                                            double eps_zero = kDefaultEpsZero) {
    if (!(k >= 1.0)) throw PreconditionError("verify_cut_balance: K must be >= 1");
    CutBalanceVerdict v;
    v.report = enumerate_cuts(a, eps_zero);
    for (const CutRecord& rec : v.report.cuts) {
        if (rec.forward <= eps_zero && rec.reverse <= eps_zero) continue;
        if (std::isinf(rec.ratio) || rec.ratio > k) {
            v.violating_cut = rec.subset;
            return v;
        }
    }
    v.balanced = true;
    return v;
}

// ---- sufficient structural conditions --------------------------------------

struct ConditionProfile {
    bool symmetric = false;
    bool type_symmetric = false;
    double type_symmetry_k = 1.0;  // minimal entrywise constant; +inf when none exists
    bool average_preserving = false;             // row sums equal column sums
    bool weighted_average_preserving = false;    // exists w > 0 with w_i*rowsum_i = sum_j w_j a_ji
    std::vector<double> preserving_weights;      // normalized so max entry = 1; empty if none
};

inline std::string profile_to_string(const ConditionProfile& p) {
    std::string out;
    if (p.symmetric) out += " symmetric";
    if (p.type_symmetric) out += " type-symmetric";
    if (p.average_preserving) out += " average-preserving";
    if (p.weighted_average_preserving) out += " weighted-average-preserving";
    if (out.empty()) out = " none of the sufficient conditions";
    return out;
}

namespace detail {

// Weak connectivity of the support (an edge wherever either direction is
// positive); used to split the weight solve into independent blocks.
inline std::vector<int> support_components(const CoefficientMatrix& a, double eps_zero) {
    const int n = a.n();
    std::vector<int> comp(n, -1);
    int next = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j) {
                if (comp[j] >= 0) continue;
                if (a(i, j) > eps_zero || a(j, i) > eps_zero) {
                    comp[j] = next;
                    stack.push_back(j);
                }
            }
        }
        ++next;
    }
    return comp;
}

// Null vector of an m x m system by Gaussian elimination with full pivoting.
// Returns an empty vector when the matrix has full numerical rank.
inline std::vector<double> null_vector_full_pivot(std::vector<std::vector<double>> m, double tol) {
    const int k = static_cast<int>(m.size());
    std::vector<int> col_of(k);
    for (int j = 0; j < k; ++j) col_of[j] = j;
    double scale = 0.0;
    for (const auto& row : m)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;

    int rank = 0;
    for (; rank < k; ++rank) {
        int pr = -1, pc = -1;
        double pv = tol * scale;
        for (int i = rank; i < k; ++i)
            for (int j = rank; j < k; ++j)
                if (std::abs(m[i][j]) > pv) {
                    pv = std::abs(m[i][j]);
                    pr = i;
                    pc = j;
                }
        if (pr < 0) break;
        std::swap(m[rank], m[pr]);
        for (int i = 0; i < k; ++i) std::swap(m[i][rank], m[i][pc]);
        std::swap(col_of[rank], col_of[pc]);
        for (int i = rank + 1; i < k; ++i) {
            const double factor = m[i][rank] / m[rank][rank];
            for (int j = rank; j < k; ++j) m[i][j] -= factor * m[rank][j];
        }
    }
    if (rank == k) return {};

    // One free variable is enough here: set it to 1 and back-substitute.
    std::vector<double> y(k, 0.0);
    y[k - 1] = 1.0;
    for (int i = rank - 1; i >= 0; --i) {
        double s = 0.0;
        for (int j = i + 1; j < k; ++j) s += m[i][j] * y[j];
        y[i] = -s / m[i][i];
    }
    std::vector<double> out(k, 0.0);
    for (int j = 0; j < k; ++j) out[col_of[j]] = y[j];
    return out;
}

}  // namespace detail

inline ConditionProfile condition_profile(const CoefficientMatrix& a,
                                          double eps_zero = kDefaultEpsZero) {
    constexpr double kNullTol = 1e-9;
    const int n = a.n();
    ConditionProfile p;

    p.symmetric = true;
    p.type_symmetric = true;
    for (int i = 0; i < n && p.symmetric; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > eps_zero) {
                p.symmetric = false;
                break;
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool za = a(i, j) <= eps_zero, zb = a(j, i) <= eps_zero;
            if (za && zb) continue;
            if (za || zb) {
                p.type_symmetric = false;
                p.type_symmetry_k = std::numeric_limits<double>::infinity();
            } else if (p.type_symmetric) {
                p.type_symmetry_k = std::max(p.type_symmetry_k, a(i, j) / a(j, i));
            }
        }
    if (p.symmetric) p.type_symmetry_k = 1.0;

    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, a.row_sum(i));
    const double avg_tol = kNullTol * std::max(1.0, scale);
    p.average_preserving = true;
    for (int i = 0; i < n; ++i)
        if (std::abs(a.row_sum(i) - a.col_sum(i)) > avg_tol) {
            p.average_preserving = false;
            break;
        }

    if (p.average_preserving) {
        // Equal row and column sums are witnessed by uniform weights.
        p.weighted_average_preserving = true;
        p.preserving_weights.assign(n, 1.0);
        return p;
    }

    // Look for w > 0 with w_i * rowsum_i = sum_j w_j a_ji, one weak component
    // of the support at a time (the system is block-diagonal across them).
    const std::vector<int> comp = detail::support_components(a, eps_zero);
    const int ncomp = 1 + *std::max_element(comp.begin(), comp.end());
    std::vector<double> w(n, 0.0);
    for (int c = 0; c < ncomp; ++c) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (comp[i] == c) members.push_back(i);
        const int k = static_cast<int>(members.size());
        if (k == 1) {
            w[members[0]] = 1.0;
            continue;
        }
        std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
        for (int r = 0; r < k; ++r) {
            m[r][r] = a.row_sum(members[r]);
            for (int col = 0; col < k; ++col) m[r][col] -= a(members[col], members[r]);
        }
        const std::vector<double> y = detail::null_vector_full_pivot(std::move(m), kNullTol);
        if (y.empty()) return p;
        double hi = 0.0;
        for (double v : y) hi = std::max(hi, std::abs(v));
        double signum = 0.0;
        for (double v : y) {
            if (std::abs(v) <= kNullTol * hi) return p;  // a zero weight is not allowed
            const double s = v > 0.0 ? 1.0 : -1.0;
            if (signum == 0.0) signum = s;
            else if (signum != s) return p;  // mixed signs: no positive null vector
        }
        for (int r = 0; r < k; ++r) w[members[r]] = signum * y[r];
    }
    double hi = 0.0;
    for (double v : w) hi = std::max(hi, v);
    for (double& v : w) v /= hi;
    p.weighted_average_preserving = true;
    p.preserving_weights = std::move(w);
    return p;
}

// ---- the sorted functional ------------------------------------------------

// For y sorted nondecreasing and b cut-balanced with constant K,
//   sum_{i=1..m} K^{-i} * sum_j b_ij (y_j - y_i)  >=  0.
// Throws when y is not sorted.
inline double lemma1_functional(const CoefficientMatrix& b, const std::vector<double>& y, int m,
                                double k) {
    const int n = b.n();
    if (static_cast<int>(y.size()) != n)
        throw PreconditionError("lemma1_functional: y must have length n");
    if (m < 1 || m > n) throw PreconditionError("lemma1_functional: m must lie in [1, n]");
    if (!(k >= 1.0)) throw PreconditionError("lemma1_functional: K must be >= 1");
    for (int i = 1; i < n; ++i)
        if (y[i] < y[i - 1])
            throw PreconditionError("lemma1_functional: y must be sorted nondecreasing");
    double total = 0.0;
    double weight = 1.0;
    for (int i = 0; i < m; ++i) {
        weight /= k;
        double inner = 0.0;
        for (int j = 0; j < n; ++j) inner += b(i, j) * (y[j] - y[i]);
        total += weight * inner;
    }
    return total;
}

// Per-agent residuals q_i = sum_j w_j b_ji - w_i sum_j b_ij for the weight
// profile w_i = K^{-i} (i <= m), 0 afterwards. They always sum to zero, and
// cut-balance with constant K makes every top partial sum sum_{i>k} q_i
// nonnegative; both facts are exercised as properties.
inline std::vector<double> lemma1_weight_residuals(const CoefficientMatrix& b, int m, double k) {
    const int n = b.n();
    if (m < 1 || m > n) throw PreconditionError("lemma1_weight_residuals: m must lie in [1, n]");
    std::vector<double> w(n, 0.0);
    double weight = 1.0;
    for (int i = 0; i < m; ++i) {
        weight /= k;
        w[i] = weight;
    }
    std::vector<double> q(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double in = 0.0, out = 0.0;
        for (int j = 0; j < n; ++j) {
            in += w[j] * b(j, i);
            out += b(i, j);
        }
        q[i] = in - w[i] * out;
    }
    return q;
}

// ---- seeded generator -------------------------------------------------------

// Draws a symmetric sparsity pattern, then scales each directed entry by a
// factor in [K^-1/2, K^1/2], which keeps every entrywise ratio within [1/K, K]
// and therefore every cut within the bound. The result is re-verified before
// being returned. K = 1 yields an exactly symmetric matrix.
inline CoefficientMatrix generate_cut_balanced(int n, double k, double density,
                                               std::uint64_t seed) {
    if (n < 1 || n > kMaxCutEnumerationAgents)
        throw PreconditionError("generate_cut_balanced: n out of range");
    if (!(k >= 1.0)) throw PreconditionError("generate_cut_balanced: K must be >= 1");
    if (!(density > 0.0) || density > 1.0)
        throw PreconditionError("generate_cut_balanced: density must lie in (0, 1]");
    CounterRng rng(seed, 0x67656e62616cULL);
    const double lo = 1.0 / std::sqrt(k), hi = std::sqrt(k);
    CoefficientMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (rng.next_unit() >= density) continue;
            const double base = rng.next_in(0.1, 1.0);
            a(i, j) = base * rng.next_in(lo, hi);
            a(j, i) = base * rng.next_in(lo, hi);
        }
    const CutBalanceVerdict v = verify_cut_balance(a, k);
    if (!v.balanced)
        throw NumericError("generate_cut_balanced: construction failed re-verification");
    return a;
}

}  // namespace cutbal
