#pragma once

// Discrete-time consensus: x(t+1) = A(t) x(t) with row-stochastic steps.
//
// A step is admissible when its rows are stochastic, every positive entry
// (diagonal included) is at least alpha, and its positive-entry digraph has
// balanced flow across every vertex cut: whenever some arc leaves a subset,
// some arc returns to it. The flow condition is checked both by direct
// subset enumeration and through its graph reading (every weakly connected
// component strongly connected); the two must agree.
//
// Templated on the scalar so small fixtures can run in exact rational
// arithmetic; sweeps use double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "cutbal/balance.hpp"
#include "cutbal/errors.hpp"
#include "cutbal/graph.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/rng.hpp"
#include "cutbal/scenario.hpp"
#include "cutbal/trajectory.hpp"

namespace cutbal {

constexpr double kDtRowSumTol = 1e-12;
constexpr double kDtActivationFrac = 0.05;   // trailing-half activation frequency threshold
constexpr std::size_t kDtMinHistory = 10;

template <class T>
struct BasicStochasticStep {
    SquareMatrix<T> a{0};
    T alpha{};
};
using StochasticStep = BasicStochasticStep<double>;

namespace detail {

template <class T>
Digraph positive_entry_digraph(const SquareMatrix<T>& a) {
    Digraph g(a.n());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && a(i, j) > T{}) g.arc(j, i) = 1;
    return g;
}

}  // namespace detail

struct DtCutCheck {
    bool balanced = true;
    std::uint32_t violating_subset = 0;  // bit i set means agent i+1 belongs to S
    bool graph_agrees = true;
};

// Direct quantifier check over all nonempty proper subsets: arcs may leave S
// only if arcs also enter S. Row bitmasks make each subset O(n).
template <class T>
DtCutCheck dt_cut_condition(const SquareMatrix<T>& a) {
    const int n = a.n();
    if (n < 1 || n > kMaxCutEnumerationAgents)
        throw PreconditionError("dt_cut_condition: subset enumeration limited to " +
                                std::to_string(kMaxCutEnumerationAgents) + " agents");
    std::vector<std::uint32_t> row(n, 0), col(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (a(i, j) > T{}) row[i] |= 1u << j;  // i draws on j
            if (a(j, i) > T{}) col[i] |= 1u << j;  // j draws on i
        }
    DtCutCheck out;
    const std::uint32_t full = n >= 32 ? ~0u : (1u << n) - 1u;
    for (std::uint32_t s = 1; s < full; ++s) {
        const std::uint32_t outside = full & ~s;
        bool draws_in = false, feeds_out = false;
        for (int i = 0; i < n && !(draws_in && feeds_out); ++i)
            if (s & (1u << i)) {
                draws_in = draws_in || (row[i] & outside);
                feeds_out = feeds_out || (col[i] & outside);
            }
        if (draws_in != feeds_out) {
            out.balanced = false;
            out.violating_subset = s;
            break;
        }
    }
    const bool graph_equal = check_weak_equals_strong(detail::positive_entry_digraph(a)).equal;
    out.graph_agrees = graph_equal == out.balanced;
    return out;
}

template <class T>
BasicStochasticStep<T> dt_validate(const SquareMatrix<T>& a, const T& alpha) {
    const int n = a.n();
    if (n < 1) throw PreconditionError("dt_validate: empty matrix");
    if (!(alpha > T{})) throw PreconditionError("dt_validate: alpha must be positive");
    for (int i = 0; i < n; ++i) {
        T sum{};
        for (int j = 0; j < n; ++j) {
            const T& v = a(i, j);
            if (v < T{})
                throw SchemaError("dt_validate: negative entry a_" + std::to_string(i + 1) + "_" +
                                  std::to_string(j + 1));
            if (v > T{} && v < alpha)
                throw SchemaError("dt_validate: positive entry a_" + std::to_string(i + 1) + "_" +
                                  std::to_string(j + 1) + " lies below alpha");
            sum += v;
        }
        bool stochastic;
        if constexpr (std::is_floating_point_v<T>)
            stochastic = std::abs(sum - T{1}) <= kDtRowSumTol;
        else
            stochastic = sum == T{1};
        if (!stochastic)
            throw SchemaError("dt_validate: row " + std::to_string(i + 1) + " is not stochastic");
        if (!(a(i, i) >= alpha))
            throw SchemaError("dt_validate: diagonal entry a_" + std::to_string(i + 1) + "_" +
                              std::to_string(i + 1) + " lies below alpha");
    }
    const DtCutCheck cut = dt_cut_condition(a);
    if (!cut.graph_agrees)
        throw Error("dt_validate: subset check and component check disagree");
    if (!cut.balanced)
        throw SchemaError("dt_validate: flow balance violated for subset " +
                          subset_to_string(cut.violating_subset, n) +
                          ": arcs cross the cut one way only");
    return BasicStochasticStep<T>{a, alpha};
}

// Every agent weights every value equally; consensus at the average in one step.
template <class T = double>
BasicStochasticStep<T> uniform_mixing_step(int n) {
    SquareMatrix<T> a(n, T{1} / n);
    return BasicStochasticStep<T>{std::move(a), T{1} / n};
}

template <class T>
struct BasicDtRun {
    std::vector<std::vector<T>> states;   // index t = 0..steps_applied
    std::vector<Digraph> step_graphs;     // positive-entry digraph per applied step
    long long steps_applied = 0;
    std::vector<T> limits;                // final state
};
using DtRun = BasicDtRun<double>;

// Applies source(t) for t = 0..max_t-1, revalidating each step, and enforces
// the convex-hull invariant: min nondecreasing, max nonincreasing. An early
// stop threshold trims the run once the spread falls below it, but never
// before the history is long enough for the activation-frequency graph.
template <class T, class Source>
BasicDtRun<T> dt_run(Source&& source, long long max_t, std::vector<T> x0,
                     double stop_spread = 0.0) {
    if (x0.empty()) throw PreconditionError("dt_run: empty initial state");
    if (max_t < 0) throw PreconditionError("dt_run: negative horizon");
    const int n = static_cast<int>(x0.size());

    BasicDtRun<T> run;
    run.states.push_back(x0);
    std::vector<T> x = std::move(x0), next(n);
    for (long long t = 0; t < max_t; ++t) {
        const BasicStochasticStep<T> step = source(t);
        if (step.a.n() != n) throw PreconditionError("dt_run: step dimension mismatch");
        dt_validate(step.a, step.alpha);

        const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
        const T lo = *lo_it, hi = *hi_it;
        for (int i = 0; i < n; ++i) {
            T acc{};
            for (int j = 0; j < n; ++j) acc += step.a(i, j) * x[j];
            next[i] = acc;
        }
        for (int i = 0; i < n; ++i) {
            bool inside;
            if constexpr (std::is_floating_point_v<T>) {
                const double slack = kDtRowSumTol * std::max<double>(1.0, std::abs(hi));
                inside = next[i] >= lo - slack && next[i] <= hi + slack;
            } else {
                inside = next[i] >= lo && next[i] <= hi;
            }
            if (!inside)
                throw NumericError("dt_run: value left the convex hull at step " +
                                   std::to_string(t + 1));
        }
        x = next;
        run.states.push_back(x);
        run.step_graphs.push_back(detail::positive_entry_digraph(step.a));
        run.steps_applied = t + 1;
        if (stop_spread > 0.0 && run.step_graphs.size() >= kDtMinHistory) {
            const auto [l2, h2] = std::minmax_element(x.begin(), x.end());
            if (static_cast<double>(*h2 - *l2) <= stop_spread) break;
        }
    }
    run.limits = x;
    return run;
}

// Finite-horizon reading of "active infinitely often": arc kept when it fires
// in at least `frac` of the steps in the trailing half of the history.
inline InteractionGraph dt_unbounded_graph(const std::vector<Digraph>& history,
                                           double frac = kDtActivationFrac) {
    if (history.size() < kDtMinHistory)
        throw PreconditionError("dt_unbounded_graph: history shorter than " +
                                std::to_string(kDtMinHistory) + " steps");
    const int n = history.front().n;
    const std::size_t start = history.size() / 2;
    const double window = static_cast<double>(history.size() - start);

    InteractionGraph out;
    out.graph = Digraph(n);
    out.weight = CoefficientMatrix(n, 0.0);
    for (std::size_t t = start; t < history.size(); ++t) {
        if (history[t].n != n)
            throw PreconditionError("dt_unbounded_graph: inconsistent history dimensions");
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (history[t].arc(u, v)) out.weight(v, u) += 1.0;
    }
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u != v) out.weight(v, u) /= window;
            if (u != v && out.weight(v, u) >= frac) out.graph.arc(u, v) = 1;
        }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "arc (j,i) kept when a_ij > 0 in at least %g of the trailing %zu steps", frac,
                  history.size() - start);
    out.classification_rule = buf;
    return out;
}

// First step after the empirical components stop exchanging flow: beyond it,
// each component's own min and max must be monotone.
template <class T>
long long dt_isolation_step(const BasicDtRun<T>& run, const Partition& components) {
    std::vector<int> block(run.states.front().size() + 1, -1);
    for (std::size_t b = 0; b < components.size(); ++b)
        for (int agent : components[b]) block[agent] = static_cast<int>(b);
    long long isolation = 0;
    for (long long t = 0; t < run.steps_applied; ++t) {
        const Digraph& g = run.step_graphs[t];
        for (int u = 0; u < g.n; ++u)
            for (int v = 0; v < g.n; ++v)
                if (g.arc(u, v) && block[u + 1] != block[v + 1]) isolation = t + 1;
    }
    return isolation;
}

template <class T>
struct DtMonotonicityReport {
    bool holds = true;
    long long at_step = 0;
    int component = 0;  // 1-indexed block
};

template <class T>
DtMonotonicityReport<T> dt_component_monotonicity(const BasicDtRun<T>& run,
                                                  const Partition& components,
                                                  long long from_step) {
    DtMonotonicityReport<T> rep;
    for (std::size_t b = 0; b < components.size(); ++b) {
        T lo{}, hi{};
        bool have = false;
        for (long long t = std::max<long long>(from_step, 0); t <= run.steps_applied; ++t) {
            T blo = run.states[t][components[b][0] - 1], bhi = blo;
            for (int agent : components[b]) {
                blo = std::min(blo, run.states[t][agent - 1]);
                bhi = std::max(bhi, run.states[t][agent - 1]);
            }
            if (have && (blo < lo || bhi > hi)) {
                rep.holds = false;
                rep.at_step = t;
                rep.component = static_cast<int>(b) + 1;
                return rep;
            }
            lo = blo;
            hi = bhi;
            have = true;
        }
    }
    return rep;
}

struct ContractionCertificate {
    bool found = false;
    long long t_start = 0;
    long long t_contracted = 0;   // first step where the target factor is met
    double factor = 0.0;          // achieved spread ratio
    double target_factor = 0.0;   // 1 - alpha^(|C|-1)
};

// Walks forward from t_start until the component's spread has dropped by the
// guaranteed factor; for a validated sequence that keeps the component
// connected this must happen, so "not found" falsifies the run.
template <class T>
ContractionCertificate dt_contraction_certificate(const BasicDtRun<T>& run,
                                                  const std::vector<int>& component, double alpha,
                                                  long long t_start) {
    if (component.empty())
        throw PreconditionError("dt_contraction_certificate: empty component");
    if (t_start < 0 || t_start > run.steps_applied)
        throw PreconditionError("dt_contraction_certificate: t_start outside the run");
    ContractionCertificate cert;
    cert.t_start = t_start;
    cert.target_factor = 1.0 - std::pow(alpha, static_cast<double>(component.size() - 1));

    auto spread_at = [&](long long t) {
        T lo = run.states[t][component[0] - 1], hi = lo;
        for (int agent : component) {
            lo = std::min(lo, run.states[t][agent - 1]);
            hi = std::max(hi, run.states[t][agent - 1]);
        }
        return hi - lo;
    };
    const T s0 = spread_at(t_start);
    if (component.size() == 1 || !(s0 > T{})) {
        cert.found = t_start + 1 <= run.steps_applied;
        cert.t_contracted = t_start + 1;
        cert.factor = 0.0;
        return cert;
    }
    for (long long t = t_start + 1; t <= run.steps_applied; ++t) {
        const T st = spread_at(t);
        const double ratio = static_cast<double>(st) / static_cast<double>(s0);
        if (ratio <= cert.target_factor) {
            cert.found = true;
            cert.t_contracted = t;
            cert.factor = ratio;
            return cert;
        }
    }
    return cert;
}

// Deterministic replayable step source: a fixed connected symmetric pattern
// drawn from the seed, with fresh admissible magnitudes each step. Row i
// splits its unit mass as alpha to itself and each neighbour plus a random
// simplex share of the remainder, so every positive entry meets alpha by
// construction.
class RandomStepSource {
  public:
    RandomStepSource(int n, double alpha, std::uint64_t seed)
        : n_(n), alpha_(alpha), seed_(seed), pattern_(n) {
        if (n < 2 || n > 24) throw PreconditionError("RandomStepSource: n must lie in [2, 24]");
        CounterRng rng(seed, 0x647470617474ULL);
        for (int v = 1; v < n; ++v) {
            const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v)));
            pattern_.arc(u, v) = pattern_.arc(v, u) = 1;
        }
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (!pattern_.arc(u, v) && rng.next_unit() < 0.25)
                    pattern_.arc(u, v) = pattern_.arc(v, u) = 1;
        int max_degree = 0;
        for (int u = 0; u < n; ++u) {
            int d = 0;
            for (int v = 0; v < n; ++v) d += pattern_.arc(u, v);
            max_degree = std::max(max_degree, d);
        }
        if (!(alpha > 0.0) || alpha * (max_degree + 1) > 1.0)
            throw PreconditionError("RandomStepSource: alpha too large for the pattern degree");
    }

    const Digraph& pattern() const { return pattern_; }

    StochasticStep operator()(long long t) const {
        SquareMatrix<double> a(n_, 0.0);
        CounterRng rng(mix_keys(seed_, static_cast<std::uint64_t>(t)), 0x647473746570ULL);
        std::vector<double> share(n_ + 1);
        for (int i = 0; i < n_; ++i) {
            int members = 0;
            double total = 0.0;
            for (int j = 0; j <= n_; ++j) share[j] = 0.0;
            for (int j = 0; j < n_; ++j)
                if (j == i || pattern_.arc(i, j)) {
                    share[j] = -std::log(1.0 - rng.next_unit());
                    total += share[j];
                    ++members;
                }
            const double slack = 1.0 - alpha_ * members;
            double row = 0.0;
            for (int j = 0; j < n_; ++j)
                if (j == i || pattern_.arc(i, j)) {
                    a(i, j) = alpha_ + slack * share[j] / total;
                    row += a(i, j);
                }
            a(i, i) += 1.0 - row;  // absorb the last-ulp rounding into the diagonal
        }
        return StochasticStep{std::move(a), alpha_};
    }

  private:
    int n_;
    double alpha_;
    std::uint64_t seed_;
    Digraph pattern_;
};

// Scenario-level discrete runner: evaluates the schedule at integer times,
// validates each matrix as a step (alpha inferred as its smallest positive
// entry), and emits the shared trajectory shape with activation counts in
// place of integrals.
inline Trajectory dt_run_scenario(const Scenario& sc) {
    if (sc.mode != TimeMode::Discrete)
        throw PreconditionError("dt_run_scenario: scenario must be discrete-time");
    if (static_cast<int>(sc.x0.size()) != sc.n)
        throw PreconditionError("dt_run_scenario: x0 has the wrong dimension");
    validate_state(sc.x0, "dt_run_scenario: x0");
    const auto steps = static_cast<long long>(sc.horizon);
    const int stride = sc.sampling.stride;

    Trajectory tr;
    StateVector x = sc.x0;
    CoefficientMatrix counts(sc.n, 0.0);
    tr.times.push_back(0.0);
    tr.states.push_back(x);
    tr.integrals.push_back(counts);
    tr.event_sample.push_back(0);

    StateVector next(sc.n);
    for (long long t = 0; t < steps; ++t) {
        const CoefficientMatrix a = sc.schedule.at(static_cast<double>(t), x);
        double alpha = std::numeric_limits<double>::infinity();
        for (int i = 0; i < sc.n; ++i)
            for (int j = 0; j < sc.n; ++j)
                if (a(i, j) > 0.0) alpha = std::min(alpha, a(i, j));
        if (!std::isfinite(alpha))
            throw SchemaError("dt_run_scenario: step " + std::to_string(t) + " is all zero");
        dt_validate(a, alpha);
        for (int i = 0; i < sc.n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < sc.n; ++j) acc += a(i, j) * x[j];
            next[i] = acc;
        }
        x = next;
        for (int i = 0; i < sc.n; ++i)
            for (int j = 0; j < sc.n; ++j)
                if (i != j && a(i, j) > 0.0) counts(i, j) += 1.0;
        if ((t + 1) % stride == 0 || t + 1 == steps) {
            tr.times.push_back(static_cast<double>(t + 1));
            tr.states.push_back(x);
            tr.integrals.push_back(counts);
            tr.event_sample.push_back(0);
        }
    }
    return tr;
}

}  // namespace cutbal
