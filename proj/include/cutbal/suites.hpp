#pragma once

// Property suites driving the headline claims: the sorted-sum inequality
// oracle (lemma1), the continuous-time convergence pipeline (theorem1), the
// discrete-time contraction pipeline (theorem2), and the sorted-trajectory
// machinery (appendix). Each suite is deterministic for a given seed and
// trial count: trials derive their rng streams from (seed, index), results
// land in per-index slots, and aggregation walks them in order, so the
// worker-thread count never changes the outcome. CUTBAL_THREADS caps the
// pool.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cutbal/balance.hpp"
#include "cutbal/catalog.hpp"
#include "cutbal/discrete.hpp"
#include "cutbal/errors.hpp"
#include "cutbal/graph.hpp"
#include "cutbal/integrate.hpp"
#include "cutbal/rng.hpp"
#include "cutbal/sorting.hpp"

namespace cutbal {

struct SuiteResult {
    std::string name;
    long long trials = 0;
    bool pass = false;
    std::vector<std::string> lines;     // per-check summaries
    std::vector<std::string> failures;  // first offending trials, capped
};

namespace detail {

inline int suite_thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CUTBAL_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
    }
    return static_cast<int>(hw);
}

// Runs body(i) for i in [0, trials); each body writes only to its own slot.
template <class F>
void parallel_trials(long long trials, F&& body) {
    const int threads = std::min<long long>(suite_thread_cap(), trials);
    if (threads <= 1) {
        for (long long i = 0; i < trials; ++i) body(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const long long i = next.fetch_add(1);
                if (i >= trials) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline bool vacuous_if_no_trials(SuiteResult& res) {
    if (res.trials > 0) return false;
    res.pass = true;
    res.lines.push_back("warning: trials=0, vacuous pass");
    return true;
}

inline void note_failures(SuiteResult& res, const std::vector<std::string>& slot_failures) {
    for (const std::string& f : slot_failures)
        if (res.failures.size() < 20) res.failures.push_back(f);
        else return;
}

}  // namespace detail

// For cut-balanced b and ascending y, the leading weighted row sums of the
// drift are nonnegative; brute-force sampling over sizes, bounds, and states.
inline SuiteResult run_lemma1_suite(long long trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "lemma1";
    res.trials = trials;
    if (detail::vacuous_if_no_trials(res)) return res;

    constexpr double kBounds[4] = {1.0, 2.0, 5.0, 10.0};
    std::vector<double> worst(trials, 0.0);
    std::vector<std::string> bad(trials);
    detail::parallel_trials(trials, [&](long long i) {
        CounterRng rng(mix_keys(seed, static_cast<std::uint64_t>(i)), 0x6c656d6d6131ULL);
        const int n = 2 + static_cast<int>(i % 7);
        const double k = kBounds[(i / 7) % 4];
        const double density = rng.next_in(0.3, 1.0);
        const CoefficientMatrix b =
            generate_cut_balanced(n, k, density, mix_keys(seed, 0x9e3779b9 + i));
        std::vector<double> y(n);
        for (double& v : y) v = rng.next_in(-5.0, 5.0);
        std::sort(y.begin(), y.end());
        if (n > 2 && rng.next_unit() < 0.2) y[1] = y[0];  // exercise ties
        double min_val = std::numeric_limits<double>::infinity();
        for (int m = 1; m <= n; ++m)
            min_val = std::min(min_val, lemma1_functional(b, y, m, k));
        worst[i] = min_val;
        if (min_val < -1e-10) {
            std::ostringstream os;
            os << "trial " << i << ": functional " << min_val << " (n=" << n << ", K=" << k << ")";
            bad[i] = os.str();
        }
    });
    double min_all = std::numeric_limits<double>::infinity();
    std::vector<std::string> failures;
    for (long long i = 0; i < trials; ++i) {
        min_all = std::min(min_all, worst[i]);
        if (!bad[i].empty()) failures.push_back(bad[i]);
    }
    detail::note_failures(res, failures);
    std::ostringstream os;
    os << trials << " trials (n 2..8, K in {1,2,5,10}), min functional " << format_g17(min_all)
       << " (floor -1e-10)";
    res.lines.push_back(os.str());
    res.pass = failures.empty();
    return res;
}

namespace detail {

struct LinearTrialOutcome {
    bool weak_equals_strong = false;
    bool balanced = false;
    PartitionRelation relation = PartitionRelation::Mismatch;
    std::string failure;
};

// One block-diagonal constant cut-balanced scenario with random state:
// components are the declared blocks, limits must respect them.
inline LinearTrialOutcome run_linear_cluster_trial(std::uint64_t seed, long long index) {
    LinearTrialOutcome out;
    CounterRng rng(mix_keys(seed, static_cast<std::uint64_t>(index)), 0x74686d31747269ULL);
    constexpr double kBlockBounds[3] = {1.0, 2.0, 5.0};
    const int blocks = 1 + static_cast<int>(rng.next_below(3));
    std::vector<int> sizes(blocks);
    int n = 0;
    for (int& s : sizes) {
        s = 1 + static_cast<int>(rng.next_below(4));
        n += s;
    }
    CoefficientMatrix a(n, 0.0);
    double k_max = 1.0;
    int at = 0;
    for (int b = 0; b < blocks; ++b) {
        const double k = kBlockBounds[rng.next_below(3)];
        k_max = std::max(k_max, k);
        if (sizes[b] > 1) {
            const CoefficientMatrix block = generate_cut_balanced(
                sizes[b], k, 1.0, mix_keys(mix_keys(seed, index), 0xb10cULL + b));
            for (int i = 0; i < sizes[b]; ++i)
                for (int j = 0; j < sizes[b]; ++j)
                    if (i != j) a(at + i, at + j) = block(i, j);
        }
        at += sizes[b];
    }

    Scenario sc;
    sc.n = n;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 600.0;
    sc.x0.resize(n);
    for (double& v : sc.x0) v = rng.next_in(0.0, 10.0);
    sc.schedule = CoefficientSchedule::constant(a);
    sc.schedule.finalize(n, sc.horizon, sc.mode);
    sc.integrator.h = 0.05;
    sc.integrator.tol = 1e-6;
    sc.sampling.stride = 40;

    out.balanced = verify_cut_balance(a, k_max * (1.0 + 1e-12)).balanced;
    if (!out.balanced) {
        out.failure = "trial " + std::to_string(index) + ": constructed matrix not balanced";
        return out;
    }
    const Trajectory tr = integrate(sc);
    const InteractionGraph ig = classify_unbounded_edges(tr);
    out.weak_equals_strong = check_weak_equals_strong(ig).equal;
    const ClusterPrediction pred = predict_clusters(ig);
    const Partition observed = limit_partition(tr, 100.0 * sc.integrator.tol, sc.integrator.tol);
    const PartitionComparison cmp = compare_partitions(pred.clusters, observed);
    out.relation = cmp.relation;
    if (!out.weak_equals_strong)
        out.failure = "trial " + std::to_string(index) + ": weak component not strongly connected";
    else if (cmp.relation == PartitionRelation::Mismatch)
        out.failure = "trial " + std::to_string(index) + ": " + cmp.detail;
    return out;
}

struct SeparationOutcome {
    double mean_drift = 0.0;
    double worst_gap = 0.0;  // smallest separation among non-merged pairs
    std::string failure;
};

// Bounded confidence with n=20: limits pairwise merge or separate by ~1.
inline SeparationOutcome run_separation_trial(std::uint64_t seed, long long index) {
    SeparationOutcome out;
    CounterRng rng(mix_keys(seed, static_cast<std::uint64_t>(index)), 0x626f756e64ULL);
    const int n = 20;
    Scenario sc;
    sc.n = n;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 20.0;
    sc.x0.resize(n);
    for (double& v : sc.x0) v = rng.next_in(0.0, 10.0);
    sc.schedule = CoefficientSchedule::bounded_confidence(n, 1.0);
    sc.schedule.finalize(n, sc.horizon, sc.mode);
    sc.integrator.h = 5e-3;
    sc.integrator.tol = 1e-6;
    sc.sampling.stride = 10;

    const Trajectory tr = integrate(sc);
    double mean0 = 0.0, mean1 = 0.0;
    for (int i = 0; i < n; ++i) {
        mean0 += sc.x0[i] / n;
        mean1 += tr.final_state()[i] / n;
    }
    out.mean_drift = std::abs(mean1 - mean0);
    out.worst_gap = std::numeric_limits<double>::infinity();
    const StateVector& xf = tr.final_state();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double gap = std::abs(xf[i] - xf[j]);
            if (gap > 1e-4) out.worst_gap = std::min(out.worst_gap, gap);
        }
    if (out.mean_drift > 1e-6)
        out.failure = "trial " + std::to_string(index) + ": mean drifted by " +
                      format_g17(out.mean_drift);
    else if (out.worst_gap < 1.0 - 1e-3)
        out.failure = "trial " + std::to_string(index) + ": limits separated by only " +
                      format_g17(out.worst_gap);
    return out;
}

}  // namespace detail

// Continuous-time pipeline: catalogue conformance (balance claims, monitor
// monotonicity, cluster prediction), random linear cluster trials with the
// generic-equality rate, bounded-confidence separation, and the tail-budget
// separation experiment.
inline SuiteResult run_theorem1_suite(long long trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "theorem1";
    res.trials = trials;
    if (detail::vacuous_if_no_trials(res)) return res;
    std::vector<std::string> failures;

    // Catalogue conformance.
    int catalogue_checked = 0;
    double worst_drop = 0.0;
    for (const CatalogEntry& e : scenario_catalog()) {
        if (e.scenario.mode != TimeMode::Continuous) continue;
        const Trajectory tr = integrate(e.scenario);
        ++catalogue_checked;
        const double tol = e.scenario.integrator.tol;

        bool claim_ok = true;
        if (std::isfinite(e.claimed_k)) {
            const std::size_t step = std::max<std::size_t>(1, tr.size() / 500);
            for (std::size_t k = 0; k < tr.size() && claim_ok; k += step)
                claim_ok = verify_cut_balance(e.scenario.schedule.at(tr.times[k], tr.states[k]),
                                              e.claimed_k * (1.0 + 1e-9))
                               .balanced;
        } else {
            double k_seen = 1.0;
            bool infeasible = false;
            const std::size_t step = std::max<std::size_t>(1, tr.size() / 500);
            for (std::size_t k = 0; k < tr.size(); k += step) {
                const MinimalK mk =
                    minimal_cut_balance_k(e.scenario.schedule.at(tr.times[k], tr.states[k]));
                if (!mk.feasible) infeasible = true;
                else k_seen = std::max(k_seen, mk.k);
            }
            claim_ok = infeasible || k_seen > 1e3;  // the no-bound claim must show
        }
        if (!claim_ok) failures.push_back(e.name + ": balance claim not confirmed");

        if (std::isfinite(e.claimed_k)) {
            const WeightedSumSeries series = weighted_sum_series(tr, e.scenario.schedule,
                                                                 e.claimed_k);
            const MonotonicityReport mono = monotonicity_check(series, 100.0 * tol);
            worst_drop = std::max(worst_drop, mono.worst_drop);
            if (!series.k_ok)
                failures.push_back(e.name + ": claimed bound insufficient at t=" +
                                   format_g17(series.first_bad_t));
            if (!mono.pass)
                failures.push_back(e.name + ": weighted sums dropped by " +
                                   format_g17(mono.worst_drop));

            const InteractionGraph ig = classify_unbounded_edges(tr);
            if (!check_weak_equals_strong(ig).equal)
                failures.push_back(e.name + ": weak component not strongly connected");
            const ConvergenceCheck conv = trailing_window_convergence(tr, tol);
            if (conv.converged) {
                const PartitionComparison cmp = compare_partitions(
                    predict_clusters(ig).clusters, limit_partition(tr.final_state(), 100.0 * tol));
                if (cmp.relation == PartitionRelation::Mismatch)
                    failures.push_back(e.name + ": " + cmp.detail);
            } else {
                failures.push_back(e.name + ": catalogue run did not converge");
            }
        }
    }
    {
        std::ostringstream os;
        os << catalogue_checked << " catalogue runs conform (worst weighted-sum drop "
           << format_g17(worst_drop) << ", slack 1e-4)";
        res.lines.push_back(os.str());
    }

    // Random linear cluster trials.
    std::vector<detail::LinearTrialOutcome> outcomes(trials);
    detail::parallel_trials(trials, [&](long long i) {
        outcomes[i] = detail::run_linear_cluster_trial(seed, i);
    });
    long long equal_count = 0;
    for (long long i = 0; i < trials; ++i) {
        if (!outcomes[i].failure.empty()) failures.push_back(outcomes[i].failure);
        if (outcomes[i].relation == PartitionRelation::Equal) ++equal_count;
    }
    const double equal_rate = static_cast<double>(equal_count) / static_cast<double>(trials);
    {
        std::ostringstream os;
        os << trials << " random linear cluster trials, predicted=observed in "
           << format_g17(100.0 * equal_rate) << "% (floor 95%)";
        res.lines.push_back(os.str());
    }
    if (equal_rate < 0.95)
        failures.push_back("equal-partition rate " + format_g17(equal_rate) + " below 0.95");

    // Bounded-confidence separation sweep (50 runs, n=20).
    {
        constexpr long long kSeparationRuns = 50;
        std::vector<detail::SeparationOutcome> sep(kSeparationRuns);
        detail::parallel_trials(kSeparationRuns, [&](long long i) {
            sep[i] = detail::run_separation_trial(seed, i);
        });
        double worst_mean = 0.0, worst_gap = std::numeric_limits<double>::infinity();
        for (const auto& s : sep) {
            if (!s.failure.empty()) failures.push_back(s.failure);
            worst_mean = std::max(worst_mean, s.mean_drift);
            worst_gap = std::min(worst_gap, s.worst_gap);
        }
        std::ostringstream os;
        os << kSeparationRuns << " bounded-confidence runs (n=20): worst mean drift "
           << format_g17(worst_mean) << ", smallest non-merged gap " << format_g17(worst_gap);
        res.lines.push_back(os.str());
    }

    // Tail-budget separation experiment.
    {
        const TQuarterCertificate cert = run_t_quarter_experiment(2, 4, 0.2);
        std::ostringstream os;
        os << "tail-budget 0.2 experiment: group-1 max " << format_g17(cert.max_group1)
           << " (cap 0.25), group-2 min " << format_g17(cert.min_group2) << " (floor 0.75)";
        res.lines.push_back(os.str());
        if (!cert.bounds_hold) failures.push_back("tail-budget separation bounds violated");
        bool rejected = false;
        try {
            run_t_quarter_experiment(2, 4, 0.3, 1.0, 1.0, 1e-2);
        } catch (const PreconditionError&) {
            rejected = true;
        }
        if (!rejected) failures.push_back("tail budget above 1/4 was not rejected");
    }

    detail::note_failures(res, failures);
    res.pass = failures.empty();
    return res;
}

// Discrete-time pipeline: random validated sequences contract to consensus
// with certificates under the guaranteed factor; the uniform matrix reaches
// consensus in one step.
inline SuiteResult run_theorem2_suite(long long trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "theorem2";
    res.trials = trials;
    if (detail::vacuous_if_no_trials(res)) return res;
    std::vector<std::string> failures;

    struct Slot {
        double spread = 0.0;
        double factor = 0.0;
        std::string failure;
    };
    std::vector<Slot> slots(trials);
    detail::parallel_trials(trials, [&](long long i) {
        Slot& slot = slots[i];
        const int n = 2 + static_cast<int>(i % 7);
        const std::uint64_t trial_seed = mix_keys(seed, static_cast<std::uint64_t>(i));
        CounterRng rng(trial_seed, 0x74686d327830ULL);
        std::vector<double> x0(n);
        for (double& v : x0) v = rng.next_unit();
        const RandomStepSource source(n, 0.1, trial_seed);
        const DtRun run = dt_run(source, 20000, x0, 1e-9);

        double lo = run.limits[0], hi = run.limits[0];
        for (double v : run.limits) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        slot.spread = hi - lo;
        if (slot.spread > 1e-8) {
            slot.failure = "trial " + std::to_string(i) + ": final spread " +
                           format_g17(slot.spread);
            return;
        }
        const InteractionGraph ig = dt_unbounded_graph(run.step_graphs);
        const ClusterPrediction pred = predict_clusters(ig);
        if (!pred.precondition_met || pred.clusters.size() != 1) {
            slot.failure = "trial " + std::to_string(i) + ": empirical graph not connected";
            return;
        }
        const long long isolation = dt_isolation_step(run, pred.clusters);
        const auto mono = dt_component_monotonicity(run, pred.clusters, isolation);
        if (!mono.holds) {
            slot.failure = "trial " + std::to_string(i) + ": component extremes not monotone";
            return;
        }
        const ContractionCertificate cert =
            dt_contraction_certificate(run, pred.clusters[0], 0.1, 0);
        slot.factor = cert.factor;
        if (!cert.found)
            slot.failure = "trial " + std::to_string(i) + ": no contraction certificate found";
        else if (cert.factor > cert.target_factor + 1e-12)
            slot.failure = "trial " + std::to_string(i) + ": factor " + format_g17(cert.factor) +
                           " above target " + format_g17(cert.target_factor);
    });
    double worst_spread = 0.0, worst_factor = 0.0;
    for (long long i = 0; i < trials; ++i) {
        worst_spread = std::max(worst_spread, slots[i].spread);
        worst_factor = std::max(worst_factor, slots[i].factor);
        if (!slots[i].failure.empty()) failures.push_back(slots[i].failure);
    }
    {
        std::ostringstream os;
        os << trials << " random validated sequences (n 2..8, alpha=0.1): worst final spread "
           << format_g17(worst_spread) << ", worst certificate factor " << format_g17(worst_factor);
        res.lines.push_back(os.str());
    }

    // Uniform mixing reaches consensus in a single step, all values identical.
    {
        const auto step = uniform_mixing_step<double>(5);
        const DtRun one = dt_run([&](long long) { return step; }, 1,
                                 std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
        bool exact = true;
        for (double v : one.limits) exact = exact && v == one.limits[0];
        if (!exact) failures.push_back("uniform 1/n step left unequal values");
        res.lines.push_back(std::string("uniform 1/5 matrix: one-step consensus ") +
                            (exact ? "exact" : "FAILED"));
    }

    detail::note_failures(res, failures);
    res.pass = failures.empty();
    return res;
}

// Sorted-trajectory machinery: the sorting permutation's lexicographic
// contract, relabeling invariance of the balance bound, and the sorted
// integral-equation residual across the catalogue.
inline SuiteResult run_appendix_suite(long long trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "appendix";
    res.trials = trials;
    if (detail::vacuous_if_no_trials(res)) return res;
    std::vector<std::string> failures;

    // Lexicographic sorting permutation property on vectors with duplicates.
    std::vector<std::string> bad(trials);
    detail::parallel_trials(trials, [&](long long i) {
        CounterRng rng(mix_keys(seed, static_cast<std::uint64_t>(i)), 0x736f7274ULL);
        const int n = 1 + static_cast<int>(rng.next_below(12));
        std::vector<double> x(n);
        for (double& v : x) v = static_cast<double>(rng.next_below(5)) * 0.5 - 1.0;
        const std::vector<int> p = sort_permutation(x);
        std::vector<char> seen(n, 0);
        bool ok = static_cast<int>(p.size()) == n;
        for (int idx : p) {
            if (idx < 0 || idx >= n || seen[idx]) {
                ok = false;
                break;
            }
            seen[idx] = 1;
        }
        for (int j = 1; ok && j < n; ++j)
            ok = x[p[j - 1]] < x[p[j]] || (x[p[j - 1]] == x[p[j]] && p[j - 1] < p[j]);
        if (!ok) bad[i] = "trial " + std::to_string(i) + ": permutation violates the order";
    });
    for (long long i = 0; i < trials; ++i)
        if (!bad[i].empty()) failures.push_back(bad[i]);
    res.lines.push_back(std::to_string(trials) +
                        " random vectors with duplicates: sorting permutation lexicographic");

    // Relabeling invariance: sorting agents never changes the bound.
    {
        const long long invariance_trials = std::min<long long>(trials, 1000);
        std::vector<std::string> inv_bad(invariance_trials);
        detail::parallel_trials(invariance_trials, [&](long long i) {
            CounterRng rng(mix_keys(seed, static_cast<std::uint64_t>(i)), 0x72656c6162ULL);
            const int n = 2 + static_cast<int>(i % 7);
            const double k = (i % 2) ? 3.0 : 1.0;
            const CoefficientMatrix a =
                generate_cut_balanced(n, k, rng.next_in(0.4, 1.0), mix_keys(seed, 0xabcdULL + i));
            std::vector<double> x(n);
            for (double& v : x) v = rng.next_in(0.0, 1.0);
            if (n > 2) x[1] = x[0];
            const SortedView view = sorted_view(x, a);
            const MinimalK mk_a = minimal_cut_balance_k(a);
            const MinimalK mk_b = minimal_cut_balance_k(view.b);
            if (mk_a.feasible != mk_b.feasible || mk_a.k != mk_b.k)
                inv_bad[i] = "trial " + std::to_string(i) + ": bound changed under relabeling (" +
                             format_g17(mk_a.k) + " vs " + format_g17(mk_b.k) + ")";
        });
        for (long long i = 0; i < invariance_trials; ++i)
            if (!inv_bad[i].empty()) failures.push_back(inv_bad[i]);
        res.lines.push_back(std::to_string(invariance_trials) +
                            " relabeling trials: minimal bound bitwise invariant");
    }

    // Sorted integral-equation residual across the continuous catalogue.
    {
        double worst = 0.0;
        std::string worst_name;
        for (const CatalogEntry& e : scenario_catalog()) {
            if (e.scenario.mode != TimeMode::Continuous) continue;
            const Trajectory tr = integrate(e.scenario);
            const double r = sorted_evolution_residual(tr, e.scenario.schedule);
            if (r > worst) {
                worst = r;
                worst_name = e.name;
            }
            if (r > 1e-5)
                failures.push_back(e.name + ": sorted residual " + format_g17(r));

            // Sampled linkage: the sorted coefficients and state satisfy the
            // lemma inequality pointwise wherever the bound is finite.
            if (std::isfinite(e.claimed_k)) {
                const std::size_t step = std::max<std::size_t>(1, tr.size() / 50);
                for (std::size_t s = 0; s < tr.size(); s += step) {
                    const SortedView view = sorted_view(
                        tr.states[s], e.scenario.schedule.at(tr.times[s], tr.states[s]));
                    for (int m = 1; m <= e.scenario.n; ++m)
                        if (lemma1_functional(view.b, view.y, m, e.claimed_k) < -1e-10) {
                            failures.push_back(e.name + ": pointwise inequality failed at t=" +
                                               format_g17(tr.times[s]));
                            break;
                        }
                }
            }
        }
        std::ostringstream os;
        os << "catalogue sorted residuals: worst " << format_g17(worst) << " (" << worst_name
           << ", cap 1e-5)";
        res.lines.push_back(os.str());
    }

    detail::note_failures(res, failures);
    res.pass = failures.empty();
    return res;
}

inline SuiteResult run_suite(const std::string& name, long long trials, std::uint64_t seed) {
    if (name == "lemma1") return run_lemma1_suite(trials, seed);
    if (name == "theorem1") return run_theorem1_suite(trials, seed);
    if (name == "theorem2") return run_theorem2_suite(trials, seed);
    if (name == "appendix") return run_appendix_suite(trials, seed);
    throw PreconditionError("run_suite: unknown suite '" + name +
                            "' (expected lemma1, theorem1, theorem2, or appendix)");
}

inline std::string suite_summary(const SuiteResult& res) {
    std::ostringstream os;
    os << "suite " << res.name << ": " << (res.pass ? "PASS" : "FAIL") << " (" << res.trials
       << " trials)\n";
    for (const std::string& l : res.lines) os << "  " << l << "\n";
    for (const std::string& f : res.failures) os << "  failure: " << f << "\n";
    return os.str();
}

}  // namespace cutbal
