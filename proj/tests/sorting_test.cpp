#include "cutbal/sorting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "cutbal/errors.hpp"
#include "cutbal/integrate.hpp"
#include "cutbal/rng.hpp"
#include "cutbal/scenario.hpp"
#include "cutbal/schedule.hpp"

namespace cutbal {
namespace {

Scenario ct_scenario(CoefficientSchedule sched, int n, StateVector x0, double horizon, double h,
                     int stride = 1) {
    Scenario sc;
    sc.n = n;
    sc.mode = TimeMode::Continuous;
    sc.horizon = horizon;
    sc.x0 = std::move(x0);
    sc.schedule = std::move(sched);
    sc.schedule.finalize(n, horizon, sc.mode);
    sc.integrator.h = h;
    sc.sampling.stride = stride;
    return sc;
}

CoefficientMatrix symmetric_half(int n) {
    CoefficientMatrix a(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) a(i, j) = 0.5;
    return a;
}

TEST(SortPermutation, HandCases) {
    EXPECT_EQ(sort_permutation({3.0, 1.0, 2.0}), (std::vector<int>{1, 2, 0}));
    EXPECT_EQ(sort_permutation({2.0, 1.0, 2.0, 1.0}), (std::vector<int>{1, 3, 0, 2}));
    EXPECT_EQ(sort_permutation({7.0}), (std::vector<int>{0}));
    EXPECT_TRUE(sort_permutation({}).empty());
}

TEST(SortPermutation, LexicographicOnRandomVectorsWithTies) {
    CounterRng rng(314159, 0x736f7274ULL);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(10));
        StateVector x(n);
        for (double& v : x) v = 0.5 * static_cast<double>(rng.next_below(5)) - 1.0;
        const std::vector<int> p = sort_permutation(x);
        ASSERT_EQ(p.size(), x.size());
        std::vector<char> seen(n, 0);
        for (int idx : p) {
            ASSERT_GE(idx, 0);
            ASSERT_LT(idx, n);
            ASSERT_FALSE(seen[idx]);
            seen[idx] = 1;
        }
        for (int i = 1; i < n; ++i) {
            ASSERT_LE(x[p[i - 1]], x[p[i]]);
            if (x[p[i - 1]] == x[p[i]]) {
                ASSERT_LT(p[i - 1], p[i]);
            }
        }
    }
}

TEST(SortedView, RelabelsValuesAndCoefficients) {
    CoefficientMatrix a(3, 0.0);
    a(0, 1) = 0.25, a(1, 0) = 0.625, a(1, 2) = 0.375, a(2, 1) = 0.25;
    const StateVector x{4.0, 0.0, -4.0};
    const SortedView view = sorted_view(x, a);
    EXPECT_EQ(view.perm, (std::vector<int>{2, 1, 0}));
    EXPECT_EQ(view.y, (std::vector<double>{-4.0, 0.0, 4.0}));
    EXPECT_DOUBLE_EQ(view.b(0, 1), a(2, 1));
    EXPECT_DOUBLE_EQ(view.b(1, 0), a(1, 2));
    EXPECT_DOUBLE_EQ(view.b(1, 2), a(1, 0));
    EXPECT_DOUBLE_EQ(view.b(2, 1), a(0, 1));
    EXPECT_DOUBLE_EQ(view.b(0, 2), 0.0);

    EXPECT_THROW(sorted_view({1.0, 2.0}, a), PreconditionError);
}

TEST(SortedView, MinimalBalanceConstantSurvivesRelabeling) {
    CoefficientMatrix a(3, 0.0);
    a(0, 1) = 0.25, a(1, 0) = 0.625, a(1, 2) = 0.375, a(2, 1) = 0.25;
    const MinimalK before = minimal_cut_balance_k(a);
    const MinimalK after = minimal_cut_balance_k(sorted_view({4.0, 0.0, -4.0}, a).b);
    ASSERT_TRUE(before.feasible);
    ASSERT_TRUE(after.feasible);
    EXPECT_DOUBLE_EQ(after.k, before.k);
}

TEST(WeightedSumSeries, HandValuesAndMonotonePass) {
    const Scenario sc =
        ct_scenario(CoefficientSchedule::constant(symmetric_half(2)), 2, {0.0, 1.0}, 1.0, 1e-3);
    const Trajectory tr = integrate(sc);

    const WeightedSumSeries unit = weighted_sum_series(tr, sc.schedule, 1.0);
    ASSERT_EQ(unit.s.size(), 2u);
    EXPECT_TRUE(unit.k_ok);
    EXPECT_DOUBLE_EQ(unit.s[0][0], 0.0);
    EXPECT_DOUBLE_EQ(unit.s[1][0], 1.0);
    for (std::size_t idx = 0; idx + 1 < unit.times.size(); ++idx)
        EXPECT_NEAR(unit.s[1][idx + 1], unit.s[1][idx], 1e-12);
    EXPECT_TRUE(monotonicity_check(unit, 1e-10).pass);

    const WeightedSumSeries half = weighted_sum_series(tr, sc.schedule, 2.0);
    EXPECT_DOUBLE_EQ(half.s[0][0], 0.0);
    EXPECT_DOUBLE_EQ(half.s[1][0], 0.25);
    EXPECT_TRUE(monotonicity_check(half, 1e-10).pass);
}

TEST(WeightedSumSeries, FlagsSamplesWhereTheConstantFailsToBalance) {
    Scenario sc;
    sc.n = 3;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 3.0;
    sc.x0 = {4.0, 0.0, -4.0};
    sc.schedule = CoefficientSchedule::example1();
    sc.schedule.finalize(3, sc.horizon, sc.mode);
    sc.integrator.h = 1e-3;
    sc.sampling.stride = 50;
    const Trajectory tr = integrate(sc);

    // At t = 0 the worst coupling ratio is 2.5, so K = 2.4 fails immediately
    // while K = 10 only fails once the ratio outgrows it later in the run.
    const WeightedSumSeries tight = weighted_sum_series(tr, sc.schedule, 2.4);
    EXPECT_FALSE(tight.k_ok);
    EXPECT_DOUBLE_EQ(tight.first_bad_t, 0.0);

    const WeightedSumSeries wide = weighted_sum_series(tr, sc.schedule, 10.0);
    EXPECT_FALSE(wide.k_ok);
    EXPECT_GT(wide.first_bad_t, 0.5);
    EXPECT_LT(wide.first_bad_t, 3.0);
    EXPECT_DOUBLE_EQ(wide.k_used, 10.0);
}

TEST(WeightedSumSeries, RejectsUnusableConstants) {
    const Scenario sc =
        ct_scenario(CoefficientSchedule::constant(symmetric_half(2)), 2, {0.0, 1.0}, 0.1, 1e-2);
    const Trajectory tr = integrate(sc);
    EXPECT_THROW(weighted_sum_series(tr, sc.schedule, 0.5), PreconditionError);
    EXPECT_THROW(
        weighted_sum_series(tr, sc.schedule, std::numeric_limits<double>::infinity()),
        PreconditionError);
}

TEST(MonotonicityCheck, LocatesInjectedDrop) {
    WeightedSumSeries series;
    series.times = {0.0, 1.0, 2.0, 3.0};
    series.s = {{0.0, 0.5, 0.4, 0.45}, {1.0, 1.0, 1.0, 1.0}};
    const MonotonicityReport rep = monotonicity_check(series, 1e-6);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.worst_drop, 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(rep.worst_t, 2.0);
    EXPECT_EQ(rep.worst_m, 1);
    EXPECT_TRUE(monotonicity_check(series, 0.2).pass);
}

TEST(WriteWeightedSumsCsv, HeaderAndRowLayout) {
    WeightedSumSeries series;
    series.times = {0.0, 0.5};
    series.s = {{0.0, 0.25}, {1.0, 1.0}};
    std::ostringstream os;
    write_weighted_sums_csv(os, series);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, 8), "t,S_1,S_");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_NE(text.find("0.5,0.25,1"), std::string::npos);
}

TEST(SortedEvolutionResidual, SmallOnSmoothSymmetricRun) {
    // Bounded by the trapezoid quadrature of the re-check, not the integrator.
    const Scenario sc =
        ct_scenario(CoefficientSchedule::constant(symmetric_half(2)), 2, {0.0, 1.0}, 1.0, 1e-3);
    EXPECT_LT(sorted_evolution_residual(integrate(sc), sc.schedule), 1e-7);
}

TEST(SortedEvolutionResidual, SurvivesRankCrossing) {
    const Scenario sc = ct_scenario(CoefficientSchedule::example2(), 4, {0.0, 0.4, 0.6, 1.0}, 3.0,
                                    1e-3, 5);
    EXPECT_LT(sorted_evolution_residual(integrate(sc), sc.schedule), 1e-5);
}

TEST(IntervalPermutation, BreaksTiesByDestinationThenIndex) {
    EXPECT_EQ(detail::interval_permutation({1.0, 1.0, 0.0}, {2.0, 0.5, 0.0}),
              (std::vector<int>{2, 1, 0}));
    EXPECT_EQ(detail::interval_permutation({1.0, 1.0}, {3.0, 3.0}), (std::vector<int>{0, 1}));
}

}  // namespace
}  // namespace cutbal
