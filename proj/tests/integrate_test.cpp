#include "cutbal/integrate.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "cutbal/errors.hpp"
#include "cutbal/schedule.hpp"

namespace cutbal {
namespace {

constexpr double kLn32Half = 0.20273255405408219;  // 0.5*ln(3/2)
constexpr double kLn9Half = 1.0986122886681098;    // 0.5*ln(9)

Scenario two_agent_constant(double h, IntegratorMethod method) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = a(1, 0) = 0.5;
    Scenario sc;
    sc.n = 2;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 1.0;
    sc.x0 = {0.0, 1.0};
    sc.schedule = CoefficientSchedule::constant(a);
    sc.schedule.finalize(2, sc.horizon, sc.mode);
    sc.integrator.h = h;
    sc.integrator.method = method;
    return sc;
}

double two_agent_error(double h, IntegratorMethod method) {
    const Trajectory tr = integrate(two_agent_constant(h, method));
    // Spread contracts at rate a01+a10 = 1: x_0(1) = 0.5 - 0.5*exp(-1).
    const double exact0 = 0.5 - 0.5 * std::exp(-1.0);
    return std::abs(tr.final_state()[0] - exact0);
}

TEST(Integrate, FourthOrderConvergenceOnConstantSystem) {
    const double e1 = two_agent_error(0.1, IntegratorMethod::Rk4);
    const double e2 = two_agent_error(0.05, IntegratorMethod::Rk4);
    EXPECT_LT(e1, 1e-6);
    EXPECT_GT(e1 / e2, 8.0);  // halving h must shrink the error ~16x
}

TEST(Integrate, EulerIsFirstOrder) {
    const double e1 = two_agent_error(0.01, IntegratorMethod::Euler);
    const double e2 = two_agent_error(0.005, IntegratorMethod::Euler);
    EXPECT_GT(e1, two_agent_error(0.01, IntegratorMethod::Rk4));
    EXPECT_GT(e1 / e2, 1.7);
    EXPECT_LT(e1 / e2, 2.3);
}

TEST(Integrate, SampleGridHitsExactMultiplesOfH) {
    const Trajectory tr = integrate(two_agent_constant(1e-3, IntegratorMethod::Rk4));
    ASSERT_EQ(tr.size(), 1001u);
    EXPECT_EQ(tr.times[0], 0.0);
    EXPECT_EQ(tr.times[5], 5 * 1e-3);
    EXPECT_EQ(tr.times[500], 500 * 1e-3);
    EXPECT_EQ(tr.times.back(), 1.0);
}

TEST(Integrate, StrideThinsSamplesButKeepsEndpoints) {
    Scenario sc = two_agent_constant(1e-3, IntegratorMethod::Rk4);
    sc.sampling.stride = 100;
    const Trajectory tr = integrate(sc);
    ASSERT_EQ(tr.size(), 11u);
    EXPECT_EQ(tr.times.front(), 0.0);
    EXPECT_EQ(tr.times.back(), 1.0);
}

TEST(Integrate, ClosedFormFidelityOnOscillatingSystem) {
    Scenario sc;
    sc.n = 3;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 5.0;
    sc.x0 = {4.0, 0.0, -4.0};
    sc.schedule = CoefficientSchedule::example1();
    sc.schedule.finalize(3, sc.horizon, sc.mode);
    sc.integrator.h = 1e-3;
    const Trajectory tr = integrate(sc);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double t = tr.times[k];
        worst = std::max(worst, std::abs(tr.states[k][0] - (3.0 + std::exp(-t))));
        worst = std::max(worst, std::abs(tr.states[k][1] - std::sin(t)));
        worst = std::max(worst, std::abs(tr.states[k][2] - (-3.0 - std::exp(-t))));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Integrate, PiecewiseBreakpointsLandOnSamplesAndIntegralsAreExact) {
    CoefficientMatrix a(2, 0.0), b(2, 0.0);
    a(0, 1) = a(1, 0) = 0.25;
    b(0, 1) = b(1, 0) = 1.5;
    Scenario sc;
    sc.n = 2;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 1.0;
    sc.x0 = {0.0, 1.0};
    // Boundary at an irrational-looking offset that no grid point hits.
    sc.schedule = CoefficientSchedule::piecewise_constant({{0.0, 0.3141, a}, {0.3141, 1.0, b}});
    sc.schedule.finalize(2, sc.horizon, sc.mode);
    sc.integrator.h = 0.01;
    const Trajectory tr = integrate(sc);
    bool boundary_sampled = false;
    for (double t : tr.times) boundary_sampled = boundary_sampled || t == 0.3141;
    EXPECT_TRUE(boundary_sampled);
    // Piecewise-constant coefficients make the trapezoid accumulation exact.
    const double expected = 0.25 * 0.3141 + 1.5 * (1.0 - 0.3141);
    EXPECT_NEAR(tr.integrals.back()(0, 1), expected, 1e-12);
    EXPECT_NEAR(tr.integrals.back()(1, 0), expected, 1e-12);
}

TEST(Integrate, ConservesTheMeanOfSymmetricSystems) {
    Scenario sc = two_agent_constant(1e-2, IntegratorMethod::Rk4);
    const Trajectory tr = integrate(sc);
    const StateVector& xf = tr.final_state();
    EXPECT_NEAR(xf[0] + xf[1], 1.0, 1e-13);
}

TEST(ResidualCheck, SecondOrderOnSmoothRun) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = a(1, 0) = 0.5;
    CoefficientSchedule sched = CoefficientSchedule::constant(a);
    sched.finalize(2, 1.0, TimeMode::Continuous);
    const double r1 =
        residual_check(integrate(two_agent_constant(1e-3, IntegratorMethod::Rk4)), sched)
            .max_residual;
    const double r2 =
        residual_check(integrate(two_agent_constant(5e-4, IntegratorMethod::Rk4)), sched)
            .max_residual;
    // The re-check quadrature is trapezoid, so the certificate itself is
    // second order in the sample spacing regardless of the integrator.
    EXPECT_LT(r1, 1e-7);
    EXPECT_GT(r1 / r2, 3.0);
    EXPECT_LT(r1 / r2, 5.0);
}

TEST(RunExample1, MatchesClosedFormsAndKeepsOscillating) {
    const Example1Evidence ev = run_example1();
    EXPECT_LT(ev.x1_final_error, 1e-6);
    EXPECT_LT(ev.x3_final_error, 1e-6);
    EXPECT_GE(ev.x2_tail_spread, 1.9);
    EXPECT_LE(ev.x2_tail_spread, 2.0);
    EXPECT_GT(ev.max_ratio_a21_a12, 1e20);  // coupling becomes absurdly one-sided
    EXPECT_TRUE(ev.claim_holds);
}

TEST(RunExample2, MiddlePairMeetsAtLogThreeHalvesOverTwo) {
    const Example2Result res = run_example2({0.0, 0.4, 0.6, 1.0});
    EXPECT_NEAR(res.merge_time, kLn32Half, 1e-3);
    ASSERT_EQ(res.limits.size(), 4u);
    EXPECT_NEAR(res.limits[0], 0.1, 1e-6);
    EXPECT_NEAR(res.limits[1], 0.5, 1e-6);
    EXPECT_NEAR(res.limits[2], 0.5, 1e-6);
    EXPECT_NEAR(res.limits[3], 0.9, 1e-6);
    EXPECT_TRUE(res.froze_after_merge);
    EXPECT_LE(res.post_merge_drift, 1e-9);
}

TEST(RunExample2, WideInnerGapMergesLater) {
    const Example2Result res = run_example2({0.0, 0.1, 0.9, 1.0});
    EXPECT_NEAR(res.merge_time, kLn9Half, 1e-3);
    EXPECT_NEAR(res.limits[0], 0.4, 1e-6);
    EXPECT_NEAR(res.limits[1], 0.5, 1e-6);
    EXPECT_NEAR(res.limits[2], 0.5, 1e-6);
    EXPECT_NEAR(res.limits[3], 0.6, 1e-6);
}

TEST(RunExample2, RejectsUnsortedInitialState) {
    EXPECT_THROW(run_example2({0.5, 0.4, 0.6, 1.0}), PreconditionError);
    EXPECT_THROW(run_example2({0.0, 0.4, 0.6}), PreconditionError);
}

TEST(TQuarter, SeparationCertificateAndBudgetGuard) {
    const TQuarterCertificate cert = run_t_quarter_experiment(2, 4, 0.2);
    EXPECT_TRUE(cert.bounds_hold);
    EXPECT_LE(cert.max_group1, 0.25 + 1e-6);
    EXPECT_GE(cert.min_group2, 0.75 - 1e-6);
    EXPECT_THROW(run_t_quarter_experiment(2, 4, 0.26), PreconditionError);
    EXPECT_THROW(run_t_quarter_experiment(0, 4, 0.2), PreconditionError);
}

TEST(AccumulateRatioGrowth, DetectsOneSidedCoupling) {
    Scenario sc;
    sc.n = 3;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 20.0;
    sc.x0 = {4.0, 0.0, -4.0};
    sc.schedule = CoefficientSchedule::example1();
    sc.schedule.finalize(3, sc.horizon, sc.mode);
    sc.integrator.h = 1e-3;
    const Trajectory tr = integrate(sc);
    const SquareMatrix<double> worst = accumulate_ratio_growth(tr, sc.schedule);
    double top = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j && std::isfinite(worst(i, j))) top = std::max(top, worst(i, j));
    EXPECT_GT(top, std::exp(19.0));
}

TEST(EventRefinement, LocalizesTheRegimeSwitch) {
    // Three agents where the outer pair comes within the radius mid-run.
    Scenario sc;
    sc.n = 3;
    sc.mode = TimeMode::Continuous;
    sc.horizon = 2.0;
    sc.x0 = {0.0, 0.9, 1.8};
    sc.schedule = CoefficientSchedule::bounded_confidence(3, 1.0);
    sc.schedule.finalize(3, sc.horizon, sc.mode);
    sc.integrator.h = 1e-3;
    const Trajectory tr = integrate(sc);
    // The 1-3 pair starts outside the radius and enters it; refinement must
    // leave an off-grid sample flagged at the switch.
    int events = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) events += tr.event_sample[k];
    EXPECT_GE(events, 1);
    const ResidualReport rep = residual_check(tr, sc.schedule);
    EXPECT_LT(rep.max_residual, 2e-6);
}

TEST(Integrate, RejectsBadSettings) {
    Scenario sc = two_agent_constant(1e-3, IntegratorMethod::Rk4);
    sc.integrator.h = 0.0;
    EXPECT_THROW(integrate(sc), PreconditionError);
    sc = two_agent_constant(1e-3, IntegratorMethod::Rk4);
    sc.x0 = {0.0};
    EXPECT_THROW(integrate(sc), PreconditionError);
    sc = two_agent_constant(1e-3, IntegratorMethod::Rk4);
    sc.mode = TimeMode::Discrete;
    EXPECT_THROW(integrate(sc), PreconditionError);
    sc = two_agent_constant(1e-3, IntegratorMethod::Rk4);
    sc.sampling.stride = 0;
    EXPECT_THROW(integrate(sc), PreconditionError);
}

}  // namespace
}  // namespace cutbal
