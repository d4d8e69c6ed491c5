#include "cutbal/schedule.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "cutbal/errors.hpp"
#include "cutbal/rng.hpp"

namespace cutbal {
namespace {

CoefficientSchedule finalized(CoefficientSchedule s, int n, double horizon = 10.0,
                              TimeMode mode = TimeMode::Continuous) {
    s.finalize(n, horizon, mode);
    return s;
}

TEST(Example1Schedule, ValuesAtZero) {
    const CoefficientSchedule s = finalized(CoefficientSchedule::example1(), 3, 50.0);
    const CoefficientMatrix a = s.at(0.0, {4.0, 0.0, -4.0});
    EXPECT_DOUBLE_EQ(a(0, 1), 0.25);
    EXPECT_DOUBLE_EQ(a(2, 1), 0.25);
    EXPECT_DOUBLE_EQ(a(1, 0), 0.625);
    EXPECT_DOUBLE_EQ(a(1, 2), 0.375);
    EXPECT_DOUBLE_EQ(a(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(a(2, 0), 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(a(i, i), 0.0);
}

TEST(Example1Schedule, MiddleRowSumsToOneAndCouplingDecays) {
    const CoefficientSchedule s = finalized(CoefficientSchedule::example1(), 3, 50.0);
    const StateVector x{4.0, 0.0, -4.0};
    for (double t : {0.0, 1.0, 7.3, 25.0, 50.0}) {
        const CoefficientMatrix a = s.at(t, x);
        EXPECT_NEAR(a(1, 0) + a(1, 2), 1.0, 1e-15);
        EXPECT_LE(a(0, 1), 1.0 / (std::exp(t) * 2.0 + 1.0));
        EXPECT_GE(a(0, 1), 0.0);
    }
}

TEST(Example1Schedule, RequiresThreeAgents) {
    CoefficientSchedule s = CoefficientSchedule::example1();
    EXPECT_THROW(s.finalize(4, 10.0, TimeMode::Continuous), SchemaError);
}

TEST(CapacitorSchedule, DefaultResistancesAreUnit) {
    const CoefficientSchedule s =
        finalized(CoefficientSchedule::capacitor_network({1.0, 2.0}, CoefficientMatrix(0)), 2);
    const CoefficientMatrix a = s.at(3.0, {0.0, 1.0});
    EXPECT_DOUBLE_EQ(a(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(a(1, 0), 0.5);
}

TEST(CapacitorSchedule, ScalesByInverseCapacitanceAndResistance) {
    CoefficientMatrix r(3, 0.0);
    r(0, 1) = r(1, 0) = 2.0;
    r(1, 2) = r(2, 1) = 4.0;
    const CoefficientSchedule s =
        finalized(CoefficientSchedule::capacitor_network({1.0, 2.0, 0.5}, r), 3);
    const CoefficientMatrix a = s.at(0.0, {0.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(a(0, 1), 0.5);        // 1/(C1*R12)
    EXPECT_DOUBLE_EQ(a(1, 0), 0.25);       // 1/(C2*R12)
    EXPECT_DOUBLE_EQ(a(1, 2), 0.125);      // 1/(C2*R23)
    EXPECT_DOUBLE_EQ(a(2, 1), 0.5);        // 1/(C3*R23)
    EXPECT_DOUBLE_EQ(a(0, 2), 0.0);        // no link
}

TEST(CapacitorSchedule, RejectsBadInputs) {
    CoefficientMatrix asym(2, 0.0);
    asym(0, 1) = 1.0;
    EXPECT_THROW(finalized(CoefficientSchedule::capacitor_network({1.0, 2.0}, asym), 2),
                 SchemaError);
    EXPECT_THROW(
        finalized(CoefficientSchedule::capacitor_network({1.0, -2.0}, CoefficientMatrix(0)), 2),
        SchemaError);
    EXPECT_THROW(
        finalized(CoefficientSchedule::capacitor_network({1.0, 2.0}, CoefficientMatrix(0)), 3),
        SchemaError);
}

TEST(TQuarterSchedule, CrossBudgetSplitsAcrossArcs) {
    const CoefficientSchedule s = finalized(CoefficientSchedule::t_quarter(2, 0.2, 1.0), 4, 30.0);
    const CoefficientMatrix a0 = s.at(0.0, {0.0, 0.0, 1.0, 1.0});
    // 2*m*(n-m) = 8 cross arcs share the 0.2 integral: each starts at 0.025.
    EXPECT_DOUBLE_EQ(a0(0, 2), 0.025);
    EXPECT_DOUBLE_EQ(a0(3, 1), 0.025);
    EXPECT_DOUBLE_EQ(a0(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(a0(2, 3), 1.0);
    const CoefficientMatrix a1 = s.at(1.0, {0.0, 0.0, 1.0, 1.0});
    EXPECT_NEAR(a1(0, 2), 0.025 * std::exp(-1.0), 1e-18);
    EXPECT_DOUBLE_EQ(a1(0, 1), 1.0);
}

TEST(TQuarterSchedule, RejectsBadGroupSize) {
    EXPECT_THROW(finalized(CoefficientSchedule::t_quarter(4, 0.2, 1.0), 4), SchemaError);
    EXPECT_THROW(finalized(CoefficientSchedule::t_quarter(0, 0.2, 1.0), 4), SchemaError);
}

TEST(ConstantSchedule, RejectsDiagonalInContinuousMode) {
    CoefficientMatrix a(2, 0.0);
    a(0, 0) = 0.5;
    a(0, 1) = a(1, 0) = 1.0;
    EXPECT_THROW(finalized(CoefficientSchedule::constant(a), 2), SchemaError);
    EXPECT_NO_THROW(
        finalized(CoefficientSchedule::constant(a), 2, 10.0, TimeMode::Discrete));
}

TEST(ConstantSchedule, RejectsNegativeEntries) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = -1.0;
    EXPECT_THROW(finalized(CoefficientSchedule::constant(a), 2), SchemaError);
}

TEST(DecayingTailSchedule, MultipliesBaseByExponential) {
    CoefficientMatrix base(2, 0.0);
    base(0, 1) = 2.0;
    base(1, 0) = 3.0;
    const CoefficientSchedule s = finalized(CoefficientSchedule::decaying_tail(base, 0.5), 2);
    const CoefficientMatrix a = s.at(2.0, {0.0, 1.0});
    EXPECT_DOUBLE_EQ(a(0, 1), 2.0 * std::exp(-1.0));
    EXPECT_DOUBLE_EQ(a(1, 0), 3.0 * std::exp(-1.0));
    EXPECT_THROW(finalized(CoefficientSchedule::decaying_tail(base, 0.0), 2), SchemaError);
}

TEST(BoundedConfidenceSchedule, StrictRadiusThreshold) {
    const CoefficientSchedule s = finalized(CoefficientSchedule::bounded_confidence(3, 1.0), 3);
    const CoefficientMatrix a = s.at(0.0, {0.0, 0.5, 2.0});
    EXPECT_DOUBLE_EQ(a(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(a(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(a(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(a(1, 2), 0.0);
    // Exactly at the radius the pair does not interact.
    const CoefficientMatrix b = s.at(0.0, {0.0, 1.0, 5.0});
    EXPECT_DOUBLE_EQ(b(0, 1), 0.0);
}

TEST(BoundedConfidenceSchedule, NormalizedRowsShareUnitMass) {
    const CoefficientSchedule s =
        finalized(CoefficientSchedule::normalized_bounded_confidence(4, 1.0), 4);
    // Agent 2 sees 1 and 3; agents 1 and 3 see only 2; agent 4 is alone.
    const CoefficientMatrix a = s.at(0.0, {0.0, 0.6, 1.2, 9.0});
    EXPECT_DOUBLE_EQ(a(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(a(1, 2), 0.5);
    EXPECT_DOUBLE_EQ(a(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(a(2, 1), 1.0);
    for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(a(3, j), 0.0);
}

TEST(KernelSchedule, ThresholdKernelIsRadiallyDecreasing) {
    const CoefficientSchedule s = finalized(
        CoefficientSchedule::kernel(2, KernelId::RadiallyDecreasingThreshold, 2.0, 1.0), 2);
    EXPECT_DOUBLE_EQ(s.at(0.0, {0.0, 0.5})(0, 1), 0.75);
    EXPECT_DOUBLE_EQ(s.at(0.0, {0.0, 1.0})(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(s.at(0.0, {0.0, 3.0})(0, 1), 0.0);
}

TEST(KernelSchedule, GaussianKernelTruncatesAtRadius) {
    const CoefficientSchedule s =
        finalized(CoefficientSchedule::kernel(2, KernelId::GaussianTruncated, 1.0, 0.5), 2);
    const double v = s.at(0.0, {0.0, 0.4})(0, 1);
    EXPECT_NEAR(v, std::exp(-0.16 / 0.5), 1e-15);
    EXPECT_DOUBLE_EQ(s.at(0.0, {0.0, 1.0})(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(s.at(0.0, {0.0, 1.7})(0, 1), 0.0);
}

TEST(Example2Schedule, ActiveOnlyWhileStrictlyOrdered) {
    const CoefficientSchedule s = finalized(CoefficientSchedule::example2(), 4, 6.0);
    const CoefficientMatrix on = s.at(0.0, {0.0, 0.4, 0.6, 1.0});
    EXPECT_DOUBLE_EQ(on(0, 2), 1.0);
    EXPECT_DOUBLE_EQ(on(2, 0), 1.0);
    EXPECT_DOUBLE_EQ(on(1, 3), 1.0);
    EXPECT_DOUBLE_EQ(on(3, 1), 1.0);
    EXPECT_DOUBLE_EQ(on(0, 1), 0.0);
    const CoefficientMatrix off = s.at(0.0, {0.0, 0.5, 0.5, 1.0});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(off(i, j), 0.0);
}

TEST(Example2Schedule, EndogenousSchedulesAreContinuousOnly) {
    CoefficientSchedule s = CoefficientSchedule::example2();
    EXPECT_THROW(s.finalize(4, 6.0, TimeMode::Discrete), SchemaError);
}

TEST(PiecewiseSchedule, LooksUpPieceByTime) {
    CoefficientMatrix a(2, 0.0), b(2, 0.0);
    a(0, 1) = a(1, 0) = 1.0;
    b(0, 1) = b(1, 0) = 2.0;
    const CoefficientSchedule s = finalized(
        CoefficientSchedule::piecewise_constant({{0.0, 1.0, a}, {1.0, 3.0, b}}), 2, 3.0);
    EXPECT_DOUBLE_EQ(s.at(0.5, {0.0, 1.0})(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(s.at(1.0, {0.0, 1.0})(0, 1), 2.0);  // right-continuous
    EXPECT_DOUBLE_EQ(s.at(2.9, {0.0, 1.0})(0, 1), 2.0);
    EXPECT_DOUBLE_EQ(s.next_breakpoint_after(0.0), 1.0);
    EXPECT_DOUBLE_EQ(s.next_breakpoint_after(1.0), 3.0);
    EXPECT_TRUE(std::isinf(s.next_breakpoint_after(3.0)));
}

TEST(PiecewiseSchedule, RejectsGapsAndMisalignedEnds) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = a(1, 0) = 1.0;
    EXPECT_THROW(finalized(CoefficientSchedule::piecewise_constant({{0.0, 1.0, a}, {1.5, 3.0, a}}),
                           2, 3.0),
                 SchemaError);
    EXPECT_THROW(finalized(CoefficientSchedule::piecewise_constant({{0.0, 2.0, a}}), 2, 3.0),
                 SchemaError);
    EXPECT_THROW(finalized(CoefficientSchedule::piecewise_constant({{0.5, 3.0, a}}), 2, 3.0),
                 SchemaError);
}

TEST(RandomMarkovSchedule, DeterministicForFixedSeed) {
    CoefficientMatrix a(2, 0.0), b(2, 0.0);
    a(0, 1) = a(1, 0) = 1.0;
    b(0, 1) = b(1, 0) = 2.0;
    CoefficientMatrix tr(2, 0.5);
    const auto make = [&] {
        return finalized(CoefficientSchedule::random_markov({a, b}, tr, 0.25, 99), 2, 20.0);
    };
    const CoefficientSchedule s1 = make(), s2 = make();
    bool saw_a = false, saw_b = false;
    for (double t = 0.0; t < 20.0; t += 0.25) {
        const double v1 = s1.at(t, {0.0, 1.0})(0, 1);
        EXPECT_DOUBLE_EQ(v1, s2.at(t, {0.0, 1.0})(0, 1));
        saw_a = saw_a || v1 == 1.0;
        saw_b = saw_b || v1 == 2.0;
    }
    EXPECT_TRUE(saw_a);
    EXPECT_TRUE(saw_b);
    EXPECT_DOUBLE_EQ(s1.next_breakpoint_after(0.0), 0.25);
    EXPECT_DOUBLE_EQ(s1.next_breakpoint_after(0.25), 0.5);
    EXPECT_DOUBLE_EQ(s1.next_breakpoint_after(0.3), 0.5);
}

TEST(RandomMarkovSchedule, ValidatesTransitionMatrix) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = a(1, 0) = 1.0;
    CoefficientMatrix bad(2, 0.3);  // rows sum to 0.6
    EXPECT_THROW(finalized(CoefficientSchedule::random_markov({a, a}, bad, 0.25, 1), 2),
                 SchemaError);
    CoefficientMatrix rect(1, 1.0);
    EXPECT_THROW(finalized(CoefficientSchedule::random_markov({a, a}, rect, 0.25, 1), 2),
                 SchemaError);
    CoefficientMatrix tr(2, 0.5);
    EXPECT_THROW(finalized(CoefficientSchedule::random_markov({a, a}, tr, 0.0, 1), 2),
                 SchemaError);
}

TEST(EvaluateSchedule, RejectsUnfinalizedAndOutOfRange) {
    CoefficientSchedule s = CoefficientSchedule::example1();
    EXPECT_THROW(evaluate_schedule(s, 0.0, {1.0, 0.0, -1.0}), PreconditionError);
    s.finalize(3, 10.0, TimeMode::Continuous);
    EXPECT_THROW(evaluate_schedule(s, -1.0, {1.0, 0.0, -1.0}), PreconditionError);
    EXPECT_THROW(evaluate_schedule(s, 11.0, {1.0, 0.0, -1.0}), PreconditionError);
    EXPECT_NO_THROW(evaluate_schedule(s, 10.0, {1.0, 0.0, -1.0}));
}

TEST(ConsensusRhs, MatchesHandComputation) {
    CoefficientMatrix a(3, 0.0);
    a(0, 1) = 1.0;
    a(1, 0) = 2.0;
    a(1, 2) = 0.5;
    const StateVector v = consensus_rhs(a, {0.0, 1.0, 3.0});
    EXPECT_DOUBLE_EQ(v[0], 1.0);            // 1*(1-0)
    EXPECT_DOUBLE_EQ(v[1], -2.0 + 1.0);     // 2*(0-1) + 0.5*(3-1)
    EXPECT_DOUBLE_EQ(v[2], 0.0);
}

}  // namespace
}  // namespace cutbal
