#include "cutbal/balance.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "cutbal/errors.hpp"
#include "cutbal/rng.hpp"
#include "cutbal/schedule.hpp"

namespace cutbal {
namespace {

constexpr std::uint64_t kSeed = 0x62616c2d74657374ULL;

CoefficientMatrix example1_at_zero() {
    CoefficientSchedule s = CoefficientSchedule::example1();
    s.finalize(3, 50.0, TimeMode::Continuous);
    return s.at(0.0, {4.0, 0.0, -4.0});
}

TEST(MinimalK, Example1AtZeroIsExactlyTwoPointFive) {
    const MinimalK mk = minimal_cut_balance_k(example1_at_zero());
    ASSERT_TRUE(mk.feasible);
    EXPECT_NEAR(mk.k, 2.5, 1e-12);
    EXPECT_EQ(mk.witness_cut, 1u);  // {agent 1}: out 0.625 vs in 0.25
}

TEST(MinimalK, SymmetricMatricesYieldExactlyOne) {
    CounterRng rng(kSeed, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(6));
        CoefficientMatrix a(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.next_unit() < 0.7) a(i, j) = a(j, i) = rng.next_in(0.1, 5.0);
        const MinimalK mk = minimal_cut_balance_k(a);
        ASSERT_TRUE(mk.feasible);
        EXPECT_EQ(mk.k, 1.0);
    }
}

TEST(MinimalK, CapacitorPairEqualsCapacitanceRatio) {
    CoefficientSchedule s =
        CoefficientSchedule::capacitor_network({1.0, 2.0}, CoefficientMatrix(0));
    s.finalize(2, 10.0, TimeMode::Continuous);
    const MinimalK mk = minimal_cut_balance_k(s.at(0.0, {0.0, 1.0}));
    ASSERT_TRUE(mk.feasible);
    EXPECT_EQ(mk.k, 2.0);
}

TEST(MinimalK, OneDirectionalFlowIsInfeasible) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = 1.0;
    const MinimalK mk = minimal_cut_balance_k(a);
    EXPECT_FALSE(mk.feasible);
    EXPECT_TRUE(std::isinf(mk.k));
    EXPECT_EQ(mk.witness_cut, 1u);
}

TEST(MinimalK, ZeroMatrixIsBalancedAtOne) {
    const MinimalK mk = minimal_cut_balance_k(CoefficientMatrix(4, 0.0));
    ASSERT_TRUE(mk.feasible);
    EXPECT_EQ(mk.k, 1.0);
}

TEST(MinimalK, EntriesBelowEpsilonCountAsZero) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = 1.0;
    a(1, 0) = 1e-15;  // below the zero threshold: one-directional
    EXPECT_FALSE(minimal_cut_balance_k(a).feasible);
    EXPECT_TRUE(minimal_cut_balance_k(a, 1e-16).feasible);
}

TEST(MinimalK, RejectsOversizedMatrices) {
    EXPECT_THROW(minimal_cut_balance_k(CoefficientMatrix(25, 0.0)), PreconditionError);
}

TEST(VerifyCutBalance, TightAtTheMinimalConstant) {
    const CoefficientMatrix a = example1_at_zero();
    EXPECT_TRUE(verify_cut_balance(a, 2.5 * (1.0 + 1e-12)).balanced);
    const CutBalanceVerdict below = verify_cut_balance(a, 2.4);
    EXPECT_FALSE(below.balanced);
    ASSERT_TRUE(below.violating_cut.has_value());
    EXPECT_EQ(*below.violating_cut, 1u);
    EXPECT_THROW(verify_cut_balance(a, 0.5), PreconditionError);
}

TEST(CutReport, EnumeratesCutsUpToComplement) {
    const CutReport rep = enumerate_cuts(example1_at_zero());
    EXPECT_EQ(rep.cuts.size(), 3u);  // 2^(3-1) - 1: {S, complement} pairs counted once
    EXPECT_TRUE(rep.feasible);
    EXPECT_NEAR(rep.minimal_k, 2.5, 1e-12);
    EXPECT_EQ(rep.extremal_cut, 1u);
}

TEST(GenerateCutBalanced, HonorsItsOwnBound) {
    CounterRng rng(kSeed, 2);
    constexpr double kBounds[4] = {1.0, 2.0, 5.0, 10.0};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(trial % 7);
        const double k = kBounds[trial % 4];
        const CoefficientMatrix a =
            generate_cut_balanced(n, k, rng.next_in(0.3, 1.0), mix_keys(kSeed, trial));
        EXPECT_TRUE(verify_cut_balance(a, k * (1.0 + 1e-9)).balanced)
            << "n=" << n << " K=" << k << " trial=" << trial;
        const MinimalK mk = minimal_cut_balance_k(a);
        ASSERT_TRUE(mk.feasible);
        EXPECT_LE(mk.k, k * (1.0 + 1e-9));
    }
}

TEST(GenerateCutBalanced, SymmetricPatternAndDeterministic) {
    const CoefficientMatrix a = generate_cut_balanced(6, 5.0, 0.5, 77);
    const CoefficientMatrix b = generate_cut_balanced(6, 5.0, 0.5, 77);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            EXPECT_EQ(a(i, j), b(i, j));
            EXPECT_EQ(a(i, j) > 0.0, a(j, i) > 0.0);
        }
    EXPECT_THROW(generate_cut_balanced(0, 2.0, 0.5, 1), PreconditionError);
    EXPECT_THROW(generate_cut_balanced(4, 0.5, 0.5, 1), PreconditionError);
    EXPECT_THROW(generate_cut_balanced(4, 2.0, 0.0, 1), PreconditionError);
}

TEST(ConditionProfile, SymmetricImpliesEverySufficientCondition) {
    CoefficientMatrix a(3, 0.0);
    a(0, 1) = a(1, 0) = 1.0;
    a(1, 2) = a(2, 1) = 2.0;
    const ConditionProfile p = condition_profile(a);
    EXPECT_TRUE(p.symmetric);
    EXPECT_TRUE(p.type_symmetric);
    EXPECT_DOUBLE_EQ(p.type_symmetry_k, 1.0);
    EXPECT_TRUE(p.average_preserving);
    EXPECT_TRUE(p.weighted_average_preserving);
}

TEST(ConditionProfile, TypeSymmetryReportsTheEntrywiseConstant) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = 1.0;
    a(1, 0) = 3.0;
    const ConditionProfile p = condition_profile(a);
    EXPECT_FALSE(p.symmetric);
    EXPECT_TRUE(p.type_symmetric);
    EXPECT_DOUBLE_EQ(p.type_symmetry_k, 3.0);
    // Weights (3, 1) equalize the flows; largest normalized to 1.
    ASSERT_TRUE(p.weighted_average_preserving);
    ASSERT_EQ(p.preserving_weights.size(), 2u);
    EXPECT_NEAR(p.preserving_weights[0], 1.0, 1e-12);
    EXPECT_NEAR(p.preserving_weights[1], 1.0 / 3.0, 1e-12);
}

TEST(ConditionProfile, AveragePreservingWithoutTypeSymmetry) {
    // Circulant flow: row sums equal column sums but a_ij > 0, a_ji = 0.
    CoefficientMatrix a(3, 0.0);
    a(0, 1) = a(1, 2) = a(2, 0) = 1.0;
    const ConditionProfile p = condition_profile(a);
    EXPECT_FALSE(p.symmetric);
    EXPECT_FALSE(p.type_symmetric);
    EXPECT_TRUE(p.average_preserving);
}

TEST(ConditionProfile, OneDirectionalPairHasNoSufficientCondition) {
    CoefficientMatrix a(2, 0.0);
    a(0, 1) = 1.0;
    const ConditionProfile p = condition_profile(a);
    EXPECT_FALSE(p.symmetric);
    EXPECT_FALSE(p.type_symmetric);
    EXPECT_FALSE(p.average_preserving);
    EXPECT_FALSE(p.weighted_average_preserving);
    EXPECT_EQ(profile_to_string(p), " none of the sufficient conditions");
}

TEST(Lemma1Functional, TwoAgentClosedForm) {
    CoefficientMatrix b(2, 0.0);
    b(0, 1) = 2.0;
    b(1, 0) = 1.0;
    const std::vector<double> y{0.0, 1.0};
    // m=1 at K=2: 2^{-1} * b01 * (y1 - y0) = 1.
    EXPECT_DOUBLE_EQ(lemma1_functional(b, y, 1, 2.0), 1.0);
    // m=2 adds 2^{-2} * b10 * (y0 - y1) = -0.25.
    EXPECT_DOUBLE_EQ(lemma1_functional(b, y, 2, 2.0), 0.75);
}

TEST(Lemma1Functional, ValidatesItsPreconditions) {
    CoefficientMatrix b(2, 0.0);
    const std::vector<double> sorted{0.0, 1.0}, unsorted{1.0, 0.0};
    EXPECT_THROW(lemma1_functional(b, unsorted, 1, 2.0), PreconditionError);
    EXPECT_THROW(lemma1_functional(b, sorted, 0, 2.0), PreconditionError);
    EXPECT_THROW(lemma1_functional(b, sorted, 3, 2.0), PreconditionError);
    EXPECT_THROW(lemma1_functional(b, sorted, 1, 0.5), PreconditionError);
}

TEST(Lemma1Functional, NonnegativeOnRandomBalancedSystems) {
    CounterRng rng(kSeed, 3);
    double min_seen = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(trial % 7);
        const double k = (trial % 3 == 0) ? 1.0 : (trial % 3 == 1) ? 2.0 : 10.0;
        const CoefficientMatrix b =
            generate_cut_balanced(n, k, rng.next_in(0.3, 1.0), mix_keys(kSeed, 1000 + trial));
        std::vector<double> y(n);
        for (double& v : y) v = rng.next_in(-1.0, 1.0);
        std::sort(y.begin(), y.end());
        for (int m = 1; m <= n; ++m) {
            const double val = lemma1_functional(b, y, m, k);
            min_seen = std::min(min_seen, val);
            EXPECT_GE(val, -1e-10);
        }
    }
    EXPECT_LT(min_seen, 1.0);  // the bound is actually exercised
}

TEST(Lemma1Weights, ResidualsSumToZeroWithNonnegativeSuffixes) {
    CounterRng rng(kSeed, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(trial % 5);
        const double k = 2.0;
        const CoefficientMatrix b =
            generate_cut_balanced(n, k, rng.next_in(0.3, 1.0), mix_keys(kSeed, 2000 + trial));
        for (int m = 1; m <= n; ++m) {
            const std::vector<double> q = lemma1_weight_residuals(b, m, k);
            ASSERT_EQ(q.size(), static_cast<std::size_t>(n));
            double suffix = 0.0;
            for (int i = n - 1; i >= 1; --i) {
                suffix += q[i];
                EXPECT_GE(suffix, -1e-12);
            }
            EXPECT_NEAR(suffix + q[0], 0.0, 1e-12);
        }
    }
}

TEST(SubsetToString, OneIndexedAgentLists) {
    EXPECT_EQ(subset_to_string(0b101u, 3), "{1,3}");
    EXPECT_EQ(subset_to_string(0b1u, 1), "{1}");
    EXPECT_EQ(subset_to_string(0u, 3), "{}");
}

}  // namespace
}  // namespace cutbal
