#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace subreg;

TEST(SubsetMask, BitsAndIndicesRoundTrip)
{
    const auto a = SubsetMask::from_indices(5, {0, 3});
    EXPECT_EQ(a.to_bits(), 0b01001u);
    EXPECT_EQ(a.count(), 2u);
    EXPECT_EQ(a.complement().indices(), (std::vector<int>{1, 2, 4}));
    EXPECT_TRUE(SubsetMask::from_indices(5, {3}).subset_of(a));
    EXPECT_EQ(a | a.complement(), SubsetMask(5, true));
    EXPECT_TRUE((a & a.complement()).empty());
}

TEST(SubsetMask, GuardRejectsHugeEnumeration) { EXPECT_THROW(require_guard(40, 20, "test"), guard_error); }

TEST(SetFunction, ChainTvExample)
{
    const auto f = SetFunction::chain_tv(3);
    EXPECT_DOUBLE_EQ(f.eval(SubsetMask::from_indices(3, {0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(f.eval(SubsetMask::from_indices(3, {1})), 2.0);
    EXPECT_DOUBLE_EQ(f.eval(SubsetMask(3)), 0.0);
}

TEST(SetFunction, QuadraticCardinalityExample)
{
    const auto f = SetFunction::cardinality(CardinalityProfile::quadratic(3));
    EXPECT_DOUBLE_EQ(f.eval(SubsetMask::from_indices(3, {0})), 2.0);
}

TEST(SetFunction, NoisyCutExamples)
{
    WeightedGraph strong(2);
    strong.add_edge(0, 1, 10.0);
    const auto f = SetFunction::noisy_cut(NoisyCutSpec(strong, 1.0));
    EXPECT_NEAR(f.eval(SubsetMask::from_indices(2, {0})), 1.0, 1e-12);
    EXPECT_NEAR(f.eval(SubsetMask(2)), 0.0, 1e-12);

    WeightedGraph weak(2);
    weak.add_edge(0, 1, 0.1);
    const auto g = SetFunction::noisy_cut(NoisyCutSpec(weak, 1.0));
    EXPECT_NEAR(g.eval(SubsetMask::from_indices(2, {0})), 0.1, 1e-12);
}

TEST(SetFunction, NoisyCutMatchesEnumerationOverHiddenSets)
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t p = 5;
        const auto g = oracle::random_graph(p, rng);
        const double mu = 0.7;
        const auto f = SetFunction::noisy_cut(NoisyCutSpec(g, mu));
        for (std::uint64_t a = 0; a < 32; ++a) {
            double best = 1e300;
            for (std::uint64_t b = 0; b < 32; ++b)
                best = std::min(best, g.cut(SubsetMask::from_bits(p, b)) + mu * std::popcount(a ^ b));
            EXPECT_NEAR(f.eval_bits(a), best, 1e-9);
        }
    }
}

TEST(SetFunction, SymmetrizedFormula)
{
    std::mt19937_64 rng(5);
    const auto g = oracle::random_submodular_table(4, rng);
    const auto f = SetFunction::symmetrized(g);
    for (std::uint64_t a = 0; a < 16; ++a)
        EXPECT_NEAR(f.eval_bits(a), g(a) + g(15 & ~a) - g(std::uint64_t{0}) - g(std::uint64_t{15}), 1e-12);
}

TEST(SetFunction, RejectsUnnormalizedTable)
{
    EXPECT_THROW(SetFunction::table(SetTable(2, {0.0, 1.0, 1.0, 3.0})), std::invalid_argument);
    EXPECT_THROW(SetTable(2, {0.0, 1.0}), std::invalid_argument);
}

TEST(SetFunction, RejectsInvalidProfiles)
{
    EXPECT_THROW(CardinalityProfile({0.0, 1.0, 4.0, 0.0}), std::invalid_argument); // not concave
    EXPECT_THROW(CardinalityProfile({0.0, -1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(CardinalityProfile({0.0, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(NoisyCutSpec(WeightedGraph(2), -1.0), std::invalid_argument);
}

TEST(SetFunction, RejectsDimensionMismatch)
{
    const auto f = SetFunction::chain_tv(3);
    EXPECT_THROW(f.eval(SubsetMask(4)), std::invalid_argument);
}

TEST(Axioms, ChainTvIsSubmodularAndSymmetric)
{
    const auto r = check_axioms(SetFunction::chain_tv(3));
    EXPECT_TRUE(r.submodular);
    EXPECT_TRUE(r.symmetric);
    EXPECT_TRUE(r.nonnegative);
}

TEST(Axioms, ZeroTable)
{
    const auto r = check_axioms(SetFunction::table(SetTable(2, {0, 0, 0, 0})));
    EXPECT_TRUE(r.submodular);
}

TEST(Axioms, NegativeWitness)
{
    const auto r = check_axioms(SetFunction::table(SetTable(2, {0.0, -1.0, 0.0, 0.0})));
    EXPECT_FALSE(r.nonnegative);
    ASSERT_TRUE(r.negative_witness.has_value());
    EXPECT_EQ(*r.negative_witness, SubsetMask::from_indices(2, {0}));
}

TEST(Axioms, NonSubmodularWitness)
{
    // F({1}) = F({2}) = 0, F(V) = 0 but F({1,2}) on p = 3 is large
    std::vector<double> v(8, 0.0);
    v[0b011] = 5.0;
    const auto r = check_axioms(SetFunction::table(SetTable(3, v)));
    EXPECT_FALSE(r.submodular);
    EXPECT_TRUE(r.witness.has_value());
}

TEST(Axioms, RandomFamiliesAreSubmodular)
{
    std::mt19937_64 rng(11);
    for (auto kind : oracle::all_kinds())
        for (int rep = 0; rep < 5; ++rep) {
            const auto f = oracle::random_function(kind, 6, rng);
            const auto r = check_axioms(f);
            EXPECT_TRUE(r.submodular) << oracle::kind_name(kind);
            EXPECT_TRUE(r.nonnegative) << oracle::kind_name(kind);
        }
}

TEST(Inseparable, ChainExamples)
{
    const auto f = SetFunction::chain_tv(3);
    EXPECT_FALSE(is_inseparable(f, SubsetMask::from_indices(3, {0, 2})));
    EXPECT_TRUE(is_inseparable(f, SubsetMask::from_indices(3, {0, 1})));
    EXPECT_TRUE(is_inseparable(f, SubsetMask::from_indices(3, {1})));
}

TEST(Inseparable, CutMatchesConnectivity)
{
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const auto g = oracle::random_graph(6, rng, 0.3);
        const auto f = SetFunction::cut(g);
        for (std::uint64_t b = 1; b < 64; ++b) {
            const auto a = SubsetMask::from_bits(6, b);
            EXPECT_EQ(is_inseparable(f, a), detail::connected_in(g, a.indices()));
        }
    }
}
