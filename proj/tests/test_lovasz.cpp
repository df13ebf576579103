#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"

using namespace subreg;

namespace {

Vector vec(std::initializer_list<double> v) { return to_vector(std::vector<double>(v)); }

} // namespace

TEST(Lovasz, ExtensionExamples)
{
    const auto f = SetFunction::chain_tv(3);
    EXPECT_DOUBLE_EQ(lovasz_extension(f, vec({1, 1, 0})), 1.0);
    EXPECT_NEAR(lovasz_extension(f, vec({0.3, 0.1, 0.7})), 0.8, 1e-12);
    EXPECT_NEAR(lovasz_extension(f, vec({2.5, 2.5, 2.5})), 0.0, 1e-12);
}

TEST(Lovasz, GreedyExamples)
{
    const auto tv = greedy(SetFunction::chain_tv(3), vec({0.3, 0.1, 0.7}));
    EXPECT_TRUE(tv.s.isApprox(vec({1, -2, 1})));
    EXPECT_NEAR(tv.s.dot(vec({0.3, 0.1, 0.7})), 0.8, 1e-12);

    const auto card = greedy(SetFunction::cardinality(CardinalityProfile::quadratic(3)), vec({5, 4, 1}));
    EXPECT_TRUE(card.s.isApprox(vec({2, 0, -2})));
    EXPECT_NEAR(card.s.dot(vec({5, 4, 1})), 8.0, 1e-12);

    const auto ones = greedy(SetFunction::chain_tv(4), Vector::Ones(4));
    EXPECT_NEAR(ones.s.sum(), 0.0, 1e-12);
    EXPECT_EQ(ones.order, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Lovasz, LevelSetIntegralExamples)
{
    const auto f = SetFunction::chain_tv(3);
    EXPECT_NEAR(level_set_integral(f, vec({0.3, 0.1, 0.7})), 0.8, 1e-12);
    EXPECT_EQ(level_set_integral(f, vec({4, 4, 4})), 0.0);
    EXPECT_EQ(level_set_integral(f, vec({0, 1, 0})), 2.0);
}

TEST(Lovasz, GreedyAgreesWithOraclesOnAllFamilies)
{
    std::mt19937_64 rng(17);
    for (auto kind : oracle::all_kinds())
        for (int rep = 0; rep < 10; ++rep) {
            const auto f = oracle::random_function(kind, 6, rng);
            const Vector w = oracle::random_vector(6, rng);
            const double g = lovasz_extension(f, w);
            EXPECT_NEAR(g, level_set_integral(f, w), 1e-9) << oracle::kind_name(kind);
            EXPECT_NEAR(g, oracle::lovasz_by_permutations(f, w), 1e-9) << oracle::kind_name(kind);
            EXPECT_TRUE(in_base_polyhedron(f, greedy(f, w).s)) << oracle::kind_name(kind);
        }
}

TEST(Lovasz, ConvexPositivelyHomogeneousShiftInvariant)
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto kind : oracle::all_kinds()) {
        const auto f = oracle::random_function(kind, 5, rng);
        for (int rep = 0; rep < 20; ++rep) {
            const Vector x = oracle::random_vector(5, rng), y = oracle::random_vector(5, rng);
            const double a = u(rng);
            EXPECT_LE(lovasz_extension(f, a * x + (1 - a) * y),
                      a * lovasz_extension(f, x) + (1 - a) * lovasz_extension(f, y) + 1e-9);
            EXPECT_NEAR(lovasz_extension(f, 3.0 * x), 3.0 * lovasz_extension(f, x), 1e-9);
            EXPECT_NEAR(lovasz_extension(f, (x.array() + 1.7).matrix()), lovasz_extension(f, x), 1e-9);
        }
    }
}

TEST(Lovasz, ConvexEnvelopeOnTheCube)
{
    // any convex combination of indicators costs at least f at its mean
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t p = 5;
    for (auto kind : oracle::all_kinds()) {
        const auto f = oracle::random_function(kind, p, rng);
        for (int rep = 0; rep < 20; ++rep) {
            Vector w = Vector::Zero(p);
            double cost = 0.0, total = 0.0;
            std::vector<std::pair<std::uint64_t, double>> terms;
            for (int k = 0; k < 4; ++k) terms.emplace_back(rng() & 31u, u(rng));
            for (auto& [b, c] : terms) total += c;
            for (auto& [b, c] : terms) {
                const auto a = SubsetMask::from_bits(p, b);
                w += (c / total) * indicator(a);
                cost += (c / total) * f.eval(a);
            }
            EXPECT_LE(lovasz_extension(f, w), cost + 1e-9);
        }
    }
}

TEST(Lovasz, ExtensionOfIndicatorIsSetValue)
{
    std::mt19937_64 rng(31);
    for (auto kind : oracle::all_kinds()) {
        const auto f = oracle::random_function(kind, 6, rng);
        for (std::uint64_t b = 0; b < 64; ++b) {
            const auto a = SubsetMask::from_bits(6, b);
            EXPECT_NEAR(lovasz_extension(f, indicator(a)), f.eval(a), 1e-12);
        }
    }
}

TEST(BasePolyhedron, Examples)
{
    const auto f = SetFunction::chain_tv(2);
    EXPECT_TRUE(in_base_polyhedron(f, vec({1, -1})));
    EXPECT_FALSE(in_base_polyhedron(f, vec({2, -2})));
    EXPECT_TRUE(in_base_polyhedron(f, vec({0.5, -0.5})));
    EXPECT_FALSE(in_base_polyhedron(f, vec({0.5, 0.5})));
}

TEST(ExtremePoints, ChainTvGeneratingSets)
{
    const auto pts = extreme_points(SetFunction::chain_tv(3));
    std::set<std::uint64_t> gens;
    for (const auto& e : pts.points) gens.insert(e.generating_set.to_bits());
    EXPECT_EQ(gens, (std::set<std::uint64_t>{0b001, 0b100, 0b011, 0b110}));
}

TEST(ExtremePoints, RangeFunctionHasAllProperSubsets)
{
    const auto pts = extreme_points(SetFunction::cardinality(CardinalityProfile::range(3)));
    EXPECT_EQ(pts.points.size(), 6u);
    for (const auto& e : pts.points)
        if (e.generating_set.to_bits() == 0b001) {
            EXPECT_TRUE(e.coordinates.isApprox(vec({2.0 / 3, -1.0 / 3, -1.0 / 3})));
        }
}

TEST(ExtremePoints, DegenerateSetsAreReported)
{
    // a two-component graph: F(component) = 0
    WeightedGraph g(4);
    g.add_edge(0, 1, 1.0);
    g.add_edge(2, 3, 1.0);
    const auto pts = extreme_points(SetFunction::cut(g));
    bool seen = false;
    for (const auto& a : pts.degenerate) seen = seen || a.to_bits() == 0b0011;
    EXPECT_TRUE(seen);
}

TEST(OrderedPartition, ValidatesStructure)
{
    EXPECT_THROW(OrderedPartition(3, {{0, 1}}, {}), std::invalid_argument);
    EXPECT_THROW(OrderedPartition(3, {{0, 1}, {1, 2}}, {}), std::invalid_argument);
    EXPECT_THROW(OrderedPartition(3, {{0}, {1, 2}}, {{1, 0}}), std::invalid_argument);
    const OrderedPartition part(4, {{0}, {1}, {2}, {3}}, {{0, 2}, {2, 3}});
    EXPECT_TRUE(part.above(0, 3));
    EXPECT_FALSE(part.above(1, 3));
    EXPECT_FALSE(part.is_total());
    EXPECT_EQ(part.closure_pairs().size(), 3u);
}

TEST(OrderedPartition, IdealsOfAChainArePrefixes)
{
    const auto part = OrderedPartition::chain(3, {{1}, {0, 2}});
    EXPECT_TRUE(part.is_total());
    const auto ideals = part.ideals();
    EXPECT_EQ(ideals.size(), 3u);
    EXPECT_EQ(part.prefix_mask(1), SubsetMask::from_indices(3, {1}));
}

TEST(FaceLattice, Examples)
{
    const auto f = SetFunction::chain_tv(3);
    const auto singletons = check_face_lattice(f, OrderedPartition::chain(3, {{0}, {1}, {2}}));
    EXPECT_TRUE(singletons.modular_on_lattice);
    EXPECT_TRUE(singletons.blocks_inseparable);

    const auto split = check_face_lattice(f, OrderedPartition::chain(3, {{0, 2}, {1}}));
    EXPECT_FALSE(split.blocks_inseparable);

    const auto trivial = check_face_lattice(f, OrderedPartition(3, {{0, 1, 2}}, {}));
    EXPECT_TRUE(trivial.modular_on_lattice);
    EXPECT_TRUE(trivial.blocks_inseparable);
}

TEST(FaceLattice, MaximalityOfAProxLattice)
{
    const auto f = SetFunction::chain_tv(3);
    const auto r = check_face_lattice(f, OrderedPartition::chain(3, {{0}, {1}, {2}}), true);
    ASSERT_TRUE(r.maximal.has_value());
}
