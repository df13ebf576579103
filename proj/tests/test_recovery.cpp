#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace subreg;

namespace {

GroundTruth blocks_of(std::size_t len, const std::vector<double>& values)
{
    return GroundTruth::chain_blocks(std::vector<std::size_t>(values.size(), len), values);
}

} // namespace

TEST(Eta, ChainWithoutStaircase)
{
    const auto truth = blocks_of(4, {1, 0, 3, 2});
    const auto eta = compute_eta(SetFunction::chain_tv(16), truth);
    // blocks at the chain ends give 1, interior local extrema 2
    EXPECT_EQ(*std::min_element(eta.begin(), eta.end()), 1.0);
    for (double e : eta) EXPECT_GE(e, 1.0);
}

TEST(Eta, ChainStaircase)
{
    const auto truth = blocks_of(3, {2, 1, 0});
    const auto eta = compute_eta(SetFunction::chain_tv(9), truth);
    // blocks sorted by value: the middle one is the staircase step
    EXPECT_EQ(eta[1], 0.0);
}

TEST(Eta, QuadraticCardinality)
{
    // F(A) = |A| |V \ A|: the margin is c (a - c), normalized by min(c/a, 1 - c/a)
    const auto truth = blocks_of(4, {3, 2, 1});
    const auto eta = compute_eta(SetFunction::cardinality(CardinalityProfile::quadratic(12)), truth);
    for (double e : eta) EXPECT_EQ(e, 8.0); // a^2 / 2 with a = 4
}

TEST(Eta, SingletonBlocksAreInfinite)
{
    const auto truth = GroundTruth::chain_blocks({1, 2}, {1, 0});
    const auto eta = compute_eta(SetFunction::chain_tv(3), truth);
    EXPECT_TRUE(std::isinf(eta[0]));
}

TEST(Nu, Examples)
{
    EXPECT_EQ(compute_nu(blocks_of(2, {2, 1, 0})), 1.0);
    EXPECT_EQ(compute_nu(blocks_of(2, {3, 1, 0.5})), 0.5);
    EXPECT_TRUE(std::isinf(compute_nu(GroundTruth::chain_blocks({3}, {1.0}))));
}

TEST(LambdaBound, ChainTv)
{
    const auto truth = blocks_of(10, {1, 0, 3, 2});
    const double nu = compute_nu(truth);
    const double lmax = lambda_bound(SetFunction::chain_tv(40), truth, nu);
    EXPECT_GE(lmax, nu / 8.0 * 10.0 - 1e-12);
    EXPECT_TRUE(std::isinf(lambda_bound(SetFunction::chain_tv(4), GroundTruth::chain_blocks({4}, {1.0}), 1.0)));
}

TEST(LambdaBound, Clustering)
{
    const std::size_t p = 12;
    const auto truth = blocks_of(4, {3, 2, 1});
    const double lmax = lambda_bound(SetFunction::cardinality(CardinalityProfile::quadratic(p)), truth, 1.0);
    // increments are a (p - 2b - a) with |.| <= a p, so the bound is at least nu / (4 p)
    EXPECT_GE(lmax, 1.0 / (4.0 * p) - 1e-12);
}

TEST(ProbabilityBound, LimitsAndClamping)
{
    const auto truth = blocks_of(10, {1, 0, 3, 2});
    const std::vector<double> eta(4, 1.0);
    EXPECT_GT(theorem_bound(truth, eta, 1.0, 1.25, 1e-3).value, 1.0 - 1e-12);
    const auto zero = theorem_bound(truth, {1.0, 0.0, 1.0, 1.0}, 1.0, 1.25, 0.1);
    EXPECT_TRUE(zero.clamped);
    EXPECT_EQ(zero.value, 0.0);
    EXPECT_LE(zero.raw, 1.0 - 2.0 * 10);
    EXPECT_THROW(theorem_bound(truth, eta, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(ProbabilityBound, ChainSpecialization)
{
    // at the largest lambda, the bound dominates 1 - 4 p exp(-nu^2 min|A|^2 / (128 sigma^2 max|A|^2))
    const auto truth = blocks_of(10, {1, 0, 3, 2});
    const auto f = SetFunction::chain_tv(40);
    const double nu = 1.0, sigma = 0.3;
    const double lambda = lambda_bound(f, truth, nu);
    const double b = theorem_bound(truth, compute_eta(f, truth), nu, lambda, sigma).raw;
    EXPECT_GE(b, 1.0 - 4.0 * 40 * std::exp(-nu * nu / (128.0 * sigma * sigma)) - 1e-12);
}

TEST(MonteCarlo, NoiselessRecoveryIsExact)
{
    const auto truth = blocks_of(5, {1, 0, 3, 2});
    const auto f = SetFunction::chain_tv(20);
    const auto rep = monte_carlo_recovery(f, truth, 0.0, 1.0, 10);
    EXPECT_EQ(rep.empirical, 1.0);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts)
{
    const auto truth = blocks_of(5, {1, 0, 3, 2});
    const auto f = SetFunction::chain_tv(20);
    const auto a = monte_carlo_recovery(f, truth, 0.2, 0.6, 64, 9, ProxEngine::fast, 1);
    const auto b = monte_carlo_recovery(f, truth, 0.2, 0.6, 64, 9, ProxEngine::fast, 4);
    EXPECT_EQ(a.successes, b.successes);
}

TEST(MonteCarlo, BoundHoldsOnChain)
{
    const auto truth = blocks_of(10, {1, 0, 3, 2});
    const auto f = SetFunction::chain_tv(40);
    const double lambda = 1.25;
    const auto rep = monte_carlo_recovery(f, truth, 0.05, lambda, 300, 3);
    EXPECT_GE(rep.empirical, rep.bound.value - 3.0 * rep.standard_error() - 1e-12);
}

TEST(MonteCarlo, StaircaseFailsWithSmallNoise)
{
    const auto truth = blocks_of(3, {2, 1, 0});
    const auto f = SetFunction::chain_tv(9);
    const auto rep = monte_carlo_recovery(f, truth, 0.01, 0.1, 300, 5);
    EXPECT_LT(rep.empirical, 1.0);
}

TEST(SameLattice, RequiresBlocksAndOrder)
{
    const auto truth = OrderedPartition::chain(3, {{0}, {1, 2}});
    EXPECT_TRUE(same_lattice(truth, OrderedPartition::chain(3, {{0}, {1, 2}})));
    EXPECT_FALSE(same_lattice(truth, OrderedPartition::chain(3, {{1, 2}, {0}})));
    EXPECT_FALSE(same_lattice(truth, OrderedPartition::chain(3, {{0}, {1}, {2}})));
}

TEST(Counterexample, PaperMargin)
{
    CounterexampleSearch opt;
    opt.target_a = 13;
    opt.target_c = 2;
    opt.target_f_b = 5.0;
    opt.target_f_bc = 4.0;
    const auto rep = tv2d_counterexample(5, 5, opt);
    ASSERT_TRUE(rep.matched_target);
    EXPECT_NEAR(rep.instance->margin, -3.0 / 13.0, 1e-9);
    const auto f = SetFunction::cut(WeightedGraph::grid(rep.instance->width, rep.instance->height));
    const auto r = check_agglo_condition(f, rep.instance->a, rep.instance->b, rep.instance->c);
    EXPECT_FALSE(r.holds);
    EXPECT_NEAR(r.worst_margin, -3.0 / 13.0, 1e-9);
}

TEST(Counterexample, ChainsHaveNone)
{
    const auto rep = tv2d_counterexample(6, 1);
    EXPECT_FALSE(rep.found);
}

TEST(Counterexample, SmallGridReportsBestMargin)
{
    const auto rep = tv2d_counterexample(2, 2);
    EXPECT_GT(rep.grids_searched, 0u);
    if (rep.instance) {
        EXPECT_LT(rep.instance->margin, 0.0);
    }
}

TEST(Concentration, Examples)
{
    EXPECT_EQ(lemma2_check(4, 1e6, 1000).empirical_tail, 0.0);
    const auto loose = lemma2_check(4, 4, 10000);
    EXPECT_NEAR(loose.bound, 8.0 * std::exp(-0.5), 1e-12);
    EXPECT_LE(loose.empirical_tail, 1.0);
    const auto tight = lemma2_check(4, 12, 10000);
    EXPECT_LE(tight.empirical_tail, tight.bound + 3.0 * tight.standard_error);
}

TEST(Concentration, TopKScanMatchesEnumeration)
{
    // max over proper A of s(A) / min(|A|/p, 1 - |A|/p), by enumeration
    const std::size_t p = 6;
    std::mt19937_64 rng(trial_seed(1, 0));
    Vector s = gaussian_vector(p, rng);
    s.array() -= s.mean();
    double best = -1e300;
    for (std::uint64_t b = 1; b + 1 < (1u << p); ++b) {
        const auto a = SubsetMask::from_bits(p, b);
        const double frac = static_cast<double>(a.count()) / p;
        best = std::max(best, modular(s, a) / std::min(frac, 1.0 - frac));
    }
    EXPECT_EQ(lemma2_check(p, best - 1e-9, 1).empirical_tail, 1.0);
    EXPECT_EQ(lemma2_check(p, best + 1e-9, 1).empirical_tail, 0.0);
}

TEST(RobustTv, NoOutliersRecoverJump)
{
    RobustTvConfig cfg;
    cfg.chain_length = 40;
    cfg.jump_position = 20;
    cfg.outlier_fraction = 0.0;
    cfg.sigma_grid = {0.05};
    cfg.replications = 3;
    for (const auto& row : robust_tv_experiment(cfg)) EXPECT_EQ(row.error_mean, 0.0);
}

TEST(RobustTv, OutliersAtFixedPositions)
{
    const std::size_t p = 20;
    Vector z(p);
    for (std::size_t k = 0; k < p; ++k) z[k] = k >= 10 ? 1.0 : 0.0;
    z[5] = 5.0;
    z[15] = -4.0;
    std::vector<char> outlier(p, 0);
    outlier[5] = outlier[15] = 1;
    const double lambda = 0.3;
    const auto robust =
        prox(ProxProblem(SetFunction::noisy_cut(NoisyCutSpec(WeightedGraph::chain(p), 1.0)), z, lambda)).w;
    EXPECT_EQ(level_set_error(robust, 10, outlier), 0.0);
}

TEST(RobustTv, RejectsBadConfig)
{
    RobustTvConfig cfg;
    cfg.jump_position = 0;
    EXPECT_THROW(robust_tv_experiment(cfg), std::invalid_argument);
}
