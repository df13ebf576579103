#pragma once

// Speed comparison on cardinality-regularized least squares: FISTA with the
// dedicated prox, FISTA with the min-norm-point prox, and subgradient descent
// with c/t and c/sqrt(t) steps, each under the same wall-clock budget.

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "solver.hpp"

namespace subreg {

struct BenchConfig {
    std::size_t p = 1000;
    std::size_t n = 500;
    double lambda = 0.03;
    double correlation = 0.5; // AR(1) correlation between neighbouring columns of X
    double noise = 0.1;
    std::size_t period = 5;   // w*_k = k mod period
    double budget_ms = 5000.0;
    std::uint64_t seed = 7;

    void validate() const
    {
        if (p < 2 || n < 1) throw std::invalid_argument("bench: need p >= 2 and n >= 1");
        if (!(lambda >= 0.0)) throw std::invalid_argument("bench: lambda must be non-negative");
        if (!(std::abs(correlation) < 1.0)) throw std::invalid_argument("bench: correlation must lie in (-1, 1)");
        if (!(noise >= 0.0) || period == 0) throw std::invalid_argument("bench: invalid noise or period");
        if (!(budget_ms > 0.0)) throw std::invalid_argument("bench: budget must be positive");
    }
};

struct BenchSeries {
    std::string method;
    SolverResult result;
};

struct BenchInstance {
    LeastSquaresLoss loss;
    SetFunction f;
};

/// X has N(0, 1/n) entries with AR(1) correlation along each row.
inline BenchInstance make_bench_instance(const BenchConfig& cfg)
{
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    const auto n = static_cast<Eigen::Index>(cfg.n), p = static_cast<Eigen::Index>(cfg.p);
    Matrix x(n, p);
    const double mix = std::sqrt(1.0 - cfg.correlation * cfg.correlation);
    for (Eigen::Index i = 0; i < n; ++i) {
        double prev = normal(rng);
        x(i, 0) = prev;
        for (Eigen::Index k = 1; k < p; ++k) {
            prev = cfg.correlation * prev + mix * normal(rng);
            x(i, k) = prev;
        }
    }
    x /= std::sqrt(static_cast<double>(cfg.n));
    Vector w(p);
    for (Eigen::Index k = 0; k < p; ++k) w[k] = static_cast<double>(static_cast<std::size_t>(k) % cfg.period);
    Vector y = x * w;
    for (auto& v : y) v += cfg.noise * normal(rng);
    return {LeastSquaresLoss(std::move(x), std::move(y)), SetFunction::cardinality(CardinalityProfile::quadratic(cfg.p))};
}

/// Methods in the order fista_dedicated, fista_mnp, subgradient_inv_t,
/// subgradient_inv_sqrt_t. Each trace records the best objective so far.
inline std::vector<BenchSeries> run_bench(const BenchConfig& cfg)
{
    const auto inst = make_bench_instance(cfg);
    SolverConfig sc;
    sc.max_iters = std::numeric_limits<std::size_t>::max() / 2;
    sc.time_budget_ms = cfg.budget_ms;

    std::vector<BenchSeries> out;
    out.push_back({"fista_dedicated", proximal_gradient(inst.loss, inst.f, cfg.lambda, sc,
                                                        make_prox_operator(inst.f, ProxEngine::fast))});
    out.push_back({"fista_mnp", proximal_gradient(inst.loss, inst.f, cfg.lambda, sc,
                                                  make_prox_operator(inst.f, ProxEngine::mnp))});
    sc.schedule = StepSchedule::inverse_t;
    out.push_back({"subgradient_inv_t", subgradient_descent(inst.loss, inst.f, cfg.lambda, sc)});
    sc.schedule = StepSchedule::inverse_sqrt_t;
    out.push_back({"subgradient_inv_sqrt_t", subgradient_descent(inst.loss, inst.f, cfg.lambda, sc)});
    for (auto& s : out) {
        double best = std::numeric_limits<double>::infinity();
        for (auto& row : s.result.trace) row.objective = best = std::min(best, row.objective);
    }
    return out;
}

/// Best objective reached by `time_ms` (+inf if the trace starts later).
inline double objective_at(const SolverResult& r, double time_ms)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : r.trace)
        if (row.wall_time_ms <= time_ms) best = std::min(best, row.objective);
    return best;
}

} // namespace subreg
