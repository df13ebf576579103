#pragma once

// Minimization of C -> lambda G(C) - z(C) where G is a set function or a
// minor of one: family-dedicated reductions (min cut, sorting) and an
// exhaustive oracle. Results carry the smallest and the largest minimizer.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "set_function.hpp"
#include "types.hpp"

namespace subreg {

struct SfmResult {
    SubsetMask minimal_minimizer;
    SubsetMask maximal_minimizer;
    double value = 0.0;
};

struct SfmProblem {
    SetFunction function;
    Vector z;
    double lambda;

    SfmProblem(SetFunction f, Vector z_, double lambda_) : function(std::move(f)), z(std::move(z_)), lambda(lambda_)
    {
        require_dimension(z, function.size(), "SfmProblem");
        if (!(lambda >= 0.0)) throw std::invalid_argument("SfmProblem: lambda must be non-negative");
    }
};

enum class SfmEngine { dedicated, bruteforce };

namespace detail {

inline double sfm_tol(double magnitude) { return 1e-9 * (1.0 + std::abs(magnitude)); }

inline SubsetMask mask_from(const std::vector<char>& bits, std::size_t n)
{
    SubsetMask m(n);
    for (std::size_t k = 0; k < n; ++k)
        if (bits[k]) m.insert(k);
    return m;
}

} // namespace detail

/// Exhaustive scan over all 2^n subsets of the minor's ground set.
inline SfmResult sfm_bruteforce(const Minor& g, const Vector& z, double lambda)
{
    const std::size_t n = g.size();
    require_dimension(z, n, "sfm_bruteforce");
    require_guard(n, 22, "sfm_bruteforce");
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<double> value(total);
    double best = 0.0;
    for (std::uint64_t b = 0; b < total; ++b) {
        const auto c = SubsetMask::from_bits(n, b);
        value[b] = lambda * g.eval(c) - modular(z, c);
        best = std::min(best, value[b]);
    }
    const double tol = detail::sfm_tol(best);
    std::uint64_t lo = total - 1, hi = 0;
    for (std::uint64_t b = 0; b < total; ++b)
        if (value[b] <= best + tol) {
            lo &= b;
            hi |= b;
        }
    return {SubsetMask::from_bits(n, lo), SubsetMask::from_bits(n, hi), best};
}

inline SfmResult sfm_bruteforce(const SfmProblem& prob)
{
    return sfm_bruteforce(Minor(prob.function), prob.z, prob.lambda);
}

/// lambda (h(k) - h(0)) - (sum of the k largest z), scanned over k. `h` may
/// be any concave profile of length n+1 (minors shift the profile).
inline SfmResult sfm_cardinality(const std::vector<double>& h, const Vector& z, double lambda)
{
    const std::size_t n = static_cast<std::size_t>(z.size());
    if (h.size() != n + 1) throw std::invalid_argument("sfm_cardinality: profile length must be p+1");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return z[a] > z[b]; });

    std::vector<double> g(n + 1);
    double prefix = 0.0;
    g[0] = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        prefix += z[order[k - 1]];
        g[k] = lambda * (h[k] - h[0]) - prefix;
    }
    const double best = *std::min_element(g.begin(), g.end());
    const double tol = detail::sfm_tol(best);
    std::size_t kmin = n, kmax = 0;
    for (std::size_t k = 0; k <= n; ++k)
        if (g[k] <= best + tol) {
            kmin = std::min(kmin, k);
            kmax = std::max(kmax, k);
        }

    const double ztol = 1e-12 * (1.0 + (n ? z.cwiseAbs().maxCoeff() : 0.0));
    SubsetMask lo(n), hi(n);
    // ties straddling the optimal size: the minimal minimizer drops the tied
    // group, the maximal one takes all of it
    if (kmin > 0) {
        const double boundary = z[order[kmin - 1]];
        const bool tied = kmin < n && std::abs(z[order[kmin]] - boundary) <= ztol;
        for (std::size_t r = 0; r < kmin; ++r)
            if (!tied || z[order[r]] > boundary + ztol) lo.insert(order[r]);
    }
    if (kmax > 0) {
        const double boundary = z[order[kmax - 1]];
        for (std::size_t k = 0; k < n; ++k)
            if (z[k] >= boundary - ztol) hi.insert(k);
    }
    return {lo, hi, best};
}

inline SfmResult sfm_cardinality(const CardinalityProfile& h, const Vector& z, double lambda)
{
    require_dimension(z, h.size(), "sfm_cardinality");
    return sfm_cardinality(h.values(), z, lambda);
}

/// lambda cut(A) - z(A) as an s-t min cut: source -> k with z_k^+, k -> sink
/// with z_k^-, internal arcs lambda d(k, j).
inline SfmResult sfm_cut(const WeightedGraph& graph, const Vector& z, double lambda)
{
    const std::size_t n = graph.size();
    require_dimension(z, n, "sfm_cut");
    if (n == 1) {
        SubsetMask lo(1), hi(1);
        if (z[0] > 0.0) lo.insert(0);
        if (z[0] >= 0.0) hi.insert(0);
        return {lo, hi, -std::max(0.0, z[0])};
    }
    BinaryEnergy e(static_cast<int>(n));
    for (std::size_t k = 0; k < n; ++k) e.add_unary(static_cast<int>(k), -z[static_cast<Eigen::Index>(k)]);
    for (const auto& ed : graph.edges()) e.add_pairwise(ed.i, ed.j, lambda * ed.weight);
    const auto m = e.minimize();
    return {detail::mask_from(m.minimal, n), detail::mask_from(m.maximal, n), m.value};
}

namespace detail {

inline SfmResult finish(const Minor& g, const Vector& z, double lambda, const std::vector<char>& lo,
                        const std::vector<char>& hi)
{
    const std::size_t n = g.size();
    SfmResult r{mask_from(lo, n), mask_from(hi, n), 0.0};
    r.value = lambda * g.eval(r.minimal_minimizer) - modular(z, r.minimal_minimizer);
    return r;
}

inline SfmResult minimize_cut_minor(const Minor& g, const Vector& z, double lambda)
{
    const auto& graph = g.function().graph();
    const std::size_t n = g.size();
    std::vector<int> local(graph.size(), -1);
    for (std::size_t k = 0; k < n; ++k) local[g.ground()[k]] = static_cast<int>(k);
    BinaryEnergy e(static_cast<int>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const int u = g.ground()[k];
        double unary = -z[static_cast<Eigen::Index>(k)];
        for (const auto& [v, w] : graph.neighbors(u)) {
            if (local[v] >= 0) continue;
            unary += g.base()[v] ? -lambda * w : lambda * w;
        }
        e.add_unary(static_cast<int>(k), unary);
    }
    for (const auto& ed : graph.edges())
        if (local[ed.i] >= 0 && local[ed.j] >= 0) e.add_pairwise(local[ed.i], local[ed.j], lambda * ed.weight);
    if (n == 1) {
        std::vector<char> lo{0}, hi{0};
        const double c = e.evaluate({1});
        lo[0] = c < 0.0;
        hi[0] = c <= 0.0;
        return finish(g, z, lambda, lo, hi);
    }
    const auto m = e.minimize();
    return finish(g, z, lambda, m.minimal, m.maximal);
}

inline SfmResult minimize_cardinality_minor(const Minor& g, const Vector& z, double lambda)
{
    const auto& h = g.function().profile();
    const std::size_t b = g.base().count();
    std::vector<double> shifted(g.size() + 1);
    for (std::size_t k = 0; k <= g.size(); ++k) shifted[k] = h(b + k) - h(b);
    return sfm_cardinality(shifted, z, lambda);
}

// Joint min cut over the visible nodes of the minor and all hidden nodes.
inline SfmResult minimize_noisy_cut_minor(const Minor& g, const Vector& z, double lambda)
{
    const auto& spec = g.function().noisy();
    const std::size_t n = g.size();
    const std::size_t p = spec.hidden_graph.size();
    const double mu = lambda * spec.mismatch_penalty;
    std::vector<char> in_ground(p, 0);
    for (int v : g.ground()) in_ground[v] = 1;

    BinaryEnergy e(static_cast<int>(n + p));
    for (std::size_t k = 0; k < n; ++k) {
        e.add_unary(static_cast<int>(k), -z[static_cast<Eigen::Index>(k)]);
        e.add_pairwise(static_cast<int>(k), static_cast<int>(n) + g.ground()[k], mu);
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (in_ground[j]) continue;
        e.add_unary(static_cast<int>(n + j), g.base()[j] ? -mu : mu);
    }
    for (const auto& ed : spec.hidden_graph.edges())
        e.add_pairwise(static_cast<int>(n) + ed.i, static_cast<int>(n) + ed.j, lambda * ed.weight);
    const auto m = e.minimize();
    return finish(g, z, lambda, m.minimal, m.maximal);
}

} // namespace detail

/// Dispatches to the dedicated engine of the family (min cut for cut and
/// noisy-cut families, sorting for cardinality) or to the exhaustive scan.
inline SfmResult minimize(const Minor& g, const Vector& z, double lambda, SfmEngine engine = SfmEngine::dedicated)
{
    require_dimension(z, g.size(), "minimize");
    if (!(lambda >= 0.0)) throw std::invalid_argument("minimize: lambda must be non-negative");
    if (g.size() == 0) return {SubsetMask(0), SubsetMask(0), 0.0};
    if (engine == SfmEngine::bruteforce) return sfm_bruteforce(g, z, lambda);
    switch (g.function().family()) {
    case Family::cut: return detail::minimize_cut_minor(g, z, lambda);
    case Family::cardinality: return detail::minimize_cardinality_minor(g, z, lambda);
    case Family::noisy_cut: return detail::minimize_noisy_cut_minor(g, z, lambda);
    case Family::symmetrized:
    case Family::table: return sfm_bruteforce(g, z, lambda);
    }
    return sfm_bruteforce(g, z, lambda);
}

inline SfmResult minimize(const SetFunction& f, const Vector& z, double lambda,
                          SfmEngine engine = SfmEngine::dedicated)
{
    return minimize(Minor(f), z, lambda, engine);
}

inline SfmResult minimize(const SfmProblem& prob, SfmEngine engine = SfmEngine::dedicated)
{
    return minimize(prob.function, prob.z, prob.lambda, engine);
}

} // namespace subreg
