#pragma once

// Brute-force reference implementations and random instance generators.
// Everything here goes through plain set evaluations so it shares no code
// path with the engines under test.

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "subreg/subreg.hpp"

namespace oracle {

using subreg::SetFunction;
using subreg::SubsetMask;
using subreg::Vector;

/// F on all 2^p bitmasks.
inline std::vector<double> value_table(const SetFunction& f)
{
    const std::uint64_t n = std::uint64_t{1} << f.size();
    std::vector<double> t(n);
    for (std::uint64_t b = 0; b < n; ++b) t[b] = f.eval_bits(b);
    return t;
}

/// max over all permutations of the greedy increments dotted with w.
inline double lovasz_by_permutations(const SetFunction& f, const Vector& w)
{
    const std::size_t p = f.size();
    const auto table = value_table(f);
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    do {
        std::uint64_t bits = 0;
        double val = 0.0;
        for (int j : perm) {
            const std::uint64_t next = bits | (std::uint64_t{1} << j);
            val += (table[next] - table[bits]) * w[j];
            bits = next;
        }
        best = std::max(best, val);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

struct SfmOracle {
    double value;
    std::uint64_t minimal; // intersection of all minimizers
    std::uint64_t maximal; // union of all minimizers
};

/// min over A of lambda F(A) - z(A), by enumeration.
inline SfmOracle sfm_by_enumeration(const SetFunction& f, const Vector& z, double lambda, double tol = 1e-9)
{
    const std::size_t p = f.size();
    const std::uint64_t n = std::uint64_t{1} << p;
    std::vector<double> vals(n);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t b = 0; b < n; ++b) {
        double zs = 0.0;
        for (std::size_t k = 0; k < p; ++k)
            if ((b >> k) & 1u) zs += z[static_cast<Eigen::Index>(k)];
        vals[b] = lambda * f.eval_bits(b) - zs;
        best = std::min(best, vals[b]);
    }
    SfmOracle r{best, n - 1, 0};
    for (std::uint64_t b = 0; b < n; ++b)
        if (vals[b] <= best + tol * (1.0 + std::abs(best))) {
            r.minimal &= b;
            r.maximal |= b;
        }
    return r;
}

/// Prox by enumerating totally ordered partitions (top block first). For each
/// candidate the block values are mean(z) - lambda t_i / |A_i|; a candidate is
/// the solution iff the values strictly decrease and (z - w) / lambda lies in
/// B(F). Prefixes failing either test are pruned. Returns every certified w.
inline std::vector<Vector> prox_by_certificate(const SetFunction& f, const Vector& z, double lambda, double tol = 1e-9)
{
    const std::size_t p = f.size();
    if (lambda == 0.0) return {z};
    const auto table = value_table(f);
    const std::uint64_t full = (std::uint64_t{1} << p) - 1;
    std::vector<Vector> found;
    Vector s = Vector::Zero(static_cast<Eigen::Index>(p));
    Vector w = Vector::Zero(static_cast<Eigen::Index>(p));

    // s(A) <= F(A) for every A inside the prefix that meets the new block
    auto prefix_feasible = [&](std::uint64_t prefix, std::uint64_t block) {
        for (std::uint64_t a = prefix; a; a = (a - 1) & prefix) {
            if (!(a & block)) continue;
            double sum = 0.0;
            for (std::uint64_t r = a; r; r &= r - 1) sum += s[std::countr_zero(r)];
            if (sum > table[a] + tol) return false;
        }
        return true;
    };

    std::function<void(std::uint64_t, double)> extend = [&](std::uint64_t prefix, double last_v) {
        if (prefix == full) {
            if (std::abs(s.sum() - table[full]) <= tol) found.push_back(w);
            return;
        }
        const std::uint64_t rest = full & ~prefix;
        for (std::uint64_t block = rest; block; block = (block - 1) & rest) {
            const double size = static_cast<double>(std::popcount(block));
            double zsum = 0.0;
            for (std::uint64_t r = block; r; r &= r - 1) zsum += z[std::countr_zero(r)];
            const double t = table[prefix | block] - table[prefix];
            const double v = zsum / size - lambda * t / size;
            if (!(v < last_v - tol)) continue;
            for (std::uint64_t r = block; r; r &= r - 1) {
                const int e = std::countr_zero(r);
                w[e] = v;
                s[e] = (z[e] - v) / lambda;
            }
            if (prefix_feasible(prefix | block, block)) extend(prefix | block, v);
        }
    };
    extend(0, std::numeric_limits<double>::infinity());
    return found;
}

/// argmin 1/2 ||w - z||^2 + lambda_f f(w) + lambda_1 ||w||_1 by enumerating
/// ordered partitions of V plus a zero marker. On each cone the objective is a
/// quadratic whose minimizer is explicit; the optimum is the best candidate
/// that stays inside its own cone.
inline Vector prox_l1_by_enumeration(const SetFunction& f, const Vector& z, double lambda_f, double lambda_1)
{
    const std::size_t p = f.size();
    const auto table = value_table(f);
    const std::uint64_t marker = std::uint64_t{1} << p;
    const std::uint64_t full = (marker << 1) - 1;
    const std::uint64_t elems = marker - 1;
    auto objective = [&](const Vector& w) {
        return 0.5 * (w - z).squaredNorm() + lambda_f * subreg::level_set_integral(f, w) +
               lambda_1 * w.cwiseAbs().sum();
    };
    Vector best_w = Vector::Zero(static_cast<Eigen::Index>(p));
    double best = objective(best_w);
    Vector w = best_w;

    std::function<void(std::uint64_t, double, bool)> extend = [&](std::uint64_t prefix, double last_v, bool below_zero) {
        if (prefix == full) {
            const double obj = objective(w);
            if (obj < best) {
                best = obj;
                best_w = w;
            }
            return;
        }
        const std::uint64_t rest = full & ~prefix;
        for (std::uint64_t block = rest; block; block = (block - 1) & rest) {
            const std::uint64_t members = block & elems;
            const bool is_zero = (block & marker) != 0;
            double v = 0.0;
            if (!is_zero) {
                const double size = static_cast<double>(std::popcount(members));
                double zsum = 0.0;
                for (std::uint64_t r = members; r; r &= r - 1) zsum += z[std::countr_zero(r)];
                const double t = table[(prefix | block) & elems] - table[prefix & elems];
                const double sign = below_zero ? -1.0 : 1.0;
                v = (zsum - lambda_f * t - lambda_1 * sign * size) / size;
                if (below_zero ? !(v < 0.0) : !(v > 0.0)) continue;
            }
            if (!(v < last_v)) continue;
            for (std::uint64_t r = members; r; r &= r - 1) w[std::countr_zero(r)] = v;
            extend(prefix | block, v, below_zero || is_zero);
        }
    };
    extend(0, std::numeric_limits<double>::infinity(), false);
    return best_w;
}

// ---------------------------------------------------------------------------
// random instances

inline subreg::WeightedGraph random_graph(std::size_t p, std::mt19937_64& rng, double density = 0.5)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    subreg::WeightedGraph g(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            if (u(rng) < density) g.add_edge(static_cast<int>(i), static_cast<int>(j), 0.1 + 2.0 * u(rng));
    return g;
}

inline subreg::WeightedGraph random_chain(std::size_t p, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::vector<double> w(p - 1);
    for (auto& x : w) x = u(rng);
    return subreg::WeightedGraph::chain(w);
}

/// Concave profile from a decreasing zero-mean increment sequence.
inline subreg::CardinalityProfile random_profile(std::size_t p, std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    std::vector<double> d(p);
    for (auto& x : d) x = n(rng);
    std::sort(d.begin(), d.end(), std::greater<>());
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(p);
    std::vector<double> h(p + 1, 0.0);
    for (std::size_t k = 0; k < p; ++k) h[k + 1] = h[k] + d[k] - mean;
    h[p] = 0.0;
    for (auto& x : h) x = std::max(x, 0.0);
    return subreg::CardinalityProfile(std::move(h));
}

/// Submodular G: a random cut plus concave functions of random modular weights.
inline subreg::SetTable random_submodular_table(std::size_t p, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto g = random_graph(p, rng, 0.4);
    std::vector<Vector> weights(3, Vector(static_cast<Eigen::Index>(p)));
    for (auto& v : weights)
        for (auto& x : v) x = u(rng);
    std::vector<double> modular(p);
    for (auto& x : modular) x = 2.0 * u(rng) - 1.0;
    const std::uint64_t n = std::uint64_t{1} << p;
    std::vector<double> vals(n);
    for (std::uint64_t b = 0; b < n; ++b) {
        const auto a = SubsetMask::from_bits(p, b);
        double v = g.cut(a);
        v += std::sqrt(subreg::modular(weights[0], a));
        v += std::min(subreg::modular(weights[1], a), 1.0);
        v += std::log1p(subreg::modular(weights[2], a));
        for (std::size_t k = 0; k < p; ++k)
            if (a[k]) v += modular[k];
        vals[b] = v;
    }
    return subreg::SetTable(p, std::move(vals));
}

enum class Kind { chain_tv, cut, cardinality, noisy_cut, symmetrized, table };

inline const std::vector<Kind>& all_kinds()
{
    static const std::vector<Kind> kinds{Kind::chain_tv, Kind::cut, Kind::cardinality,
                                         Kind::noisy_cut, Kind::symmetrized, Kind::table};
    return kinds;
}

inline std::string kind_name(Kind k)
{
    switch (k) {
    case Kind::chain_tv: return "chain_tv";
    case Kind::cut: return "cut";
    case Kind::cardinality: return "cardinality";
    case Kind::noisy_cut: return "noisy_cut";
    case Kind::symmetrized: return "symmetrized";
    case Kind::table: return "table";
    }
    return "?";
}

inline SetFunction random_function(Kind kind, std::size_t p, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.2, 2.0);
    switch (kind) {
    case Kind::chain_tv: return SetFunction::cut(random_chain(p, rng));
    case Kind::cut: return SetFunction::cut(random_graph(p, rng));
    case Kind::cardinality: return SetFunction::cardinality(random_profile(p, rng));
    case Kind::noisy_cut: return SetFunction::noisy_cut(subreg::NoisyCutSpec(random_graph(p, rng), u(rng)));
    case Kind::symmetrized: return SetFunction::symmetrized(random_submodular_table(p, rng));
    case Kind::table: {
        // explicit table holding a symmetrized function
        const auto sym = SetFunction::symmetrized(random_submodular_table(p, rng));
        return SetFunction::table(subreg::SetTable(p, value_table(sym)));
    }
    }
    return SetFunction::chain_tv(p);
}

inline Vector random_vector(std::size_t p, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> n(0.0, scale);
    Vector v(static_cast<Eigen::Index>(p));
    for (auto& x : v) x = n(rng);
    return v;
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace oracle
