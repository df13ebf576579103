#pragma once

// Proximal operator  w = argmin 1/2 ||w - z||^2 + lambda f(w)  of the Lovasz
// extension: divide-and-conquer over SFMs, projection onto B(F) by the
// min-norm-point algorithm, isotonic regression for cardinality functions,
// dynamic programming for weighted 1-D total variation, the l1 composition
// and the lattice optimality certificate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lovasz.hpp"
#include "min_norm_point.hpp"
#include "set_function.hpp"
#include "sfm.hpp"
#include "types.hpp"

namespace subreg {

struct ProxProblem {
    SetFunction function;
    Vector z;
    double lambda;

    ProxProblem(SetFunction f, Vector z_, double lambda_) : function(std::move(f)), z(std::move(z_)), lambda(lambda_)
    {
        require_dimension(z, function.size(), "ProxProblem");
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("ProxProblem: lambda must be non-negative");
    }
};

struct ProxSolution {
    Vector w;
    Vector dual;              // s in B(F) with w = z - lambda s (zero when lambda = 0)
    OrderedPartition lattice; // maximal constant sets of w, totally ordered by value
    std::size_t sfm_calls = 0;
};

enum class ProxEngine { decomposition, mnp, fast };

/// Groups coordinates whose sorted values differ by at most tol and orders
/// the groups by decreasing value.
inline OrderedPartition extract_lattice(const Vector& w, double tol)
{
    const std::size_t p = static_cast<std::size_t>(w.size());
    if (p == 0) throw std::invalid_argument("extract_lattice: empty vector");
    const auto order = decreasing_order(w);
    std::vector<std::vector<int>> blocks{{order[0]}};
    for (std::size_t k = 1; k < p; ++k) {
        if (w[order[k - 1]] - w[order[k]] <= tol) blocks.back().push_back(order[k]);
        else blocks.push_back({order[k]});
    }
    return OrderedPartition::chain(p, std::move(blocks));
}

/// Tolerance for constant-set extraction: 1e-7 relative to ||z||_inf.
inline double lattice_tolerance(const Vector& z) { return 1e-7 * (z.size() ? z.cwiseAbs().maxCoeff() : 0.0); }

namespace detail {

inline ProxSolution finish_prox(const Vector& z, double lambda, Vector w, std::size_t calls)
{
    ProxSolution sol;
    sol.dual = lambda > 0.0 ? Vector((z - w) / lambda) : Vector(Vector::Zero(z.size()));
    sol.lattice = extract_lattice(w, lattice_tolerance(z));
    sol.w = std::move(w);
    sol.sfm_calls = calls;
    return sol;
}

inline ProxSolution identity_prox(const Vector& z)
{
    const std::size_t p = static_cast<std::size_t>(z.size());
    std::vector<std::vector<int>> blocks;
    for (int k : decreasing_order(z)) blocks.push_back({k});
    ProxSolution sol;
    sol.w = z;
    sol.dual = Vector::Zero(z.size());
    sol.lattice = OrderedPartition::chain(p, std::move(blocks));
    return sol;
}

} // namespace detail

/// Divide and conquer: on a piece S (a minor G of F), alpha = (z(S) -
/// lambda G(S)) / |S|; the minimal minimizer A of lambda G(C) - z(C) +
/// alpha |C| either certifies w = alpha on S or splits S into the
/// restriction to A and the contraction of A.
inline ProxSolution prox_decomposition(const ProxProblem& prob, SfmEngine engine = SfmEngine::dedicated)
{
    const std::size_t p = prob.function.size();
    const double lambda = prob.lambda;
    const Vector& z = prob.z;
    if (lambda == 0.0) return detail::identity_prox(z);

    Vector w(static_cast<Eigen::Index>(p));
    std::size_t calls = 0;
    const double scale = 1.0 + z.cwiseAbs().sum();
    std::vector<Minor> stack{Minor(prob.function)};
    while (!stack.empty()) {
        const Minor g = std::move(stack.back());
        stack.pop_back();
        const std::size_t n = g.size();
        Vector zs(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) zs[static_cast<Eigen::Index>(k)] = z[g.ground()[k]];
        const double gs = g.eval(SubsetMask(n, true));
        const double alpha = (zs.sum() - lambda * gs) / static_cast<double>(n);
        if (n == 1) {
            w[g.ground()[0]] = alpha;
            continue;
        }
        const Vector shifted = zs.array() - alpha;
        const auto r = minimize(g, shifted, lambda, engine);
        ++calls;
        const auto& a = r.minimal_minimizer;
        const std::size_t na = a.count();
        if (na == 0 || na == n || r.value >= -1e-12 * (scale + lambda * std::abs(gs))) {
            for (int v : g.ground()) w[v] = alpha;
            continue;
        }
        stack.push_back(g.contract(a));
        stack.push_back(g.restrict_to(a));
    }
    return detail::finish_prox(z, lambda, std::move(w), calls);
}

/// w = z - lambda * Proj_{B(F)}(z / lambda).
inline ProxSolution prox_via_mnp(const ProxProblem& prob, double tol = 1e-14)
{
    if (prob.lambda == 0.0) return detail::identity_prox(prob.z);
    const auto r = min_norm_point(prob.function, prob.z / prob.lambda, tol);
    return detail::finish_prox(prob.z, prob.lambda, prob.z - prob.lambda * r.s, 0);
}

/// Same, reusing the solver's corral from the previous call.
inline ProxSolution prox_via_mnp(MinNormPointSolver& solver, const Vector& z, double lambda)
{
    if (lambda == 0.0) return detail::identity_prox(z);
    const auto r = solver.project(z / lambda);
    return detail::finish_prox(z, lambda, z - lambda * r.s, 0);
}

/// Non-increasing isotonic regression (pool adjacent violators, unit weights).
inline std::vector<double> isotonic_decreasing(const std::vector<double>& y)
{
    struct Pool {
        double sum;
        std::size_t count;
        double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Pool> pools;
    for (double v : y) {
        pools.push_back({v, 1});
        while (pools.size() > 1 && pools[pools.size() - 2].mean() <= pools.back().mean()) {
            pools[pools.size() - 2].sum += pools.back().sum;
            pools[pools.size() - 2].count += pools.back().count;
            pools.pop_back();
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& pl : pools) out.insert(out.end(), pl.count, pl.mean());
    return out;
}

/// Cardinality-based F(A) = h(|A|): the solution keeps the order of z, so it
/// is the non-increasing isotonic fit of z_sorted - lambda (h(k) - h(k-1)).
inline ProxSolution prox_cardinality(const CardinalityProfile& h, const Vector& z, double lambda)
{
    const std::size_t p = h.size();
    require_dimension(z, p, "prox_cardinality");
    if (!(lambda >= 0.0)) throw std::invalid_argument("prox_cardinality: lambda must be non-negative");
    if (lambda == 0.0) return detail::identity_prox(z);
    const auto order = decreasing_order(z);
    std::vector<double> y(p);
    for (std::size_t k = 0; k < p; ++k) y[k] = z[order[k]] - lambda * (h(k + 1) - h(k));
    const auto fit = isotonic_decreasing(y);
    Vector w(static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < p; ++k) w[order[k]] = fit[k];
    return detail::finish_prox(z, lambda, std::move(w), 0);
}

/// Weighted 1-D total variation  sum_k weights[k] |w_{k+1} - w_k|  through
/// the decomposition on the chain graph (reference path).
inline ProxSolution prox_tv1d(const Vector& z, double lambda, const std::vector<double>& weights)
{
    const std::size_t p = static_cast<std::size_t>(z.size());
    if (weights.size() + 1 != p) throw std::invalid_argument("prox_tv1d: need p-1 edge weights");
    return prox_decomposition(ProxProblem(SetFunction::cut(WeightedGraph::chain(weights)), z, lambda));
}

inline ProxSolution prox_tv1d(const Vector& z, double lambda)
{
    return prox_tv1d(z, lambda, std::vector<double>(static_cast<std::size_t>(std::max<Eigen::Index>(z.size() - 1, 0)), 1.0));
}

namespace detail {

/// Forward pass on the derivative of the message function, backward
/// clipping. All entries of `lam` must be positive.
inline Vector tv1d_segment(const Vector& y, const std::vector<double>& lam)
{
    const std::size_t n = static_cast<std::size_t>(y.size());
    if (n == 1) return y;

    std::vector<double> x(2 * n), a(2 * n), b(2 * n), tm(n - 1), tp(n - 1);
    tm[0] = -lam[0] + y[0];
    tp[0] = lam[0] + y[0];
    std::size_t l = n - 1, r = n;
    x[l] = tm[0];
    x[r] = tp[0];
    a[l] = 1.0;
    b[l] = -y[0] + lam[0];
    a[r] = -1.0;
    b[r] = y[0] + lam[0];
    double afirst = 1.0, bfirst = -lam[0] - y[1], alast = -1.0, blast = -lam[0] + y[1];

    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double lk = lam[k];
        double alo = afirst, blo = bfirst;
        std::size_t lo = l;
        for (; lo <= r; ++lo) {
            if (alo * x[lo] + blo > -lk) break;
            alo += a[lo];
            blo += b[lo];
        }
        tm[k] = (-lk - blo) / alo;
        l = lo - 1;
        x[l] = tm[k];

        double ahi = alast, bhi = blast;
        std::size_t hi = r;
        for (; hi >= l; --hi) {
            if (-ahi * x[hi] - bhi < lk) break;
            ahi += a[hi];
            bhi += b[hi];
        }
        tp[k] = (lk + bhi) / (-ahi);
        r = hi + 1;
        x[r] = tp[k];

        a[l] = alo;
        b[l] = blo + lk;
        a[r] = ahi;
        b[r] = bhi + lk;
        afirst = 1.0;
        bfirst = -lk - y[static_cast<Eigen::Index>(k + 1)];
        alast = -1.0;
        blast = -lk + y[static_cast<Eigen::Index>(k + 1)];
    }

    double alo = afirst, blo = bfirst;
    for (std::size_t lo = l; lo <= r; ++lo) {
        if (alo * x[lo] + blo > 0.0) break;
        alo += a[lo];
        blo += b[lo];
    }
    Vector beta(static_cast<Eigen::Index>(n));
    beta[static_cast<Eigen::Index>(n - 1)] = -blo / alo;
    for (std::size_t k = n - 1; k-- > 0;) {
        const double next = beta[static_cast<Eigen::Index>(k + 1)];
        beta[static_cast<Eigen::Index>(k)] = next > tp[k] ? tp[k] : (next < tm[k] ? tm[k] : next);
    }
    return beta;
}

} // namespace detail

/// Direct O(p) dynamic programming for weighted 1-D total variation. Edges of
/// zero weight decouple the chain; each remaining segment is solved alone.
inline Vector tv1d_dp(const Vector& y, double lambda, const std::vector<double>& weights)
{
    const std::size_t n = static_cast<std::size_t>(y.size());
    if (n == 0) return y;
    if (weights.size() + 1 != n) throw std::invalid_argument("tv1d_dp: need p-1 edge weights");
    Vector out(y.size());
    std::size_t start = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k + 1 < n && lambda * weights[k] > 0.0) continue;
        const auto len = static_cast<Eigen::Index>(k + 1 - start);
        std::vector<double> lam(weights.begin() + static_cast<std::ptrdiff_t>(start),
                                weights.begin() + static_cast<std::ptrdiff_t>(k));
        for (auto& v : lam) v *= lambda;
        out.segment(static_cast<Eigen::Index>(start), len) =
            detail::tv1d_segment(y.segment(static_cast<Eigen::Index>(start), len), lam);
        start = k + 1;
    }
    return out;
}

/// Edge weights of a path graph 0-1-...-(p-1), if the graph is one.
inline std::optional<std::vector<double>> chain_weights(const WeightedGraph& g)
{
    if (g.size() < 2) return std::nullopt;
    std::vector<double> w(g.size() - 1, 0.0);
    for (const auto& e : g.edges()) {
        const int lo = std::min(e.i, e.j), hi = std::max(e.i, e.j);
        if (hi != lo + 1) return std::nullopt;
        w[static_cast<std::size_t>(lo)] += e.weight;
    }
    return w;
}

/// Family fast path: isotonic regression for cardinality functions, the
/// chain dynamic program for cuts on a path, the decomposition otherwise.
inline ProxSolution prox_fast(const ProxProblem& prob)
{
    const auto& f = prob.function;
    if (f.family() == Family::cardinality) return prox_cardinality(f.profile(), prob.z, prob.lambda);
    if (f.family() == Family::cut && prob.lambda > 0.0) {
        if (auto w = chain_weights(f.graph()))
            return detail::finish_prox(prob.z, prob.lambda, tv1d_dp(prob.z, prob.lambda, *w), 0);
    }
    return prox_decomposition(prob);
}

inline ProxSolution prox(const ProxProblem& prob, ProxEngine engine = ProxEngine::fast)
{
    switch (engine) {
    case ProxEngine::decomposition: return prox_decomposition(prob);
    case ProxEngine::mnp: return prox_via_mnp(prob);
    case ProxEngine::fast: return prox_fast(prob);
    }
    return prox_fast(prob);
}

/// argmin 1/2 ||w - z||^2 + lambda_f f(w) + lambda_1 ||w||_1 by soft-thresholding prox_{lambda_f f}(z).
inline Vector prox_l1_composed(const SetFunction& f, const Vector& z, double lambda_f, double lambda_1,
                               ProxEngine engine = ProxEngine::fast)
{
    if (!(lambda_1 >= 0.0)) throw std::invalid_argument("prox_l1_composed: lambda_1 must be non-negative");
    return soft_threshold(prox(ProxProblem(f, z, lambda_f), engine).w, lambda_1);
}

struct LatticeCertificate {
    Matrix M;  // p x m block indicators
    Vector t;  // t_i = F(A_0 u ... u A_i) - F(A_0 u ... u A_{i-1})
    Vector v;  // block values mean(z on A_i) - lambda t_i / |A_i|
};

inline LatticeCertificate lattice_certificate(const SetFunction& f, const Vector& z, double lambda,
                                              const OrderedPartition& part)
{
    const std::size_t p = f.size(), m = part.size();
    require_dimension(z, p, "lattice_certificate");
    if (part.ground_size() != p) throw std::invalid_argument("partition and set function differ in size");
    LatticeCertificate c{Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(m)),
                         Vector(static_cast<Eigen::Index>(m)), Vector(static_cast<Eigen::Index>(m))};
    double prev = 0.0;
    SubsetMask prefix(p);
    for (std::size_t i = 0; i < m; ++i) {
        double zsum = 0.0;
        for (int e : part.block(i)) {
            c.M(e, static_cast<Eigen::Index>(i)) = 1.0;
            prefix.insert(static_cast<std::size_t>(e));
            zsum += z[e];
        }
        const double cur = f.eval(prefix);
        const auto ii = static_cast<Eigen::Index>(i);
        c.t[ii] = cur - prev;
        prev = cur;
        const double size = static_cast<double>(part.block(i).size());
        c.v[ii] = zsum / size - lambda * c.t[ii] / size;
    }
    return c;
}

struct CertificateReport {
    bool order_ok = false;
    bool base_ok = false;
    Vector v;
    Vector w;
    bool ok() const { return order_ok && base_ok; }
};

/// Both flags true iff `part` is the lattice of the prox solution, which is
/// then w = M v.
inline CertificateReport certify_lattice(const SetFunction& f, const Vector& z, double lambda,
                                         const OrderedPartition& part, double tol = kSetTol)
{
    const auto c = lattice_certificate(f, z, lambda, part);
    CertificateReport r;
    r.v = c.v;
    r.w = c.M * c.v;
    r.order_ok = true;
    for (auto [i, j] : part.order()) // generators suffice: strict decrease is transitive
        if (!(c.v[i] - c.v[j] > tol)) {
            r.order_ok = false;
            break;
        }
    if (lambda > 0.0) r.base_ok = in_base_polyhedron(f, (z - r.w) / lambda, tol);
    else r.base_ok = (z - r.w).cwiseAbs().maxCoeff() <= tol;
    return r;
}

/// For a candidate w and threshold alpha, {w >= alpha} must minimize
/// lambda F(A) - z(A) + alpha |A|; returns the excess of its value over the
/// minimum.
inline double threshold_excess(const SetFunction& f, const Vector& z, double lambda, const Vector& w, double alpha,
                               SfmEngine engine = SfmEngine::dedicated)
{
    const std::size_t p = f.size();
    SubsetMask level(p);
    for (std::size_t k = 0; k < p; ++k)
        if (w[static_cast<Eigen::Index>(k)] >= alpha) level.insert(k);
    const Vector shifted = z.array() - alpha;
    const double at_level = lambda * f.eval(level) - modular(shifted, level);
    return at_level - minimize(f, shifted, lambda, engine).value;
}

} // namespace subreg
