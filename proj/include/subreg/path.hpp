#pragma once

// Regularization path of the proximal problem when it is agglomerative:
// block values are affine in lambda, colliding blocks merge or, when
// separable, cross, and each segment is certified by the lattice certificate. Also
// the exhaustive check of the agglomerativity condition
//   F(B u C) - F(B) >= |C|/|A| (F(B u A) - F(B))  for C in A,
// A inseparable for D -> F(B u D) - F(B).

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include "lovasz.hpp"
#include "prox.hpp"
#include "set_function.hpp"
#include "types.hpp"

namespace subreg {

struct MergeEvent {
    double lambda;
    int upper; // id of the block above
    int lower; // id of the block below
    int merged;
};

struct PathSegment {
    double lambda_lo;
    double lambda_hi; // +inf for the last segment
    std::vector<std::vector<int>> blocks; // top first at lambda_lo
    std::vector<int> ids;
    std::vector<double> intercepts; // mean of z on the block
    std::vector<double> slopes;     // -t_i / |A_i|
};

struct PathResult {
    std::vector<double> breakpoints; // strictly positive, increasing
    std::vector<MergeEvent> merges;  // includes merges of tied inputs at lambda = 0
    std::vector<PathSegment> segments;
    std::size_t p = 0;

    const PathSegment& segment_at(double lambda) const
    {
        if (!(lambda >= 0.0)) throw std::invalid_argument("path: lambda must be non-negative");
        for (const auto& s : segments)
            if (lambda <= s.lambda_hi) return s;
        return segments.back();
    }

    Vector evaluate(double lambda) const
    {
        const auto& s = segment_at(lambda);
        Vector w(static_cast<Eigen::Index>(p));
        for (std::size_t i = 0; i < s.blocks.size(); ++i)
            for (int e : s.blocks[i]) w[e] = s.intercepts[i] + s.slopes[i] * lambda;
        return w;
    }

    std::size_t blocks_at(double lambda) const { return segment_at(lambda).blocks.size(); }
};

struct PathOptions {
    bool certify = true;
    double tie_tol = 1e-12; // collisions within this relative distance merge in one event
};

inline PathResult prox_path_agglomerative(const SetFunction& f, const Vector& z, PathOptions opt = {})
{
    const std::size_t p = f.size();
    require_dimension(z, p, "prox_path_agglomerative");
    struct Block {
        std::vector<int> members;
        double sum;
        double t;
        int id;
        double mean() const { return sum / static_cast<double>(members.size()); }
        double slope() const { return -t / static_cast<double>(members.size()); }
    };

    std::vector<Block> blocks;
    {
        const auto order = decreasing_order(z);
        SubsetMask prefix(p);
        double prev = 0.0;
        int id = 0;
        for (std::size_t k = 0; k < p; ++k) {
            prefix.insert(static_cast<std::size_t>(order[k]));
            const double cur = f.eval(prefix);
            blocks.push_back({{order[k]}, z[order[k]], cur - prev, id++});
            prev = cur;
        }
    }
    int next_id = static_cast<int>(p);
    PathResult res;
    res.p = p;
    const double scale = 1.0 + z.cwiseAbs().maxCoeff();

    auto snapshot = [&](double lo) {
        PathSegment s{lo, std::numeric_limits<double>::infinity(), {}, {}, {}, {}};
        for (const auto& b : blocks) {
            auto m = b.members;
            std::sort(m.begin(), m.end());
            s.blocks.push_back(std::move(m));
            s.ids.push_back(b.id);
            s.intercepts.push_back(b.mean());
            s.slopes.push_back(b.slope());
        }
        return s;
    };

    // block members above position i, as a set
    auto above = [&](std::size_t i) {
        SubsetMask b(p);
        for (std::size_t k = 0; k < i; ++k)
            for (int e : blocks[k].members) b.insert(static_cast<std::size_t>(e));
        return b;
    };
    // a new segment is only needed when a merge or a slope change happened
    bool changed = true;
    auto close_segment = [&](double lo, double hi) {
        if (!changed && !res.segments.empty()) {
            res.segments.back().lambda_hi = hi;
            if (std::isfinite(hi)) res.breakpoints.back() = hi;
            return;
        }
        auto s = snapshot(lo);
        s.lambda_hi = hi;
        res.segments.push_back(std::move(s));
        if (std::isfinite(hi)) res.breakpoints.push_back(hi);
        changed = false;
    };

    double lambda = 0.0;
    while (blocks.size() > 1) {
        // earliest collision among order-adjacent blocks
        double best = std::numeric_limits<double>::infinity();
        std::size_t at = 0;
        for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
            const double gap0 = blocks[i].mean() - blocks[i + 1].mean();
            const double closing = blocks[i + 1].slope() - blocks[i].slope();
            double when = std::numeric_limits<double>::infinity();
            if (closing > 0.0)
                when = std::max(lambda, gap0 / closing);
            else if (closing == 0.0 && std::abs(gap0) <= 1e-14 * scale)
                when = lambda;
            if (when < best) {
                best = when;
                at = i;
            }
        }
        if (!std::isfinite(best)) break;
        if (best > lambda * (1.0 + opt.tie_tol) + opt.tie_tol) {
            close_segment(lambda, best);
            lambda = best;
        }

        // colliding blocks either cross (the lower one has the smaller
        // increment when placed first) or merge
        Block& up = blocks[at];
        Block& lo = blocks[at + 1];
        const SubsetMask b = above(at);
        SubsetMask bl = b;
        for (int e : lo.members) bl.insert(static_cast<std::size_t>(e));
        const double fb = f.eval(b);
        const double t_lo = f.eval(bl) - fb;
        const double t_up = up.t + lo.t - t_lo;
        const double nl = static_cast<double>(lo.members.size()), nu = static_cast<double>(up.members.size());
        const double tol = 1e-12 * (1.0 + std::abs(up.t) + std::abs(lo.t));
        if (t_lo / nl < t_up / nu - tol / std::min(nl, nu)) {
            if (std::abs(t_lo - lo.t) > tol) changed = true;
            lo.t = t_lo;
            up.t = t_up;
            std::swap(up, lo);
        } else {
            res.merges.push_back({lambda, up.id, lo.id, next_id});
            up.members.insert(up.members.end(), lo.members.begin(), lo.members.end());
            up.sum += lo.sum;
            up.t += lo.t;
            up.id = next_id++;
            blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(at) + 1);
            changed = true;
        }
    }
    close_segment(lambda, std::numeric_limits<double>::infinity());

    if (opt.certify) {
        for (const auto& s : res.segments) {
            const double mid = std::isfinite(s.lambda_hi) ? 0.5 * (s.lambda_lo + s.lambda_hi)
                                                          : (s.lambda_lo > 0.0 ? 2.0 * s.lambda_lo : 1.0);
            if (mid == 0.0) continue;
            // blocks may cross inside a segment, so order them by value at mid
            std::vector<std::size_t> idx(s.blocks.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return s.intercepts[a] + s.slopes[a] * mid > s.intercepts[b] + s.slopes[b] * mid;
            });
            std::vector<std::vector<int>> ordered;
            for (std::size_t i : idx) ordered.push_back(s.blocks[i]);
            const auto part = OrderedPartition::chain(p, ordered);
            const auto cert = certify_lattice(f, z, mid, part, 1e-9 * scale);
            if (!cert.ok())
                throw numerical_error("path certification failed at lambda = " + std::to_string(mid) +
                                      ": the function is not agglomerative for this input");
        }
    }
    return res;
}

struct AggloReport {
    bool holds = true;
    std::optional<std::tuple<SubsetMask, SubsetMask, SubsetMask>> witness; // (A, B, C)
    double worst_margin = 0.0;
};

/// F(B u C) - F(B) - |C|/|A| (F(B u A) - F(B))
inline double agglo_margin(const SetFunction& f, const SubsetMask& a, const SubsetMask& b, const SubsetMask& c)
{
    const double fb = f.eval(b);
    const double ratio = static_cast<double>(c.count()) / static_cast<double>(a.count());
    return f.eval(b | c) - fb - ratio * (f.eval(b | a) - fb);
}

/// One triple: C must be a subset of A, A and B disjoint.
inline AggloReport check_agglo_condition(const SetFunction& f, const SubsetMask& a, const SubsetMask& b,
                                         const SubsetMask& c, double tol = kSetTol)
{
    if ((a & b).count() != 0) throw std::invalid_argument("check_agglo_condition: A and B must be disjoint");
    if (!c.subset_of(a)) throw std::invalid_argument("check_agglo_condition: C must be a subset of A");
    if (a.count() == 0) throw std::invalid_argument("check_agglo_condition: A must be non-empty");
    AggloReport r;
    r.worst_margin = agglo_margin(f, a, b, c);
    r.holds = r.worst_margin >= -tol;
    if (!r.holds) r.witness = std::make_tuple(a, b, c);
    return r;
}

/// Worst margin over C in A for one (A, B) pair.
inline AggloReport check_agglo_condition(const SetFunction& f, const SubsetMask& a, const SubsetMask& b,
                                         double tol = kSetTol)
{
    const auto members = a.indices();
    require_guard(members.size(), 20, "check_agglo_condition");
    AggloReport r;
    r.worst_margin = std::numeric_limits<double>::infinity();
    const std::uint64_t total = std::uint64_t{1} << members.size();
    for (std::uint64_t bits = 1; bits + 1 < total; ++bits) {
        SubsetMask c(f.size());
        for (std::size_t k = 0; k < members.size(); ++k)
            if ((bits >> k) & 1u) c.insert(static_cast<std::size_t>(members[k]));
        const double m = agglo_margin(f, a, b, c);
        if (m < r.worst_margin) {
            r.worst_margin = m;
            r.witness = std::make_tuple(a, b, c);
        }
    }
    if (!std::isfinite(r.worst_margin)) r.worst_margin = 0.0;
    r.holds = r.worst_margin >= -tol;
    return r;
}

/// Exhaustive over disjoint (A, B) with A inseparable for D -> F(B u D) - F(B).
inline AggloReport check_agglo_condition(const SetFunction& f, double tol = kSetTol)
{
    const std::size_t p = f.size();
    require_guard(p, 12, "check_agglo_condition");
    const std::uint64_t n = std::uint64_t{1} << p, full = n - 1;
    std::vector<double> val(n);
    for (std::uint64_t s = 0; s < n; ++s) val[s] = f.eval_bits(s);

    AggloReport r;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (std::uint64_t b = 0; b < n; ++b) {
        const std::uint64_t rest = full & ~b;
        for (std::uint64_t a = rest; a; a = (a - 1) & rest) {
            const int na = std::popcount(a);
            if (na < 2) continue;
            const double ga = val[b | a] - val[b];
            // inseparability: no split a = d u (a \ d) with additive increments
            bool insep = true;
            const std::uint64_t low = a & (~a + 1);
            for (std::uint64_t d = (a - 1) & a; d; d = (d - 1) & a) {
                if (!(d & low)) continue;
                if (std::abs(ga - (val[b | d] - val[b]) - (val[b | (a & ~d)] - val[b])) <= tol) {
                    insep = false;
                    break;
                }
            }
            if (!insep) continue;
            for (std::uint64_t c = (a - 1) & a; c; c = (c - 1) & a) {
                const double m = val[b | c] - val[b] - static_cast<double>(std::popcount(c)) / na * ga;
                if (m < r.worst_margin) {
                    r.worst_margin = m;
                    r.witness = std::make_tuple(SubsetMask::from_bits(p, a), SubsetMask::from_bits(p, b),
                                                SubsetMask::from_bits(p, c));
                }
            }
        }
    }
    if (!std::isfinite(r.worst_margin)) r.worst_margin = 0.0;
    r.holds = r.worst_margin >= -tol;
    return r;
}

} // namespace subreg
