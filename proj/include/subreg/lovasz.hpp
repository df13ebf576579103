#pragma once

// Lovasz extension, the greedy algorithm on the base polyhedron B(F),
// membership tests, extreme points of the unit ball {f <= 1} restricted to
// the zero-sum hyperplane, and ordered partitions with their face checks.

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "set_function.hpp"
#include "sfm.hpp"
#include "types.hpp"

namespace subreg {

struct GreedyResult {
    Vector s;               // vertex of B(F) maximizing w^T s
    std::vector<int> order; // w[order[0]] >= w[order[1]] >= ...
};

/// Indices sorted by decreasing value, ties broken by increasing index.
inline std::vector<int> decreasing_order(const Vector& w)
{
    std::vector<int> order(static_cast<std::size_t>(w.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] > w[b]; });
    return order;
}

inline GreedyResult greedy(const SetFunction& f, const Vector& w)
{
    const std::size_t p = f.size();
    require_dimension(w, p, "greedy");
    GreedyResult r{Vector::Zero(static_cast<Eigen::Index>(p)), decreasing_order(w)};
    switch (f.family()) {
    case Family::cut: {
        const auto& g = f.graph();
        std::vector<char> in(p, 0);
        for (int j : r.order) {
            double delta = 0.0;
            for (const auto& [k, wt] : g.neighbors(j)) delta += in[k] ? -wt : wt;
            r.s[j] = delta;
            in[j] = 1;
        }
        break;
    }
    case Family::cardinality: {
        const auto& h = f.profile();
        for (std::size_t k = 0; k < p; ++k) r.s[r.order[k]] = h(k + 1) - h(k);
        break;
    }
    default: {
        SubsetMask a(p);
        double prev = 0.0;
        for (int j : r.order) {
            a.insert(static_cast<std::size_t>(j));
            const double cur = f.eval(a);
            r.s[j] = cur - prev;
            prev = cur;
        }
    }
    }
    return r;
}

/// f(w) = integral of F({w >= alpha}) over alpha, summed exactly over the
/// gaps between consecutive distinct values of w.
inline double level_set_integral(const SetFunction& f, const Vector& w)
{
    const std::size_t p = f.size();
    require_dimension(w, p, "level_set_integral");
    const auto order = decreasing_order(w);
    SubsetMask level(p);
    double total = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        level.insert(static_cast<std::size_t>(order[k]));
        if (k + 1 < p && w[order[k]] != w[order[k + 1]])
            total += f.eval(level) * (w[order[k]] - w[order[k + 1]]);
    }
    return total;
}

/// f(w) = sum_k F(S_k) (w_k - w_{k+1}) + min(w) F(V) over the decreasing
/// level sets S_k; equals greedy(f, w).s.dot(w) and is exact on indicators.
inline double lovasz_extension(const SetFunction& f, const Vector& w)
{
    const double top = level_set_integral(f, w);
    if (w.size() == 0) return top;
    const double fv = f.eval(SubsetMask(f.size(), true));
    return fv == 0.0 ? top : top + w.minCoeff() * fv;
}

/// s(V) = F(V) and s(A) <= F(A) + tol for all A. Exhaustive up to p = 20,
/// above that through min_A F(A) - s(A) computed by the family's SFM engine.
inline bool in_base_polyhedron(const SetFunction& f, const Vector& s, double tol = kSetTol)
{
    const std::size_t p = f.size();
    require_dimension(s, p, "in_base_polyhedron");
    if (std::abs(s.sum() - f.eval(SubsetMask(p, true))) > tol) return false;
    if (p <= 20) {
        const std::uint64_t total = std::uint64_t{1} << p;
        std::vector<double> partial(total, 0.0);
        for (std::uint64_t b = 1; b < total; ++b) {
            const int low = std::countr_zero(b);
            partial[b] = partial[b & (b - 1)] + s[low];
            if (partial[b] > f.eval_bits(b) + tol) return false;
        }
        return true;
    }
    return minimize(f, s, 1.0).value >= -tol;
}

struct ExtremePoint {
    SubsetMask generating_set;
    Vector coordinates; // projection of 1_A / F(A) onto {w^T 1 = 0}
};

struct ExtremePointSet {
    std::vector<ExtremePoint> points;
    std::vector<SubsetMask> degenerate; // proper A with F(A) = 0, skipped
};

inline ExtremePointSet extreme_points(const SetFunction& f, double tol = kSetTol)
{
    const std::size_t p = f.size();
    require_guard(p, 16, "extreme_points");
    ExtremePointSet out;
    const std::uint64_t total = std::uint64_t{1} << p;
    for (std::uint64_t b = 1; b + 1 < total; ++b) {
        const auto a = SubsetMask::from_bits(p, b);
        const double fa = f.eval(a);
        if (fa <= tol) {
            out.degenerate.push_back(a);
            continue;
        }
        if (!is_inseparable(f, a, tol)) continue;
        const Minor rest(f, a.complement().indices(), a);
        if (!is_inseparable(rest, SubsetMask(rest.size(), true), tol)) continue;
        Vector x = indicator(a) / fa;
        x.array() -= x.mean();
        out.points.push_back({a, std::move(x)});
    }
    return out;
}

/// Blocks A_0..A_{m-1} partitioning V with a strict partial order; the pair
/// (i, j) means values on A_i exceed values on A_j. Blocks are indexed
/// topologically with higher blocks first (i above j implies i < j).
class OrderedPartition {
public:
    OrderedPartition() = default;

    OrderedPartition(std::size_t p, std::vector<std::vector<int>> blocks, std::vector<std::pair<int, int>> order)
        : p_(p), blocks_(std::move(blocks)), order_(std::move(order))
    {
        const std::size_t m = blocks_.size();
        if (m == 0) throw std::invalid_argument("ordered partition needs at least one block");
        block_of_.assign(p_, -1);
        for (std::size_t j = 0; j < m; ++j) {
            if (blocks_[j].empty()) throw std::invalid_argument("ordered partition has an empty block");
            std::sort(blocks_[j].begin(), blocks_[j].end());
            for (int e : blocks_[j]) {
                if (e < 0 || static_cast<std::size_t>(e) >= p_)
                    throw std::invalid_argument("ordered partition element out of range");
                if (block_of_[e] >= 0) throw std::invalid_argument("ordered partition blocks overlap");
                block_of_[e] = static_cast<int>(j);
            }
        }
        for (int b : block_of_)
            if (b < 0) throw std::invalid_argument("ordered partition blocks do not cover V");
        std::vector<char> chain_link(m, 0);
        for (auto [i, j] : order_) {
            if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= m || static_cast<std::size_t>(j) >= m)
                throw std::invalid_argument("order relation refers to a missing block");
            if (i >= j) throw std::invalid_argument("order relation must follow topological indexing (i above j => i < j)");
            if (j == i + 1) chain_link[j] = 1;
        }
        total_ = true;
        for (std::size_t j = 1; j < m; ++j) total_ = total_ && chain_link[j];
        if (total_) return; // closure is i < j, no matrix needed
        above_.assign(m, std::vector<char>(m, 0));
        std::vector<std::vector<int>> below(m);
        for (auto [i, j] : order_) below[i].push_back(j);
        // closure by reverse topological sweep
        for (std::size_t i = m; i-- > 0;)
            for (int j : below[i]) {
                above_[i][j] = 1;
                for (std::size_t k = 0; k < m; ++k)
                    if (above_[j][k]) above_[i][k] = 1;
            }
    }

    /// Total order: blocks[0] > blocks[1] > ...
    static OrderedPartition chain(std::size_t p, std::vector<std::vector<int>> blocks)
    {
        std::vector<std::pair<int, int>> order;
        for (std::size_t j = 1; j < blocks.size(); ++j)
            order.emplace_back(static_cast<int>(j - 1), static_cast<int>(j));
        return OrderedPartition(p, std::move(blocks), std::move(order));
    }

    std::size_t ground_size() const { return p_; }
    std::size_t size() const { return blocks_.size(); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    const std::vector<int>& block(std::size_t j) const { return blocks_[j]; }
    const std::vector<std::pair<int, int>>& order() const { return order_; }
    int block_of(std::size_t element) const { return block_of_[element]; }
    bool above(std::size_t i, std::size_t j) const { return total_ ? i < j : above_[i][j] != 0; }

    std::vector<std::pair<int, int>> closure_pairs() const
    {
        std::vector<std::pair<int, int>> r;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                if (above(i, j)) r.emplace_back(static_cast<int>(i), static_cast<int>(j));
        return r;
    }

    bool is_total() const { return total_; }

    SubsetMask block_mask(std::size_t j) const { return SubsetMask::from_indices(p_, blocks_[j]); }

    /// Union of the blocks strictly above A_j.
    SubsetMask ancestors_mask(std::size_t j) const
    {
        SubsetMask a(p_);
        for (std::size_t i = 0; i < size(); ++i)
            if (above(i, j))
                for (int e : blocks_[i]) a.insert(static_cast<std::size_t>(e));
        return a;
    }

    /// A_0 u ... u A_{j-1}
    SubsetMask prefix_mask(std::size_t j) const
    {
        SubsetMask a(p_);
        for (std::size_t i = 0; i < j; ++i)
            for (int e : blocks_[i]) a.insert(static_cast<std::size_t>(e));
        return a;
    }

    /// Up-closed unions of blocks: the allowed level sets {w >= alpha}.
    std::vector<SubsetMask> ideals(std::size_t limit = 4096) const
    {
        std::vector<SubsetMask> out;
        std::vector<char> chosen(size(), 0);
        std::function<void(std::size_t)> rec = [&](std::size_t j) {
            if (out.size() > limit) throw guard_error("lattice has more ideals than the enumeration guard");
            if (j == size()) {
                SubsetMask a(p_);
                for (std::size_t i = 0; i < size(); ++i)
                    if (chosen[i])
                        for (int e : blocks_[i]) a.insert(static_cast<std::size_t>(e));
                out.push_back(std::move(a));
                return;
            }
            chosen[j] = 0;
            rec(j + 1);
            for (std::size_t i = 0; i < j; ++i)
                if (above(i, j) && !chosen[i]) return;
            chosen[j] = 1;
            rec(j + 1);
            chosen[j] = 0;
        };
        rec(0);
        return out;
    }

    /// Unordered partition equality together with order relations of *this
    /// holding in `other` (matched by block contents).
    bool same_blocks(const OrderedPartition& other) const
    {
        if (other.size() != size() || other.p_ != p_) return false;
        std::set<std::vector<int>> a(blocks_.begin(), blocks_.end()), b(other.blocks_.begin(), other.blocks_.end());
        return a == b;
    }

private:
    std::size_t p_ = 0;
    std::vector<std::vector<int>> blocks_;
    std::vector<std::pair<int, int>> order_;
    std::vector<int> block_of_;
    std::vector<std::vector<char>> above_;
    bool total_ = false;
};

struct FaceLatticeReport {
    bool modular_on_lattice = true;
    bool blocks_inseparable = true;
    std::optional<bool> maximal;
};

namespace detail {

inline bool modular_on_ideals(const SetFunction& f, const OrderedPartition& part, double tol)
{
    if (part.is_total()) return true; // a chain of sets is always modular
    const auto ideals = part.ideals(1024);
    std::vector<double> val(ideals.size());
    for (std::size_t k = 0; k < ideals.size(); ++k) val[k] = f.eval(ideals[k]);
    for (std::size_t a = 0; a < ideals.size(); ++a)
        for (std::size_t b = a + 1; b < ideals.size(); ++b) {
            if (ideals[a].subset_of(ideals[b]) || ideals[b].subset_of(ideals[a])) continue;
            const double lhs = val[a] + val[b];
            const double rhs = f.eval(ideals[a] | ideals[b]) + f.eval(ideals[a] & ideals[b]);
            if (std::abs(lhs - rhs) > tol) return false;
        }
    return true;
}

inline bool blocks_inseparable(const SetFunction& f, const OrderedPartition& part, double tol)
{
    for (std::size_t j = 0; j < part.size(); ++j) {
        const Minor g(f, part.block(j), part.ancestors_mask(j));
        if (!is_inseparable(g, SubsetMask(g.size(), true), tol)) return false;
    }
    return true;
}

} // namespace detail

/// (i) F modular on the lattice of ideals, (ii) every block inseparable for
/// C -> F(B u C) - F(B) with B its ancestors, (iii) optionally: no lattice
/// with the same blocks and strictly fewer order relations satisfies (i)
/// and (ii).
inline FaceLatticeReport check_face_lattice(const SetFunction& f, const OrderedPartition& part,
                                            bool check_maximal = false, double tol = kSetTol)
{
    if (part.ground_size() != f.size()) throw std::invalid_argument("partition and set function differ in size");
    FaceLatticeReport r;
    r.modular_on_lattice = detail::modular_on_ideals(f, part, tol);
    r.blocks_inseparable = detail::blocks_inseparable(f, part, tol);
    if (!check_maximal) return r;

    require_guard(f.size(), 8, "check_face_lattice maximality");
    const auto pairs = part.closure_pairs();
    require_guard(pairs.size(), 20, "check_face_lattice maximality (order relations)");
    const std::size_t m = part.size();
    const std::uint64_t total = std::uint64_t{1} << pairs.size();
    bool maximal = true;
    for (std::uint64_t keep = 0; keep + 1 < total && maximal; ++keep) {
        std::vector<std::vector<char>> rel(m, std::vector<char>(m, 0));
        std::vector<std::pair<int, int>> sub;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if ((keep >> k) & 1u) {
                rel[pairs[k].first][pairs[k].second] = 1;
                sub.push_back(pairs[k]);
            }
        bool transitive = true;
        for (std::size_t a = 0; a < m && transitive; ++a)
            for (std::size_t b = 0; b < m && transitive; ++b)
                if (rel[a][b])
                    for (std::size_t c = 0; c < m; ++c)
                        if (rel[b][c] && !rel[a][c]) {
                            transitive = false;
                            break;
                        }
        if (!transitive) continue;
        const OrderedPartition weaker(part.ground_size(), part.blocks(), sub);
        if (detail::modular_on_ideals(f, weaker, tol) && detail::blocks_inseparable(f, weaker, tol)) maximal = false;
    }
    r.maximal = maximal;
    return r;
}

} // namespace subreg
