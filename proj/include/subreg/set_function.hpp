#pragma once

// Set-function oracles F : 2^V -> R with F(empty) = F(V) = 0, the five
// families (cut, cardinality, noisy cut, symmetrized, explicit table),
// minors of the form C -> F(B u C) - F(B), and brute-force axiom checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "maxflow.hpp"
#include "subset.hpp"

namespace subreg {

inline constexpr double kSetTol = 1e-9;

struct Edge {
    int i;
    int j;
    double weight;
};

/// Undirected graph with non-negative weights; each pair is stored once.
class WeightedGraph {
public:
    explicit WeightedGraph(std::size_t p) : p_(p), adj_(p)
    {
        if (p == 0) throw std::invalid_argument("graph must have at least one node");
    }

    WeightedGraph(std::size_t p, const std::vector<Edge>& edges) : WeightedGraph(p)
    {
        for (const auto& e : edges) add_edge(e.i, e.j, e.weight);
    }

    static WeightedGraph chain(std::size_t p, double weight = 1.0)
    {
        WeightedGraph g(p);
        for (std::size_t k = 0; k + 1 < p; ++k)
            g.add_edge(static_cast<int>(k), static_cast<int>(k + 1), weight);
        return g;
    }

    static WeightedGraph chain(const std::vector<double>& weights)
    {
        WeightedGraph g(weights.size() + 1);
        for (std::size_t k = 0; k < weights.size(); ++k)
            g.add_edge(static_cast<int>(k), static_cast<int>(k + 1), weights[k]);
        return g;
    }

    /// 4-neighbour grid, node (r, c) has index r * width + c.
    static WeightedGraph grid(std::size_t width, std::size_t height, double weight = 1.0)
    {
        WeightedGraph g(width * height);
        for (std::size_t r = 0; r < height; ++r)
            for (std::size_t c = 0; c < width; ++c) {
                const int i = static_cast<int>(r * width + c);
                if (c + 1 < width) g.add_edge(i, i + 1, weight);
                if (r + 1 < height) g.add_edge(i, i + static_cast<int>(width), weight);
            }
        return g;
    }

    void add_edge(int i, int j, double w)
    {
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= p_ || static_cast<std::size_t>(j) >= p_)
            throw std::out_of_range("edge endpoint out of range");
        if (i == j) throw std::invalid_argument("self loops are not allowed");
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("edge weights must be non-negative");
        const auto key = std::minmax(i, j);
        auto it = index_.find(key);
        if (it != index_.end()) {
            edges_[it->second].weight += w;
            rebuild_adjacency();
            return;
        }
        index_.emplace(key, edges_.size());
        edges_.push_back({key.first, key.second, w});
        adj_[key.first].push_back({key.second, w});
        adj_[key.second].push_back({key.first, w});
    }

    std::size_t size() const { return p_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::pair<int, double>>& neighbors(std::size_t i) const { return adj_[i]; }

    double cut(const SubsetMask& a) const
    {
        double c = 0.0;
        for (const auto& e : edges_)
            if (a[e.i] != a[e.j]) c += e.weight;
        return c;
    }

private:
    void rebuild_adjacency()
    {
        for (auto& a : adj_) a.clear();
        for (const auto& e : edges_) {
            adj_[e.i].push_back({e.j, e.weight});
            adj_[e.j].push_back({e.i, e.weight});
        }
    }

    std::size_t p_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::map<std::pair<int, int>, std::size_t> index_;
};

/// h[k] for k = 0..p; concave, non-negative, h[0] = h[p] = 0.
class CardinalityProfile {
public:
    explicit CardinalityProfile(std::vector<double> h) : h_(std::move(h))
    {
        if (h_.size() < 2) throw std::invalid_argument("cardinality profile needs p+1 >= 2 values");
        const std::size_t p = h_.size() - 1;
        if (std::abs(h_[0]) > kSetTol || std::abs(h_[p]) > kSetTol)
            throw std::invalid_argument("cardinality profile must satisfy h[0] = h[p] = 0");
        for (double v : h_)
            if (v < -kSetTol || !std::isfinite(v))
                throw std::invalid_argument("cardinality profile must be non-negative");
        for (std::size_t k = 1; k + 1 <= p; ++k)
            if ((h_[k + 1] - h_[k]) - (h_[k] - h_[k - 1]) > kSetTol)
                throw std::invalid_argument("cardinality profile must be concave");
    }

    /// h(k) = k (p - k)
    static CardinalityProfile quadratic(std::size_t p)
    {
        std::vector<double> h(p + 1);
        for (std::size_t k = 0; k <= p; ++k) h[k] = double(k) * double(p - k);
        return CardinalityProfile(std::move(h));
    }
    /// h(k) = 1 for 0 < k < p
    static CardinalityProfile range(std::size_t p)
    {
        std::vector<double> h(p + 1, 1.0);
        h.front() = h.back() = 0.0;
        return CardinalityProfile(std::move(h));
    }
    /// h(k) = min(k, p - k): one kink, so a single large level set in the middle
    static CardinalityProfile single_kink(std::size_t p)
    {
        std::vector<double> h(p + 1);
        for (std::size_t k = 0; k <= p; ++k)
            h[k] = std::min(double(k), double(p - k));
        return CardinalityProfile(std::move(h));
    }

    std::size_t size() const { return h_.size() - 1; }
    double operator()(std::size_t k) const { return h_[k]; }
    const std::vector<double>& values() const { return h_; }

private:
    std::vector<double> h_;
};

/// Hidden graph on W (node k of W paired with node k of V) and the
/// coefficient of the |A delta B| mismatch term.
struct NoisyCutSpec {
    WeightedGraph hidden_graph;
    double mismatch_penalty;

    NoisyCutSpec(WeightedGraph g, double penalty) : hidden_graph(std::move(g)), mismatch_penalty(penalty)
    {
        if (!(penalty >= 0.0) || !std::isfinite(penalty))
            throw std::invalid_argument("mismatch penalty must be non-negative");
    }
};

/// min_{B subset W} cut_W(B) + penalty |A delta B|, by a single min cut.
inline double eval_noisy_cut(const NoisyCutSpec& spec, const SubsetMask& a)
{
    const std::size_t p = spec.hidden_graph.size();
    if (a.size() != p) throw std::invalid_argument("subset dimension does not match noisy-cut ground set");
    const double mu = spec.mismatch_penalty;
    BinaryEnergy energy(static_cast<int>(p));
    double constant = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        if (a[k]) {
            energy.add_unary(static_cast<int>(k), -mu);
            constant += mu;
        } else {
            energy.add_unary(static_cast<int>(k), mu);
        }
    }
    for (const auto& e : spec.hidden_graph.edges()) energy.add_pairwise(e.i, e.j, e.weight);
    return std::max(0.0, energy.minimize().value + constant);
}

/// Raw table of 2^p values indexed by bitmask (bit i = element i); no
/// normalization is required. Used for the symmetrized family.
class SetTable {
public:
    SetTable(std::size_t p, std::vector<double> values) : p_(p), values_(std::move(values))
    {
        require_guard(p, 24, "set table");
        if (values_.size() != (std::size_t{1} << p))
            throw std::invalid_argument("set table must have 2^p entries");
    }
    std::size_t size() const { return p_; }
    double operator()(std::uint64_t bits) const { return values_[bits]; }
    double operator()(const SubsetMask& a) const { return values_[a.to_bits()]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t p_;
    std::vector<double> values_;
};

enum class Family { cut, cardinality, noisy_cut, symmetrized, table };

inline const char* family_name(Family f)
{
    switch (f) {
    case Family::cut: return "cut";
    case Family::cardinality: return "cardinality";
    case Family::noisy_cut: return "noisy_cut";
    case Family::symmetrized: return "symmetrized";
    case Family::table: return "table";
    }
    return "?";
}

/// Immutable set-function oracle. Copies share the payload.
class SetFunction {
public:
    static SetFunction cut(WeightedGraph g) { return SetFunction(Family::cut, std::move(g)); }
    static SetFunction chain_tv(std::size_t p, double weight = 1.0)
    {
        return cut(WeightedGraph::chain(p, weight));
    }
    static SetFunction cardinality(CardinalityProfile h)
    {
        return SetFunction(Family::cardinality, std::move(h));
    }
    static SetFunction noisy_cut(NoisyCutSpec spec)
    {
        return SetFunction(Family::noisy_cut, std::move(spec));
    }
    /// F(A) = G(A) + G(V \ A) - G(empty) - G(V)
    static SetFunction symmetrized(SetTable g) { return SetFunction(Family::symmetrized, std::move(g)); }
    static SetFunction table(SetTable f) { return SetFunction(Family::table, std::move(f)); }

    Family family() const { return family_; }
    std::size_t size() const { return p_; }

    double operator()(const SubsetMask& a) const { return eval(a); }

    double eval(const SubsetMask& a) const
    {
        if (a.size() != p_) throw std::invalid_argument("subset dimension does not match ground set");
        switch (family_) {
        case Family::cut: return graph().cut(a);
        case Family::cardinality: return profile()(a.count());
        case Family::noisy_cut: return eval_noisy_cut(noisy(), a);
        case Family::symmetrized: {
            const auto& g = table();
            const std::uint64_t full = (std::uint64_t{1} << p_) - 1;
            const std::uint64_t bits = a.to_bits();
            return g(bits) + g(full & ~bits) - g(std::uint64_t{0}) - g(full);
        }
        case Family::table: return table()(a);
        }
        return 0.0;
    }

    double eval_bits(std::uint64_t bits) const { return eval(SubsetMask::from_bits(p_, bits)); }

    const WeightedGraph& graph() const { return std::get<WeightedGraph>(*payload_); }
    const CardinalityProfile& profile() const { return std::get<CardinalityProfile>(*payload_); }
    const NoisyCutSpec& noisy() const { return std::get<NoisyCutSpec>(*payload_); }
    const SetTable& table() const { return std::get<SetTable>(*payload_); }

private:
    using Payload = std::variant<WeightedGraph, CardinalityProfile, NoisyCutSpec, SetTable>;

    template <class T>
    SetFunction(Family f, T payload) : family_(f), payload_(std::make_shared<const Payload>(std::move(payload)))
    {
        p_ = std::visit([](const auto& x) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, NoisyCutSpec>)
                return x.hidden_graph.size();
            else
                return x.size();
        }, *payload_);
        const double f0 = eval(SubsetMask(p_));
        const double fv = eval(SubsetMask(p_, true));
        if (std::abs(f0) > kSetTol || std::abs(fv) > kSetTol)
            throw std::invalid_argument(std::string(family_name(f)) +
                                        " set function must satisfy F(empty) = F(V) = 0");
    }

    Family family_;
    std::size_t p_ = 0;
    std::shared_ptr<const Payload> payload_;
};

/// G(C) = F(base u C) - F(base) for C a subset of `ground`, a set disjoint
/// from `base`. Local element k stands for global element ground[k].
/// Restriction keeps base, contraction by A moves A into base.
class Minor {
public:
    explicit Minor(const SetFunction& f)
        : f_(&f), base_(f.size()), base_value_(0.0)
    {
        ground_.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) ground_[i] = static_cast<int>(i);
    }

    Minor(const SetFunction& f, std::vector<int> ground, SubsetMask base)
        : f_(&f), ground_(std::move(ground)), base_(std::move(base))
    {
        for (int g : ground_)
            if (base_[g]) throw std::invalid_argument("minor ground set must be disjoint from its base");
        base_value_ = f_->eval(base_);
    }

    const SetFunction& function() const { return *f_; }
    std::size_t size() const { return ground_.size(); }
    const std::vector<int>& ground() const { return ground_; }
    const SubsetMask& base() const { return base_; }
    double base_value() const { return base_value_; }

    /// Global mask base u lift(local).
    SubsetMask lift(const SubsetMask& local) const
    {
        SubsetMask g = base_;
        for (std::size_t k = 0; k < ground_.size(); ++k)
            if (local[k]) g.insert(static_cast<std::size_t>(ground_[k]));
        return g;
    }

    double eval(const SubsetMask& local) const
    {
        if (local.size() != ground_.size()) throw std::invalid_argument("subset dimension does not match minor");
        return f_->eval(lift(local)) - base_value_;
    }

    Minor restrict_to(const SubsetMask& local) const
    {
        std::vector<int> g;
        for (std::size_t k = 0; k < ground_.size(); ++k)
            if (local[k]) g.push_back(ground_[k]);
        return Minor(*f_, std::move(g), base_);
    }

    Minor contract(const SubsetMask& local) const
    {
        std::vector<int> g;
        SubsetMask b = base_;
        for (std::size_t k = 0; k < ground_.size(); ++k) {
            if (local[k]) b.insert(static_cast<std::size_t>(ground_[k]));
            else g.push_back(ground_[k]);
        }
        return Minor(*f_, std::move(g), std::move(b));
    }

private:
    const SetFunction* f_;
    std::vector<int> ground_;
    SubsetMask base_;
    double base_value_;
};

struct AxiomReport {
    bool submodular = true;
    bool symmetric = true;
    bool nonnegative = true;
    std::optional<std::pair<SubsetMask, SubsetMask>> witness; // first submodularity violation
    std::optional<SubsetMask> asymmetric_witness;
    std::optional<SubsetMask> negative_witness;
};

/// Exhaustive check of submodularity (via the equivalent local condition
/// F(A+i) + F(A+j) >= F(A+i+j) + F(A)), symmetry and non-negativity.
inline AxiomReport check_axioms(const SetFunction& f, double tol = kSetTol)
{
    const std::size_t p = f.size();
    require_guard(p, 20, "check_axioms");
    const std::uint64_t n = std::uint64_t{1} << p;
    const std::uint64_t full = n - 1;
    std::vector<double> val(n);
    for (std::uint64_t b = 0; b < n; ++b) val[b] = f.eval_bits(b);

    AxiomReport r;
    for (std::uint64_t b = 0; b < n; ++b) {
        if (r.nonnegative && val[b] < -tol) {
            r.nonnegative = false;
            r.negative_witness = SubsetMask::from_bits(p, b);
        }
        if (r.symmetric && std::abs(val[b] - val[full & ~b]) > tol) {
            r.symmetric = false;
            r.asymmetric_witness = SubsetMask::from_bits(p, b);
        }
        if (!r.submodular) continue;
        for (std::size_t i = 0; i < p && r.submodular; ++i) {
            const std::uint64_t bi = std::uint64_t{1} << i;
            if (b & bi) continue;
            for (std::size_t j = i + 1; j < p; ++j) {
                const std::uint64_t bj = std::uint64_t{1} << j;
                if (b & bj) continue;
                if (val[b | bi] + val[b | bj] < val[b | bi | bj] + val[b] - tol) {
                    r.submodular = false;
                    r.witness = std::make_pair(SubsetMask::from_bits(p, b | bi), SubsetMask::from_bits(p, b | bj));
                    break;
                }
            }
        }
    }
    return r;
}

namespace detail {

// Connectivity of `members` (global indices) in the positive-weight graph.
inline bool connected_in(const WeightedGraph& g, const std::vector<int>& members)
{
    if (members.empty()) return false;
    std::vector<char> in(g.size(), 0), seen(g.size(), 0);
    for (int m : members) in[m] = 1;
    std::vector<int> stack{members.front()};
    seen[members.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& [v, w] : g.neighbors(u))
            if (w > 0.0 && in[v] && !seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
    }
    return reached == members.size();
}

} // namespace detail

/// A (local to the minor) is inseparable iff no non-trivial partition
/// A = B u C has G(A) = G(B) + G(C). For cuts this is connectivity.
inline bool is_inseparable(const Minor& g, const SubsetMask& a, double tol = kSetTol)
{
    const auto members = a.indices();
    if (members.empty()) throw std::invalid_argument("inseparability is defined for non-empty sets");
    if (members.size() == 1) return true;
    if (g.function().family() == Family::cut) {
        std::vector<int> global;
        for (int k : members) global.push_back(g.ground()[k]);
        return detail::connected_in(g.function().graph(), global);
    }
    require_guard(members.size(), 20, "is_inseparable");
    const double ga = g.eval(a);
    const std::size_t m = members.size();
    // subsets containing members[0] and missing at least one other element
    const std::uint64_t count = std::uint64_t{1} << (m - 1);
    for (std::uint64_t bits = 0; bits + 1 < count; ++bits) {
        SubsetMask b(g.size());
        b.insert(members[0]);
        for (std::size_t k = 1; k < m; ++k)
            if ((bits >> (k - 1)) & 1u) b.insert(members[k]);
        const SubsetMask c = a - b;
        if (std::abs(ga - g.eval(b) - g.eval(c)) <= tol) return false;
    }
    return true;
}

inline bool is_inseparable(const SetFunction& f, const SubsetMask& a, double tol = kSetTol)
{
    return is_inseparable(Minor(f), a, tol);
}

} // namespace subreg
