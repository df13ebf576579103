#pragma once

// Highest-label push-relabel maximum flow with the gap and global-relabel
// heuristics, over real capacities. After max_flow() the residual graph is
// kept so that both the minimal and the maximal minimum cut can be read off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace subreg {

class FlowNetwork {
public:
    explicit FlowNetwork(int nodes) : adj_(static_cast<std::size_t>(nodes))
    {
        if (nodes < 2) throw std::invalid_argument("flow network needs at least two nodes");
    }

    int nodes() const { return static_cast<int>(adj_.size()); }

    /// Adds arc from->to with capacity `cap` and reverse capacity `rev_cap`.
    void add_arc(int from, int to, double cap, double rev_cap = 0.0)
    {
        if (from < 0 || to < 0 || from >= nodes() || to >= nodes())
            throw std::out_of_range("arc endpoint out of range");
        if (!(cap >= 0.0) || !(rev_cap >= 0.0))
            throw std::invalid_argument("arc capacities must be non-negative");
        if (from == to) return;
        auto& a = adj_[static_cast<std::size_t>(from)];
        auto& b = adj_[static_cast<std::size_t>(to)];
        a.push_back({to, static_cast<int>(b.size()), cap});
        b.push_back({from, static_cast<int>(a.size()) - 1, rev_cap});
        max_cap_ = std::max({max_cap_, cap, rev_cap});
    }

    double max_flow(int source, int sink)
    {
        if (source == sink) throw std::invalid_argument("source and sink must differ");
        source_ = source;
        sink_ = sink;
        const int n = nodes();
        eps_ = 1e-14 * std::max(1.0, max_cap_);

        label_.assign(n, 0);
        excess_.assign(n, 0.0);
        current_.assign(n, 0);
        count_.assign(2 * n + 2, 0);
        buckets_.assign(2 * n + 2, {});
        queued_.assign(n, 0);
        highest_ = 0;

        for (auto& a : adj_[source]) {
            if (a.cap <= 0.0) continue;
            const double f = a.cap;
            a.cap -= f;
            adj_[a.to][a.rev].cap += f;
            excess_[a.to] += f;
            excess_[source] -= f;
        }
        // labels after saturation, so that excess can find its way back to the source
        global_relabel();
        rebuild_buckets();

        std::size_t work = 0;
        const std::size_t relabel_period = 6 * static_cast<std::size_t>(n) + arcs();
        while (true) {
            while (highest_ >= 0 && buckets_[highest_].empty()) --highest_;
            if (highest_ < 0) break;
            const int u = buckets_[highest_].back();
            buckets_[highest_].pop_back();
            if (label_[u] != highest_) {
                // stale entry after a gap relabel
                if (label_[u] < 2 * n) push_bucket(u);
                else queued_[u] = 0;
                continue;
            }
            queued_[u] = 0;
            work += discharge(u);
            if (work > relabel_period) {
                work = 0;
                global_relabel();
                rebuild_buckets();
            }
        }
        return excess_[sink];
    }

    /// Nodes reachable from the source in the residual graph (minimal source side).
    std::vector<char> minimal_source_side(double tol = 1e-10) const
    {
        const double thr = tol * std::max(1.0, max_cap_);
        std::vector<char> seen(adj_.size(), 0);
        std::vector<int> stack{source_};
        seen[source_] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& a : adj_[u])
                if (a.cap > thr && !seen[a.to]) {
                    seen[a.to] = 1;
                    stack.push_back(a.to);
                }
        }
        return seen;
    }

    /// Complement of the nodes that can still reach the sink (maximal source side).
    std::vector<char> maximal_source_side(double tol = 1e-10) const
    {
        const double thr = tol * std::max(1.0, max_cap_);
        std::vector<char> reach(adj_.size(), 0);
        std::vector<int> stack{sink_};
        reach[sink_] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const auto& a : adj_[v]) {
                // residual arc a.to -> v is the reverse of a
                const auto& back = adj_[a.to][a.rev];
                if (back.cap > thr && !reach[a.to]) {
                    reach[a.to] = 1;
                    stack.push_back(a.to);
                }
            }
        }
        for (auto& r : reach) r = r ? 0 : 1;
        return reach;
    }

private:
    struct Arc {
        int to;
        int rev;
        double cap; // residual capacity
    };

    std::size_t arcs() const
    {
        std::size_t m = 0;
        for (const auto& a : adj_) m += a.size();
        return m;
    }

    void push_bucket(int u)
    {
        buckets_[label_[u]].push_back(u);
        queued_[u] = 1;
        highest_ = std::max(highest_, label_[u]);
    }

    void activate(int u)
    {
        if (u == source_ || u == sink_ || queued_[u]) return;
        if (excess_[u] > eps_ && label_[u] < 2 * nodes()) push_bucket(u);
    }

    void set_label(int u, int l)
    {
        if (label_[u] < static_cast<int>(count_.size())) --count_[label_[u]];
        label_[u] = l;
        if (l < static_cast<int>(count_.size())) ++count_[l];
    }

    // Exact distance labels: BFS to the sink, then to the source for nodes
    // that cannot reach the sink.
    void global_relabel()
    {
        const int n = nodes();
        std::fill(count_.begin(), count_.end(), 0);
        std::vector<int> dist(n, -1);
        auto bfs = [&](int root, int base) {
            std::vector<int> queue{root};
            dist[root] = base;
            for (std::size_t h = 0; h < queue.size(); ++h) {
                const int v = queue[h];
                for (const auto& a : adj_[v]) {
                    const auto& back = adj_[a.to][a.rev];
                    if (back.cap > eps_ && dist[a.to] < 0) {
                        dist[a.to] = dist[v] + 1;
                        queue.push_back(a.to);
                    }
                }
            }
        };
        bfs(sink_, 0);
        dist[source_] = -1;
        bfs(source_, n);
        for (int u = 0; u < n; ++u) {
            int l = dist[u] < 0 ? 2 * n : std::min(dist[u], 2 * n);
            if (u == source_) l = n;
            if (u == sink_) l = 0;
            label_[u] = l;
            ++count_[l];
            current_[u] = 0;
        }
    }

    void rebuild_buckets()
    {
        for (auto& b : buckets_) b.clear();
        std::fill(queued_.begin(), queued_.end(), 0);
        highest_ = 0;
        for (int u = 0; u < nodes(); ++u) activate(u);
    }

    std::size_t discharge(int u)
    {
        const int n = nodes();
        std::size_t work = 0;
        auto& arcs_u = adj_[u];
        while (excess_[u] > eps_) {
            if (current_[u] >= static_cast<int>(arcs_u.size())) {
                relabel(u);
                work += arcs_u.size() + 12;
                if (label_[u] >= 2 * n) break;
                continue;
            }
            auto& a = arcs_u[current_[u]];
            if (a.cap > eps_ && label_[u] == label_[a.to] + 1) {
                const double f = std::min(excess_[u], a.cap);
                a.cap -= f;
                adj_[a.to][a.rev].cap += f;
                excess_[u] -= f;
                excess_[a.to] += f;
                activate(a.to);
            } else {
                ++current_[u];
            }
        }
        if (excess_[u] > eps_ && label_[u] < 2 * n && !queued_[u]) push_bucket(u);
        return work;
    }

    void relabel(int u)
    {
        const int n = nodes();
        const int old = label_[u];
        int best = 2 * n;
        for (const auto& a : adj_[u])
            if (a.cap > eps_) best = std::min(best, label_[a.to] + 1);
        best = std::min(best, 2 * n);
        set_label(u, best);
        current_[u] = 0;
        // gap: no node left at level `old` below n, so nodes above it cannot
        // reach the sink any more
        if (old < n && count_[old] == 0) {
            for (int v = 0; v < n; ++v) {
                if (v == source_) continue;
                if (label_[v] > old && label_[v] < n) {
                    set_label(v, n + 1);
                    current_[v] = 0;
                }
            }
        }
    }

    std::vector<std::vector<Arc>> adj_;
    double max_cap_ = 0.0;
    double eps_ = 0.0;
    int source_ = 0, sink_ = 1;
    std::vector<int> label_, current_, count_;
    std::vector<double> excess_;
    std::vector<std::vector<int>> buckets_;
    std::vector<char> queued_;
    int highest_ = 0;
};

/// Pairwise binary energy  E(x) = sum_i c_i x_i + sum_(i,j) w_ij [x_i != x_j],
/// w_ij >= 0, minimized by one s-t cut (x_i = 1 on the source side).
class BinaryEnergy {
public:
    struct Minimum {
        std::vector<char> minimal; // smallest minimizer
        std::vector<char> maximal; // largest minimizer
        double value;
    };

    explicit BinaryEnergy(int n) : unary_(static_cast<std::size_t>(n), 0.0) {}

    int size() const { return static_cast<int>(unary_.size()); }
    void add_unary(int i, double c) { unary_[static_cast<std::size_t>(i)] += c; }
    void add_pairwise(int i, int j, double w)
    {
        if (w < 0.0) throw std::invalid_argument("pairwise weight must be non-negative");
        if (w > 0.0 && i != j) pairs_.push_back({i, j, w});
    }

    Minimum minimize() const
    {
        const int n = size();
        const int s = n, t = n + 1;
        FlowNetwork net(n + 2);
        double offset = 0.0;
        for (int i = 0; i < n; ++i) {
            const double c = unary_[i];
            if (c > 0.0) net.add_arc(i, t, c);
            else if (c < 0.0) {
                net.add_arc(s, i, -c);
                offset += c;
            }
        }
        for (const auto& e : pairs_) net.add_arc(e.i, e.j, e.w, e.w);
        const double flow = net.max_flow(s, t);
        auto lo = net.minimal_source_side();
        auto hi = net.maximal_source_side();
        lo.resize(n);
        hi.resize(n);
        return {std::move(lo), std::move(hi), flow + offset};
    }

    double evaluate(const std::vector<char>& x) const
    {
        double e = 0.0;
        for (std::size_t i = 0; i < unary_.size(); ++i)
            if (x[i]) e += unary_[i];
        for (const auto& p : pairs_)
            if (x[p.i] != x[p.j]) e += p.w;
        return e;
    }

private:
    struct Pair {
        int i, j;
        double w;
    };
    std::vector<double> unary_;
    std::vector<Pair> pairs_;
};

} // namespace subreg
