#pragma once

// Level-set recovery for z = w* + sigma eps: the constants eta_j, nu and the
// admissible lambda, the probability lower bound, Monte-Carlo estimates of
// the recovery rate, the 2-D total-variation counterexample search, the
// concentration check for max_A s(A)/F(A), and the robust-TV experiment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "lovasz.hpp"
#include "prox.hpp"
#include "set_function.hpp"
#include "types.hpp"

namespace subreg {

/// Piecewise-constant target: values[j] on block j of `partition`.
class GroundTruth {
public:
    GroundTruth(OrderedPartition partition, std::vector<double> values)
        : partition_(std::move(partition)), values_(std::move(values))
    {
        if (values_.size() != partition_.size())
            throw std::invalid_argument("GroundTruth: one value per block is required");
        for (auto [i, j] : partition_.order())
            if (!(values_[i] > values_[j]))
                throw std::invalid_argument("GroundTruth: values must decrease along the order");
        w_ = Vector(static_cast<Eigen::Index>(partition_.ground_size()));
        for (std::size_t j = 0; j < partition_.size(); ++j)
            for (int e : partition_.block(j)) w_[e] = values_[j];
    }

    /// Blocks given in any order; sorted by decreasing value and totally ordered.
    static GroundTruth piecewise(std::size_t p, const std::vector<std::vector<int>>& blocks,
                                 const std::vector<double>& values)
    {
        if (blocks.size() != values.size()) throw std::invalid_argument("GroundTruth: one value per block is required");
        std::vector<std::size_t> idx(blocks.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
        std::vector<std::vector<int>> sorted;
        std::vector<double> vals;
        for (auto k : idx) {
            sorted.push_back(blocks[k]);
            vals.push_back(values[k]);
        }
        return GroundTruth(OrderedPartition::chain(p, std::move(sorted)), std::move(vals));
    }

    /// Contiguous blocks of a chain with the given lengths and values.
    static GroundTruth chain_blocks(const std::vector<std::size_t>& lengths, const std::vector<double>& values)
    {
        std::vector<std::vector<int>> blocks;
        int next = 0;
        for (auto len : lengths) {
            std::vector<int> b;
            for (std::size_t k = 0; k < len; ++k) b.push_back(next++);
            blocks.push_back(std::move(b));
        }
        return piecewise(static_cast<std::size_t>(next), blocks, values);
    }

    const OrderedPartition& partition() const { return partition_; }
    const std::vector<double>& values() const { return values_; }
    const Vector& w() const { return w_; }
    std::size_t size() const { return partition_.ground_size(); }
    /// B_j = A_0 u ... u A_j
    SubsetMask prefix(std::size_t j) const { return partition_.prefix_mask(j + 1); }

private:
    OrderedPartition partition_;
    std::vector<double> values_;
    Vector w_;
};

/// eta_j = min over non-trivial C in A_j of
///   [F(B_{j-1} u C) - F(B_{j-1}) - |C|/|A_j| (F(B_j) - F(B_{j-1}))] / min(|C|/|A_j|, 1 - |C|/|A_j|),
/// +inf for singleton blocks.
inline std::vector<double> compute_eta(const SetFunction& f, const GroundTruth& truth)
{
    const auto& part = truth.partition();
    if (part.ground_size() != f.size()) throw std::invalid_argument("compute_eta: size mismatch");
    std::vector<double> eta(part.size(), std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < part.size(); ++j) {
        const auto& a = part.block(j);
        if (a.size() == 1) continue;
        require_guard(a.size(), 20, "compute_eta");
        const SubsetMask before = part.prefix_mask(j);
        const double fb = f.eval(before);
        const double inc = f.eval(part.prefix_mask(j + 1)) - fb;
        const double na = static_cast<double>(a.size());
        const std::uint64_t total = std::uint64_t{1} << a.size();
        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t bits = 1; bits + 1 < total; ++bits) {
            SubsetMask c = before;
            std::size_t nc = 0;
            for (std::size_t k = 0; k < a.size(); ++k)
                if ((bits >> k) & 1u) {
                    c.insert(static_cast<std::size_t>(a[k]));
                    ++nc;
                }
            const double ratio = static_cast<double>(nc) / na;
            const double num = f.eval(c) - fb - ratio * inc;
            best = std::min(best, num / std::min(ratio, 1.0 - ratio));
        }
        eta[j] = best;
    }
    return eta;
}

/// nu = min over comparable blocks A_i above A_j of v_i - v_j (+inf if none).
inline double compute_nu(const GroundTruth& truth)
{
    double nu = std::numeric_limits<double>::infinity();
    for (auto [i, j] : truth.partition().order()) // covering pairs are among the generators
        nu = std::min(nu, truth.values()[i] - truth.values()[j]);
    return nu;
}

/// Largest lambda with lambda |F(B_j) - F(B_{j-1})| / |A_j| <= nu / 4 for all j.
inline double lambda_bound(const SetFunction& f, const GroundTruth& truth, double nu)
{
    const auto& part = truth.partition();
    double best = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    for (std::size_t j = 0; j < part.size(); ++j) {
        const double cur = f.eval(part.prefix_mask(j + 1));
        const double inc = std::abs(cur - prev);
        prev = cur;
        if (inc > kSetTol) best = std::min(best, nu * static_cast<double>(part.block(j).size()) / (4.0 * inc));
    }
    return best;
}

struct TheoremBound {
    double raw;      // the expression as written, possibly negative
    double value;    // clamped to [0, 1]
    bool clamped;
};

/// 1 - sum_j exp(-nu^2 |A_j| / (32 sigma^2)) - 2 sum_j |A_j| exp(-lambda^2 eta_j^2 / (2 sigma^2 |A_j|^2)),
/// with eta_j <= 0 contributing exp(0).
inline TheoremBound theorem_bound(const GroundTruth& truth, const std::vector<double>& eta, double nu, double lambda,
                                  double sigma)
{
    if (!(sigma > 0.0)) throw std::invalid_argument("theorem_bound: sigma must be positive");
    const auto& part = truth.partition();
    if (eta.size() != part.size()) throw std::invalid_argument("theorem_bound: one eta per block is required");
    double raw = 1.0;
    for (std::size_t j = 0; j < part.size(); ++j) {
        const double a = static_cast<double>(part.block(j).size());
        raw -= std::exp(-nu * nu * a / (32.0 * sigma * sigma));
        const double e = eta[j] > 0.0 ? eta[j] : 0.0;
        const double arg = std::isinf(e) ? std::numeric_limits<double>::infinity()
                                         : lambda * lambda * e * e / (2.0 * sigma * sigma * a * a);
        raw -= 2.0 * a * std::exp(-arg);
    }
    const double value = std::clamp(raw, 0.0, 1.0);
    return {raw, value, value != raw};
}

/// Same unordered partition and every order relation of the truth holds.
inline bool same_lattice(const OrderedPartition& truth, const OrderedPartition& found)
{
    if (!truth.same_blocks(found)) return false;
    for (auto [i, j] : truth.order()) {
        const int fi = found.block_of(static_cast<std::size_t>(truth.block(i).front()));
        const int fj = found.block_of(static_cast<std::size_t>(truth.block(j).front()));
        if (!found.above(static_cast<std::size_t>(fi), static_cast<std::size_t>(fj))) return false;
    }
    return true;
}

/// Stream seed for trial `k`: splitmix64 of the pair.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial)
{
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline Vector gaussian_vector(std::size_t p, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Vector v(static_cast<Eigen::Index>(p));
    for (auto& x : v) x = normal(rng);
    return v;
}

struct RecoveryReport {
    std::vector<double> eta;
    double nu = 0.0;
    double lambda_max = 0.0;
    TheoremBound bound{0.0, 0.0, false};
    double empirical = 0.0;
    std::size_t successes = 0;
    std::size_t trials = 0;
    double sigma = 0.0;
    double lambda = 0.0;

    /// Binomial standard error of the empirical rate.
    double standard_error() const
    {
        return trials ? std::sqrt(empirical * (1.0 - empirical) / static_cast<double>(trials)) : 0.0;
    }
};

inline RecoveryReport monte_carlo_recovery(const SetFunction& f, const GroundTruth& truth, double sigma, double lambda,
                                           std::size_t trials, std::uint64_t seed = 1,
                                           ProxEngine engine = ProxEngine::fast, unsigned threads = 0)
{
    if (trials == 0) throw std::invalid_argument("monte_carlo_recovery: trials must be positive");
    if (!(sigma >= 0.0) || !(lambda >= 0.0))
        throw std::invalid_argument("monte_carlo_recovery: sigma and lambda must be non-negative");
    RecoveryReport rep;
    rep.eta = compute_eta(f, truth);
    rep.nu = compute_nu(truth);
    rep.lambda_max = lambda_bound(f, truth, rep.nu);
    rep.bound = sigma > 0.0 ? theorem_bound(truth, rep.eta, rep.nu, lambda, sigma) : TheoremBound{1.0, 1.0, false};
    rep.trials = trials;
    rep.sigma = sigma;
    rep.lambda = lambda;

    const std::size_t p = truth.size();
    std::vector<char> ok(trials, 0);
    auto run = [&](std::size_t k) {
        std::mt19937_64 rng(trial_seed(seed, k));
        const Vector z = truth.w() + sigma * gaussian_vector(p, rng);
        const auto sol = prox(ProxProblem(f, z, lambda), engine);
        ok[k] = same_lattice(truth.partition(), sol.lattice);
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
    if (threads <= 1) {
        for (std::size_t k = 0; k < trials; ++k) run(k);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t k = t; k < trials; k += threads) run(k);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (char c : ok) rep.successes += c;
    rep.empirical = static_cast<double>(rep.successes) / static_cast<double>(trials);
    return rep;
}

struct GridInstance {
    std::size_t width = 0, height = 0;
    SubsetMask a, b, c;
    double f_b = 0.0;      // cut(B)
    double f_bc = 0.0;     // cut(B u C)
    double margin = 0.0;   // F(B u C) - F(B) - |C|/|A| (F(B u A) - F(B))
};

struct CounterexampleSearch {
    std::size_t max_b = 3;  // |B| <= max_b
    std::size_t max_c = 2;  // |C| <= max_c
    // stop at the first instance matching all given targets (|A|, |C|, cut(B), cut(B u C))
    std::optional<std::size_t> target_a, target_c;
    std::optional<double> target_f_b, target_f_bc;
};

struct CounterexampleReport {
    bool found = false;        // a strictly negative margin exists in the searched range
    bool matched_target = false;
    std::optional<GridInstance> instance; // the target match, else the most negative margin
    std::size_t grids_searched = 0;
};

namespace detail {

inline void for_each_combination(std::size_t n, std::size_t k, const std::function<bool(const std::vector<int>&)>& fn)
{
    if (k > n) return;
    std::vector<int> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<int>(i);
    while (true) {
        if (!fn(idx)) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == static_cast<int>(n - k + i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace detail

/// Searches grids up to width x height (by increasing area) for A = V \ B
/// connected and C in A with a negative agglomerativity margin.
inline CounterexampleReport tv2d_counterexample(std::size_t max_width, std::size_t max_height,
                                                const CounterexampleSearch& opt = {})
{
    require_guard(max_width, 6, "tv2d_counterexample width");
    require_guard(max_height, 6, "tv2d_counterexample height");
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::size_t w = 1; w <= max_width; ++w)
        for (std::size_t h = 1; h <= max_height; ++h) shapes.emplace_back(w, h);
    std::stable_sort(shapes.begin(), shapes.end(), [](auto x, auto y) { return x.first * x.second < y.first * y.second; });

    CounterexampleReport rep;
    const bool targeted = opt.target_a || opt.target_c || opt.target_f_b || opt.target_f_bc;
    auto near = [](double x, double y) { return std::abs(x - y) <= 1e-9; };
    for (auto [w, h] : shapes) {
        const std::size_t p = w * h;
        if (p < 2) continue;
        ++rep.grids_searched;
        const auto g = WeightedGraph::grid(w, h);
        bool stop = false;
        for (std::size_t nb = 1; nb <= std::min(opt.max_b, p - 1) && !stop; ++nb) {
            detail::for_each_combination(p, nb, [&](const std::vector<int>& bidx) {
                const auto b = SubsetMask::from_indices(p, bidx);
                const auto a = b.complement();
                const std::size_t na = a.count();
                if (opt.target_a && na != *opt.target_a) return true;
                if (!detail::connected_in(g, a.indices())) return true;
                const double fb = g.cut(b);
                if (opt.target_f_b && !near(fb, *opt.target_f_b)) return true;
                const auto aidx = a.indices();
                for (std::size_t nc = 1; nc <= std::min(opt.max_c, na - 1) && !stop; ++nc) {
                    if (opt.target_c && nc != *opt.target_c) continue;
                    detail::for_each_combination(na, nc, [&](const std::vector<int>& cpos) {
                        SubsetMask c(p);
                        for (int k : cpos) c.insert(static_cast<std::size_t>(aidx[k]));
                        const double fbc = g.cut(b | c);
                        const double margin = fbc - fb - static_cast<double>(nc) / static_cast<double>(na) * (0.0 - fb);
                        if (margin >= -1e-12) return true;
                        GridInstance inst{w, h, a, b, c, fb, fbc, margin};
                        rep.found = true;
                        if (targeted) {
                            if (opt.target_f_bc && !near(fbc, *opt.target_f_bc)) return true;
                            rep.instance = inst;
                            rep.matched_target = true;
                            stop = true;
                            return false;
                        }
                        if (!rep.instance || margin < rep.instance->margin - 1e-12) rep.instance = inst;
                        return true;
                    });
                }
                return !stop;
            });
        }
        if (stop) break;
    }
    return rep;
}

struct Lemma2Report {
    std::size_t p = 0;
    double t = 0.0;
    std::size_t trials = 0;
    double empirical_tail = 0.0; // fraction of samples with max_A s(A)/F(A) >= t
    double bound = 0.0;          // 2 p exp(-t^2 / (2 p^2))
    double standard_error = 0.0;
};

/// s ~ N(0, I - 1 1^T / p), F(A) = min(|A|/p, 1 - |A|/p); the maximum over
/// proper A is attained by the top-k sums of s, scanned over k.
inline Lemma2Report lemma2_check(std::size_t p, double t, std::size_t trials, std::uint64_t seed = 1)
{
    if (p < 2) throw std::invalid_argument("lemma2_check: p must be at least 2");
    if (trials == 0) throw std::invalid_argument("lemma2_check: trials must be positive");
    Lemma2Report rep{p, t, trials, 0.0, 2.0 * static_cast<double>(p) * std::exp(-t * t / (2.0 * double(p) * double(p))), 0.0};
    std::size_t hits = 0;
    for (std::size_t k = 0; k < trials; ++k) {
        std::mt19937_64 rng(trial_seed(seed, k));
        Vector s = gaussian_vector(p, rng);
        s.array() -= s.mean();
        std::vector<double> v(s.data(), s.data() + s.size());
        std::sort(v.begin(), v.end(), std::greater<>());
        double top = 0.0, best = -std::numeric_limits<double>::infinity();
        for (std::size_t m = 1; m < p; ++m) {
            top += v[m - 1];
            const double frac = static_cast<double>(m) / static_cast<double>(p);
            best = std::max(best, top / std::min(frac, 1.0 - frac));
        }
        hits += best >= t;
    }
    rep.empirical_tail = static_cast<double>(hits) / static_cast<double>(trials);
    rep.standard_error = std::sqrt(rep.empirical_tail * (1.0 - rep.empirical_tail) / static_cast<double>(trials));
    return rep;
}

struct RobustTvConfig {
    std::size_t chain_length = 100;
    std::size_t jump_position = 50;  // first index of the high segment
    double jump = 1.0;               // nu
    double outlier_fraction = 0.05;
    double outlier_scale = 5.0;      // spikes of magnitude outlier_scale * jump, random sign
    std::vector<double> sigma_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> lambda_grid{0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
    double penalty = 1.0;            // mismatch penalty of the noisy cut
    std::size_t replications = 20;
    std::uint64_t seed = 1;
};

struct RobustTvRow {
    double sigma;
    std::string method; // "tv" or "robust_tv"
    double best_lambda;
    double error_mean;
    double error_std;
};

/// Fraction of non-outlier indices on the wrong side of the jump, for the
/// best threshold of w.
inline double level_set_error(const Vector& w, std::size_t jump_position, const std::vector<char>& outlier)
{
    const std::size_t p = static_cast<std::size_t>(w.size());
    std::vector<double> thresholds(w.data(), w.data() + p);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::size_t count = 0;
    for (char o : outlier) count += !o;
    double best = 1.0;
    // threshold above everything puts all indices low
    thresholds.push_back(std::numeric_limits<double>::infinity());
    for (double th : thresholds) {
        std::size_t wrong = 0;
        for (std::size_t k = 0; k < p; ++k) {
            if (outlier[k]) continue;
            const bool high = w[static_cast<Eigen::Index>(k)] >= th;
            wrong += high != (k >= jump_position);
        }
        best = std::min(best, static_cast<double>(wrong) / static_cast<double>(count));
    }
    return best;
}

inline std::vector<RobustTvRow> robust_tv_experiment(const RobustTvConfig& cfg)
{
    const std::size_t p = cfg.chain_length;
    if (p < 2 || cfg.jump_position == 0 || cfg.jump_position >= p)
        throw std::invalid_argument("robust_tv_experiment: jump must split the chain");
    if (cfg.outlier_fraction < 0.0 || cfg.outlier_fraction > 1.0)
        throw std::invalid_argument("robust_tv_experiment: outlier fraction must lie in [0, 1]");
    if (cfg.replications == 0 || cfg.lambda_grid.empty())
        throw std::invalid_argument("robust_tv_experiment: empty replications or lambda grid");
    const auto tv = SetFunction::chain_tv(p);
    const auto robust = SetFunction::noisy_cut(NoisyCutSpec(WeightedGraph::chain(p), cfg.penalty));
    const std::size_t n_out = static_cast<std::size_t>(std::llround(cfg.outlier_fraction * double(p)));

    std::vector<RobustTvRow> rows;
    for (std::size_t si = 0; si < cfg.sigma_grid.size(); ++si) {
        const double sigma = cfg.sigma_grid[si];
        // errors[method][lambda][rep]
        std::vector<std::vector<std::vector<double>>> err(
            2, std::vector<std::vector<double>>(cfg.lambda_grid.size(), std::vector<double>(cfg.replications)));
        for (std::size_t r = 0; r < cfg.replications; ++r) {
            std::mt19937_64 rng(trial_seed(cfg.seed + si * 1000003ULL, r));
            Vector z(static_cast<Eigen::Index>(p));
            for (std::size_t k = 0; k < p; ++k) z[static_cast<Eigen::Index>(k)] = k >= cfg.jump_position ? cfg.jump : 0.0;
            z += sigma * gaussian_vector(p, rng);
            std::vector<int> idx(p);
            for (std::size_t k = 0; k < p; ++k) idx[k] = static_cast<int>(k);
            std::shuffle(idx.begin(), idx.end(), rng);
            std::vector<char> outlier(p, 0);
            std::bernoulli_distribution sign;
            for (std::size_t k = 0; k < n_out; ++k) {
                outlier[idx[k]] = 1;
                z[idx[k]] += (sign(rng) ? 1.0 : -1.0) * cfg.outlier_scale * cfg.jump;
            }
            for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
                const double lam = cfg.lambda_grid[li];
                err[0][li][r] = level_set_error(prox(ProxProblem(tv, z, lam)).w, cfg.jump_position, outlier);
                err[1][li][r] = level_set_error(prox(ProxProblem(robust, z, lam)).w, cfg.jump_position, outlier);
            }
        }
        for (int m = 0; m < 2; ++m) {
            std::size_t best = 0;
            std::vector<double> means(cfg.lambda_grid.size());
            for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
                double s = 0.0;
                for (double e : err[m][li]) s += e;
                means[li] = s / static_cast<double>(cfg.replications);
                if (means[li] < means[best]) best = li;
            }
            double var = 0.0;
            for (double e : err[m][best]) var += (e - means[best]) * (e - means[best]);
            const double sd = cfg.replications > 1 ? std::sqrt(var / static_cast<double>(cfg.replications - 1)) : 0.0;
            rows.push_back({sigma, m == 0 ? "tv" : "robust_tv", cfg.lambda_grid[best], means[best], sd});
        }
    }
    return rows;
}

} // namespace subreg
