#pragma once

// First-order methods for  min_w L(w) + lambda f(w):  proximal gradient
// (ISTA / FISTA with backtracking) and subgradient descent with c/t or
// c/sqrt(t) steps.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lovasz.hpp"
#include "min_norm_point.hpp"
#include "prox.hpp"
#include "types.hpp"

namespace subreg {

class SmoothLoss {
public:
    virtual ~SmoothLoss() = default;
    virtual std::size_t size() const = 0;
    virtual double value(const Vector& w) const = 0;
    virtual Vector gradient(const Vector& w) const = 0;
    /// Estimate of the Lipschitz constant of the gradient.
    virtual double lipschitz() const = 0;
};

/// 1/2 ||y - X w||^2
class LeastSquaresLoss : public SmoothLoss {
public:
    LeastSquaresLoss(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y))
    {
        if (x_.rows() != y_.size()) throw std::invalid_argument("LeastSquaresLoss: X and y disagree in length");
        if (x_.cols() == 0) throw std::invalid_argument("LeastSquaresLoss: empty design");
        // power iterations on X^T X from a fixed start
        Vector v = Vector::Ones(x_.cols()) / std::sqrt(static_cast<double>(x_.cols()));
        double est = 0.0;
        for (int it = 0; it < 20; ++it) {
            const Vector u = x_.transpose() * (x_ * v);
            est = u.norm();
            if (est == 0.0) break;
            v = u / est;
        }
        lipschitz_ = est;
    }

    std::size_t size() const override { return static_cast<std::size_t>(x_.cols()); }
    double value(const Vector& w) const override { return 0.5 * (y_ - x_ * w).squaredNorm(); }
    Vector gradient(const Vector& w) const override { return x_.transpose() * (x_ * w - y_); }
    double lipschitz() const override { return lipschitz_; }

    const Matrix& design() const { return x_; }
    const Vector& response() const { return y_; }

private:
    Matrix x_;
    Vector y_;
    double lipschitz_ = 1.0;
};

/// 1/2 ||w - z||^2
class DenoisingLoss : public SmoothLoss {
public:
    explicit DenoisingLoss(Vector z) : z_(std::move(z)) {}
    std::size_t size() const override { return static_cast<std::size_t>(z_.size()); }
    double value(const Vector& w) const override { return 0.5 * (w - z_).squaredNorm(); }
    Vector gradient(const Vector& w) const override { return w - z_; }
    double lipschitz() const override { return 1.0; }

private:
    Vector z_;
};

enum class StepSchedule { inverse_t, inverse_sqrt_t };

struct SolverConfig {
    std::size_t max_iters = 500;
    bool backtracking = true;      // otherwise fixed step 1 / lipschitz()
    bool accelerated = true;       // FISTA; false gives ISTA
    double tol = 0.0;              // stop when |objective change| <= tol * max(1, |objective|)
    StepSchedule schedule = StepSchedule::inverse_sqrt_t;
    std::optional<double> step_constant;     // subgradient c; default 1 / lipschitz()
    double time_budget_ms = 0.0;             // 0 disables
    std::optional<double> reference_objective; // fills the gap column when known
    std::size_t max_backtracks = 60;

    void validate() const
    {
        if (max_iters == 0) throw std::invalid_argument("SolverConfig: max_iters must be positive");
        if (tol < 0.0) throw std::invalid_argument("SolverConfig: tol must be non-negative");
        if (step_constant && !(*step_constant > 0.0))
            throw std::invalid_argument("SolverConfig: step constant must be positive");
        if (time_budget_ms < 0.0) throw std::invalid_argument("SolverConfig: negative time budget");
    }
};

struct TraceRow {
    std::size_t iter;
    double objective;
    double gap;
    double wall_time_ms;
};

struct SolverResult {
    Vector w;
    double objective = 0.0;
    std::vector<TraceRow> trace;
    std::size_t iterations = 0;
    bool converged = false;
    double step_constant = 0.0; // subgradient only
};

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace)
{
    os << "iter,objective,gap,wall_time_ms\n";
    os.precision(17);
    for (const auto& r : trace) os << r.iter << ',' << r.objective << ',' << r.gap << ',' << r.wall_time_ms << '\n';
}

/// prox(v, t) = argmin_w 1/2 ||w - v||^2 + t f(w)
using ProxOperator = std::function<Vector(const Vector&, double)>;

inline ProxOperator make_prox_operator(const SetFunction& f, ProxEngine engine = ProxEngine::fast)
{
    if (engine == ProxEngine::mnp) {
        auto solver = std::make_shared<MinNormPointSolver>(f);
        return [solver](const Vector& v, double t) { return prox_via_mnp(*solver, v, t).w; };
    }
    return [f, engine](const Vector& v, double t) { return prox(ProxProblem(f, v, t), engine).w; };
}

namespace detail {

class Clock {
public:
    Clock() : start_(std::chrono::steady_clock::now()) {}
    double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline double gap_column(const SolverConfig& cfg, double objective, double previous)
{
    if (cfg.reference_objective) return objective - *cfg.reference_objective;
    return std::isfinite(previous) ? std::abs(objective - previous) : std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

inline SolverResult proximal_gradient(const SmoothLoss& loss, const SetFunction& f, double lambda,
                                      const SolverConfig& cfg, const ProxOperator& prox_op,
                                      std::optional<Vector> w0 = std::nullopt)
{
    cfg.validate();
    const std::size_t p = loss.size();
    if (f.size() != p) throw std::invalid_argument("proximal_gradient: loss and set function differ in size");
    if (!(lambda >= 0.0)) throw std::invalid_argument("proximal_gradient: lambda must be non-negative");
    detail::Clock clock;

    SolverResult res;
    res.w = w0 ? *w0 : Vector(Vector::Zero(static_cast<Eigen::Index>(p)));
    require_dimension(res.w, p, "proximal_gradient");
    auto objective = [&](const Vector& w) { return loss.value(w) + lambda * lovasz_extension(f, w); };
    double lip = loss.lipschitz();
    if (!(lip > 0.0)) lip = 1.0;

    Vector y = res.w, w_prev = res.w;
    double tk = 1.0;
    double prev_obj = objective(res.w);
    res.trace.push_back({0, prev_obj, detail::gap_column(cfg, prev_obj, std::numeric_limits<double>::quiet_NaN()), clock.ms()});
    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        const Vector grad = loss.gradient(y);
        const double ly = loss.value(y);
        Vector w;
        std::size_t backtracks = 0;
        while (true) {
            w = prox_op(y - grad / lip, lambda / lip);
            if (!cfg.backtracking) break;
            const Vector d = w - y;
            if (loss.value(w) <= ly + grad.dot(d) + 0.5 * lip * d.squaredNorm() + 1e-12 * std::max(1.0, std::abs(ly)))
                break;
            lip *= 2.0;
            if (++backtracks > cfg.max_backtracks)
                throw numerical_error("proximal_gradient: backtracking budget exhausted");
        }
        const double obj = objective(w);
        if (!std::isfinite(obj)) throw numerical_error("proximal_gradient: objective diverged");
        if (cfg.accelerated) {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            y = w + ((tk - 1.0) / tn) * (w - w_prev);
            tk = tn;
        } else {
            y = w;
        }
        w_prev = w;
        res.w = w;
        res.iterations = k;
        res.trace.push_back({k, obj, detail::gap_column(cfg, obj, prev_obj), clock.ms()});
        const bool small = std::abs(obj - prev_obj) <= cfg.tol * std::max(1.0, std::abs(obj));
        prev_obj = obj;
        if (cfg.tol > 0.0 && small) {
            res.converged = true;
            break;
        }
        if (cfg.time_budget_ms > 0.0 && clock.ms() >= cfg.time_budget_ms) break;
    }
    res.objective = prev_obj;
    return res;
}

/// w <- w - gamma_t (grad L(w) + lambda s), s the greedy subgradient of f at
/// w; the trace records the best objective so far.
inline SolverResult subgradient_descent(const SmoothLoss& loss, const SetFunction& f, double lambda,
                                        const SolverConfig& cfg, std::optional<Vector> w0 = std::nullopt)
{
    cfg.validate();
    const std::size_t p = loss.size();
    if (f.size() != p) throw std::invalid_argument("subgradient_descent: loss and set function differ in size");
    detail::Clock clock;

    Vector w = w0 ? *w0 : Vector(Vector::Zero(static_cast<Eigen::Index>(p)));
    require_dimension(w, p, "subgradient_descent");
    SolverResult res;
    res.w = w;

    auto step = [&](const Vector& at, double& obj) {
        const auto gr = greedy(f, at);
        obj = loss.value(at) + lambda * gr.s.dot(at);
        return Vector(loss.gradient(at) + lambda * gr.s);
    };

    double obj = 0.0;
    Vector g = step(w, obj);
    // default: the first step matches a gradient step 1 / L
    const double lip = loss.lipschitz();
    double c = lip > 0.0 ? 1.0 / lip : 1.0;
    if (cfg.step_constant) c = *cfg.step_constant;
    res.step_constant = c;
    double best = obj, prev_best = std::numeric_limits<double>::quiet_NaN();
    res.objective = best;
    res.trace.push_back({0, best, detail::gap_column(cfg, best, prev_best), clock.ms()});
    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        const double t = static_cast<double>(k);
        const double gamma = cfg.schedule == StepSchedule::inverse_t ? c / t : c / std::sqrt(t);
        w -= gamma * g;
        g = step(w, obj);
        if (!std::isfinite(obj)) throw numerical_error("subgradient_descent: objective diverged");
        prev_best = best;
        if (obj < best) {
            best = obj;
            res.w = w;
        }
        res.iterations = k;
        res.trace.push_back({k, best, detail::gap_column(cfg, best, prev_best), clock.ms()});
        if (cfg.time_budget_ms > 0.0 && clock.ms() >= cfg.time_budget_ms) break;
    }
    res.objective = best;
    return res;
}

} // namespace subreg
