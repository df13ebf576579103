#pragma once

// Wolfe's minimum-norm-point algorithm for the Euclidean projection of a
// target onto B(F), with the greedy algorithm as linear minimization oracle.
// Affine minimizations over the current corral use an incrementally updated
// Cholesky factor of D^T D, D the atoms minus the first one.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lovasz.hpp"
#include "set_function.hpp"
#include "types.hpp"

namespace subreg {

struct MnpOptions {
    double tol = 1e-14;         // stop when ||x||^2 - min_q x^T q <= tol * max(1, ||x||^2)
    std::size_t max_major = 0;  // 0 means 100 p
    bool warm_start = false;    // reuse the previous corral (often slower: stale atoms must be driven out)
    std::size_t window = 0;     // major cycles per progress check; 0 means 50 + p / 10
    double stall = 1e-12;       // stop when ||x||^2 improves by less than this fraction over a window
};

struct MnpResult {
    Vector s;                 // point of B(F) closest to the target
    double gap = 0.0;         // final Wolfe gap
    std::size_t major = 0;
    std::size_t minor = 0;
    std::size_t corral_size = 0;
};

class MinNormPointSolver {
public:
    explicit MinNormPointSolver(const SetFunction& f, MnpOptions opt = {}) : f_(f), opt_(opt) {}

    const MnpOptions& options() const { return opt_; }
    void reset() { atoms_.clear(); weights_.clear(); }

    MnpResult project(const Vector& target)
    {
        const std::size_t p = f_.size();
        require_dimension(target, p, "min_norm_point");
        if (!(opt_.tol > 0.0)) throw std::invalid_argument("min_norm_point: tol must be positive");
        t_ = target;
        const std::size_t cap = opt_.max_major ? opt_.max_major : 100 * p;

        MnpResult r;
        if (opt_.warm_start && !atoms_.empty() && refactor()) {
            // the old weights are feasible but not affine-optimal for the new target
            r.minor += minor_cycles();
        } else {
            atoms_.assign(1, greedy(f_, target).s);
            weights_.assign(1, 1.0);
            refactor();
        }
        Vector x = current();
        // ||x|| decreases strictly in exact arithmetic; a window of major
        // cycles without relative progress means the working precision is spent
        const std::size_t window = opt_.window ? opt_.window : 50 + p / 10;
        double window_xx = x.squaredNorm();
        bool repaired = false;
        while (true) {
            const Vector q = greedy(f_, -x).s;
            const double xx = x.squaredNorm();
            r.gap = xx - x.dot(q - t_);
            if (r.gap <= opt_.tol * std::max(1.0, xx)) break;
            if (r.major > 0 && r.major % window == 0) {
                if (window_xx - xx <= opt_.stall * window_xx) break;
                window_xx = xx;
            }
            if (r.major >= cap)
                throw numerical_error("min_norm_point: no convergence after " + std::to_string(cap) +
                                      " major cycles (gap " + std::to_string(r.gap) + ")");
            ++r.major;
            if (!append(q)) {
                // q is affinely dependent on the corral, so x should already be
                // optimal; re-minimize once from a fresh factor before accepting
                if (repaired || !refactor()) break;
                repaired = true;
                r.minor += minor_cycles();
                x = current();
                continue;
            }
            repaired = false;
            weights_.push_back(0.0);
            r.minor += minor_cycles();
            x = current();
        }
        r.s = x + t_;
        r.corral_size = atoms_.size();
        return r;
    }

private:
    // Columns of D are a_i - a_0 (i >= 1); differences stay on the scale of
    // F even when the target is large, which keeps D^T D well conditioned.
    void rebuild_columns()
    {
        const std::size_t k = atoms_.size();
        d_.resize(t_.size(), static_cast<Eigen::Index>(k ? k - 1 : 0));
        for (std::size_t i = 1; i < k; ++i) d_.col(static_cast<Eigen::Index>(i - 1)) = atoms_[i] - atoms_[0];
    }

    Vector current() const
    {
        Vector x = -t_;
        for (std::size_t i = 0; i < atoms_.size(); ++i) x += weights_[i] * atoms_[i];
        return x;
    }

    // Full factorization of D^T D; false if not positive definite.
    bool refactor()
    {
        rebuild_columns();
        if (atoms_.size() <= 1) {
            r_.resize(0, 0);
            return true;
        }
        const Matrix g = d_.transpose() * d_;
        Eigen::LLT<Matrix> llt(g);
        if (llt.info() != Eigen::Success) return false;
        r_ = llt.matrixU();
        for (Eigen::Index i = 0; i < r_.rows(); ++i)
            if (!(r_(i, i) > 1e-7 * std::sqrt(g(i, i)))) return false;
        return true;
    }

    bool append(const Vector& q)
    {
        const Vector d = q - atoms_[0];
        const double dd = d.squaredNorm();
        const auto k = r_.rows();
        const Vector b = d_.transpose() * d;
        const Vector col = r_.transpose().triangularView<Eigen::Lower>().solve(b);
        const double rho2 = dd - col.squaredNorm();
        if (!(rho2 > 1e-14 * dd)) return false;
        r_.conservativeResize(k + 1, k + 1);
        r_.row(k).setZero();
        r_.col(k).head(k) = col;
        r_(k, k) = std::sqrt(rho2);
        d_.conservativeResize(Eigen::NoChange, k + 1);
        d_.col(k) = d;
        atoms_.push_back(q);
        return true;
    }

    // Drops atom j; false if the remaining corral could not be refactored.
    bool remove(std::size_t j)
    {
        atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(j));
        weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(j));
        if (j == 0) return refactor(); // new anchor
        // delete column j - 1 of R and restore triangularity by Givens rotations
        const auto k = r_.rows();
        const auto jj = static_cast<Eigen::Index>(j - 1);
        const auto rest = d_.cols() - 1 - jj;
        d_.middleCols(jj, rest) = d_.rightCols(rest).eval();
        d_.conservativeResize(Eigen::NoChange, d_.cols() - 1);
        Matrix h(k, k - 1);
        h.leftCols(jj) = r_.leftCols(jj);
        h.rightCols(k - 1 - jj) = r_.rightCols(k - 1 - jj);
        for (Eigen::Index i = jj; i < k - 1; ++i) {
            Eigen::JacobiRotation<double> g;
            g.makeGivens(h(i, i), h(i + 1, i));
            h.applyOnTheLeft(i, i + 1, g.adjoint());
            h(i + 1, i) = 0.0;
        }
        r_ = h.topRows(k - 1);
        for (Eigen::Index i = 0; i < r_.rows(); ++i)
            if (r_(i, i) < 0.0) r_.row(i) *= -1.0;
        return true;
    }

    // Affine minimizer: min ||(a_0 - t) + D nu||, mu = (1 - sum nu, nu).
    Vector affine_weights() const
    {
        const auto k = static_cast<Eigen::Index>(atoms_.size());
        Vector mu(k);
        if (k == 1) {
            mu[0] = 1.0;
            return mu;
        }
        const Vector base = atoms_[0] - t_;
        auto solve = [&](const Vector& rhs) {
            const Vector y = r_.transpose().triangularView<Eigen::Lower>().solve(rhs);
            return Vector(r_.triangularView<Eigen::Upper>().solve(y));
        };
        auto gradient = [&](const Vector& nu) { return Vector(d_.transpose() * (base + d_ * nu)); };
        Vector nu = solve(-gradient(Vector::Zero(k - 1)));
        nu -= solve(gradient(nu)); // one step of iterative refinement
        mu[0] = 1.0 - nu.sum();
        mu.tail(k - 1) = nu;
        return mu;
    }

    std::size_t minor_cycles()
    {
        std::size_t count = 0;
        while (true) {
            ++count;
            const Vector mu = affine_weights();
            const double floor = 1e-12;
            if (mu.minCoeff() > floor) {
                for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] = mu[static_cast<Eigen::Index>(i)];
                return count;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                const double m = mu[static_cast<Eigen::Index>(i)];
                if (m <= floor) theta = std::min(theta, weights_[i] / (weights_[i] - m));
            }
            for (std::size_t i = 0; i < weights_.size(); ++i)
                weights_[i] = theta * mu[static_cast<Eigen::Index>(i)] + (1.0 - theta) * weights_[i];
            bool removed = false, factored = true;
            for (std::size_t i = weights_.size(); i-- > 0;)
                if (weights_[i] <= floor && atoms_.size() > 1) {
                    factored = remove(i) && factored;
                    removed = true;
                }
            if (!removed) {
                // guard against stalling: drop the smallest weight
                const auto it = std::min_element(weights_.begin(), weights_.end());
                factored = remove(static_cast<std::size_t>(it - weights_.begin()));
            }
            // a degenerate re-anchored corral: shrink until it factors
            while (!factored && atoms_.size() > 1) {
                const auto it = std::min_element(weights_.begin(), weights_.end());
                factored = remove(static_cast<std::size_t>(it - weights_.begin()));
            }
            if (!factored) refactor();
            double total = 0.0;
            for (double w : weights_) total += w;
            for (double& w : weights_) w /= total;
        }
    }

    SetFunction f_;
    MnpOptions opt_;
    Vector t_;
    std::vector<Vector> atoms_;
    std::vector<double> weights_;
    Matrix r_;
    Matrix d_;
};

/// Projection of `target` onto B(F).
inline MnpResult min_norm_point(const SetFunction& f, const Vector& target, double tol = 1e-14)
{
    MnpOptions opt;
    opt.tol = tol;
    opt.warm_start = false;
    MinNormPointSolver solver(f, opt);
    return solver.project(target);
}

} // namespace subreg
