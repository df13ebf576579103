#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "subset.hpp"

namespace subreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline void require_dimension(const Vector& v, std::size_t p, const char* what)
{
    if (static_cast<std::size_t>(v.size()) != p)
        throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(p) +
                                    ", got " + std::to_string(v.size()));
}

/// z(A) = sum_{k in A} z_k
inline double modular(const Vector& z, const SubsetMask& a)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k]) s += z[static_cast<Eigen::Index>(k)];
    return s;
}

inline Vector indicator(const SubsetMask& a)
{
    Vector v = Vector::Zero(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k]) v[static_cast<Eigen::Index>(k)] = 1.0;
    return v;
}

inline Vector soft_threshold(const Vector& w, double t)
{
    Vector r(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        const double a = std::abs(w[k]) - t;
        r[k] = a > 0.0 ? std::copysign(a, w[k]) : 0.0;
    }
    return r;
}

inline Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

} // namespace subreg
