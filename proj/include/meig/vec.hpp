#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "meig/errors.hpp"

namespace meig {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vec scaled(std::span<const double> v, double a) {
    Vec out(v.begin(), v.end());
    for (double& x : out) x *= a;
    return out;
}

/// Views onto the x / y blocks of a stacked iterate z = (x, y).
inline std::span<const double> x_block(const Vec& z, int m) {
    return std::span<const double>(z.data(), static_cast<std::size_t>(m));
}

inline std::span<const double> y_block(const Vec& z, int m, int n) {
    return std::span<const double>(z.data() + m, static_cast<std::size_t>(n));
}

} // namespace meig
