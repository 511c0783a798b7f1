#pragma once

#include <span>
#include <vector>

#include "meig/rng.hpp"
#include "meig/tensor.hpp"
#include "meig/vec.hpp"

namespace test_util {

// Independent brute-force contraction oracle: a plain quadruple loop over
// the raw entries, kept deliberately separate from the library kernels.
inline meig::Vec naive_contract_x(const meig::HierSymTensor& t, std::span<const double> x,
                                  std::span<const double> y) {
    meig::Vec out(t.m(), 0.0);
    for (int i = 0; i < t.m(); ++i)
        for (int j = 0; j < t.n(); ++j)
            for (int k = 0; k < t.m(); ++k)
                for (int l = 0; l < t.n(); ++l)
                    out[i] += t.at(i, j, k, l) * y[j] * x[k] * y[l];
    return out;
}

inline meig::Vec naive_contract_y(const meig::HierSymTensor& t, std::span<const double> x,
                                  std::span<const double> y) {
    meig::Vec out(t.n(), 0.0);
    for (int i = 0; i < t.m(); ++i)
        for (int j = 0; j < t.n(); ++j)
            for (int k = 0; k < t.m(); ++k)
                for (int l = 0; l < t.n(); ++l)
                    out[l] += t.at(i, j, k, l) * x[i] * y[j] * x[k];
    return out;
}

inline double naive_form(const meig::HierSymTensor& t, std::span<const double> x,
                         std::span<const double> y) {
    double s = 0.0;
    for (int i = 0; i < t.m(); ++i)
        for (int j = 0; j < t.n(); ++j)
            for (int k = 0; k < t.m(); ++k)
                for (int l = 0; l < t.n(); ++l)
                    s += t.at(i, j, k, l) * x[i] * y[j] * x[k] * y[l];
    return s;
}

// a_{ijkl} = u_i v_j u_k v_l is hierarchically symmetric by construction.
inline meig::HierSymTensor rank_one(const meig::Vec& u, const meig::Vec& v) {
    const int m = static_cast<int>(u.size());
    const int n = static_cast<int>(v.size());
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(m) * n * m * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < n; ++l) e.push_back(u[i] * v[j] * u[k] * v[l]);
    return meig::HierSymTensor::from_entries(m, n, std::move(e), 1e-12);
}

inline meig::Vec random_vec(meig::Rng& rng, int n, double scale = 1.0) {
    meig::Vec v(n);
    for (double& c : v) c = scale * rng.normal();
    return v;
}

inline double rel_err(double got, double want) {
    const double denom = std::max(1.0, std::abs(want));
    return std::abs(got - want) / denom;
}

} // namespace test_util
