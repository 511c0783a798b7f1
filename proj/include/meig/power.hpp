#pragma once

#include <cstdint>
#include <optional>

#include "meig/solve_report.hpp"
#include "meig/tensor.hpp"

namespace meig {

/// Shifted alternating power iteration, the classic baseline for extreme
/// M-eigenvalues. The shift tau keeps the lambda sequence (heuristically)
/// ascending; any tau >= default_tau(tensor) is a safe choice.
struct PowerConfig {
    std::optional<double> tau; // nonnegative; defaults to default_tau(tensor)
    double eps = 1e-6;         // tolerance on |lambda_{k+1} - lambda_k|
    int max_iter = 2000;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Crude curvature bound: the sum of absolute entries. Scales linearly with
/// the tensor.
double default_tau(const HierSymTensor& tensor);

/// x <- normalize(A.yxy + tau x), then y <- normalize(Axyx. + tau y) using
/// the fresh x (Gauss-Seidel order), lambda <- Axyxy; stops when lambda
/// stalls within eps. Throws BreakdownError if a normalization hits a zero
/// vector (a larger tau fixes that). Trace columns carry lambda_k in `phi`
/// and |lambda_k - lambda_{k-1}| in `grad_norm`.
SolveReport power_solve(const HierSymTensor& tensor, const PowerConfig& cfg,
                        const Vec* z0 = nullptr);

} // namespace meig
