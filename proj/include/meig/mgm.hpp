#pragma once

#include <cstdint>
#include <deque>
#include <functional>

#include "meig/objective.hpp"
#include "meig/solve_report.hpp"
#include "meig/vec.hpp"

namespace meig {

/// Scaling rule for the steepest-descent component of the memory direction.
enum class GammaScheme {
    constant_one,   // gamma_k = 1 for all k
    modified_secant // gamma_k from the modified-secant sizing, floored
};

/// The published correction coefficient reads
///   theta = 6 (phi_k - phi_{k-1}) + 3 (g_k - g_{k-1})' s,
/// while the secant-sizing literature it cites uses (g_k + g_{k-1})' s in the
/// second term. Both are available; `printed` is the default.
enum class ThetaVariant { printed, standard };

struct SolverConfig {
    int memory_depth = 3;       // N, number of remembered directions
    GammaScheme gamma_scheme = GammaScheme::constant_one;
    ThetaVariant theta_variant = ThetaVariant::printed;
    double gamma_floor = 1e-15; // lower bound on accepted secant gamma
    double eps = 1e-6;          // gradient tolerance
    double wolfe_rho = 0.1;     // sufficient-decrease parameter
    double wolfe_sigma = 0.5;   // curvature parameter
    int max_iter = 2000;
    int ls_max_bisections = 60;
    std::uint64_t seed = 0;     // random start when no z0 is supplied
    bool record_detail = false;

    void validate() const;
};

/// Ring of up to N previous search directions, most recent first.
class DirectionMemory {
public:
    explicit DirectionMemory(int depth);

    void push(Vec d); // becomes d_{k-1}; evicts the oldest beyond depth
    std::size_t size() const { return items_.size(); }
    int depth() const { return depth_; }
    const Vec& operator[](std::size_t i) const { return items_[i]; } // i = 0 -> d_{k-1}

private:
    int depth_;
    std::deque<Vec> items_;
};

// ---------------------------------------------------------------------------
// Parameter rules
// ---------------------------------------------------------------------------

/// Scheme (i): gamma_k = 1.
double gamma_constant(int k);

/// Scheme (ii): gamma = w's / w'w with s = z_cur - z_prev,
/// w = dg + (theta / s's) s, falling back to 1 whenever the quotient drops
/// below gamma_floor (or the step is degenerate). Always >= gamma_floor.
double gamma_secant(const Vec& z_cur, const Vec& z_prev, const Vec& g_cur, const Vec& g_prev,
                    double phi_cur, double phi_prev, double gamma_floor,
                    ThetaVariant variant = ThetaVariant::printed);

/// phi_{k_i} = (|g||d| + g'd + m + n) / gamma. Strictly dominates
/// (g'd + |g||d|) / gamma since m + n > 0, which is what the sufficient
/// descent bound needs.
double phi_rule(const Vec& g, const Vec& d_prev, double gamma, int m, int n);

/// beta = |g|^2 / phi, with 0 when phi = 0.
double beta_rule(const Vec& g, double phi);

/// d = -gamma g + (1/N) sum_i beta_i d_{k-i} over the min(k, N) stored
/// directions; plain -gamma g when the memory is empty. Guarantees
/// g'd <= -(gamma/2) |g|^2 under phi_rule.
Vec build_direction(const Vec& g, const DirectionMemory& memory, double gamma, int m, int n);

// ---------------------------------------------------------------------------
// Line search
// ---------------------------------------------------------------------------

using ObjectiveFn = std::function<PointEval(const Vec&)>;

struct WolfeResult {
    double alpha = 0.0;
    double phi = 0.0; // objective at z + alpha d
    Vec g;            // gradient at z + alpha d
    int evals = 0;
};

/// Finds alpha > 0 satisfying both Wolfe conditions
///   f(z + a d) - f(z) <= rho a g'd   and   g(z + a d)'d >= sigma g'd
/// by doubling from a = 1 until the sufficient-decrease interval is
/// bracketed, then bisecting. Requires g'd < 0.
WolfeResult wolfe_search(const ObjectiveFn& f, const Vec& z, const Vec& d, double phi0,
                         double gdot0, double rho, double sigma, int max_bisections);

/// Equalizes the block norms: x' = xi x, y' = y / xi with
/// xi = sqrt(|y|/|x|), leaving the objective value unchanged.
Vec rescale(const Vec& z, int m, int n);

/// Standard-normal start from the seed, rescaled to equal block norms.
Vec random_start(int m, int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Driver loop
// ---------------------------------------------------------------------------

/// Memory gradient minimization of the (shifted) objective. Stops when
/// |g| <= eps (converged), a block norm falls under eps (degenerate; the
/// caller escalates the shift), the iteration cap is hit, or the line search
/// fails. The trace always covers every accepted step.
SolveReport solve(const ShiftedObjective& obj, const SolverConfig& cfg,
                  const Vec* z0 = nullptr);

} // namespace meig
