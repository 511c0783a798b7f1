#pragma once

#include "meig/mgm.hpp"
#include "meig/solve_report.hpp"
#include "meig/tensor.hpp"

namespace meig {

/// Adaptive escalation between the plain objective and the shifted one:
/// if the unshifted minimization collapses onto a zero block (which happens
/// exactly when the tensor has no positive M-eigenvalue), retry with shifts
/// t0, t0 * growth, t0 * growth^2, ...
struct DriverConfig {
    double t0 = 1.0;            // first shift, >= 1
    double shift_growth = 10.0; // escalation factor, > 1
    double degeneracy_eps = 1e-6;
    int max_escalations = 12;
    SolverConfig inner;

    void validate() const;
};

/// One inner solve: the shift it ran at, how it ended, how many iterations.
struct PhaseRecord {
    double t = 0.0;
    SolveStatus status = SolveStatus::max_iter;
    int iters = 0;
};

struct DriveReport {
    bool converged = false;
    std::optional<MEigenpair> pair;    // eigenpair of the ORIGINAL tensor
    double shift_t_used = 0.0;         // shift of the successful phase
    std::vector<PhaseRecord> phases;   // t = 0 phase first, then escalations
    SolveReport last;                  // final phase, in normalized coordinates
    double tensor_scale = 1.0;         // the c the inner solves divided by
    double wall_time = 0.0;

    int total_iters() const;
};

/// The scale the driver divides the tensor by before solving: a seeded
/// power-sweep estimate of the extreme M-eigenvalue magnitude, floored by
/// the largest absolute entry (1 for the zero tensor). Eigenvalues scale
/// linearly with the tensor, so solving A / c and multiplying back is exact
/// at the level of the eigenpair system, while keeping the objective
/// magnitude - and with it the resolution of the Wolfe tests in double
/// precision and the meaning of the gradient tolerance - independent of the
/// tensor's units. Deterministic in (tensor, seed).
double normalization_scale(const HierSymTensor& tensor, std::uint64_t seed);

/// Runs the unshifted problem first; on a degenerate outcome escalates the
/// shift geometrically, restarting from a fresh deterministic seed each
/// time, until a phase converges at a point with both block norms above
/// degeneracy_eps or the escalation budget runs out. z0, when supplied,
/// seeds the first phase only.
DriveReport drive(const HierSymTensor& tensor, const DriverConfig& cfg, const Vec* z0 = nullptr);

/// Smallest M-eigenvalue via the negated tensor: min spec(A) = -max spec(-A).
/// Negation preserves the symmetry class; the eigenvectors carry over.
DriveReport smallest_m_eigenvalue(const HierSymTensor& tensor, const DriverConfig& cfg,
                                  const Vec* z0 = nullptr);

} // namespace meig
