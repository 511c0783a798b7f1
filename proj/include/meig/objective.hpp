#pragma once

#include <span>

#include "meig/tensor.hpp"
#include "meig/vec.hpp"

namespace meig {

/// An M-eigenvalue with unit left/right eigenvectors and the infinity-norm
/// defects of the eigenpair system
///   A.yxy = lambda x,  Axyx. = lambda y,  |x| = |y| = 1.
/// Residuals are always recomputed from the tensor, never trusted.
struct MEigenpair {
    double lambda = 0.0;
    Vec x;
    Vec y;
    double residual_x = 0.0;
    double residual_y = 0.0;
};

/// Value and stacked gradient of the objective at a point z = (x, y).
struct PointEval {
    double phi = 0.0;
    Vec g; // size m + n
};

/// The unconstrained merit function
///   f_t(x,y) = 1/4 (x'x)^2 (y'y)^2 - 1/2 Axyxy - t/2 (x'x)(y'y),
/// whose nonzero critical points encode M-eigenpairs with
/// lambda = (x'x)(y'y) - t. The shift t = 0 recovers the plain objective
/// used when the tensor has a positive M-eigenvalue.
class ShiftedObjective {
public:
    ShiftedObjective(const HierSymTensor& tensor, double t);

    const HierSymTensor& tensor() const { return *tensor_; }
    double shift() const { return t_; }
    int m() const { return tensor_->m(); }
    int n() const { return tensor_->n(); }
    int dim() const { return m() + n(); }

    double eval(std::span<const double> x, std::span<const double> y) const;
    void grad(std::span<const double> x, std::span<const double> y, Vec& g1, Vec& g2) const;

    /// Fused value + gradient over a stacked iterate; the hot path of the
    /// solvers (two contraction sweeps per call).
    PointEval evaluate(const Vec& z) const;
    double eval_z(const Vec& z) const;

private:
    const HierSymTensor* tensor_; // non-owning; must outlive the objective
    double t_;
};

/// Reads an M-eigenpair off a (near-)critical point:
/// lambda = (x'x)(y'y) - t, unit vectors with a deterministic sign
/// convention (first nonzero component positive), recomputed residuals.
/// Throws DegeneratePointError when a block is zero.
MEigenpair extract_eigenpair(const ShiftedObjective& obj, std::span<const double> x,
                             std::span<const double> y);

/// True iff both infinity-norm defects of the eigenpair system are <= tol.
/// Requires unit-norm vectors (within 1e-12).
bool verify_eigenpair(const HierSymTensor& tensor, const MEigenpair& pair, double tol);

/// Sharpens a near-eigenpair by alternating contraction sweeps, returning
/// whichever iterate has the smaller worst-case defect (the input pair when
/// nothing improves). A gradient-tolerance solve leaves defects of order
/// |lambda| * eps; this brings pairs in a stable basin near machine level.
MEigenpair refine_eigenpair(const HierSymTensor& tensor, const MEigenpair& pair,
                            int max_sweeps = 30);

/// Brute-force maximizer of the biquadratic form over unit circles,
/// restricted to m = n = 2: x = (cos a, sin a), y = (cos b, sin b) on a
/// steps x steps grid, refined by local pattern search. Serves as an
/// independent ground truth for the small fixtures.
double grid_oracle(const HierSymTensor& tensor, int steps);

} // namespace meig
