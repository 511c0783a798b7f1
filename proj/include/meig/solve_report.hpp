#pragma once

#include <optional>
#include <string>
#include <vector>

#include "meig/objective.hpp"
#include "meig/vec.hpp"

namespace meig {

enum class SolveStatus {
    converged,  // gradient tolerance met at a usable point
    degenerate, // iterate collapsed onto a zero block (no eigenpair there)
    max_iter,   // iteration cap reached
    ls_failure, // Wolfe search exhausted its bisection budget
};

const char* to_string(SolveStatus s);
SolveStatus status_from_string(const std::string& s);

/// One row of the iteration trace. gdot = g'd is negative at every recorded
/// iteration of a memory gradient run (descent directions by construction).
struct IterationRecord {
    int k = 0;
    double phi = 0.0;
    double grad_norm = 0.0;
    double alpha = 0.0;
    double gdot = 0.0;
    double gamma = 0.0;
    double t_shift = 0.0;
};

/// Full per-iteration state, recorded only when SolverConfig.record_detail
/// is set. Lets tests re-substitute the Wolfe conditions and re-check the
/// descent and rescale contracts from the exact iterates.
struct IterationDetail {
    Vec z;      // iterate the direction was built at
    Vec g;      // gradient at z
    Vec d;      // search direction
    double gamma = 0.0;
    double phi0 = 0.0;   // objective at z
    double alpha = 0.0;  // accepted Wolfe step
    Vec z_step;          // z + alpha d (before rescaling)
    Vec g_step;          // gradient at z_step
    double phi_step = 0.0;
    Vec z_next;          // rescaled iterate (empty on the final iteration)
    double phi_next = 0.0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::max_iter;
    std::optional<MEigenpair> pair;
    std::vector<IterationRecord> trace;
    int iters = 0; // == trace.size()
    double wall_time = 0.0;

    double shift_t = 0.0;
    Vec z_final;
    double phi_final = 0.0;
    double grad_norm_final = 0.0;

    std::vector<IterationDetail> detail;
};

/// Trace export: one row per iteration, deterministic bytes for a fixed run.
std::string trace_csv(const SolveReport& report);
void write_trace_csv(const SolveReport& report, const std::string& path);

} // namespace meig
