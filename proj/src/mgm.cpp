#include "meig/mgm.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "meig/rng.hpp"

namespace meig {

void SolverConfig::validate() const {
    if (memory_depth < 1) throw ConfigError("memory_depth must be >= 1");
    if (!(gamma_floor > 0.0)) throw ConfigError("gamma_floor must be positive");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (!(0.0 < wolfe_rho && wolfe_rho < wolfe_sigma && wolfe_sigma < 1.0))
        throw ConfigError("Wolfe parameters require 0 < rho < sigma < 1");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (ls_max_bisections < 1) throw ConfigError("ls_max_bisections must be >= 1");
}

DirectionMemory::DirectionMemory(int depth) : depth_(depth) {
    if (depth < 1) throw ConfigError("direction memory depth must be >= 1");
}

void DirectionMemory::push(Vec d) {
    items_.push_front(std::move(d));
    if (items_.size() > static_cast<std::size_t>(depth_)) items_.pop_back();
}

double gamma_constant(int /*k*/) { return 1.0; }

double gamma_secant(const Vec& z_cur, const Vec& z_prev, const Vec& g_cur, const Vec& g_prev,
                    double phi_cur, double phi_prev, double gamma_floor, ThetaVariant variant) {
    const std::size_t dim = z_cur.size();
    Vec s(dim), dg(dim);
    double ss = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        s[i] = z_cur[i] - z_prev[i];
        dg[i] = g_cur[i] - g_prev[i];
        ss += s[i] * s[i];
    }
    if (ss == 0.0) return 1.0; // degenerate step

    double theta = 6.0 * (phi_cur - phi_prev);
    if (variant == ThetaVariant::printed) {
        theta += 3.0 * dot(dg, s);
    } else {
        double gs = 0.0;
        for (std::size_t i = 0; i < dim; ++i) gs += (g_cur[i] + g_prev[i]) * s[i];
        theta += 3.0 * gs;
    }

    // w = dg + (theta / s's) s, taking s itself as the auxiliary vector so
    // the denominator s'xi = |s|^2 cannot vanish for a nonzero step.
    const double c = theta / ss;
    Vec w = dg;
    axpy(c, s, w);

    const double ww = dot(w, w);
    if (ww == 0.0) return 1.0;
    const double ratio = dot(w, s) / ww;
    return ratio < gamma_floor ? 1.0 : ratio;
}

double phi_rule(const Vec& g, const Vec& d_prev, double gamma, int m, int n) {
    return (norm2(g) * norm2(d_prev) + dot(g, d_prev) + m + n) / gamma;
}

double beta_rule(const Vec& g, double phi) {
    if (phi == 0.0) return 0.0;
    return dot(g, g) / phi;
}

Vec build_direction(const Vec& g, const DirectionMemory& memory, double gamma, int m, int n) {
    if (!(gamma > 0.0)) throw ConfigError("build_direction requires gamma > 0");
    Vec d = scaled(g, -gamma);
    if (memory.size() == 0) return d;
    const double inv_depth = 1.0 / memory.depth();
    for (std::size_t i = 0; i < memory.size(); ++i) {
        const Vec& prev = memory[i];
        const double beta = beta_rule(g, phi_rule(g, prev, gamma, m, n));
        if (beta != 0.0) axpy(inv_depth * beta, prev, d);
    }
    return d;
}

WolfeResult wolfe_search(const ObjectiveFn& f, const Vec& z, const Vec& d, double phi0,
                         double gdot0, double rho, double sigma, int max_bisections) {
    if (!(0.0 < rho && rho < sigma && sigma < 1.0))
        throw ConfigError("Wolfe parameters require 0 < rho < sigma < 1");
    if (!(gdot0 < 0.0)) throw ValueError("wolfe_search requires a descent direction (g'd < 0)");

    const double inf = std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = inf, alpha = 1.0;
    int evals = 0;
    Vec trial(z.size());
    for (int it = 0; it < max_bisections; ++it) {
        for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] + alpha * d[i];
        PointEval e = f(trial);
        ++evals;
        // Sum arrangement: once rho*alpha*g'd drops under the ulp of phi0 the
        // bound rounds to phi0 itself, so plateau steps near convergence stay
        // acceptable (the difference arrangement rejects them all). A trial
        // whose gradient overflowed (quartic growth at large alpha) is
        // treated as too far out even when phi still reads finite.
        const bool sufficient_decrease =
            std::isfinite(e.phi) && all_finite(e.g) && e.phi <= phi0 + rho * alpha * gdot0;
        if (!sufficient_decrease) {
            hi = alpha;
            alpha = 0.5 * (lo + hi);
        } else if (dot(e.g, d) < sigma * gdot0) {
            lo = alpha;
            alpha = (hi == inf) ? 2.0 * alpha : 0.5 * (lo + hi);
        } else {
            return WolfeResult{alpha, e.phi, std::move(e.g), evals};
        }
    }
    throw LineSearchError("no Wolfe step within the bisection budget", lo, hi, alpha, evals);
}

Vec rescale(const Vec& z, int m, int n) {
    const double nx = norm2(x_block(z, m));
    const double ny = norm2(y_block(z, m, n));
    if (nx == 0.0 || ny == 0.0)
        throw DegeneratePointError("rescale at a point with a zero block");
    const double xi = std::sqrt(ny / nx);
    Vec out(z.size());
    for (int i = 0; i < m; ++i) out[i] = xi * z[i];
    for (int j = 0; j < n; ++j) out[m + j] = z[m + j] / xi;
    return out;
}

Vec random_start(int m, int n, std::uint64_t seed) {
    Rng rng(seed);
    Vec z(static_cast<std::size_t>(m) + n);
    for (double& v : z) v = rng.normal();
    return rescale(z, m, n);
}

SolveReport solve(const ShiftedObjective& obj, const SolverConfig& cfg, const Vec* z0) {
    cfg.validate();
    const int m = obj.m(), n = obj.n();
    const auto t_start = std::chrono::steady_clock::now();

    Vec z;
    if (z0) {
        if (z0->size() != static_cast<std::size_t>(obj.dim()))
            throw DimensionError("start point has wrong dimension");
        z = *z0;
    } else {
        z = random_start(m, n, cfg.seed);
    }

    const ObjectiveFn f = [&obj](const Vec& p) { return obj.evaluate(p); };

    SolveReport rep;
    rep.shift_t = obj.shift();

    PointEval e = obj.evaluate(z);
    double gnorm = norm2(e.g);
    SolveStatus status = SolveStatus::max_iter;

    if (gnorm <= cfg.eps) {
        status = SolveStatus::converged;
    } else {
        DirectionMemory memory(cfg.memory_depth);
        double gamma = 1.0; // gamma_0 = 1 under both schemes
        Vec d = build_direction(e.g, memory, gamma, m, n);

        for (int k = 0; k < cfg.max_iter; ++k) {
            const double gdot = dot(e.g, d);
            if (!(gdot < 0.0))
                throw Error("internal: memory direction lost the descent property");

            WolfeResult w;
            try {
                w = wolfe_search(f, z, d, e.phi, gdot, cfg.wolfe_rho, cfg.wolfe_sigma,
                                 cfg.ls_max_bisections);
            } catch (const LineSearchError&) {
                status = SolveStatus::ls_failure;
                break;
            }

            Vec z_step(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) z_step[i] = z[i] + w.alpha * d[i];

            rep.trace.push_back(
                IterationRecord{k, e.phi, gnorm, w.alpha, gdot, gamma, obj.shift()});
            IterationDetail* det = nullptr;
            if (cfg.record_detail) {
                rep.detail.push_back(IterationDetail{z, e.g, d, gamma, e.phi, w.alpha, z_step,
                                                     w.g, w.phi, Vec{}, 0.0});
                det = &rep.detail.back();
            }

            const double gnorm_step = norm2(w.g);
            if (gnorm_step <= cfg.eps) {
                z = std::move(z_step);
                e.phi = w.phi;
                e.g = std::move(w.g);
                gnorm = gnorm_step;
                status = SolveStatus::converged;
                break;
            }

            const double bx = norm2(x_block(z_step, m));
            const double by = norm2(y_block(z_step, m, n));
            if (std::min(bx, by) < cfg.eps) {
                z = std::move(z_step);
                e.phi = w.phi;
                e.g = std::move(w.g);
                gnorm = gnorm_step;
                status = SolveStatus::degenerate;
                break;
            }

            Vec z_next = rescale(z_step, m, n);
            PointEval e_next = obj.evaluate(z_next);
            if (det) {
                det->z_next = z_next;
                det->phi_next = e_next.phi;
            }

            gamma = (cfg.gamma_scheme == GammaScheme::constant_one)
                        ? 1.0
                        : gamma_secant(z_next, z, e_next.g, e.g, e_next.phi, e.phi,
                                       cfg.gamma_floor, cfg.theta_variant);
            memory.push(std::move(d));
            d = build_direction(e_next.g, memory, gamma, m, n);

            z = std::move(z_next);
            e = std::move(e_next);
            gnorm = norm2(e.g);
        }
    }

    rep.status = status;
    rep.iters = static_cast<int>(rep.trace.size());
    rep.z_final = z;
    rep.phi_final = e.phi;
    rep.grad_norm_final = gnorm;
    if (status == SolveStatus::converged) {
        try {
            rep.pair = extract_eigenpair(obj, x_block(z, m), y_block(z, m, n));
        } catch (const DegeneratePointError&) {
            rep.status = SolveStatus::degenerate;
        }
    }
    rep.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

} // namespace meig
