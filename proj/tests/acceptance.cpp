// Acceptance suite: end-to-end gate checks at pinned tolerances, one
// pass/fail line per criterion. Exit status is the number of failed
// criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "meig/bench.hpp"
#include "meig/objective.hpp"
#include "meig/power.hpp"
#include "meig/rng.hpp"
#include "meig/shift_driver.hpp"
#include "meig/tensor.hpp"

using namespace meig;

namespace {

// Reference extreme eigenvalues for the bundled fixtures. ex41 and ex43
// reproduce their conventional table values. ex42's table value (318) is not
// attainable from its printed entry list under any consistent reading (24
// readings scanned: both index layouts, single-position / orbit / elasticity
// -group expansion, first- and last-write-wins, both sign conventions), so
// the frozen fixture's value is certified independently by exhaustive grid
// search plus local refinement over the product of unit spheres.
constexpr double kEx41Ref = 13.8616;
constexpr double kEx42TableRef = 318.0;
constexpr double kEx42Certified = 199.9067;
constexpr double kEx43Ref = 2.3227;

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& note) {
    std::printf("[%s] criterion %2d %-24s %s\n", pass ? "PASS" : "FAIL", id, name, note.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared run registry: every solver run the suite performs feeds the
// certificate and per-iteration checks.
// ---------------------------------------------------------------------------

struct MgmRun {
    HierSymTensor worked = HierSymTensor::zero(1, 1); // tensor the inner objective saw
    double shift = 0.0;
    SolverConfig cfg;
    SolveReport rep;
};

struct Certificate {
    HierSymTensor tensor; // ORIGINAL (unshifted, unscaled) tensor
    MEigenpair pair;
    std::string origin;
};

std::vector<MgmRun> g_mgm_runs;
std::vector<Certificate> g_certificates;

DriveReport run_drive(const HierSymTensor& tensor, GammaScheme scheme, int depth,
                      std::uint64_t seed, const std::string& origin) {
    DriverConfig cfg;
    cfg.inner.gamma_scheme = scheme;
    cfg.inner.memory_depth = depth;
    cfg.inner.seed = seed;
    cfg.inner.record_detail = true;
    DriveReport rep = drive(tensor, cfg);

    MgmRun run;
    run.worked = rep.tensor_scale != 1.0 ? scaled(tensor, 1.0 / rep.tensor_scale) : tensor;
    run.shift = rep.last.shift_t;
    run.cfg = cfg.inner;
    run.rep = rep.last;
    g_mgm_runs.push_back(std::move(run));

    if (rep.converged && rep.pair)
        g_certificates.push_back(Certificate{tensor, *rep.pair, origin});
    return rep;
}

void run_direct_solves() {
    // Standalone solves at both shifts and both schemes widen the
    // per-iteration coverage beyond what the drives keep.
    Rng seeds(1234);
    std::vector<HierSymTensor> tensors;
    tensors.push_back(fixture("ex41"));
    tensors.push_back(fixture("ex43"));
    tensors.push_back(generate_random(5, 5, 0.0, 1.0, 42));
    tensors.push_back(generate_random(4, 6, -5.0, 5.0, 43));
    for (const HierSymTensor& t : tensors) {
        const double c = normalization_scale(t, 7);
        const HierSymTensor worked = c != 1.0 ? scaled(t, 1.0 / c) : t;
        for (double shift : {0.0, 1.0}) {
            for (GammaScheme scheme : {GammaScheme::constant_one, GammaScheme::modified_secant}) {
                MgmRun run;
                run.worked = worked;
                run.shift = shift;
                run.cfg.gamma_scheme = scheme;
                run.cfg.memory_depth = scheme == GammaScheme::constant_one ? 3 : 1;
                run.cfg.seed = seeds.next_u64();
                run.cfg.record_detail = true;
                const ShiftedObjective obj(run.worked, shift);
                run.rep = solve(obj, run.cfg);
                if (run.rep.status == SolveStatus::converged && run.rep.pair && shift == 0.0) {
                    MEigenpair pair = *run.rep.pair;
                    pair.lambda *= c;
                    pair = refine_eigenpair(t, pair);
                    g_certificates.push_back(Certificate{t, pair, "direct-solve"});
                }
                g_mgm_runs.push_back(std::move(run));
            }
        }
    }

    for (const char* name : {"ex41", "ex43"}) {
        const HierSymTensor t = fixture(name);
        PowerConfig cfg;
        cfg.seed = 77;
        const SolveReport rep = power_solve(t, cfg);
        if (rep.status == SolveStatus::converged && rep.pair)
            g_certificates.push_back(Certificate{t, *rep.pair, std::string("power-") + name});
    }
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

void criterion_1_fixture_eigenvalues() {
    const std::uint64_t seeds[5] = {101, 102, 103, 104, 105};
    struct Row {
        const char* name;
        double ref;
    };
    const Row rows[3] = {{"ex41", kEx41Ref}, {"ex42", kEx42TableRef}, {"ex43", kEx43Ref}};

    bool pass = true;
    std::string note;
    for (const Row& row : rows) {
        const HierSymTensor t = fixture(row.name);
        for (int variant = 0; variant < 2; ++variant) {
            const GammaScheme scheme =
                variant == 0 ? GammaScheme::constant_one : GammaScheme::modified_secant;
            const int depth = variant == 0 ? 3 : 1;
            double best = -1e300, worst_time = 0.0;
            for (std::uint64_t seed : seeds) {
                const DriveReport rep = run_drive(t, scheme, depth, seed,
                                                  fmt("c1-%s-%s", row.name,
                                                      variant == 0 ? "mgm1" : "mgm2"));
                worst_time = std::max(worst_time, rep.wall_time);
                if (rep.converged) best = std::max(best, rep.pair->lambda);
            }
            const bool time_ok = worst_time <= 1.0;
            const bool value_ok = std::abs(best - row.ref) <= 1e-2;
            pass = pass && time_ok && value_ok;
            note += fmt("%s/%s %.5f ", row.name, variant == 0 ? "mgm1" : "mgm2", best);
            if (!time_ok) note += fmt("(slow %.2fs!) ", worst_time);
            if (!value_ok) {
                note += fmt("(|lambda - %g| = %.3g > 1e-2", row.ref, std::abs(best - row.ref));
                if (std::string(row.name) == "ex42") {
                    note += fmt("; table value unattainable from the printed entries, "
                                "certified fixture value %.4f matched to %.1e - see README",
                                kEx42Certified, std::abs(best - kEx42Certified));
                }
                note += ") ";
            }
        }
    }
    report(1, "fixture-eigenvalues", pass, note);
}

void criterion_2_grid_agreement() {
    bool pass = true;
    std::string note;
    for (const char* name : {"ex41", "rank_one_neg"}) {
        const HierSymTensor t = fixture(name);
        const double oracle = grid_oracle(t, 2000);
        double best = -1e300;
        for (std::uint64_t seed : {111u, 112u, 113u, 114u, 115u}) {
            const DriveReport rep =
                run_drive(t, GammaScheme::constant_one, 3, seed, fmt("c2-%s", name));
            if (rep.converged) best = std::max(best, rep.pair->lambda);
        }
        const bool ok = std::abs(best - oracle) <= 1e-3;
        pass = pass && ok;
        note += fmt("%s: driver %.6f vs grid %.6f  ", name, best, oracle);
    }
    report(2, "grid-oracle-agreement", pass, note);
}

void criterion_3_certificates() {
    bool pass = true;
    int checked = 0;
    double worst = 0.0;
    std::string bad;
    for (const Certificate& cert : g_certificates) {
        const bool ok = verify_eigenpair(cert.tensor, cert.pair, 1e-4);
        const double defect = std::max(cert.pair.residual_x, cert.pair.residual_y);
        worst = std::max(worst, defect);
        if (!ok && bad.empty()) bad = fmt(" first failure: %s", cert.origin.c_str());
        pass = pass && ok;
        ++checked;
    }
    report(3, "eigenpair-certificates", pass && checked > 0,
           fmt("%d converged runs at tol 1e-4, worst defect %.2e%s", checked, worst,
               bad.c_str()));
}

void criterion_4_gradient_check() {
    struct Case {
        std::string name;
        HierSymTensor tensor;
    };
    std::vector<Case> cases;
    cases.push_back({"ex41", fixture("ex41")});
    cases.push_back({"ex42", fixture("ex42")});
    cases.push_back({"ex43", fixture("ex43")});
    cases.push_back({"u01-5x5", generate_random(5, 5, 0.0, 1.0, 42)});

    bool pass = true;
    double worst = 0.0;
    Rng rng(555);
    for (const Case& c : cases) {
        const ShiftedObjective obj(c.tensor, 0.0);
        const int dim = obj.dim();
        for (int rep = 0; rep < 100; ++rep) {
            Vec z(dim);
            for (double& v : z) v = rng.normal();
            const double nz = norm2(z);
            const double target = 3.0 * rng.uniform01();
            for (double& v : z) v *= target / nz;

            const PointEval e = obj.evaluate(z);
            const double h = 1e-6;
            Vec fd(dim);
            Vec p = z;
            for (int i = 0; i < dim; ++i) {
                const double saved = p[i];
                p[i] = saved + h;
                const double fp = obj.eval_z(p);
                p[i] = saved - h;
                const double fm = obj.eval_z(p);
                p[i] = saved;
                fd[i] = (fp - fm) / (2.0 * h);
            }
            double diff2 = 0.0, ref2 = 0.0;
            for (int i = 0; i < dim; ++i) {
                diff2 += (e.g[i] - fd[i]) * (e.g[i] - fd[i]);
                ref2 += e.g[i] * e.g[i];
            }
            const double rel = std::sqrt(diff2) / std::max(1.0, std::sqrt(ref2));
            worst = std::max(worst, rel);
            pass = pass && rel <= 1e-6;
        }
    }
    report(4, "gradient-vs-fd", pass, fmt("400 points, worst relative error %.2e", worst));
}

void criterion_5_descent() {
    bool pass = true;
    long iterations = 0;
    std::string bad;
    for (const MgmRun& run : g_mgm_runs) {
        for (const IterationRecord& rec : run.rep.trace) {
            const bool descent = rec.gdot < 0.0;
            const bool sufficient =
                rec.gdot <= -(rec.gamma / 2.0) * rec.grad_norm * rec.grad_norm;
            if ((!descent || !sufficient) && bad.empty())
                bad = fmt(" first failure at k=%d gdot=%.3e", rec.k, rec.gdot);
            pass = pass && descent && sufficient;
            ++iterations;
        }
        for (const IterationDetail& det : run.rep.detail) {
            pass = pass && det.phi_step <= det.phi0;
            if (det.phi_step > det.phi0 && bad.empty()) bad = " objective increased";
        }
    }
    report(5, "descent-properties", pass && iterations > 0,
           fmt("%ld iterations: g'd < 0, g'd <= -(gamma/2)|g|^2, monotone objective%s",
               iterations, bad.c_str()));
}

void criterion_6_wolfe_resubstitution() {
    bool pass = true;
    long checked = 0;
    for (const MgmRun& run : g_mgm_runs) {
        const ShiftedObjective obj(run.worked, run.shift);
        for (const IterationDetail& det : run.rep.detail) {
            const PointEval at_z = obj.evaluate(det.z);
            const PointEval at_step = obj.evaluate(det.z_step);
            const double gdot0 = dot(at_z.g, det.d);
            // same arrangement the implementation accepts with
            const bool decrease =
                at_step.phi <= at_z.phi + run.cfg.wolfe_rho * det.alpha * gdot0;
            const bool curvature = dot(at_step.g, det.d) >= run.cfg.wolfe_sigma * gdot0;
            const bool consistent = at_z.phi == det.phi0 && at_step.phi == det.phi_step;
            pass = pass && decrease && curvature && consistent;
            ++checked;
        }
    }
    report(6, "wolfe-resubstitution", pass && checked > 0,
           fmt("%ld accepted steps re-checked exactly", checked));
}

void criterion_7_rescale_invariance() {
    bool pass = true;
    long checked = 0;
    double worst_drift = 0.0, worst_imbalance = 0.0;
    for (const MgmRun& run : g_mgm_runs) {
        const int m = run.worked.m(), n = run.worked.n();
        for (const IterationDetail& det : run.rep.detail) {
            if (det.z_next.empty()) continue;
            const double drift =
                std::abs(det.phi_next - det.phi_step) / (1.0 + std::abs(det.phi_step));
            worst_drift = std::max(worst_drift, drift);
            pass = pass && drift <= 1e-10;
            const double nx = norm2(x_block(det.z_next, m));
            const double ny = norm2(y_block(det.z_next, m, n));
            const double imbalance = std::abs(nx - ny) / std::max(1.0, nx);
            worst_imbalance = std::max(worst_imbalance, imbalance);
            pass = pass && imbalance <= 1e-12;
            ++checked;
        }
    }
    report(7, "rescale-invariance", pass && checked > 0,
           fmt("%ld rescales, worst drift %.2e, worst norm imbalance %.2e", checked,
               worst_drift, worst_imbalance));
}

void criterion_8_min_value_identity() {
    bool pass = true;
    int checked = 0;
    double worst = 0.0;
    for (const MgmRun& run : g_mgm_runs) {
        if (run.shift != 0.0 || run.rep.status != SolveStatus::converged) continue;
        const int m = run.worked.m(), n = run.worked.n();
        const double xx = dot(x_block(run.rep.z_final, m), x_block(run.rep.z_final, m));
        const double yy =
            dot(y_block(run.rep.z_final, m, n), y_block(run.rep.z_final, m, n));
        const double lambda = xx * yy;
        const double miss = std::abs(run.rep.phi_final + 0.25 * lambda * lambda) /
                            (1e-6 * (1.0 + lambda * lambda));
        worst = std::max(worst, miss);
        pass = pass && miss <= 1.0;
        ++checked;
    }
    report(8, "min-value-identity", pass && checked > 0,
           fmt("%d converged unshifted runs, worst |f + lambda^2/4| at %.2f of the bound",
               checked, worst));
}

void criterion_9_shift_path() {
    bool pass = true;
    std::string note;
    const HierSymTensor t = fixture("rank_one_neg");
    DriverConfig cfg_ref;
    for (std::uint64_t seed : {121u, 122u, 123u, 124u, 125u}) {
        const DriveReport rep =
            run_drive(t, GammaScheme::constant_one, 3, seed, "c9-rank_one_neg");
        const bool converged = rep.converged && rep.pair.has_value();
        const bool escalated = rep.phases.size() >= 2;
        const bool in_band = converged && std::abs(rep.pair->lambda) <= 1e-4;
        bool ladder = !rep.phases.empty() && rep.phases[0].t == 0.0;
        double expect = cfg_ref.t0;
        for (std::size_t j = 1; j < rep.phases.size(); ++j) {
            ladder = ladder && std::abs(rep.phases[j].t - expect) <= 1e-12 * expect;
            expect *= cfg_ref.shift_growth;
        }
        if (!(converged && escalated && in_band && ladder)) {
            pass = false;
            note += fmt("seed %llu: conv=%d esc=%zu lambda=%.2e ladder=%d  ",
                        static_cast<unsigned long long>(seed), converged, rep.phases.size(),
                        converged && rep.pair ? rep.pair->lambda : 1e9, ladder);
        }
    }
    if (pass) note = "5 seeds: >=1 escalation, |lambda| <= 1e-4, geometric shift ladder";
    report(9, "shift-path", pass, note);
}

void criterion_10_profile_math() {
    const auto rec = [](const char* p, const char* m, int iters,
                        SolveStatus status = SolveStatus::converged) {
        RunRecord r;
        r.problem_id = p;
        r.method_id = m;
        r.m = r.n = 2;
        r.status = status;
        r.iters = iters;
        r.time_s = 0.125 * iters;
        r.lambda = 1.0;
        return r;
    };
    bool pass = true;
    std::string note = "hand example exact; ";

    std::vector<RunRecord> records = {rec("p0", "a", 2), rec("p0", "b", 4), rec("p1", "a", 3),
                                      rec("p1", "b", 3)};
    const ProfileTable table = compute_profile(records, Metric::iter);
    pass = pass && table.ratios[0][0] == 1.0 && table.ratios[0][1] == 2.0 &&
           table.ratios[1][0] == 1.0 && table.ratios[1][1] == 1.0;
    const auto phi_at = [&](std::size_t method, double tau) {
        double value = 0.0;
        for (const auto& [t, p] : table.curves[method].points)
            if (t <= tau) value = p;
        return value;
    };
    pass = pass && phi_at(0, 1.0) == 1.0 && phi_at(1, 1.0) == 0.5 && phi_at(1, 2.0) == 1.0;

    // monotone, bounded step curves
    for (const auto& curve : table.curves) {
        double prev = 0.0;
        for (const auto& [tau, phi] : curve.points) {
            pass = pass && phi >= prev && phi >= 0.0 && phi <= 1.0;
            prev = phi;
        }
    }

    // scale freedom: b -> 3b leaves ratios and curves bitwise unchanged
    std::vector<RunRecord> scaled_records = records;
    for (RunRecord& r : scaled_records) r.iters *= 3;
    const ProfileTable scaled_table = compute_profile(scaled_records, Metric::iter);
    bool scale_free = scaled_table.ratios == table.ratios;
    for (std::size_t c = 0; c < table.curves.size() && scale_free; ++c)
        scale_free = scale_free && scaled_table.curves[c].points == table.curves[c].points;
    pass = pass && scale_free;
    note += scale_free ? "scale-free under b -> 3b" : "NOT scale-free";

    report(10, "profile-math", pass, note);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string strip_time_column(const std::string& csv) {
    std::string out;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            if (i == 7) continue;
            out += fields[i];
            out += ',';
        }
        if (!fields.empty()) out += fields.back();
        out += '\n';
    }
    return out;
}

void criterion_11_bench_determinism() {
    const char* cli = std::getenv("MEIG_CLI");
    if (!cli) {
        report(11, "bench-determinism", false, "MEIG_CLI not set (run through ctest)");
        return;
    }
    const std::string base = "bench --suite random_square --seed 7 --trials 10";
    const std::string cmd_a = std::string("MEIG_THREADS=1 ") + cli + " " + base +
                              " --out acc_rs_a.csv > acc_rs_a.log 2>&1";
    const std::string cmd_b = std::string("MEIG_THREADS=4 ") + cli + " " + base +
                              " --out acc_rs_b.csv > acc_rs_b.log 2>&1";
    const int rc_a = std::system(cmd_a.c_str());
    const int rc_b = std::system(cmd_b.c_str());
    if (rc_a != 0 || rc_b != 0) {
        report(11, "bench-determinism", false, "bench invocation failed");
        return;
    }
    const std::string a = read_file("acc_rs_a.csv");
    const std::string b = read_file("acc_rs_b.csv");
    const int rows = static_cast<int>(std::count(a.begin(), a.end(), '\n')) - 1;
    const bool rows_ok = rows == 120; // 6 sizes x 10 trials x 2 methods
    const bool equal = !a.empty() && strip_time_column(a) == strip_time_column(b);
    report(11, "bench-determinism", equal && rows_ok,
           fmt("two runs, MEIG_THREADS=1 vs 4: %s (%d rows)",
               equal ? "byte-identical up to the time column" : "MISMATCH", rows));

    // soft cross-method agreement: same start, same maximizer expected
    std::map<std::string, std::map<std::string, double>> lambdas;
    std::stringstream ss(a);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() == 9 && fields[5] == "converged")
            lambdas[fields[0]][fields[1]] = std::strtod(fields[8].c_str(), nullptr);
    }
    int disagreements = 0, compared = 0;
    for (const auto& [problem, by_method] : lambdas) {
        if (by_method.size() < 2) continue;
        const double x = by_method.begin()->second;
        const double y = std::next(by_method.begin())->second;
        ++compared;
        if (std::abs(x - y) > 1e-3 * (1.0 + std::abs(x))) {
            ++disagreements;
            std::printf("       note: methods disagree on %s: %.6f vs %.6f\n", problem.c_str(),
                        x, y);
        }
    }
    std::printf("       info: cross-method lambda agreement on %d problems, %d flagged "
                "(soft check)\n",
                compared, disagreements);
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    const auto t0 = std::chrono::steady_clock::now();

    criterion_1_fixture_eigenvalues();
    criterion_2_grid_agreement();
    run_direct_solves();
    criterion_3_certificates();
    criterion_4_gradient_check();
    criterion_9_shift_path(); // before 5-8 so its runs join the registry
    criterion_5_descent();
    criterion_6_wolfe_resubstitution();
    criterion_7_rescale_invariance();
    criterion_8_min_value_identity();
    criterion_10_profile_math();
    criterion_11_bench_determinism();

    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance: %d of 11 criteria passed in %.1f s\n", 11 - g_failures, dt);
    return g_failures;
}
