// meig: extreme M-eigenvalues of fourth-order hierarchically symmetric
// tensors. Subcommands: gen, solve, verify, bench, profile.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/file error,
// 3 non-convergence.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "meig/bench.hpp"
#include "meig/power.hpp"
#include "meig/report_io.hpp"
#include "meig/shift_driver.hpp"
#include "meig/tensor.hpp"

namespace {

using namespace meig;

int bench_threads_from_env() {
    if (const char* env = std::getenv("MEIG_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
        }
        std::cerr << "warning: ignoring invalid MEIG_THREADS value\n";
    }
    return 0; // auto
}

struct GenArgs {
    int m = 0, n = 0;
    double low = 0.0, high = 1.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string fixture_name;
};

int run_gen(const GenArgs& a) {
    HierSymTensor t = a.fixture_name.empty()
                          ? generate_random(a.m, a.n, a.low, a.high, a.seed)
                          : fixture(a.fixture_name);
    store_tensor(t, a.out);
    const SymmetryCheck check = validate_symmetry(t.m(), t.n(), t.entries());
    std::printf("wrote %s (m=%d, n=%d, %zu entries, symmetry violation %.3g)\n", a.out.c_str(),
                t.m(), t.n(), t.entries().size(), check.max_violation);
    return 0;
}

struct SolveArgs {
    std::string tensor_path;
    std::string fixture_name;
    std::string method = "mgm1";
    int memory_depth = -1;
    double eps = 1e-6;
    double rho = 0.1;
    double sigma = 0.5;
    double gamma_floor = 1e-15;
    int max_iter = 2000;
    std::uint64_t seed = 0;
    double t0 = 1.0;
    double shift_growth = 10.0;
    int max_escalations = 12;
    std::optional<double> tau;
    bool smallest = false;
    bool json = false;
    std::string trace_path;
};

int run_solve(const SolveArgs& a) {
    const HierSymTensor tensor =
        a.fixture_name.empty() ? load_tensor(a.tensor_path) : fixture(a.fixture_name);

    if (a.method == "power") {
        PowerConfig cfg;
        cfg.tau = a.tau;
        cfg.eps = a.eps;
        cfg.max_iter = a.max_iter;
        cfg.seed = a.seed;
        const HierSymTensor work = a.smallest ? negated(tensor) : tensor;
        SolveReport rep = power_solve(work, cfg);
        if (!a.trace_path.empty()) write_trace_csv(rep, a.trace_path);
        if (rep.status != SolveStatus::converged || !rep.pair) {
            std::cerr << "power iteration did not converge (" << to_string(rep.status) << ", "
                      << rep.iters << " iterations)\n";
            return 3;
        }
        MEigenpair pair = *rep.pair;
        if (a.smallest) {
            pair.lambda = -pair.lambda;
            Vec dx = contract_x(tensor, pair.x, pair.y);
            Vec dy = contract_y(tensor, pair.x, pair.y);
            axpy(-pair.lambda, pair.x, dx);
            axpy(-pair.lambda, pair.y, dy);
            pair.residual_x = norm_inf(dx);
            pair.residual_y = norm_inf(dy);
        }
        if (a.json) {
            DriveReport shaped;
            shaped.converged = true;
            shaped.pair = pair;
            shaped.shift_t_used = rep.shift_t;
            shaped.phases.push_back(PhaseRecord{rep.shift_t, rep.status, rep.iters});
            std::cout << drive_report_json(shaped);
        } else {
            std::printf("lambda      %.10g\n", pair.lambda);
            std::printf("residuals   x: %.3g  y: %.3g\n", pair.residual_x, pair.residual_y);
            std::printf("iterations  %d (tau %.6g)\n", rep.iters, rep.shift_t);
        }
        return 0;
    }

    MethodSpec spec = parse_method(a.method);
    DriverConfig cfg;
    cfg.t0 = a.t0;
    cfg.shift_growth = a.shift_growth;
    cfg.max_escalations = a.max_escalations;
    cfg.inner.gamma_scheme = spec.scheme;
    cfg.inner.memory_depth = a.memory_depth > 0 ? a.memory_depth : spec.memory_depth;
    cfg.inner.eps = a.eps;
    cfg.inner.wolfe_rho = a.rho;
    cfg.inner.wolfe_sigma = a.sigma;
    cfg.inner.gamma_floor = a.gamma_floor;
    cfg.inner.max_iter = a.max_iter;
    cfg.inner.seed = a.seed;
    cfg.degeneracy_eps = a.eps;

    DriveReport rep = a.smallest ? smallest_m_eigenvalue(tensor, cfg) : drive(tensor, cfg);
    if (!a.trace_path.empty()) write_trace_csv(rep.last, a.trace_path);
    if (a.json) std::cout << drive_report_json(rep);
    if (!rep.converged || !rep.pair) {
        if (!a.json)
            std::cerr << "did not converge after " << rep.phases.size() << " phase(s); last: "
                      << to_string(rep.last.status) << "\n";
        return 3;
    }
    if (!a.json) {
        const MEigenpair& p = *rep.pair;
        std::printf("lambda      %.10g\n", p.lambda);
        std::printf("residuals   x: %.3g  y: %.3g\n", p.residual_x, p.residual_y);
        std::printf("iterations  %d over %zu phase(s), final shift %.6g\n", rep.total_iters(),
                    rep.phases.size(), rep.shift_t_used);
    }
    return 0;
}

struct VerifyArgs {
    std::string tensor_path;
    std::string report_path;
    double tol = 1e-4;
};

int run_verify(const VerifyArgs& a) {
    const HierSymTensor tensor = load_tensor(a.tensor_path);
    const MEigenpair pair = read_eigenpair_report(a.report_path);
    bool ok;
    try {
        ok = verify_eigenpair(tensor, pair, a.tol);
    } catch (const ValueError& e) {
        std::cerr << "malformed report: " << e.what() << "\n";
        return 2;
    }
    std::printf("%s (lambda %.10g, tol %.3g)\n", ok ? "PASS" : "FAIL", pair.lambda, a.tol);
    return ok ? 0 : 1;
}

struct BenchArgs {
    std::string suite = "fixtures";
    std::string methods = "mgm1,mgm2";
    int trials = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string summary_out;
};

std::vector<MethodSpec> parse_method_list(const std::string& csv) {
    std::vector<MethodSpec> methods;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string tok =
            csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) methods.push_back(parse_method(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (methods.empty()) throw ConfigError("no methods given");
    return methods;
}

int run_bench(const BenchArgs& a) {
    const Suite suite = suite_from_string(a.suite);
    const auto methods = parse_method_list(a.methods);
    BatteryResult result =
        run_battery(suite, methods, a.trials, a.seed, bench_threads_from_env());
    write_records_csv(result.records, a.out);
    std::cout << summary_csv(result.summary);
    if (!a.summary_out.empty()) {
        std::ofstream f(a.summary_out, std::ios::binary);
        if (!f) throw Error("cannot open " + a.summary_out + " for writing");
        f << summary_csv(result.summary);
    }
    std::printf("wrote %zu records to %s\n", result.records.size(), a.out.c_str());
    return 0;
}

struct ProfileArgs {
    std::string input;
    std::string metric = "iter";
    std::string out;
    std::string svg;
};

int run_profile(const ProfileArgs& a) {
    const auto records = read_records_csv(a.input);
    const ProfileTable table = compute_profile(records, metric_from_string(a.metric));
    write_profile_csv(table, a.out);
    if (!a.svg.empty()) emit_profile_svg(table, a.svg);
    std::printf("wrote %s (%zu methods, %zu problems)\n", a.out.c_str(), table.methods.size(),
                table.problems.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"extreme M-eigenvalues of hierarchically symmetric tensors"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate a random tensor file");
    cmd_gen->add_option("--m", gen.m, "first/third mode dimension");
    cmd_gen->add_option("--n", gen.n, "second/fourth mode dimension");
    cmd_gen->add_option("--low", gen.low, "uniform lower bound");
    cmd_gen->add_option("--high", gen.high, "uniform upper bound");
    cmd_gen->add_option("--seed", gen.seed, "generator seed");
    cmd_gen->add_option("--out", gen.out, "output path")->required();
    cmd_gen->add_option("--fixture", gen.fixture_name,
                        "write a built-in tensor (ex41, ex42, ex43, rank_one_neg) instead");

    SolveArgs solve;
    CLI::App* cmd_solve = app.add_subcommand("solve", "compute an extreme M-eigenvalue");
    cmd_solve->add_option("--tensor", solve.tensor_path, "tensor file");
    cmd_solve->add_option("--fixture", solve.fixture_name, "built-in tensor name");
    cmd_solve->add_option("--method", solve.method, "mgm1 | mgm2 | power")->required();
    cmd_solve->add_option("--N", solve.memory_depth, "memory depth (default 3 mgm1, 1 mgm2)");
    cmd_solve->add_option("--eps", solve.eps, "gradient tolerance");
    cmd_solve->add_option("--rho", solve.rho, "Wolfe sufficient-decrease parameter");
    cmd_solve->add_option("--sigma", solve.sigma, "Wolfe curvature parameter");
    cmd_solve->add_option("--gamma-floor", solve.gamma_floor, "secant gamma floor");
    cmd_solve->add_option("--max-iter", solve.max_iter, "inner iteration cap");
    cmd_solve->add_option("--seed", solve.seed, "start seed");
    cmd_solve->add_option("--t0", solve.t0, "first shift");
    cmd_solve->add_option("--shift-growth", solve.shift_growth, "shift escalation factor");
    cmd_solve->add_option("--max-escalations", solve.max_escalations, "escalation budget");
    double tau_flag = -1.0;
    CLI::Option* tau_opt = cmd_solve->add_option("--tau", tau_flag, "power-method shift");
    cmd_solve->add_flag("--smallest", solve.smallest, "smallest instead of largest");
    cmd_solve->add_flag("--json", solve.json, "emit the driver report as JSON");
    cmd_solve->add_option("--trace", solve.trace_path, "write the final-phase trace CSV here");

    VerifyArgs verify;
    CLI::App* cmd_verify = app.add_subcommand("verify", "check an eigenpair report");
    cmd_verify->add_option("--tensor", verify.tensor_path, "tensor file")->required();
    cmd_verify->add_option("--report", verify.report_path, "eigenpair report JSON")->required();
    cmd_verify->add_option("--tol", verify.tol, "defect tolerance");

    BenchArgs bench;
    CLI::App* cmd_bench = app.add_subcommand("bench", "run an experiment battery");
    cmd_bench->add_option("--suite", bench.suite,
                          "fixtures | random_square | random_rect | n_sweep | gamma_compare");
    cmd_bench->add_option("--methods", bench.methods, "comma list of methods");
    cmd_bench->add_option("--trials", bench.trials, "trials per problem");
    cmd_bench->add_option("--seed", bench.seed, "battery seed");
    cmd_bench->add_option("--out", bench.out, "records CSV path")->required();
    cmd_bench->add_option("--summary-out", bench.summary_out, "summary CSV path");

    ProfileArgs profile;
    CLI::App* cmd_profile = app.add_subcommand("profile", "performance profile from records");
    cmd_profile->add_option("--input", profile.input, "records CSV")->required();
    cmd_profile->add_option("--metric", profile.metric, "iter | time");
    cmd_profile->add_option("--out", profile.out, "profile CSV path")->required();
    cmd_profile->add_option("--svg", profile.svg, "step-plot SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_gen->parsed()) {
            if (gen.fixture_name.empty() && (gen.m < 1 || gen.n < 1)) {
                std::cerr << "gen needs --m and --n (or --fixture)\n";
                return 2;
            }
            return run_gen(gen);
        }
        if (cmd_solve->parsed()) {
            if (tau_opt->count() > 0) solve.tau = tau_flag;
            if (solve.tensor_path.empty() == solve.fixture_name.empty()) {
                std::cerr << "solve needs exactly one of --tensor / --fixture\n";
                return 2;
            }
            return run_solve(solve);
        }
        if (cmd_verify->parsed()) return run_verify(verify);
        if (cmd_bench->parsed()) return run_bench(bench);
        if (cmd_profile->parsed()) return run_profile(profile);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BreakdownError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
