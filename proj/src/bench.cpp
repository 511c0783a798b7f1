#include "meig/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "meig/power.hpp"
#include "meig/rng.hpp"
#include "meig/shift_driver.hpp"
#include "meig/tensor.hpp"

namespace meig {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

Metric metric_from_string(const std::string& s) {
    if (s == "iter") return Metric::iter;
    if (s == "time") return Metric::time;
    throw ConfigError("unknown metric \"" + s + "\" (use iter or time)");
}

Suite suite_from_string(const std::string& s) {
    if (s == "fixtures") return Suite::fixtures;
    if (s == "random_square") return Suite::random_square;
    if (s == "random_rect") return Suite::random_rect;
    if (s == "n_sweep") return Suite::n_sweep;
    if (s == "gamma_compare") return Suite::gamma_compare;
    throw ConfigError("unknown suite \"" + s + "\"");
}

const char* to_string(Suite s) {
    switch (s) {
        case Suite::fixtures: return "fixtures";
        case Suite::random_square: return "random_square";
        case Suite::random_rect: return "random_rect";
        case Suite::n_sweep: return "n_sweep";
        case Suite::gamma_compare: return "gamma_compare";
    }
    return "unknown";
}

MethodSpec parse_method(const std::string& name) {
    std::string base = name;
    int depth = -1;
    if (const auto pos = name.find("-N"); pos != std::string::npos) {
        base = name.substr(0, pos);
        try {
            depth = std::stoi(name.substr(pos + 2));
        } catch (...) {
            throw ConfigError("bad memory depth in method \"" + name + "\"");
        }
        if (depth < 1) throw ConfigError("memory depth must be >= 1 in \"" + name + "\"");
    }
    MethodSpec spec;
    spec.id = name;
    if (base == "power") {
        if (depth != -1) throw ConfigError("power takes no -N suffix");
        spec.is_power = true;
        return spec;
    }
    if (base == "mgm1") {
        spec.scheme = GammaScheme::constant_one;
        spec.memory_depth = depth == -1 ? 3 : depth;
        return spec;
    }
    if (base == "mgm2") {
        spec.scheme = GammaScheme::modified_secant;
        spec.memory_depth = depth == -1 ? 1 : depth;
        return spec;
    }
    throw ConfigError("unknown method \"" + name + "\" (use mgm1, mgm2 or power)");
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

ProfileTable compute_profile(const std::vector<RunRecord>& records, Metric metric) {
    if (records.empty()) throw ConfigError("compute_profile: no records");

    ProfileTable table;
    std::map<std::string, std::size_t> pidx, midx;
    for (const RunRecord& r : records) {
        if (pidx.emplace(r.problem_id, table.problems.size()).second)
            table.problems.push_back(r.problem_id);
        if (midx.emplace(r.method_id, table.methods.size()).second)
            table.methods.push_back(r.method_id);
    }
    const std::size_t np = table.problems.size(), nm = table.methods.size();

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> b(np, std::vector<double>(nm, nan));
    std::vector<std::vector<bool>> solved(np, std::vector<bool>(nm, false));
    for (const RunRecord& r : records) {
        const std::size_t p = pidx[r.problem_id], y = midx[r.method_id];
        if (!std::isnan(b[p][y]))
            throw ConfigError("compute_profile: duplicate (problem, method) pair " +
                              r.problem_id + " / " + r.method_id);
        b[p][y] = metric == Metric::iter ? std::max(1.0, static_cast<double>(r.iters))
                                         : std::max(r.time_s, 1e-12);
        solved[p][y] = r.status == SolveStatus::converged;
    }

    table.ratios.assign(np, std::vector<double>(nm, kInf));
    for (std::size_t p = 0; p < np; ++p) {
        double best = kInf;
        for (std::size_t y = 0; y < nm; ++y)
            if (solved[p][y]) best = std::min(best, b[p][y]);
        if (best == kInf) continue; // nothing converged on this problem
        for (std::size_t y = 0; y < nm; ++y)
            if (solved[p][y]) table.ratios[p][y] = b[p][y] / best;
    }

    table.breakpoints.push_back(1.0);
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t y = 0; y < nm; ++y)
            if (std::isfinite(table.ratios[p][y])) table.breakpoints.push_back(table.ratios[p][y]);
    std::sort(table.breakpoints.begin(), table.breakpoints.end());
    table.breakpoints.erase(std::unique(table.breakpoints.begin(), table.breakpoints.end()),
                            table.breakpoints.end());

    for (std::size_t y = 0; y < nm; ++y) {
        ProfileCurve curve;
        curve.method_id = table.methods[y];
        for (double tau : table.breakpoints) {
            std::size_t count = 0;
            for (std::size_t p = 0; p < np; ++p)
                if (table.ratios[p][y] <= tau) ++count;
            curve.points.emplace_back(tau, static_cast<double>(count) / static_cast<double>(np));
        }
        table.curves.push_back(std::move(curve));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Batteries
// ---------------------------------------------------------------------------

namespace {

struct Problem {
    std::string id;
    std::string group;
    int m = 0, n = 0, trial = 0;
    bool is_fixture = false;
    std::string fixture_name;
    double low = 0.0, high = 1.0;
    std::uint64_t tensor_seed = 0;
    std::uint64_t start_seed = 0;
};

HierSymTensor problem_tensor(const Problem& p) {
    if (p.is_fixture) return fixture(p.fixture_name);
    return generate_random(p.m, p.n, p.low, p.high, p.tensor_seed);
}

std::vector<Problem> build_problems(Suite suite, int trials, std::uint64_t seed) {
    std::vector<Problem> out;
    const auto add_uniform = [&](const std::string& tag, int m, int n, double low, double high,
                                 int trial) {
        Problem p;
        p.id = tag + "-t" + std::to_string(trial);
        p.group = tag;
        p.m = m;
        p.n = n;
        p.trial = trial;
        p.low = low;
        p.high = high;
        p.tensor_seed = derive_seed(seed, {1, static_cast<std::uint64_t>(m),
                                           static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(trial)});
        p.start_seed = derive_seed(seed, {2, static_cast<std::uint64_t>(m),
                                          static_cast<std::uint64_t>(n),
                                          static_cast<std::uint64_t>(trial)});
        out.push_back(std::move(p));
    };

    switch (suite) {
        case Suite::fixtures: {
            const struct {
                const char* name;
                int m, n;
            } fx[] = {{"ex41", 2, 2}, {"ex42", 3, 3}, {"ex43", 3, 3}};
            for (int trial = 0; trial < trials; ++trial)
                for (std::uint64_t i = 0; i < 3; ++i) {
                    Problem p;
                    p.fixture_name = fx[i].name;
                    p.id = p.fixture_name + "-t" + std::to_string(trial);
                    p.group = p.fixture_name;
                    p.m = fx[i].m;
                    p.n = fx[i].n;
                    p.trial = trial;
                    p.is_fixture = true;
                    p.start_seed =
                        derive_seed(seed, {3, i, static_cast<std::uint64_t>(trial)});
                    out.push_back(std::move(p));
                }
            break;
        }
        case Suite::random_square:
            for (int size : {5, 10, 15, 20, 25, 30})
                for (int trial = 0; trial < trials; ++trial)
                    add_uniform("usq-n" + std::to_string(size), size, size, 0.0, 1.0, trial);
            break;
        case Suite::random_rect:
            for (auto [m, n] : {std::pair{12, 18}, {30, 18}, {30, 30}, {50, 60}})
                for (int trial = 0; trial < trials; ++trial)
                    add_uniform("urect-" + std::to_string(m) + "x" + std::to_string(n), m, n,
                                -5.0, 5.0, trial);
            break;
        case Suite::n_sweep:
        case Suite::gamma_compare:
            for (int size : {5, 10, 15, 20})
                for (int trial = 0; trial < trials; ++trial)
                    add_uniform("usq-n" + std::to_string(size), size, size, 0.0, 1.0, trial);
            break;
    }
    return out;
}

std::vector<MethodSpec> build_methods(Suite suite, const std::vector<MethodSpec>& given) {
    if (suite == Suite::gamma_compare) {
        // Fixed pairing: both gamma schemes at matching memory depths.
        std::vector<MethodSpec> out;
        for (int depth : {1, 3, 5, 7, 9}) {
            out.push_back(parse_method("mgm1-N" + std::to_string(depth)));
            out.push_back(parse_method("mgm2-N" + std::to_string(depth)));
        }
        return out;
    }
    if (suite == Suite::n_sweep) {
        std::vector<MethodSpec> out;
        for (const MethodSpec& base : given) {
            if (base.is_power) {
                out.push_back(base);
                continue;
            }
            const std::string stem = base.scheme == GammaScheme::constant_one ? "mgm1" : "mgm2";
            for (int depth : {1, 3, 5, 7, 9})
                out.push_back(parse_method(stem + "-N" + std::to_string(depth)));
        }
        return out;
    }
    return given;
}

RunRecord execute_run(const Problem& problem, const MethodSpec& method) {
    const HierSymTensor tensor = problem_tensor(problem);
    const Vec z0 = random_start(tensor.m(), tensor.n(), problem.start_seed);

    RunRecord rec;
    rec.problem_id = problem.id;
    rec.method_id = method.id;
    rec.m = tensor.m();
    rec.n = tensor.n();
    rec.trial = problem.trial;
    rec.lambda = std::numeric_limits<double>::quiet_NaN();

    if (method.is_power) {
        PowerConfig cfg;
        cfg.seed = problem.start_seed;
        SolveReport rep = power_solve(tensor, cfg, &z0);
        rec.status = rep.status;
        rec.iters = rep.iters;
        rec.time_s = rep.wall_time;
        if (rep.pair) rec.lambda = rep.pair->lambda;
        return rec;
    }

    DriverConfig cfg;
    cfg.inner.gamma_scheme = method.scheme;
    cfg.inner.memory_depth = method.memory_depth;
    cfg.inner.seed = problem.start_seed;
    DriveReport rep = drive(tensor, cfg, &z0);
    rec.status = rep.converged ? SolveStatus::converged : rep.last.status;
    rec.iters = rep.total_iters();
    rec.time_s = rep.wall_time;
    if (rep.pair) rec.lambda = rep.pair->lambda;
    return rec;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const std::vector<Problem>& problems) {
    std::map<std::string, std::string> group_of;
    for (const Problem& p : problems) group_of[p.id] = p.group;

    std::vector<std::pair<std::string, std::string>> keys; // (group, method) in order
    std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> buckets;
    for (const RunRecord& r : records) {
        const auto key = std::make_pair(group_of[r.problem_id], r.method_id);
        auto [it, fresh] = buckets.emplace(key, std::vector<const RunRecord*>{});
        if (fresh) keys.push_back(key);
        it->second.push_back(&r);
    }

    const auto mean_std = [](const std::vector<double>& xs) {
        if (xs.empty())
            return std::make_pair(std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN());
        double mu = 0.0;
        for (double x : xs) mu += x;
        mu /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mu) * (x - mu);
        var /= static_cast<double>(xs.size()); // population form: one trial -> std 0
        return std::make_pair(mu, std::sqrt(var));
    };

    std::vector<SummaryRow> rows;
    for (const auto& key : keys) {
        const auto& bucket = buckets[key];
        SummaryRow row;
        row.group = key.first;
        row.method_id = key.second;
        row.runs = static_cast<int>(bucket.size());
        std::vector<double> lambdas, times;
        double iter_sum = 0.0;
        for (const RunRecord* r : bucket) {
            times.push_back(r->time_s);
            iter_sum += r->iters;
            if (r->status == SolveStatus::converged) {
                lambdas.push_back(r->lambda);
                ++row.converged;
            }
        }
        std::tie(row.mean_lambda, row.std_lambda) = mean_std(lambdas);
        std::tie(row.mean_time, row.std_time) = mean_std(times);
        row.mean_iters = iter_sum / static_cast<double>(bucket.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

BatteryResult run_battery(Suite suite, const std::vector<MethodSpec>& methods, int trials,
                          std::uint64_t seed, int threads) {
    if (methods.empty()) throw ConfigError("run_battery needs at least one method");
    if (trials < 1) throw ConfigError("trials must be >= 1");

    const std::vector<Problem> problems = build_problems(suite, trials, seed);
    const std::vector<MethodSpec> expanded = build_methods(suite, methods);

    struct Job {
        const Problem* problem;
        const MethodSpec* method;
    };
    std::vector<Job> jobs;
    jobs.reserve(problems.size() * expanded.size());
    for (const Problem& p : problems)
        for (const MethodSpec& m : expanded) jobs.push_back(Job{&p, &m});

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::clamp(nthreads, 1, static_cast<int>(jobs.size()));

    std::vector<RunRecord> records(jobs.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                records[i] = execute_run(*jobs[i].problem, *jobs[i].method);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    BatteryResult result;
    result.records = std::move(records);
    result.summary = summarize(result.records, problems);
    return result;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string records_csv(const std::vector<RunRecord>& records) {
    std::string out = "problem_id,method_id,m,n,trial,status,iters,time_s,lambda\n";
    char buf[256];
    for (const RunRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%d,%s,%d,%.6f,%.17g\n",
                      r.problem_id.c_str(), r.method_id.c_str(), r.m, r.n, r.trial,
                      to_string(r.status), r.iters, r.time_s, r.lambda);
        out += buf;
    }
    return out;
}

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << records_csv(records);
    if (!f) throw Error("write failed: " + path);
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw ParseError(path + ": empty file");
    std::vector<RunRecord> records;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 9 fields, got " +
                             std::to_string(fields.size()));
        try {
            RunRecord r;
            r.problem_id = fields[0];
            r.method_id = fields[1];
            r.m = std::stoi(fields[2]);
            r.n = std::stoi(fields[3]);
            r.trial = std::stoi(fields[4]);
            r.status = status_from_string(fields[5]);
            r.iters = std::stoi(fields[6]);
            r.time_s = std::stod(fields[7]);
            r.lambda = std::stod(fields[8]);
            records.push_back(std::move(r));
        } catch (const ParseError&) {
            throw;
        } catch (...) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed field");
        }
    }
    return records;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "group,method_id,runs,converged,mean_lambda,std_lambda,mean_time,std_time,mean_iters\n";
    char buf[320];
    for (const SummaryRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%.17g,%.17g,%.6f,%.6f,%.17g\n",
                      r.group.c_str(), r.method_id.c_str(), r.runs, r.converged, r.mean_lambda,
                      r.std_lambda, r.mean_time, r.std_time, r.mean_iters);
        out += buf;
    }
    return out;
}

std::string profile_csv(const ProfileTable& table) {
    std::string out = "method_id,tau,phi\n";
    for (const ProfileCurve& curve : table.curves)
        for (const auto& [tau, phi] : curve.points)
            out += curve.method_id + "," + fmt(tau) + "," + fmt(phi) + "\n";
    return out;
}

void write_profile_csv(const ProfileTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << profile_csv(table);
    if (!f) throw Error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// SVG step plot
// ---------------------------------------------------------------------------

namespace {

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};

} // namespace

std::string profile_svg(const ProfileTable& table) {
    if (table.curves.empty() || table.breakpoints.empty())
        throw ConfigError("profile_svg: nothing to draw");

    const double width = 640, height = 480;
    const double left = 60, right = width - 150, top = 24, bottom = height - 48;
    const double tau_lo = 1.0;
    double tau_hi = table.breakpoints.back();
    if (tau_hi <= tau_lo) tau_hi = 2.0;

    const auto px = [&](double tau) {
        return left + (tau - tau_lo) / (tau_hi - tau_lo) * (right - left);
    };
    const auto py = [&](double phi) { return bottom - phi * (bottom - top); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";

    // Axes and ticks.
    svg += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(bottom) + "\" x2=\"" + fmt2(right) +
           "\" y2=\"" + fmt2(bottom) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(top) + "\" x2=\"" + fmt2(left) +
           "\" y2=\"" + fmt2(bottom) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double phi = i / 4.0;
        svg += "<line x1=\"" + fmt2(left - 4) + "\" y1=\"" + fmt2(py(phi)) + "\" x2=\"" +
               fmt2(left) + "\" y2=\"" + fmt2(py(phi)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(left - 8) + "\" y=\"" + fmt2(py(phi) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + fmt2(phi) + "</text>\n";
        const double tau = tau_lo + (tau_hi - tau_lo) * i / 4.0;
        svg += "<line x1=\"" + fmt2(px(tau)) + "\" y1=\"" + fmt2(bottom) + "\" x2=\"" +
               fmt2(px(tau)) + "\" y2=\"" + fmt2(bottom + 4) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(px(tau)) + "\" y=\"" + fmt2(bottom + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + fmt2(tau) + "</text>\n";
    }
    svg += "<text x=\"" + fmt2((left + right) / 2) + "\" y=\"" + fmt2(height - 10) +
           "\" font-size=\"12\" text-anchor=\"middle\">tau</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt2((top + bottom) / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt2((top + bottom) / 2) + ")\">phi(tau)</text>\n";

    // Step curves.
    for (std::size_t c = 0; c < table.curves.size(); ++c) {
        const ProfileCurve& curve = table.curves[c];
        if (curve.points.empty()) throw ConfigError("profile_svg: empty curve");
        const char* color = kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string path = "M " + fmt2(px(curve.points[0].first)) + " " +
                           fmt2(py(curve.points[0].second));
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            path += " H " + fmt2(px(curve.points[i].first));
            path += " V " + fmt2(py(curve.points[i].second));
        }
        path += " H " + fmt2(px(tau_hi));
        svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";

        const double ly = top + 16 + 18 * static_cast<double>(c);
        svg += "<line x1=\"" + fmt2(right + 10) + "\" y1=\"" + fmt2(ly - 4) + "\" x2=\"" +
               fmt2(right + 34) + "\" y2=\"" + fmt2(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + fmt2(right + 40) + "\" y=\"" + fmt2(ly) +
               "\" font-size=\"11\">" + curve.method_id + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_profile_svg(const ProfileTable& table, const std::string& path) {
    const std::string svg = profile_svg(table);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << svg;
    if (!f) throw Error("write failed: " + path);
}

} // namespace meig
