#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "meig/mgm.hpp"
#include "meig/solve_report.hpp"

namespace meig {

/// Outcome of one (problem, method) run inside a battery.
struct RunRecord {
    std::string problem_id; // unique per problem instance (includes the trial)
    std::string method_id;
    int m = 0;
    int n = 0;
    int trial = 0;
    SolveStatus status = SolveStatus::max_iter;
    int iters = 0;
    double time_s = 0.0;
    double lambda = 0.0; // NaN when the run did not converge
};

enum class Metric { iter, time };
Metric metric_from_string(const std::string& s);

struct ProfileCurve {
    std::string method_id;
    std::vector<std::pair<double, double>> points; // (tau, phi), right-continuous steps
};

/// Performance-profile table: ratios r_{w,y} = b_{w,y} / min_y b_{w,y} over
/// converged runs (infinity otherwise) and the cumulative curves
/// phi_y(tau) = |{w : r_{w,y} <= tau}| / n_w sampled at every breakpoint.
struct ProfileTable {
    std::vector<std::string> methods;
    std::vector<std::string> problems;
    std::vector<std::vector<double>> ratios; // [problem][method]
    std::vector<double> breakpoints;         // sorted, always contains 1
    std::vector<ProfileCurve> curves;
};

ProfileTable compute_profile(const std::vector<RunRecord>& records, Metric metric);

// ---------------------------------------------------------------------------
// Batteries
// ---------------------------------------------------------------------------

enum class Suite { fixtures, random_square, random_rect, n_sweep, gamma_compare };
Suite suite_from_string(const std::string& s);
const char* to_string(Suite s);

/// A benchmarkable solver configuration. Parsed from "mgm1", "mgm2",
/// "power", optionally with an explicit memory depth as in "mgm1-N5".
struct MethodSpec {
    std::string id;
    bool is_power = false;
    GammaScheme scheme = GammaScheme::constant_one;
    int memory_depth = 3;
};
MethodSpec parse_method(const std::string& name);

struct SummaryRow {
    std::string group; // fixture name or size label
    std::string method_id;
    int runs = 0;
    int converged = 0;
    double mean_lambda = 0.0;
    double std_lambda = 0.0;
    double mean_time = 0.0;
    double std_time = 0.0;
    double mean_iters = 0.0;
};

struct BatteryResult {
    std::vector<RunRecord> records;
    std::vector<SummaryRow> summary;
};

/// Runs a suite. Problem data and start vectors are derived from (seed,
/// problem, trial) alone, every method sees the same start per problem, and
/// records come back in enumeration order, so results are independent of the
/// parallel schedule. threads <= 0 picks the hardware concurrency.
BatteryResult run_battery(Suite suite, const std::vector<MethodSpec>& methods, int trials,
                          std::uint64_t seed, int threads);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string records_csv(const std::vector<RunRecord>& records);
void write_records_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_records_csv(const std::string& path);

std::string summary_csv(const std::vector<SummaryRow>& rows);

std::string profile_csv(const ProfileTable& table);
void write_profile_csv(const ProfileTable& table, const std::string& path);

/// Self-contained step plot of the profile curves; identical tables yield
/// identical bytes. Throws ConfigError (before creating the file) when the
/// table has no curves to draw.
std::string profile_svg(const ProfileTable& table);
void emit_profile_svg(const ProfileTable& table, const std::string& path);

} // namespace meig
