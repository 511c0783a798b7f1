#include "meig/report_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace meig {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::degenerate: return "degenerate";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::ls_failure: return "ls_failure";
    }
    return "unknown";
}

SolveStatus status_from_string(const std::string& s) {
    if (s == "converged") return SolveStatus::converged;
    if (s == "degenerate") return SolveStatus::degenerate;
    if (s == "max_iter") return SolveStatus::max_iter;
    if (s == "ls_failure") return SolveStatus::ls_failure;
    throw ParseError("unknown solve status \"" + s + "\"");
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_vec(const Vec& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    out += "]";
    return out;
}

} // namespace

std::string trace_csv(const SolveReport& report) {
    std::string out = "k,phi,grad_norm,alpha,gdot,gamma_k,t_shift\n";
    char buf[256];
    for (const IterationRecord& r : report.trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.k, r.phi,
                      r.grad_norm, r.alpha, r.gdot, r.gamma, r.t_shift);
        out += buf;
    }
    return out;
}

void write_trace_csv(const SolveReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << trace_csv(report);
    if (!f) throw Error("write failed: " + path);
}

std::string eigenpair_report_json(const MEigenpair& pair, double shift_t_used) {
    std::string out = "{\n";
    out += "  \"lambda\": " + fmt(pair.lambda) + ",\n";
    out += "  \"x\": " + json_vec(pair.x) + ",\n";
    out += "  \"y\": " + json_vec(pair.y) + ",\n";
    out += "  \"residual_x\": " + fmt(pair.residual_x) + ",\n";
    out += "  \"residual_y\": " + fmt(pair.residual_y) + ",\n";
    out += "  \"shift_t_used\": " + fmt(shift_t_used) + "\n";
    out += "}\n";
    return out;
}

std::string drive_report_json(const DriveReport& report) {
    std::string out = "{\n";
    if (report.pair) {
        const MEigenpair& p = *report.pair;
        out += "  \"lambda\": " + fmt(p.lambda) + ",\n";
        out += "  \"x\": " + json_vec(p.x) + ",\n";
        out += "  \"y\": " + json_vec(p.y) + ",\n";
        out += "  \"residual_x\": " + fmt(p.residual_x) + ",\n";
        out += "  \"residual_y\": " + fmt(p.residual_y) + ",\n";
    } else {
        out += "  \"lambda\": null,\n";
    }
    out += "  \"shift_t_used\": " + fmt(report.shift_t_used) + ",\n";
    out += "  \"escalations\": [";
    for (std::size_t i = 0; i < report.phases.size(); ++i) {
        const PhaseRecord& ph = report.phases[i];
        if (i) out += ",";
        out += "\n    {\"t\": " + fmt(ph.t) + ", \"status\": \"" + to_string(ph.status) +
               "\", \"iters\": " + std::to_string(ph.iters) + "}";
    }
    out += "\n  ]\n}\n";
    return out;
}

MEigenpair read_eigenpair_report(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("lambda") || !j.contains("x") || !j.contains("y"))
        throw ParseError(path + ": report needs lambda, x and y fields");
    if (!j["lambda"].is_number()) throw ParseError(path + ": lambda must be a number");

    const auto read_vec = [&](const char* name) {
        const auto& a = j[name];
        if (!a.is_array() || a.empty())
            throw ParseError(path + ": field \"" + name + "\" must be a nonempty array");
        Vec v;
        v.reserve(a.size());
        for (const auto& c : a) {
            if (!c.is_number())
                throw ParseError(path + ": field \"" + name + "\" must hold numbers");
            v.push_back(c.get<double>());
        }
        return v;
    };

    MEigenpair pair;
    pair.lambda = j["lambda"].get<double>();
    pair.x = read_vec("x");
    pair.y = read_vec("y");
    return pair;
}

} // namespace meig
