#pragma once

#include <string>

#include "meig/objective.hpp"
#include "meig/shift_driver.hpp"
#include "meig/solve_report.hpp"

namespace meig {

/// Eigenpair report with the shift that produced it:
/// { "lambda", "x", "y", "residual_x", "residual_y", "shift_t_used" }.
std::string eigenpair_report_json(const MEigenpair& pair, double shift_t_used);

/// Driver report: the eigenpair report plus "escalations": [{t, status,
/// iters}]. Failed drives carry "lambda": null and the phase history.
std::string drive_report_json(const DriveReport& report);

/// Parses an eigenpair report; only lambda / x / y are trusted (residuals
/// are recomputed by verification). Throws ParseError on malformed input.
MEigenpair read_eigenpair_report(const std::string& path);

} // namespace meig
