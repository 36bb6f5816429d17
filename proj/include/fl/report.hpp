#pragma once

#include "fl/identities.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace fl {

/**
 * Serializes a report with a fixed key order, so identical check results
 * produce identical bytes.  Each check carries name, anchor, computed,
 * target, abs_err, rel_err, tol, passed, seed and a free-form note;
 * deterministic mode drops the wall-clock fields (per-check wall_ms and the
 * top-level generated_at stamp), which are the only non-reproducible parts.
 */
nlohmann::ordered_json report_to_json(const VerificationReport& report,
                                      bool deterministic);

/** Writes report_to_json with two-space indentation and a trailing newline. */
void write_report(const VerificationReport& report, const std::string& path,
                  bool deterministic);

/** Parses a report previously written by write_report. */
VerificationReport report_from_json(const nlohmann::ordered_json& j);

/**
 * Fixed-width pass/fail table, one row per check, with the worst relative
 * error, the tolerance and the note.  Ends with an ALL PASSED / FAILURES
 * verdict line.
 */
std::string render_summary(const VerificationReport& report);

/** Writes the curves as CSV (header radius,profile_sup,gradient_sup). */
void write_asymptotic_csv(const AsymptoticCurves& curves,
                          const std::string& path);

}  // namespace fl
