#include "fl/report.hpp"

#include "fl/common.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <utility>

namespace fl {

namespace {

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::ordered_json report_to_json(const VerificationReport& report,
                                      bool deterministic) {
  nlohmann::ordered_json j;
  j["version"] = report.version;
  j["norm"] = report.norm_spec;
  j["solution"] = report.solution_spec;
  if (!deterministic) j["generated_at"] = utc_timestamp();
  j["all_passed"] = report.all_passed();
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& c : report.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["anchor"] = c.anchor;
    jc["computed"] = c.computed;
    jc["target"] = c.target;
    jc["abs_err"] = c.abs_err;
    jc["rel_err"] = c.rel_err;
    jc["tol"] = c.tolerance;
    jc["passed"] = c.passed;
    jc["seed"] = c.seed;
    jc["note"] = c.config_note;
    if (!deterministic) jc["wall_ms"] = c.wall_ms;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  return j;
}

void write_report(const VerificationReport& report, const std::string& path,
                  bool deterministic) {
  std::ofstream out(path);
  if (!out) throw BadParameterError("cannot open report file " + path);
  out << report_to_json(report, deterministic).dump(2) << '\n';
  if (!out) throw BadParameterError("failed writing report file " + path);
}

VerificationReport report_from_json(const nlohmann::ordered_json& j) {
  VerificationReport report;
  try {
    report.version = j.at("version").get<std::string>();
    report.norm_spec = j.at("norm").get<std::string>();
    report.solution_spec = j.at("solution").get<std::string>();
    for (const auto& jc : j.at("checks")) {
      CheckResult c;
      c.name = jc.at("name").get<std::string>();
      c.anchor = jc.at("anchor").get<std::string>();
      c.computed = jc.at("computed").get<std::vector<double>>();
      c.target = jc.at("target").get<std::vector<double>>();
      c.abs_err = jc.at("abs_err").get<double>();
      c.rel_err = jc.at("rel_err").get<double>();
      c.tolerance = jc.at("tol").get<double>();
      c.passed = jc.at("passed").get<bool>();
      c.seed = jc.at("seed").get<std::uint64_t>();
      c.config_note = jc.value("note", std::string{});
      c.wall_ms = jc.value("wall_ms", 0.0);
      report.checks.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw BadParameterError(std::string("malformed report: ") + e.what());
  }
  return report;
}

std::string render_summary(const VerificationReport& report) {
  std::size_t width = 4;
  for (const CheckResult& c : report.checks)
    width = std::max(width, c.name.size());
  std::ostringstream out;
  out << report.norm_spec << "  |  " << report.solution_spec << '\n';
  std::size_t failures = 0;
  for (const CheckResult& c : report.checks) {
    if (!c.passed) ++failures;
    char line[160];
    std::snprintf(line, sizeof line, "%s  %-*s  rel %10.3e  tol %8.1e  ",
                  c.passed ? "PASS" : "FAIL", static_cast<int>(width),
                  c.name.c_str(), c.rel_err, c.tolerance);
    out << line << c.config_note << '\n';
  }
  if (failures == 0)
    out << "ALL PASSED (" << report.checks.size() << " checks)\n";
  else
    out << "FAILURES: " << failures << " of " << report.checks.size()
        << " checks\n";
  return out.str();
}

void write_asymptotic_csv(const AsymptoticCurves& curves,
                          const std::string& path) {
  if (curves.profile_sup.size() != curves.radius.size() ||
      curves.gradient_sup.size() != curves.radius.size())
    throw BadParameterError("curve columns must share one length");
  std::ofstream out(path);
  if (!out) throw BadParameterError("cannot open csv file " + path);
  out << "radius,profile_sup,gradient_sup\n";
  for (std::size_t i = 0; i < curves.radius.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", curves.radius[i],
                  curves.profile_sup[i], curves.gradient_sup[i]);
    out << line;
  }
  if (!out) throw BadParameterError("failed writing csv file " + path);
}

}  // namespace fl
