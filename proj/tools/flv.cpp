#include "fl/config.hpp"
#include "fl/dual.hpp"
#include "fl/identities.hpp"
#include "fl/report.hpp"
#include "fl/solution.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace {

fl::Vec to_vec(const std::vector<double>& v) {
  fl::Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

void emit_json(const nlohmann::ordered_json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw fl::BadParameterError("cannot open " + out_path);
  out << j.dump(2) << '\n';
}

/**
 * The verification subcommands share one flag set.  Option pointers record
 * which flags were actually given, so a --config file provides defaults and
 * explicit flags override it key by key.
 */
struct CommonOpts {
  std::string config_path, norm_path, out_path, csv_path;
  int dim = 0;
  double lambda = 0.0, rtol = 0.0;
  std::int64_t mc_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> center, y;
  std::vector<std::string> suites;
  bool deterministic = false;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_norm = nullptr;
  CLI::Option* o_dim = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_center = nullptr;
  CLI::Option* o_suite = nullptr;
  CLI::Option* o_rtol = nullptr;
  CLI::Option* o_mc = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_csv = nullptr;
  CLI::Option* o_det = nullptr;
  CLI::Option* o_y = nullptr;

  void attach(CLI::App* cmd, bool with_suite, bool with_y) {
    o_config = cmd->add_option("--config", config_path,
                               "Run config JSON; explicit flags override it");
    o_norm = cmd->add_option("--norm", norm_path, "Norm spec JSON path");
    o_dim = cmd->add_option("--dim", dim,
                            "Dimension for families that leave it free");
    o_lambda =
        cmd->add_option("--lambda", lambda, "Scale parameter of the solution");
    o_center = cmd->add_option("--center", center,
                               "Solution center, comma separated")
                   ->delimiter(',');
    if (with_suite)
      o_suite = cmd->add_option("--suite", suites,
                                "Suites to run, comma separated ('all' for "
                                "every suite)")
                    ->delimiter(',');
    o_rtol =
        cmd->add_option("--rtol", rtol, "Relative quadrature tolerance");
    o_mc = cmd->add_option("--mc-samples", mc_samples,
                           "Monte Carlo sample count");
    o_seed = cmd->add_option("--seed", seed, "RNG seed");
    o_out = cmd->add_option("--out", out_path, "Report JSON output path");
    o_csv = cmd->add_option("--csv", csv_path,
                            "Asymptotics curve CSV output path");
    o_det = cmd->add_flag("--deterministic", deterministic,
                          "Omit wall-clock fields so identical runs produce "
                          "identical bytes");
    if (with_y)
      o_y = cmd->add_option("--y", y,
                            "Pohozaev pivot point, comma separated")
                ->delimiter(',');
  }

  fl::RunConfig resolve() const {
    fl::RunConfig cfg;
    if (o_config && *o_config) cfg = fl::load_run_config(config_path);
    if (*o_norm) cfg.norm_path = norm_path;
    if (*o_dim) cfg.dim = dim;
    if (*o_lambda) cfg.lambda = lambda;
    if (*o_center) cfg.center = center;
    if (o_suite && *o_suite) cfg.suites = suites;
    if (*o_rtol) cfg.rtol = rtol;
    if (*o_mc) cfg.mc_samples = mc_samples;
    if (*o_seed) cfg.seed = seed;
    if (*o_out) cfg.out_path = out_path;
    if (*o_csv) cfg.csv_path = csv_path;
    if (*o_det) cfg.deterministic = true;
    if (o_y && *o_y) cfg.y = y;
    return cfg;
  }
};

int run_verification(const fl::RunConfig& cfg,
                     const std::vector<std::string>& forced_suites) {
  fl::SuiteRequest req;
  req.norm = std::make_shared<fl::AnisotropyNorm>(fl::resolve_norm(cfg));
  req.n = req.norm->dim();
  req.lambda = cfg.lambda;
  if (!cfg.center.empty()) req.center = to_vec(cfg.center);
  req.quad.rtol = cfg.rtol;
  req.quad.mc_samples = cfg.mc_samples;
  req.quad.seed = cfg.seed;
  req.suites =
      fl::resolve_suites(forced_suites.empty() ? cfg.suites : forced_suites);
  if (!cfg.y.empty()) req.pohozaev_y = to_vec(cfg.y);

  const fl::VerificationReport report = fl::run_suites(req);
  if (!cfg.out_path.empty())
    fl::write_report(report, cfg.out_path, cfg.deterministic);
  if (!cfg.csv_path.empty()) {
    const auto gauge = std::make_shared<const fl::DualGauge>(req.norm);
    const fl::Vec c =
        req.center.size() ? req.center : fl::Vec::Zero(req.n);
    const fl::LiouvilleSolution u(req.n, cfg.lambda, c, gauge);
    fl::write_asymptotic_csv(
        fl::asymptotic_curves(u, {1e0, 1e1, 1e2, 1e3, 1e4, 1e5}, 64),
        cfg.csv_path);
  }
  std::cout << fl::render_summary(report);
  return report.all_passed() ? 0 : 1;
}

std::string norm_label(const fl::AnisotropyNorm& norm) {
  return std::string(fl::family_name(norm.family())) +
         " dim=" + std::to_string(norm.dim());
}

int run_dual_norm(const fl::RunConfig& cfg,
                  const std::vector<std::vector<double>>& points) {
  const fl::AnisotropyNorm norm = fl::resolve_norm(cfg);
  const fl::DualGauge gauge(std::make_shared<fl::AnisotropyNorm>(norm));
  nlohmann::ordered_json out;
  out["norm"] = norm_label(norm);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != norm.dim())
      throw fl::BadParameterError("point needs " +
                                  std::to_string(norm.dim()) + " entries");
    const fl::Vec x = to_vec(p);
    nlohmann::ordered_json row;
    row["x"] = p;
    row["H"] = norm.value(x);
    row["H0"] = gauge.value(x);
    row["H0_reversed"] = gauge.reversed(x);
    rows.push_back(std::move(row));
  }
  out["points"] = std::move(rows);
  emit_json(out, cfg.out_path);
  return 0;
}

int run_wulff_volume(const fl::RunConfig& cfg) {
  const fl::AnisotropyNorm norm = fl::resolve_norm(cfg);
  const auto gauge =
      std::make_shared<const fl::DualGauge>(
          std::make_shared<fl::AnisotropyNorm>(norm));
  const double volume = fl::wulff_unit_volume(*gauge);
  const fl::McEstimate mc =
      fl::wulff_unit_volume_mc(*gauge, cfg.mc_samples, cfg.seed);
  const fl::WulffShape unit(gauge, fl::Vec::Zero(norm.dim()), 1.0, volume);
  const double perimeter = fl::anisotropic_perimeter(unit, cfg.rtol);
  nlohmann::ordered_json out;
  out["norm"] = norm_label(norm);
  out["volume"] = volume;
  out["mc_volume"] = mc.value;
  out["mc_std_error"] = mc.std_error;
  out["mc_samples"] = mc.samples;
  out["perimeter"] = perimeter;
  out["n_times_volume"] = norm.dim() * volume;
  emit_json(out, cfg.out_path);
  return 0;
}

int run_aggregate(const std::vector<std::string>& inputs,
                  const std::string& out_path, bool deterministic) {
  fl::VerificationReport merged;
  merged.version = fl::kVersion;
  std::vector<std::string> norm_specs, solution_specs;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw fl::BadParameterError("cannot open " + path);
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw fl::BadParameterError("malformed JSON in " + path + ": " +
                                  e.what());
    }
    const fl::VerificationReport part = fl::report_from_json(j);
    const auto remember = [](std::vector<std::string>& seen,
                             const std::string& s) {
      if (std::find(seen.begin(), seen.end(), s) == seen.end())
        seen.push_back(s);
    };
    remember(norm_specs, part.norm_spec);
    remember(solution_specs, part.solution_spec);
    merged.checks.insert(merged.checks.end(), part.checks.begin(),
                         part.checks.end());
  }
  const auto join = [](const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : "; ") + p;
    return s;
  };
  merged.norm_spec = join(norm_specs);
  merged.solution_spec = join(solution_specs);
  if (!out_path.empty()) fl::write_report(merged, out_path, deterministic);
  std::cout << fl::render_summary(merged);
  return merged.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification toolkit for the anisotropic Liouville equation"};
  app.set_version_flag("--version", fl::kVersion);
  app.require_subcommand(1);
  int rc = 0;

  CommonOpts verify_opts;
  auto* verify = app.add_subcommand(
      "verify", "Run verification suites against the explicit solution");
  verify_opts.attach(verify, true, true);
  verify->callback(
      [&] { rc = run_verification(verify_opts.resolve(), {}); });

  CommonOpts suite_opts;
  std::vector<std::string> suite_names;
  auto* suite =
      app.add_subcommand("suite", "Run the suites named as arguments");
  suite->add_option("names", suite_names, "Suite names ('all' for every one)")
      ->required();
  suite_opts.attach(suite, false, true);
  suite->callback(
      [&] { rc = run_verification(suite_opts.resolve(), suite_names); });

  const auto add_fixed_suite = [&](const char* name, const char* help,
                                   std::vector<std::string> suites,
                                   bool with_y) {
    auto opts = std::make_shared<CommonOpts>();
    auto* cmd = app.add_subcommand(name, help);
    opts->attach(cmd, false, with_y);
    cmd->callback([&rc, opts, suites = std::move(suites)] {
      rc = run_verification(opts->resolve(), suites);
    });
  };
  add_fixed_suite("quantization", "Check the quantized total mass",
                  {"quantization"}, false);
  add_fixed_suite("verify-solution",
                  "Check the PDE residual on a sample grid", {"residual"},
                  false);
  add_fixed_suite("pohozaev", "Check the Pohozaev balances", {"pohozaev"},
                  true);
  add_fixed_suite("asymptotics",
                  "Check the logarithmic asymptotics (with optional CSV)",
                  {"asymptotics"}, false);
  add_fixed_suite("isoperimetric",
                  "Check the anisotropic isoperimetric inequality",
                  {"isoperimetric"}, false);

  CommonOpts dual_opts;
  std::vector<std::vector<double>> dual_points;
  auto* dual = app.add_subcommand(
      "dual-norm", "Evaluate the gauge and its duals at points");
  dual_opts.attach(dual, false, false);
  dual->add_option("--point", dual_points,
                   "Evaluation point, comma separated (repeatable)")
      ->delimiter(',')
      ->required();
  dual->callback(
      [&] { rc = run_dual_norm(dual_opts.resolve(), dual_points); });

  CommonOpts wv_opts;
  auto* wv = app.add_subcommand(
      "wulff-volume",
      "Compute the unit Wulff volume, its Monte Carlo cross-check, and the "
      "anisotropic perimeter");
  wv_opts.attach(wv, false, false);
  wv->callback([&] { rc = run_wulff_volume(wv_opts.resolve()); });

  std::vector<std::string> report_inputs;
  std::string report_out;
  bool report_det = false;
  auto* agg = app.add_subcommand(
      "report", "Aggregate previously written report files into one");
  agg->add_option("inputs", report_inputs, "Report JSON files")->required();
  agg->add_option("--out", report_out, "Merged report output path");
  agg->add_flag("--deterministic", report_det,
                "Omit wall-clock fields from the merged report");
  agg->callback(
      [&] { rc = run_aggregate(report_inputs, report_out, report_det); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const fl::BadParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
