#pragma once

#include "fl/anisotropy.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fl {

/**
 * Builds a gauge from its serialized spec, e.g.
 *   {"dimension": 2, "family": "ellipse", "matrix": [[4,0],[0,1]]}
 *   {"family": "shifted", "b": [0.5, 0]}
 *   {"family": "pnorm", "p": 3}
 *   {"family": "custom_tabulated", "boundary_points": [[x,y], ...]}
 * The euclidean and pnorm families take their dimension from dim_override
 * (the --dim flag) first, then from the file's "dimension" key.  Families
 * whose data already fixes the dimension (matrix rows, b entries, boundary
 * points) reject a conflicting "dimension" key or override.  Unknown keys
 * and unknown families are errors.
 */
AnisotropyNorm norm_from_json(const nlohmann::json& spec,
                              std::optional<int> dim_override = std::nullopt);

/** Spec that norm_from_json accepts back; round-trips every family. */
nlohmann::ordered_json norm_to_json(const AnisotropyNorm& norm);

AnisotropyNorm load_norm_spec(const std::string& path,
                              std::optional<int> dim_override = std::nullopt);

void save_norm_spec(const AnisotropyNorm& norm, const std::string& path);

/**
 * One verification run: which gauge, which solution, which suites, where
 * the outputs go.  A config file sets any subset of the fields and flags
 * override it key by key.  dim 0 means "not set": the gauge data or its
 * spec's "dimension" key decides.
 */
struct RunConfig {
  std::string norm_path;            // empty runs the euclidean gauge
  int dim = 0;
  double lambda = 1.0;
  std::vector<double> center;       // empty = origin
  std::vector<std::string> suites;  // empty or "all" = every suite
  double rtol = 1e-9;
  std::int64_t mc_samples = std::int64_t{1} << 22;
  std::uint64_t seed = 0x5eedf1;
  std::string out_path;
  std::string csv_path;
  bool deterministic = false;
  std::vector<double> y;            // pohozaev pivot; empty = default offset
};

/**
 * Overlays the file's keys onto base; keys absent from the file keep their
 * base values.  Keys: norm, dim, lambda, center, suites, rtol, mc_samples,
 * seed, out, csv, deterministic, y.  "suites" takes an array of names or
 * one comma-separated string.  Unknown keys are errors.
 */
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

RunConfig load_run_config(const std::string& path, RunConfig base = {});

/**
 * Scalar invariants: dim (when set) in [2, 6], lambda > 0, rtol in (0, 1),
 * mc_samples >= 1, suite names registered ("all" is an alias), the norm
 * file present on disk.  Throws BadParameterError on the first violation.
 */
void validate(const RunConfig& config);

/**
 * Validates, loads the configured gauge (euclidean when no path is given),
 * and checks the resolved dimension: in [2, 6], and center and y sized to
 * it when present.
 */
AnisotropyNorm resolve_norm(const RunConfig& config);

/** Expands the "all" alias: any occurrence selects every suite. */
std::vector<std::string> resolve_suites(const std::vector<std::string>& suites);

}  // namespace fl
