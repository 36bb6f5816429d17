#include "fl/config.hpp"

#include "fl/identities.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace fl {

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadParameterError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw BadParameterError("malformed JSON in " + path + ": " + e.what());
  }
}

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                  const char* what) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw BadParameterError(std::string("unknown ") + what + " key: " +
                              item.key());
}

Vec vec_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array() || arr.empty())
    throw BadParameterError(std::string(what) + " must be a nonempty array");
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<int>(i)] = arr.at(i).get<double>();
  return v;
}

Mat mat_from_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty())
    throw BadParameterError("matrix must be a nonempty array of rows");
  const std::size_t n = rows.size();
  Mat A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array() || row.size() != n)
      throw BadParameterError("matrix must be square");
    for (std::size_t k = 0; k < n; ++k)
      A(static_cast<int>(i), static_cast<int>(k)) = row.at(k).get<double>();
  }
  return A;
}

int free_dimension(const char* family, std::optional<int> declared,
                   std::optional<int> override_) {
  if (override_) return *override_;
  if (declared) return *declared;
  throw BadParameterError(std::string(family) +
                          " spec needs a dimension (\"dimension\" key or a "
                          "--dim flag)");
}

void check_data_dimension(const char* family, int data_dim,
                          std::optional<int> declared,
                          std::optional<int> override_) {
  if (declared && *declared != data_dim)
    throw BadParameterError(std::string(family) + " data is " +
                            std::to_string(data_dim) +
                            "-dimensional but the file declares dimension " +
                            std::to_string(*declared));
  if (override_ && *override_ != data_dim)
    throw BadParameterError(std::string(family) + " data is " +
                            std::to_string(data_dim) +
                            "-dimensional and cannot take --dim " +
                            std::to_string(*override_));
}

std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> names;
  std::stringstream ss(csv);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) names.push_back(part);
  return names;
}

}  // namespace

AnisotropyNorm norm_from_json(const nlohmann::json& spec,
                              std::optional<int> dim_override) {
  try {
    if (!spec.is_object())
      throw BadParameterError("norm spec must be a JSON object");
    if (!spec.contains("family"))
      throw BadParameterError("norm spec needs a \"family\" key");
    const std::string family = spec.at("family").get<std::string>();
    std::optional<int> declared;
    if (spec.contains("dimension"))
      declared = spec.at("dimension").get<int>();

    if (family == "euclidean") {
      require_keys(spec, {"family", "dimension"}, "euclidean spec");
      return AnisotropyNorm::euclidean(
          free_dimension("euclidean", declared, dim_override));
    }
    if (family == "pnorm") {
      require_keys(spec, {"family", "dimension", "p"}, "pnorm spec");
      if (!spec.contains("p"))
        throw BadParameterError("pnorm spec needs a \"p\" key");
      return AnisotropyNorm::pnorm(
          free_dimension("pnorm", declared, dim_override),
          spec.at("p").get<double>());
    }
    if (family == "ellipse") {
      require_keys(spec, {"family", "dimension", "matrix"}, "ellipse spec");
      if (!spec.contains("matrix"))
        throw BadParameterError("ellipse spec needs a \"matrix\" key");
      const Mat A = mat_from_json(spec.at("matrix"));
      check_data_dimension("ellipse", static_cast<int>(A.rows()), declared,
                           dim_override);
      return AnisotropyNorm::ellipse(A);
    }
    if (family == "shifted") {
      require_keys(spec, {"family", "dimension", "b"}, "shifted spec");
      if (!spec.contains("b"))
        throw BadParameterError("shifted spec needs a \"b\" key");
      const Vec b = vec_from_json(spec.at("b"), "b");
      check_data_dimension("shifted", static_cast<int>(b.size()), declared,
                           dim_override);
      return AnisotropyNorm::shifted(b);
    }
    if (family == "custom_tabulated") {
      require_keys(spec, {"family", "dimension", "boundary_points"},
                   "custom_tabulated spec");
      if (!spec.contains("boundary_points"))
        throw BadParameterError(
            "custom_tabulated spec needs a \"boundary_points\" key");
      std::vector<Vec> points;
      for (const auto& row : spec.at("boundary_points")) {
        const Vec p = vec_from_json(row, "boundary point");
        if (p.size() != 2)
          throw BadParameterError("boundary points must be 2-dimensional");
        points.push_back(p);
      }
      // A closed polyline may repeat the first vertex at the end.
      if (points.size() > 2 &&
          (points.back() - points.front()).norm() < 1e-12)
        points.pop_back();
      check_data_dimension("custom_tabulated", 2, declared, dim_override);
      return AnisotropyNorm::custom_tabulated(points);
    }
    throw BadParameterError("unknown norm family: " + family);
  } catch (const nlohmann::json::exception& e) {
    throw BadParameterError(std::string("malformed norm spec: ") + e.what());
  }
}

nlohmann::ordered_json norm_to_json(const AnisotropyNorm& norm) {
  nlohmann::ordered_json j;
  j["dimension"] = norm.dim();
  j["family"] = family_name(norm.family());
  switch (norm.family()) {
    case NormFamily::kEuclidean:
      break;
    case NormFamily::kEllipse: {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (int i = 0; i < norm.matrix().rows(); ++i)
        rows.push_back(to_std(norm.matrix().row(i)));
      j["matrix"] = std::move(rows);
      break;
    }
    case NormFamily::kPNorm:
      j["p"] = norm.exponent();
      break;
    case NormFamily::kShifted:
      j["b"] = to_std(norm.shift());
      break;
    case NormFamily::kCustomTabulated: {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const Vec& p : norm.vertices()) rows.push_back(to_std(p));
      j["boundary_points"] = std::move(rows);
      break;
    }
  }
  return j;
}

AnisotropyNorm load_norm_spec(const std::string& path,
                              std::optional<int> dim_override) {
  return norm_from_json(parse_json_file(path), dim_override);
}

void save_norm_spec(const AnisotropyNorm& norm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BadParameterError("cannot open " + path);
  out << norm_to_json(norm).dump(2) << '\n';
  if (!out) throw BadParameterError("failed writing " + path);
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig base) {
  try {
    if (!j.is_object())
      throw BadParameterError("run config must be a JSON object");
    require_keys(j,
                 {"norm", "dim", "lambda", "center", "suites", "rtol",
                  "mc_samples", "seed", "out", "csv", "deterministic", "y"},
                 "run config");
    if (j.contains("norm")) base.norm_path = j.at("norm").get<std::string>();
    if (j.contains("dim")) base.dim = j.at("dim").get<int>();
    if (j.contains("lambda")) base.lambda = j.at("lambda").get<double>();
    if (j.contains("center"))
      base.center = j.at("center").get<std::vector<double>>();
    if (j.contains("suites")) {
      const auto& s = j.at("suites");
      base.suites = s.is_string() ? split_names(s.get<std::string>())
                                  : s.get<std::vector<std::string>>();
    }
    if (j.contains("rtol")) base.rtol = j.at("rtol").get<double>();
    if (j.contains("mc_samples"))
      base.mc_samples = j.at("mc_samples").get<std::int64_t>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) base.out_path = j.at("out").get<std::string>();
    if (j.contains("csv")) base.csv_path = j.at("csv").get<std::string>();
    if (j.contains("deterministic"))
      base.deterministic = j.at("deterministic").get<bool>();
    if (j.contains("y")) base.y = j.at("y").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw BadParameterError(std::string("malformed run config: ") + e.what());
  }
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  return config_from_json(parse_json_file(path), std::move(base));
}

void validate(const RunConfig& config) {
  if (config.dim != 0 && (config.dim < 2 || config.dim > 6))
    throw BadParameterError("dimension must lie in [2, 6], got " +
                            std::to_string(config.dim));
  if (!(config.lambda > 0))
    throw BadParameterError("lambda must be positive");
  if (!(config.rtol > 0 && config.rtol < 1))
    throw BadParameterError("rtol must lie in (0, 1)");
  if (config.mc_samples < 1)
    throw BadParameterError("mc_samples must be at least 1");
  const auto& known = known_suites();
  for (const auto& s : config.suites)
    if (s != "all" && std::find(known.begin(), known.end(), s) == known.end())
      throw BadParameterError("unknown suite: " + s);
  if (!config.norm_path.empty() &&
      !std::filesystem::exists(config.norm_path))
    throw BadParameterError("norm spec file not found: " + config.norm_path);
}

AnisotropyNorm resolve_norm(const RunConfig& config) {
  validate(config);
  const std::optional<int> dim_override =
      config.dim != 0 ? std::optional<int>(config.dim) : std::nullopt;
  AnisotropyNorm norm =
      config.norm_path.empty()
          ? AnisotropyNorm::euclidean(dim_override.value_or(2))
          : load_norm_spec(config.norm_path, dim_override);
  const int n = norm.dim();
  if (n < 2 || n > 6)
    throw BadParameterError("dimension must lie in [2, 6], got " +
                            std::to_string(n));
  if (!config.center.empty() && static_cast<int>(config.center.size()) != n)
    throw BadParameterError("center needs " + std::to_string(n) + " entries");
  if (!config.y.empty() && static_cast<int>(config.y.size()) != n)
    throw BadParameterError("y needs " + std::to_string(n) + " entries");
  return norm;
}

std::vector<std::string> resolve_suites(
    const std::vector<std::string>& suites) {
  for (const auto& s : suites)
    if (s == "all") return {};
  return suites;
}

}  // namespace fl
