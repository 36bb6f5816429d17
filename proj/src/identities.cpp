#include "fl/identities.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>

namespace fl {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void require_anchor(const CheckResult& c) {
  if (!is_known_anchor(c.anchor))
    throw BadParameterError("unregistered check anchor: " + c.anchor);
}

/**
 * Standard scoring: element-wise deviations, relative against nonzero
 * targets, absolute against zero ones; passed when the worst stays within
 * the tolerance.
 */
void finalize(CheckResult& c) {
  require_anchor(c);
  if (c.computed.size() != c.target.size())
    throw BadParameterError("check value arrays disagree in length");
  double abs_err = 0.0, rel_err = 0.0;
  for (std::size_t i = 0; i < c.computed.size(); ++i) {
    const double d = std::abs(c.computed[i] - c.target[i]);
    abs_err = std::max(abs_err, d);
    rel_err =
        std::max(rel_err, c.target[i] != 0.0 ? d / std::abs(c.target[i]) : d);
  }
  c.abs_err = abs_err;
  c.rel_err = rel_err;
  c.passed = c.rel_err <= c.tolerance;
}

/** Scoring for mixed-budget checks: legs arrive already divided by their own
 * budgets, the worst multiple must stay within 1. */
void finalize_normalized(CheckResult& c, const std::vector<double>& legs) {
  require_anchor(c);
  double abs_err = 0.0;
  for (std::size_t i = 0; i < c.computed.size(); ++i)
    abs_err = std::max(abs_err, std::abs(c.computed[i] - c.target[i]));
  c.abs_err = abs_err;
  c.rel_err = *std::max_element(legs.begin(), legs.end());
  c.tolerance = 1.0;
  c.passed = c.rel_err <= c.tolerance;
}

bool axis_sensitive(const AnisotropyNorm& norm) {
  return norm.family() == NormFamily::kPNorm ||
         norm.family() == NormFamily::kCustomTabulated;
}

/** Unit direction for sampling; keeps a margin from the coordinate planes
 * for gauges whose duals kink there. */
Vec sample_direction(const CounterRng& rng, int n, std::uint64_t idx,
                     bool keep_off_axes) {
  for (std::uint64_t trial = 0;; ++trial) {
    const Vec w = rng.sphere(n, idx * 64 + trial);
    if (!keep_off_axes || w.cwiseAbs().minCoeff() >= 0.02) return w;
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/** Root of u = t along the ray c + s dir, bracketed by doubling. */
double ray_level_root(const std::function<double(double)>& value_on_ray,
                      double t) {
  double hi = 1.0;
  for (int iter = 0; value_on_ray(hi) > t; ++iter) {
    hi *= 2.0;
    if (iter > 80) throw RootFindError("level-set ray bracket ran away");
  }
  return brent_root([&](double s) { return value_on_ray(s) - t; }, 1e-12, hi,
                    1e-15 * hi);
}

/** Least-squares Wulff center and radius of boundary samples. */
void fit_wulff_center(const DualGauge& gauge, const std::vector<Vec>& pts,
                      Vec& center, double& radius) {
  const int n = gauge.dim();
  const int m = static_cast<int>(pts.size());
  for (int iter = 0; iter < 8; ++iter) {
    Mat jac(m, n + 1);
    Vec res(m);
    for (int i = 0; i < m; ++i) {
      const Vec d = pts[i] - center;
      res[i] = gauge.reversed(d) - radius;
      jac.block(i, 0, 1, n) = -gauge.reversed_gradient(d).transpose();
      jac(i, n) = -1.0;
    }
    const Vec step = jac.colPivHouseholderQr().solve(-res);
    center += step.head(n);
    radius += step[n];
    if (step.norm() <= 1e-14 * (1.0 + radius)) break;
  }
}

/** Monotone-chain convex hull of 2D points, counterclockwise. */
std::vector<Vec> convex_hull(std::vector<std::array<double, 2>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto cross = [](const std::array<double, 2>& o,
                        const std::array<double, 2>& a,
                        const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  const std::size_t m = pts.size();
  std::vector<std::array<double, 2>> hull(2 * m);
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = m - 1, lower = k + 1; i > 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  std::vector<Vec> out;
  for (const auto& p : hull) {
    Vec v(2);
    v << p[0], p[1];
    out.push_back(v);
  }
  return out;
}

struct PolygonGeometry {
  double area = 0.0;
  double perimeter = 0.0;  // anisotropic: sum of |edge| H(-nu)
};

/** Exact area and anisotropic perimeter of a counterclockwise polygon. */
PolygonGeometry polygon_geometry(const AnisotropyNorm& norm,
                                 const std::vector<Vec>& verts) {
  PolygonGeometry g;
  const std::size_t m = verts.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& a = verts[i];
    const Vec& b = verts[(i + 1) % m];
    g.area += 0.5 * (a[0] * b[1] - b[0] * a[1]);
    const Vec tangent = b - a;
    const double len = tangent.norm();
    Vec nu(2);
    nu << tangent[1] / len, -tangent[0] / len;
    g.perimeter += len * norm.value(-nu);
  }
  return g;
}

double isoperimetric_ratio(const AnisotropyNorm& norm, double unit_volume,
                           const std::vector<Vec>& verts) {
  const PolygonGeometry g = polygon_geometry(norm, verts);
  return g.perimeter / (2.0 * std::sqrt(unit_volume * g.area));
}

}  // namespace

const std::vector<std::string>& known_anchors() {
  static const std::vector<std::string> anchors = {
      "solution-family",     "mass-quantization",  "gamma0-mass",
      "asymptotic-profile",  "asymptotic-gradient", "flux-balance",
      "pohozaev-general",    "pohozaev-wulff-split", "level-mass-profile",
      "level-radius-profile", "lambda-t0-roundtrip", "coarea-volume",
      "coarea-mass",         "level-rigidity",     "isoperimetric-ratio",
      "duality-pairing",     "wulff-volume",       "perimeter-volume",
      "upper-envelope",      "mass-lower-bound",   "pde-residual",
      "uniform-ellipticity"};
  return anchors;
}

bool is_known_anchor(const std::string& anchor) {
  const auto& a = known_anchors();
  return std::find(a.begin(), a.end(), anchor) != a.end();
}

CheckResult verify_mass_quantization(const LiouvilleSolution& u,
                                     const QuadratureConfig& cfg) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "mass-quantization";
  c.anchor = "mass-quantization";
  c.seed = cfg.seed;
  const double target = u.quantized_mass();
  const double m1d = mass_radial_1d(u, cfg);
  const McEstimate mc = monte_carlo_mass(u, cfg);
  c.computed = {m1d, mc.value};
  c.target = {target, target};
  const double leg_quad = std::abs(m1d - target) / target / 1e-7;
  const double leg_mc =
      std::abs(mc.value - target) / (3.0 * mc.std_error + 1e-12 * target);
  c.config_note =
      "legs normalized to budgets: radial quadrature 1e-7 relative, Monte "
      "Carlo three standard errors (std_error " +
      std::to_string(mc.std_error) + ", samples " +
      std::to_string(mc.samples) + ")";
  finalize_normalized(c, {leg_quad, leg_mc});
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_mass_lower_bound(const LiouvilleSolution& u,
                                    const QuadratureConfig& cfg) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "mass-lower-bound";
  c.anchor = "mass-lower-bound";
  c.seed = cfg.seed;
  c.tolerance = 1e-6;
  c.computed = {mass_radial_1d(u, cfg)};
  c.target = {u.quantized_mass()};
  c.config_note =
      "two-sided at the bound: the mass never falls below the quantized "
      "constant and the explicit family attains it";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_flux_balance(const LiouvilleSolution& u, double R,
                                const QuadratureConfig& cfg) {
  const Stopwatch sw;
  if (R < 1e-1 || R > 1e3)
    throw BadParameterError("flux balance radius must lie in [1e-1, 1e3]");
  CheckResult c;
  c.name = "flux-balance";
  c.anchor = "flux-balance";
  c.seed = cfg.seed;
  c.tolerance = 1e-6;

  const WulffShape ball(u.gauge_ptr(), u.center(), R, u.unit_volume());
  const QuadResult interior = wulff_interior(
      ball, [&u](const Vec& x) { return std::exp(u.value(x)); }, cfg);
  const FluxField field(u.gauge().base_ptr(), static_cast<double>(u.n()),
                        [&u](const Vec& x) { return u.gradient(x); });
  const BoundaryQuadrature boundary = boundary_quadrature(
      ball,
      [&field](const Vec& x, const Vec& nu) { return -field.flux(x).dot(nu); },
      1e-8);
  c.computed = {interior.value};
  c.target = {boundary.value};
  c.config_note = "radius " + std::to_string(R) + ", boundary nodes " +
                  std::to_string(boundary.nodes);
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_flux_tail(const LiouvilleSolution& u,
                             const QuadratureConfig& cfg) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "flux-tail";
  c.anchor = "flux-balance";
  c.seed = cfg.seed;
  c.tolerance = 1e-4;
  // the omitted tail depends on lambda R only, so the probe radius scales
  // with 1/lambda and the budget stays scale-free
  const double R = 1e3 / u.lambda();
  const WulffShape ball(u.gauge_ptr(), u.center(), R, u.unit_volume());
  const FluxField field(u.gauge().base_ptr(), static_cast<double>(u.n()),
                        [&u](const Vec& x) { return u.gradient(x); });
  const BoundaryQuadrature boundary = boundary_quadrature(
      ball,
      [&field](const Vec& x, const Vec& nu) { return -field.flux(x).dot(nu); },
      1e-8);
  c.computed = {boundary.value};
  c.target = {u.quantized_mass()};
  c.config_note = "boundary flux at Wulff radius " + std::to_string(R);
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_pohozaev(std::shared_ptr<const AnisotropyNorm> norm,
                            double p, const PohozaevFields& fields,
                            const WulffShape& domain, const Vec& y,
                            const QuadratureConfig& cfg, double tolerance,
                            const std::string& name) {
  const Stopwatch sw;
  if (!norm) throw BadParameterError("identity needs a norm");
  if (!(p > 1.0)) throw BadParameterError("identity exponent must exceed 1");
  if (!fields.grad_u) throw BadParameterError("identity needs a gradient field");
  CheckResult c;
  c.name = name;
  c.anchor = "pohozaev-general";
  c.seed = cfg.seed;
  c.tolerance = tolerance;

  const int n = norm->dim();
  const auto hp = [&](const Vec& g) {
    return g.norm() == 0.0 ? 0.0 : std::pow(norm->value(g), p);
  };
  const QuadResult interior = wulff_interior(
      domain,
      [&](const Vec& x) {
        const Vec g = fields.grad_u(x);
        double v = (p - n) / p * hp(g);
        if (fields.source) v -= fields.source(x) * (x - y).dot(g);
        return v;
      },
      cfg);
  const BoundaryQuadrature boundary = boundary_quadrature(
      domain,
      [&](const Vec& x, const Vec& nu) {
        const Vec g = fields.grad_u(x);
        const double h = norm->value(g);
        return std::pow(h, p - 1.0) * norm->gradient(g).dot(nu) *
                   (x - y).dot(g) -
               hp(g) / p * (x - y).dot(nu);
      },
      1e-8);
  c.computed = {interior.value};
  c.target = {boundary.value};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_pohozaev_linear(std::shared_ptr<const AnisotropyNorm> norm,
                                   double p, const Vec& a,
                                   const WulffShape& domain,
                                   const QuadratureConfig& cfg) {
  const Stopwatch sw;
  if (!norm) throw BadParameterError("identity needs a norm");
  CheckResult c;
  c.name = "pohozaev-linear";
  c.anchor = "pohozaev-general";
  c.seed = cfg.seed;
  c.tolerance = 1e-10;

  const int n = norm->dim();
  const double closed =
      (p - n) / p * std::pow(norm->value(a), p) * domain.volume();
  QuadratureConfig tight = cfg;
  tight.rtol = 1e-12;
  const QuadResult interior = wulff_interior(
      domain,
      [&](const Vec&) { return (p - n) / p * std::pow(norm->value(a), p); },
      tight);
  const Vec y = domain.center();
  const BoundaryQuadrature boundary = boundary_quadrature(
      domain,
      [&](const Vec& x, const Vec& nu) {
        const double h = norm->value(a);
        return std::pow(h, p - 1.0) * norm->gradient(a).dot(nu) *
                   (x - y).dot(a) -
               std::pow(h, p) / p * (x - y).dot(nu);
      },
      1e-12);
  c.computed = {interior.value, boundary.value};
  c.target = {closed, closed};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_pohozaev_wulff_split(const LiouvilleSolution& u,
                                        const std::vector<double>& t_grid) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "pohozaev-wulff-split";
  c.anchor = "pohozaev-wulff-split";
  c.tolerance = 1e-8;
  if (t_grid.empty()) throw BadParameterError("empty level grid");

  const int n = u.n();
  Vec w = Vec::Ones(n).normalized();
  for (const double t : t_grid) {
    if (t > u.t0() - 1e-2)
      throw BadParameterError("level too close to the solution peak");
    const double r = u.level_radius(t);
    const Vec xs = u.center() + r * w / u.gauge().reversed(w);
    const double hgrad = u.gauge().base().value(u.gradient(xs));
    const double rn = u.unit_volume() * std::pow(r, n);
    const double rhs =
        std::exp(t) * rn + (n - 1.0) / n * std::pow(hgrad, n) * rn;
    c.computed.push_back(u.level_mass(t));
    c.target.push_back(rhs);
  }
  c.config_note =
      "superlevel mass against the volume and gradient-energy split on " +
      std::to_string(t_grid.size()) + " levels";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_coarea(const LiouvilleSolution& u, double t, double delta,
                          const QuadratureConfig& cfg) {
  const Stopwatch sw;
  if (t > u.t0() - 1e-2)
    throw BadParameterError("level too close to the solution peak");
  if (!(delta > 0.0) || delta > 1e-3)
    throw BadParameterError("coarea step must lie in (0, 1e-3]");
  CheckResult c;
  c.name = "coarea";
  c.anchor = "coarea-volume";
  c.seed = cfg.seed;
  c.tolerance = 1e-5;

  const int n = u.n();
  const WulffShape level(u.gauge_ptr(), u.center(), u.level_radius(t),
                         u.unit_volume());
  const auto inv_grad = [&u](const Vec& x, const Vec&) {
    return 1.0 / u.gradient(x).norm();
  };
  const double b_inv = boundary_quadrature(level, inv_grad, 1e-9).value;
  const double b_flux =
      boundary_quadrature(level,
                          [&u, n](const Vec& x, const Vec&) {
                            const Vec g = u.gradient(x);
                            return std::pow(u.gauge().base().value(g),
                                            static_cast<double>(n)) /
                                   g.norm();
                          },
                          1e-9)
          .value;
  const auto level_volume = [&u, n](double s) {
    return u.unit_volume() * std::pow(u.level_radius(s), n);
  };
  const double d_vol =
      (level_volume(t - delta) - level_volume(t + delta)) / (2.0 * delta);
  const double d_mass =
      (u.level_mass(t - delta) - u.level_mass(t + delta)) / (2.0 * delta);
  c.computed = {d_vol, d_mass, b_flux};
  c.target = {b_inv, std::exp(t) * b_inv, u.level_mass(t)};
  c.config_note = "level derivative step " + std::to_string(delta);
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

AsymptoticCurves asymptotic_curves(const LiouvilleSolution& u,
                                   const std::vector<double>& radii,
                                   int sphere_samples) {
  if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()))
    throw BadParameterError("radius curve must ascend");
  if (sphere_samples < 1)
    throw BadParameterError("need at least one direction per radius");
  const int n = u.n();
  const CounterRng profile_rng(0x5eedf1, 301);
  const CounterRng gradient_rng(0x5eedf1, 302);
  AsymptoticCurves curves;
  curves.radius = radii;
  for (const double r : radii) {
    double profile = 0.0, weighted = 0.0;
    for (int k = 0; k < sphere_samples; ++k) {
      const Vec xe =
          u.center() + r * profile_rng.sphere(n, static_cast<std::uint64_t>(k));
      profile = std::max(
          profile, std::abs(u.value(xe) + u.gamma0() * std::log(u.rho(xe))));
      const Vec w = gradient_rng.sphere(n, static_cast<std::uint64_t>(k));
      const Vec xw = u.center() + r * w / u.gauge().reversed(w);
      const Vec g =
          u.gradient(xw) + u.gamma0() / u.rho(xw) *
                               u.gauge().reversed_gradient(xw - u.center());
      weighted = std::max(weighted, xw.norm() * g.norm());
    }
    curves.profile_sup.push_back(profile);
    curves.gradient_sup.push_back(weighted);
  }
  return curves;
}

CheckResult verify_asymptotic_profile(const LiouvilleSolution& u,
                                      const std::vector<double>& radii,
                                      int sphere_samples) {
  const Stopwatch sw;
  if (radii.size() < 4 || !std::is_sorted(radii.begin(), radii.end()) ||
      radii.front() < 1.0 || radii.back() > 1e6)
    throw BadParameterError("radius curve must ascend within [1, 1e6]");
  CheckResult c;
  c.name = "asymptotic-profile";
  c.anchor = "asymptotic-profile";
  c.tolerance = 1e-3;

  const AsymptoticCurves curves = asymptotic_curves(u, radii, sphere_samples);
  double last_decade_variation = 0.0;
  for (std::size_t j = 0; j + 1 < radii.size(); ++j) {
    if (radii[j] >= radii.back() / 10.0 - 1e-12)
      last_decade_variation =
          std::max(last_decade_variation,
                   std::abs(curves.profile_sup[j + 1] - curves.profile_sup[j]));
  }
  c.computed = {last_decade_variation};
  c.target = {0.0};
  c.config_note = "final sampled sup " +
                  std::to_string(curves.profile_sup.back()) + " over " +
                  std::to_string(sphere_samples) + " directions per radius";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_asymptotic_gradient(const LiouvilleSolution& u,
                                       const std::vector<double>& radii,
                                       int sphere_samples) {
  const Stopwatch sw;
  if (radii.size() < 2 || !std::is_sorted(radii.begin(), radii.end()))
    throw BadParameterError("radius curve must ascend");
  CheckResult c;
  c.name = "asymptotic-gradient";
  c.anchor = "asymptotic-gradient";
  c.tolerance = 1e-3;

  const AsymptoticCurves curves = asymptotic_curves(u, radii, sphere_samples);
  double worst_increase = 0.0;
  for (std::size_t j = 0; j + 1 < curves.gradient_sup.size(); ++j)
    worst_increase = std::max(
        worst_increase, curves.gradient_sup[j + 1] - curves.gradient_sup[j]);
  c.computed = {curves.gradient_sup.back(), worst_increase};
  c.target = {0.0, 0.0};
  c.config_note = "weighted gradient sup sampled on Wulff spheres, final "
                  "radius " +
                  std::to_string(radii.back());
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_gamma0_recovery(const LiouvilleSolution& u,
                                   const QuadratureConfig& cfg) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "gamma0-recovery";
  c.anchor = "gamma0-mass";
  c.seed = cfg.seed;
  c.tolerance = 1e-6;
  const double mass = mass_radial_1d(u, cfg);
  c.computed = {
      LiouvilleSolution::gamma0_from_mass(mass, u.unit_volume(), u.n())};
  c.target = {u.gamma0()};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_upper_envelope(const LiouvilleSolution& u,
                                  int sphere_samples) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "upper-envelope";
  c.anchor = "upper-envelope";
  c.tolerance = 1e-9;

  const int n = u.n();
  const CounterRng rng(0x5eedf1, 303);
  double near_sup = -1e300, far_sup = -1e300;
  for (int decade = 0; decade <= 6; ++decade) {
    double sup = -1e300;
    for (int k = 0; k < sphere_samples; ++k) {
      const double r =
          std::pow(10.0, decade + rng.u01(static_cast<std::uint64_t>(
                                       decade * 1024 + k)));
      const Vec x = u.center() + r * rng.sphere(n, static_cast<std::uint64_t>(k));
      sup = std::max(sup, u.value(x) + n * std::log(u.rho(x)));
    }
    (decade <= 3 ? near_sup : far_sup) =
        std::max(decade <= 3 ? near_sup : far_sup, sup);
  }
  c.computed = {std::max(0.0, far_sup - near_sup)};
  c.target = {0.0};
  c.config_note = "sampled envelope constant " + std::to_string(near_sup) +
                  "; far decades must not exceed the near-field sup";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_level_rigidity(const LiouvilleSolution& u,
                                  const std::vector<double>& t_grid) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "level-rigidity";
  c.anchor = "level-rigidity";
  c.tolerance = 1e-9;
  if (t_grid.empty()) throw BadParameterError("empty level grid");

  const int n = u.n();
  const int rays = 64;
  double radius_dev = 0.0, gauge_spread = 0.0, center_dev = 0.0;
  for (const double t : t_grid) {
    if (t >= u.t0()) throw BadParameterError("level above the solution peak");
    const double r_closed = u.level_radius(t);
    std::vector<Vec> pts;
    double hmin = 1e300, hmax = -1e300, hsum = 0.0;
    Vec centroid = Vec::Zero(n);
    for (const Vec& dir : sphere_grid(n, rays)) {
      const double s = ray_level_root(
          [&](double step) { return u.value(u.center() + step * dir); }, t);
      const Vec x = u.center() + s * dir;
      pts.push_back(x);
      centroid += x / rays;
      radius_dev = std::max(
          radius_dev, std::abs(u.rho(x) / r_closed - 1.0));
      const double h = u.gauge().base().value(u.gradient(x));
      hmin = std::min(hmin, h);
      hmax = std::max(hmax, h);
      hsum += h;
    }
    gauge_spread = std::max(gauge_spread, (hmax - hmin) / (hsum / rays));
    Vec fitted = centroid;
    double fitted_r = r_closed;
    fit_wulff_center(u.gauge(), pts, fitted, fitted_r);
    center_dev = std::max(
        center_dev, (fitted - u.center()).norm() / (1.0 + r_closed));
  }
  c.computed = {radius_dev, gauge_spread, center_dev};
  c.target = {0.0, 0.0, 0.0};
  c.config_note = std::to_string(rays) + " rays on " +
                  std::to_string(t_grid.size()) +
                  " levels: radius deviation, gradient-gauge spread, fitted "
                  "center drift";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_rigidity_negative_control(const LiouvilleSolution& u,
                                             double amplitude) {
  const Stopwatch sw;
  if (!(amplitude > 0.0)) throw BadParameterError("amplitude must be positive");
  CheckResult c;
  c.name = "rigidity-negative-control";
  c.anchor = "level-rigidity";
  c.tolerance = 0.5;

  const int n = u.n();
  const auto value = [&](const Vec& x) {
    return u.value(x) + amplitude * std::sin(x[0]);
  };
  const auto gradient = [&](const Vec& x) {
    Vec g = u.gradient(x);
    g[0] += amplitude * std::cos(x[0]);
    return g;
  };
  const double t = u.t0() - 2.0;
  double hmin = 1e300, hmax = -1e300, hsum = 0.0;
  const int rays = 64;
  for (const Vec& dir : sphere_grid(n, rays)) {
    const double s = ray_level_root(
        [&](double step) { return value(u.center() + step * dir); }, t);
    const double h = u.gauge().base().value(gradient(u.center() + s * dir));
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
    hsum += h;
  }
  const double spread = (hmax - hmin) / (hsum / rays);
  const bool fired = spread > 1e-4;
  c.computed = {fired ? 1.0 : 0.0};
  c.target = {1.0};
  c.config_note = "perturbation amplitude " + std::to_string(amplitude) +
                  " produced gradient-gauge spread " + std::to_string(spread) +
                  "; the check passes when the detector fires above 1e-4";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_lambda_roundtrip(const LiouvilleSolution& u) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "lambda-t0-roundtrip";
  c.anchor = "lambda-t0-roundtrip";
  c.tolerance = 1e-12;
  c.computed = {LiouvilleSolution::lambda_from_t0(u.n(), u.t0())};
  c.target = {u.lambda()};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_level_mass_profile(const LiouvilleSolution& u, double t,
                                      const QuadratureConfig& cfg) {
  const Stopwatch sw;
  if (t > u.t0() - 1e-2)
    throw BadParameterError("level too close to the solution peak");
  CheckResult c;
  c.name = "level-mass-profile";
  c.anchor = "level-mass-profile";
  c.seed = cfg.seed;
  c.tolerance = 1e-7;
  // radial quadrature in the log variable, truncated at the level radius;
  // independent of the closed superlevel-mass formula in every dimension
  const int n = u.n();
  const double log_r = std::log(u.level_radius(t));
  const QuadResult q = radial_improper(
      [&u, n, log_r](double s) {
        const double lr = log_r - s;
        return std::exp(u.value_radial(std::exp(lr)) + n * lr);
      },
      cfg);
  c.computed = {n * u.unit_volume() * q.value};
  c.target = {u.level_mass(t)};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_isoperimetric_polygons(
    std::shared_ptr<const AnisotropyNorm> norm, int count,
    std::uint64_t seed) {
  const Stopwatch sw;
  if (!norm || norm->dim() != 2)
    throw BadParameterError("polygon ratio check needs a 2D norm");
  if (count < 1) throw BadParameterError("polygon count must be positive");
  CheckResult c;
  c.name = "isoperimetric-ratio";
  c.anchor = "isoperimetric-ratio";
  c.seed = seed;
  c.tolerance = 1e-6;

  const double vol = wulff_unit_volume(DualGauge(norm));
  const CounterRng rng(seed, 401);
  double min_q = 1e300;
  for (int j = 0; j < count; ++j) {
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 24; ++i) {
      const std::uint64_t idx = static_cast<std::uint64_t>(j) * 64 + i;
      const double r = 0.5 + rng.u01(2 * idx);
      const double th = 2.0 * M_PI * rng.u01(2 * idx + 1);
      pts.push_back({r * std::cos(th), r * std::sin(th)});
    }
    min_q = std::min(min_q, isoperimetric_ratio(*norm, vol, convex_hull(pts)));
  }
  c.computed = {std::max(0.0, 1.0 - min_q)};
  c.target = {0.0};
  c.config_note = "one-sided deficit below 1 over " + std::to_string(count) +
                  " random convex polygons; smallest margin above 1 was " +
                  std::to_string(min_q - 1.0);
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_isoperimetric_wulff(
    std::shared_ptr<const AnisotropyNorm> norm, const QuadratureConfig& cfg) {
  const Stopwatch sw;
  if (!norm) throw BadParameterError("identity needs a norm");
  CheckResult c;
  c.name = "isoperimetric-wulff";
  c.anchor = "isoperimetric-ratio";
  c.seed = cfg.seed;
  c.tolerance = 1e-4;
  const auto gauge = std::make_shared<const DualGauge>(norm);
  const int n = norm->dim();
  const WulffShape shape(gauge, Vec::Zero(n), 1.0);
  const double q =
      anisotropic_perimeter(shape, 1e-8) / (n * shape.volume());
  c.computed = {q};
  c.target = {1.0};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_isoperimetric_square() {
  const Stopwatch sw;
  CheckResult c;
  c.name = "isoperimetric-square";
  c.anchor = "isoperimetric-ratio";
  c.tolerance = 1e-6;
  const auto norm =
      std::make_shared<const AnisotropyNorm>(AnisotropyNorm::euclidean(2));
  std::vector<Vec> square;
  for (const auto& p :
       {std::array<double, 2>{0, 0}, std::array<double, 2>{1, 0},
        std::array<double, 2>{1, 1}, std::array<double, 2>{0, 1}}) {
    Vec v(2);
    v << p[0], p[1];
    square.push_back(v);
  }
  const double vol = wulff_unit_volume(DualGauge(norm));
  c.computed = {isoperimetric_ratio(*norm, vol, square)};
  c.target = {2.0 / std::sqrt(M_PI)};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_duality_pairing(std::shared_ptr<const AnisotropyNorm> norm,
                                   int samples, std::uint64_t seed) {
  const Stopwatch sw;
  if (!norm) throw BadParameterError("identity needs a norm");
  CheckResult c;
  c.name = "duality-pairing";
  c.anchor = "duality-pairing";
  c.seed = seed;
  c.tolerance = 1e-6;

  const int n = norm->dim();
  const DualGauge gauge(norm);
  const CounterRng rng(seed, 402);
  const bool off_axes = axis_sensitive(*norm);
  double dev = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec x =
        (0.5 + rng.u01(9000 + k)) *
        sample_direction(rng, n, static_cast<std::uint64_t>(k), off_axes);
    dev = std::max(dev, std::abs(gauge.value(norm->gradient(x)) - 1.0));
    dev = std::max(dev, std::abs(norm->value(gauge.gradient(x)) - 1.0));
  }
  c.computed = {dev};
  c.target = {0.0};
  c.config_note = "worst deviation of the mutual gradient pairings over " +
                  std::to_string(samples) + " directions";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_dual_support_scan(
    std::shared_ptr<const AnisotropyNorm> norm, int samples,
    std::uint64_t seed) {
  const Stopwatch sw;
  if (!norm || norm->dim() != 2)
    throw BadParameterError("support scan needs a 2D norm");
  CheckResult c;
  c.name = "dual-support-scan";
  c.anchor = "duality-pairing";
  c.seed = seed;
  c.tolerance = 1e-8;

  const DualGauge gauge(norm);
  const CounterRng rng(seed, 403);
  const int grid = 1 << 20;
  for (int k = 0; k < samples; ++k) {
    const Vec x = 2.0 * rng.sphere(2, static_cast<std::uint64_t>(k));
    double brute = -1e300;
    for (int i = 0; i < grid; ++i) {
      const double th = 2.0 * M_PI * i / grid;
      Vec w(2);
      w << std::cos(th), std::sin(th);
      brute = std::max(brute, x.dot(w) / norm->value(w));
    }
    c.computed.push_back(gauge.value(x));
    c.target.push_back(brute);
  }
  c.config_note = "dense support scan with " + std::to_string(grid) +
                  " directions per point";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_wulff_volume(std::shared_ptr<const AnisotropyNorm> norm,
                                const QuadratureConfig& cfg) {
  const Stopwatch sw;
  if (!norm) throw BadParameterError("identity needs a norm");
  CheckResult c;
  c.name = "wulff-volume";
  c.anchor = "wulff-volume";
  c.seed = cfg.seed;
  const DualGauge gauge(norm);
  const double rule = wulff_unit_volume(gauge);
  const McEstimate mc = wulff_unit_volume_mc(gauge, cfg.mc_samples, cfg.seed);
  c.computed = {rule};
  c.target = {mc.value};
  const double leg =
      std::abs(rule - mc.value) / (3.0 * mc.std_error + 1e-12 * rule);
  c.config_note =
      "quadrature rule against rejection sampling, error in units of three "
      "standard errors (std_error " +
      std::to_string(mc.std_error) + ")";
  finalize_normalized(c, {leg});
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_perimeter_volume(std::shared_ptr<const AnisotropyNorm> norm,
                                    const QuadratureConfig& cfg) {
  const Stopwatch sw;
  if (!norm) throw BadParameterError("identity needs a norm");
  CheckResult c;
  c.name = "perimeter-volume";
  c.anchor = "perimeter-volume";
  c.seed = cfg.seed;
  c.tolerance = 1e-6;
  const auto gauge = std::make_shared<const DualGauge>(norm);
  const int n = norm->dim();
  const WulffShape shape(gauge, Vec::Zero(n), 1.0);
  c.computed = {anisotropic_perimeter(shape, 1e-8)};
  c.target = {n * shape.volume()};
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_uniform_ellipticity(
    std::shared_ptr<const AnisotropyNorm> norm) {
  const Stopwatch sw;
  if (!norm) throw BadParameterError("identity needs a norm");
  CheckResult c;
  c.name = "uniform-ellipticity";
  c.anchor = "uniform-ellipticity";
  c.tolerance = 0.5;
  const EllipticityScan scan = norm->check_uniform_ellipticity(200);
  c.computed = {scan.uniformly_elliptic ? 1.0 : 0.0};
  c.target = {1.0};
  c.config_note =
      "sampled eigenvalue range of the squared-gauge Hessian: [" +
      std::to_string(scan.lambda_min) + ", " + std::to_string(scan.lambda_max) +
      "]";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

namespace {

struct ResidualGrid {
  double worst = 0.0;
  std::vector<double> orders;
};

ResidualGrid residual_grid(const LiouvilleSolution& u, int samples,
                           std::uint64_t seed) {
  const int n = u.n();
  const CounterRng rng(seed, 501);
  const bool off_axes = axis_sensitive(u.gauge().base());
  ResidualGrid out;
  for (int k = 0; k < samples; ++k) {
    const double r =
        std::pow(10.0, -1.0 + 3.0 * rng.u01(static_cast<std::uint64_t>(k)));
    const Vec w =
        sample_direction(rng, n, static_cast<std::uint64_t>(k) + 4096,
                         off_axes);
    const Vec x = u.center() + r * w / u.gauge().reversed(w);
    const ResidualSample s = pde_residual(u, x);
    out.worst = std::max(out.worst, s.residual_rel);
    if (std::isfinite(s.order)) out.orders.push_back(s.order);
  }
  return out;
}

}  // namespace

CheckResult verify_pde_residual(const LiouvilleSolution& u, int samples,
                                std::uint64_t seed) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "pde-residual";
  c.anchor = "pde-residual";
  c.seed = seed;
  c.tolerance = 1e-4;
  c.computed = {residual_grid(u, samples, seed).worst};
  c.target = {0.0};
  c.config_note = "worst relative residual after Richardson over " +
                  std::to_string(samples) + " Wulff radii in [0.1, 100]";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

CheckResult verify_pde_residual_order(const LiouvilleSolution& u, int samples,
                                      std::uint64_t seed) {
  const Stopwatch sw;
  CheckResult c;
  c.name = "pde-residual-order";
  c.anchor = "pde-residual";
  c.seed = seed;
  c.tolerance = 0.1;
  c.computed = {median(residual_grid(u, samples, seed).orders)};
  c.target = {2.0};
  c.config_note =
      "median empirical stencil order; the median is robust to far samples "
      "whose raw differences sit at roundoff";
  finalize(c);
  c.wall_ms = sw.ms();
  return c;
}

namespace {

std::size_t worker_cap(std::size_t tasks) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw BadParameterError("FL_THREADS must be a positive integer");
    workers = std::min(workers, static_cast<std::size_t>(v));
  }
  return std::min(workers, std::max<std::size_t>(tasks, 1));
}

std::vector<CheckResult> run_check_tasks(
    const std::vector<std::function<CheckResult()>>& tasks) {
  std::vector<CheckResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        results[i] = tasks[i]();
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < worker_cap(tasks.size()); ++w)
    pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace

bool VerificationReport::all_passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> suites = {
      "quantization", "residual",      "asymptotics", "pohozaev",
      "rigidity",     "isoperimetric", "geometry",    "ellipticity"};
  return suites;
}

VerificationReport run_suites(const SuiteRequest& request) {
  if (!request.norm) throw BadParameterError("suite request needs a norm");
  if (request.norm->dim() != request.n)
    throw BadParameterError("suite request dimension " +
                            std::to_string(request.n) +
                            " does not match the norm's " +
                            std::to_string(request.norm->dim()));
  std::vector<std::string> suites = request.suites;
  if (suites.empty()) suites = known_suites();
  for (const auto& s : suites) {
    const auto& known = known_suites();
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw BadParameterError("unknown suite: " + s);
  }
  const auto enabled = [&suites](const char* name) {
    return std::find(suites.begin(), suites.end(), name) != suites.end();
  };

  const int n = request.n;
  if (request.pohozaev_y.size() != 0 && request.pohozaev_y.size() != n)
    throw BadParameterError("pohozaev pivot needs " + std::to_string(n) +
                            " entries");
  Vec center = request.center;
  if (center.size() == 0) center = Vec::Zero(n);
  const auto gauge = std::make_shared<const DualGauge>(request.norm);
  const LiouvilleSolution u(n, request.lambda, center, gauge);
  const QuadratureConfig& cfg = request.quad;
  const bool smooth_3d =
      n == 2 || (n == 3 && !axis_sensitive(*request.norm));

  VerificationReport report;
  report.norm_spec = std::string(family_name(request.norm->family())) +
                     " dim=" + std::to_string(n);
  {
    std::string ctr = "[";
    for (int i = 0; i < center.size(); ++i)
      ctr += (i ? ", " : "") + std::to_string(center[i]);
    report.solution_spec = "n=" + std::to_string(n) +
                           " lambda=" + std::to_string(request.lambda) +
                           " center=" + ctr + "]";
  }
  report.version = kVersion;

  std::vector<std::function<CheckResult()>> tasks;
  if (enabled("quantization")) {
    tasks.push_back([&] { return verify_mass_quantization(u, cfg); });
    tasks.push_back([&] { return verify_mass_lower_bound(u, cfg); });
  }
  if (enabled("residual")) {
    tasks.push_back([&] { return verify_pde_residual(u, 100, cfg.seed); });
    tasks.push_back(
        [&] { return verify_pde_residual_order(u, 100, cfg.seed); });
  }
  if (enabled("asymptotics")) {
    tasks.push_back([&] { return verify_gamma0_recovery(u, cfg); });
    tasks.push_back([&] {
      return verify_asymptotic_profile(u, {1e0, 1e1, 1e2, 1e3, 1e4, 1e5}, 64);
    });
    tasks.push_back([&] {
      return verify_asymptotic_gradient(u, {1e0, 1e1, 1e2, 1e3}, 64);
    });
    tasks.push_back([&] { return verify_upper_envelope(u, 64); });
  }
  if (enabled("pohozaev")) {
    tasks.push_back([&] {
      return verify_pohozaev_wulff_split(
          u, {u.t0() - 0.01, u.t0() - 0.1, u.t0() - 1.0, u.t0() - 5.0});
    });
    if (smooth_3d) {
      tasks.push_back([&, n] {
        Vec a = Vec::Zero(n);
        a[0] = 0.8;
        a[n - 1] = 0.6;
        const WulffShape unit_ball(gauge, center, 1.0, u.unit_volume());
        return verify_pohozaev_linear(request.norm, n + 1.0, a, unit_ball,
                                      cfg);
      });
      const auto liouville_pohozaev = [&, n](const Vec& y,
                                             const std::string& name) {
        PohozaevFields fields;
        fields.grad_u = [&u](const Vec& x) { return u.gradient(x); };
        fields.source = [&u](const Vec& x) { return std::exp(u.value(x)); };
        const WulffShape level(gauge, center, u.level_radius(u.t0() - 1.0),
                               u.unit_volume());
        return verify_pohozaev(request.norm, n, fields, level, y, cfg, 1e-5,
                               name);
      };
      tasks.push_back([liouville_pohozaev, &center] {
        return liouville_pohozaev(center, "pohozaev-centered");
      });
      tasks.push_back([liouville_pohozaev, &center, &request, n] {
        Vec y = request.pohozaev_y;
        if (y.size() == 0) {
          y = center;
          y[0] += 0.3;
          y[n - 1] -= 0.1;
        }
        return liouville_pohozaev(y, "pohozaev-offset");
      });
      tasks.push_back([&] {
        return verify_flux_balance(u, u.level_radius(u.t0() - 1.0), cfg);
      });
      tasks.push_back([&] { return verify_flux_tail(u, cfg); });
      tasks.push_back([&] { return verify_coarea(u, u.t0() - 1.0, 1e-3, cfg); });
    }
  }
  if (enabled("rigidity")) {
    tasks.push_back([&] {
      return verify_level_rigidity(
          u, {u.t0() - 0.5, u.t0() - 2.0, u.t0() - 5.0, u.t0() - 8.0});
    });
    tasks.push_back([&] { return verify_rigidity_negative_control(u, 0.01); });
    tasks.push_back([&] { return verify_lambda_roundtrip(u); });
    tasks.push_back(
        [&] { return verify_level_mass_profile(u, u.t0() - 2.0, cfg); });
  }
  if (enabled("isoperimetric")) {
    if (n == 2) {
      tasks.push_back([&] {
        return verify_isoperimetric_polygons(request.norm, 20, cfg.seed);
      });
      tasks.push_back([] { return verify_isoperimetric_square(); });
    }
    if (smooth_3d)
      tasks.push_back(
          [&] { return verify_isoperimetric_wulff(request.norm, cfg); });
  }
  if (enabled("geometry")) {
    tasks.push_back(
        [&] { return verify_duality_pairing(request.norm, 1000, cfg.seed); });
    if (n == 2)
      tasks.push_back(
          [&] { return verify_dual_support_scan(request.norm, 16, cfg.seed); });
    tasks.push_back([&] { return verify_wulff_volume(request.norm, cfg); });
    if (smooth_3d)
      tasks.push_back(
          [&] { return verify_perimeter_volume(request.norm, cfg); });
  }
  if (enabled("ellipticity"))
    tasks.push_back([&] { return verify_uniform_ellipticity(request.norm); });

  // Checks own disjoint RNG streams and touch no shared mutable state, so a
  // worker pool changes wall_ms only.  The name sort fixes the report order
  // regardless of completion order.
  report.checks = run_check_tasks(tasks);
  std::sort(report.checks.begin(), report.checks.end(),
            [](const CheckResult& a, const CheckResult& b) {
              return a.name < b.name;
            });
  return report;
}

}  // namespace fl
